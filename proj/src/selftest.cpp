#include "graphon/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graphon/cut_metric.hpp"
#include "graphon/discretization.hpp"
#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"
#include "graphon/io.hpp"
#include "graphon/minimizer.hpp"
#include "graphon/rng.hpp"
#include "graphon/sampling.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon {

namespace {

void expect(bool ok, const std::string& what) {
    if (!ok) fail_runtime(what);
}

Eigen::VectorXd rand_simplex(Eigen::Index s, CounterRng& rng) {
    Eigen::VectorXd w(s);
    for (Eigen::Index i = 0; i < s; ++i) w[i] = 0.05 + rng.next_double();
    return w / w.sum();
}

WeightSpacePtr rand_space(Eigen::Index s, CounterRng& rng) {
    Eigen::VectorXd pts(s);
    pts[0] = 0.0;
    for (Eigen::Index i = 1; i < s; ++i) pts[i] = pts[i - 1] + 0.2 + rng.next_double();
    return WeightSpace::line(pts, 0);
}

FiniteMeasure rand_measure(const WeightSpacePtr& space, CounterRng& rng) {
    return FiniteMeasure(space, rand_simplex(space->size(), rng));
}

StepGraphon rand_graphon(const WeightSpacePtr& space, int n, CounterRng& rng) {
    Eigen::MatrixXd cells(static_cast<Eigen::Index>(n) * n, space->size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Eigen::VectorXd w = rand_simplex(space->size(), rng);
            cells.row(static_cast<Eigen::Index>(i) * n + j) = w.transpose();
            cells.row(static_cast<Eigen::Index>(j) * n + i) = w.transpose();
        }
    return StepGraphon(space, n, std::move(cells));
}

std::vector<int> rand_permutation(int n, CounterRng& rng) {
    std::vector<int> sigma(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(sigma[static_cast<std::size_t>(i)],
                  sigma[static_cast<std::size_t>(rng.next_u64() % (i + 1))]);
    return sigma;
}

// Direct Prokhorov evaluation from the definition: bisect on epsilon with the
// all-subsets feasibility test. Independent of the transportation solver.
double lp_by_subsets(const FiniteMeasure& a, const FiniteMeasure& b) {
    const auto& space = *a.space();
    const Eigen::Index s = space.size();
    const double slack = std::abs(a.weights().sum() - b.weights().sum());
    auto feasible = [&](double eps) {
        for (std::uint32_t mask = 1; mask < (1u << s); ++mask) {
            double ma = 0.0, mb = 0.0, ea = 0.0, eb = 0.0;
            for (Eigen::Index i = 0; i < s; ++i) {
                bool inside = false;
                for (Eigen::Index j = 0; j < s; ++j)
                    if ((mask >> j) & 1 && space.dist(i, j) <= eps) inside = true;
                if ((mask >> i) & 1) {
                    ma += a.weights()[i];
                    mb += b.weights()[i];
                }
                if (inside) {
                    ea += a.weights()[i];
                    eb += b.weights()[i];
                }
            }
            if (ma > eb + eps + 1e-15 || mb > ea + eps + 1e-15) return false;
        }
        return true;
    };
    double lo = 0.0, hi = space.diameter() + 1.0;
    if (feasible(slack)) return slack;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

double binomial_tail_log(int trials, double p, int from) {
    const long double lp = std::log(static_cast<long double>(p));
    const long double lq = std::log(1.0L - static_cast<long double>(p));
    long double best = -1e30L;
    std::vector<long double> terms;
    for (int k = from; k <= trials; ++k) {
        long double t = std::lgamma(trials + 1.0L) - std::lgamma(k + 1.0L) -
                        std::lgamma(trials - k + 1.0L) + k * lp + (trials - k) * lq;
        terms.push_back(t);
        best = std::max(best, t);
    }
    long double acc = 0.0L;
    for (long double t : terms) acc += std::exp(t - best);
    return static_cast<double>(best + std::log(acc));
}

// KL of the full product law against the null product by explicit enumeration
// of every graph; exponential in the edge count.
double product_kl_by_enumeration(const StepGraphon& w, const FiniteMeasure& nu) {
    const int n = w.n();
    const Eigen::Index s = nu.space()->size();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    const std::size_t e = edges.size();
    std::vector<Eigen::Index> assign(e, 0);
    double acc = 0.0;
    while (true) {
        double pw = 1.0, pn = 1.0;
        for (std::size_t k = 0; k < e; ++k) {
            pw *= w.cell(edges[k].first, edges[k].second)[assign[k]];
            pn *= nu.weights()[assign[k]];
        }
        if (pw > 0.0) acc += pw * std::log(pw / pn);
        std::size_t pos = 0;
        while (pos < e && ++assign[pos] == s) assign[pos++] = 0;
        if (pos == e) break;
    }
    return acc;
}

Eigen::VectorXd binary_f() {
    Eigen::VectorXd f(2);
    f << 0.0, 1.0;
    return f;
}

}  // namespace

int run_selftest(std::ostream& out) {
    int failed = 0, total = 0;
    auto check = [&](const char* name, auto&& fn) {
        ++total;
        try {
            fn();
            out << "ok   " << name << "\n";
        } catch (const std::exception& e) {
            ++failed;
            out << "FAIL " << name << ": " << e.what() << "\n";
        }
    };

    check("measure: prokhorov metric axioms", [] {
        CounterRng rng(11, 0);
        for (int rep = 0; rep < 12; ++rep) {
            auto space = rand_space(2 + static_cast<Eigen::Index>(rng.next_u64() % 5), rng);
            auto a = rand_measure(space, rng);
            auto b = rand_measure(space, rng);
            auto c = rand_measure(space, rng);
            const double ab = lp_distance(a, b), ba = lp_distance(b, a);
            expect(ab == ba, "symmetry");
            expect(lp_distance(a, a) == 0.0, "identity");
            expect(ab <= lp_distance(a, c) + lp_distance(c, b) + 1e-9, "triangle");
        }
    });

    check("measure: prokhorov equals all-subsets definition", [] {
        CounterRng rng(12, 0);
        for (int rep = 0; rep < 12; ++rep) {
            auto space = rand_space(2 + static_cast<Eigen::Index>(rng.next_u64() % 5), rng);
            auto a = rand_measure(space, rng);
            auto b = rand_measure(space, rng);
            expect(std::abs(lp_distance(a, b) - lp_by_subsets(a, b)) <= 1e-9, "oracle gap");
        }
    });

    check("measure: divergence convexity and positivity", [] {
        CounterRng rng(13, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 10; ++rep) {
            auto w1 = rand_measure(space, rng);
            auto w2 = rand_measure(space, rng);
            auto nu = rand_measure(space, rng);
            expect(kl_divergence(w1, nu) >= 0.0, "positivity");
            for (double lam : {0.25, 0.5, 0.75}) {
                FiniteMeasure mix(space, lam * w1.weights() + (1 - lam) * w2.weights());
                expect(kl_divergence(mix, nu) <= lam * kl_divergence(w1, nu) +
                                                     (1 - lam) * kl_divergence(w2, nu) + 1e-10,
                       "convexity");
            }
        }
    });

    check("measure: legendre gap and optimal tilt", [] {
        CounterRng rng(14, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 10; ++rep) {
            auto omega = rand_measure(space, rng);
            auto nu = rand_measure(space, rng);
            Eigen::VectorXd f(3);
            for (int i = 0; i < 3; ++i) f[i] = 2.0 * rng.next_double() - 1.0;
            const double pair = omega.weights().dot(f) - log_mgf(f, nu);
            expect(pair <= kl_divergence(omega, nu) + 1e-10, "legendre bound");
            Eigen::VectorXd opt =
                (omega.weights().array() / nu.weights().array()).log().matrix();
            const double at = omega.weights().dot(opt) - log_mgf(opt, nu);
            expect(std::abs(at - kl_divergence(omega, nu)) <= 1e-8, "legendre equality");
        }
    });

    check("measure: log-mgf is 1-lipschitz in the sup norm", [] {
        CounterRng rng(15, 0);
        auto space = rand_space(4, rng);
        for (int rep = 0; rep < 10; ++rep) {
            auto nu = rand_measure(space, rng);
            Eigen::VectorXd f(4), g(4);
            for (int i = 0; i < 4; ++i) {
                f[i] = 3.0 * rng.next_double();
                g[i] = 3.0 * rng.next_double();
            }
            expect(std::abs(log_mgf(f, nu) - log_mgf(g, nu)) <=
                       (f - g).cwiseAbs().maxCoeff() + 1e-12,
                   "lipschitz");
        }
    });

    check("graphon: stepping is a projection", [] {
        CounterRng rng(21, 0);
        auto space = rand_space(3, rng);
        auto w = rand_graphon(space, 6, rng);
        std::vector<std::vector<int>> classes{{0, 2}, {1, 4, 5}, {3}};
        auto once = step(w, classes);
        expect((step(once, classes).cells() - once.cells()).cwiseAbs().maxCoeff() <= 1e-14,
               "idempotence");
    });

    check("graphon: coarsening tower property", [] {
        CounterRng rng(22, 0);
        auto space = rand_space(2, rng);
        auto w = rand_graphon(space, 8, rng);
        std::vector<std::vector<int>> fine{{0, 1}, {2, 3}, {4, 5}, {6, 7}};
        std::vector<std::vector<int>> coarse{{0, 1, 2, 3}, {4, 5, 6, 7}};
        auto via = step(step(w, fine), coarse);
        auto direct = step(w, coarse);
        expect((via.cells() - direct.cells()).cwiseAbs().maxCoeff() <= 1e-14, "tower");
    });

    check("graphon: approximants converge in cut distance", [] {
        CounterRng rng(23, 0);
        auto space = rand_space(2, rng);
        auto w = rand_graphon(space, 8, rng);
        double prev = 1e9;
        for (int k : {1, 2, 4, 8}) {
            const double d = d_cut(refine(approximant(w, k), 8 / k), w).value;
            expect(d <= prev + 1e-12, "monotone decrease");
            prev = d;
        }
        expect(prev == 0.0, "exact at full resolution");
    });

    check("graphon: aggregate bilinear, relabel keeps symmetry", [] {
        CounterRng rng(24, 0);
        auto space = rand_space(3, rng);
        auto w = rand_graphon(space, 5, rng);
        Eigen::VectorXd s1(5), s2(5), t(5);
        for (int i = 0; i < 5; ++i) {
            s1[i] = rng.next_double();
            s2[i] = rng.next_double();
            t[i] = rng.next_double();
        }
        const double al = 0.3, be = 0.7;
        Eigen::VectorXd lhs = aggregate(w, (al * s1 + be * s2).eval(), t).weights();
        Eigen::VectorXd rhs =
            al * aggregate(w, s1, t).weights() + be * aggregate(w, s2, t).weights();
        expect((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12, "bilinearity");
        expect(relabel(w, rand_permutation(5, rng)).symmetric(), "relabel symmetry");
    });

    check("cut: unlabeled distance axioms on exact instances", [] {
        CounterRng rng(31, 0);
        auto space = rand_space(2, rng);
        for (int rep = 0; rep < 4; ++rep) {
            auto u = rand_graphon(space, 4, rng);
            auto w = rand_graphon(space, 4, rng);
            auto v = rand_graphon(space, 4, rng);
            const double uw = delta_cut(u, w).value;
            expect(std::abs(uw - delta_cut(w, u).value) <= 1e-10, "symmetry");
            expect(delta_cut(u, u).value == 0.0, "identity");
            expect(uw <= delta_cut(u, v).value + delta_cut(v, w).value + 1e-9, "triangle");
        }
    });

    check("cut: labeled distance is relabel invariant", [] {
        CounterRng rng(32, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 5; ++rep) {
            auto u = rand_graphon(space, 5, rng);
            auto w = rand_graphon(space, 5, rng);
            auto sigma = rand_permutation(5, rng);
            expect(std::abs(d_cut(relabel(u, sigma), relabel(w, sigma)).value -
                            d_cut(u, w).value) <= 1e-10,
                   "invariance");
        }
    });

    check("cut: fractional cuts never beat block unions", [] {
        CounterRng rng(33, 0);
        auto space = rand_space(2, rng);
        for (int rep = 0; rep < 3; ++rep) {
            auto u = rand_graphon(space, 2, rng);
            auto w = rand_graphon(space, 2, rng);
            const double opt = d_cut(u, w).value;
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b)
                    for (int c = 0; c <= 2; ++c)
                        for (int d = 0; d <= 2; ++d) {
                            Eigen::VectorXd s(2), t(2);
                            s << a / 2.0, b / 2.0;
                            t << c / 2.0, d / 2.0;
                            expect(lp_distance(aggregate(u, s, t), aggregate(w, s, t)) <=
                                       opt + 1e-9,
                                   "fractional cut exceeded the optimum");
                        }
        }
    });

    check("cut: overlay is continuous along convergent sequences", [] {
        CounterRng rng(34, 0);
        auto space = rand_space(2, rng);
        auto w = rand_graphon(space, 3, rng);
        Eigen::MatrixXd kv(9, 2);
        for (int r = 0; r < 9; ++r)
            for (int c = 0; c < 2; ++c) kv(r, c) = 2.0 * rng.next_double() - 1.0;
        DualKernel a(space, 3, kv);
        const double base = overlay(w, a).value;
        auto u = rand_graphon(space, 3, rng);
        double prev = 1e9;
        for (int k : {2, 8, 32}) {
            StepGraphon wk(space, 3,
                           ((1.0 - 1.0 / k) * w.cells() + (1.0 / k) * u.cells()).eval());
            const double dev = std::abs(overlay(wk, a).value - base);
            expect(dev <= prev + 1e-9, "deviation not shrinking");
            prev = dev;
        }
    });

    check("cut: stepping is contractive", [] {
        CounterRng rng(35, 0);
        auto space = rand_space(2, rng);
        std::vector<std::vector<int>> classes{{0, 3}, {1, 2}};
        for (int rep = 0; rep < 5; ++rep) {
            auto u = rand_graphon(space, 4, rng);
            auto w = rand_graphon(space, 4, rng);
            expect(d_cut(step(u, classes), step(w, classes)).value <=
                       d_cut(u, w).value + 1e-9,
                   "contraction");
        }
    });

    check("entropy: relabel invariance", [] {
        CounterRng rng(41, 0);
        auto space = rand_space(3, rng);
        auto w = rand_graphon(space, 5, rng);
        auto nu = rand_measure(space, rng);
        for (int rep = 0; rep < 5; ++rep)
            expect(graphon_entropy(relabel(w, rand_permutation(5, rng)), nu) ==
                       graphon_entropy(w, nu),
                   "invariance");
    });

    check("entropy: stepping never increases the rate", [] {
        CounterRng rng(42, 0);
        auto space = rand_space(3, rng);
        std::vector<std::vector<int>> classes{{0, 2}, {1, 3}};
        for (int rep = 0; rep < 20; ++rep) {
            auto w = rand_graphon(space, 4, rng);
            auto nu = rand_measure(space, rng);
            expect(graphon_entropy(step(w, classes), nu) <= graphon_entropy(w, nu) + 1e-12,
                   "monotonicity");
        }
    });

    check("entropy: approximant chain nondecreasing, exact at the top", [] {
        CounterRng rng(43, 0);
        auto space = rand_space(2, rng);
        auto w = rand_graphon(space, 8, rng);
        auto nu = rand_measure(space, rng);
        const double full = graphon_entropy(w, nu);
        double prev = -1.0;
        for (int k : {1, 2, 4, 8}) {
            const double h = graphon_entropy(approximant(w, k), nu);
            expect(h >= prev - 1e-12, "nondecreasing");
            expect(h <= full + 1e-12, "bounded by the limit");
            prev = h;
        }
        expect(prev == full, "exact at full resolution");
    });

    check("entropy: dual pairing never exceeds, optimum attains", [] {
        CounterRng rng(44, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 10; ++rep) {
            auto w = rand_graphon(space, 4, rng);
            auto nu = rand_measure(space, rng);
            const double h = graphon_entropy(w, nu);
            for (int probe = 0; probe < 25; ++probe) {
                Eigen::MatrixXd kv(16, 3);
                for (int r = 0; r < 16; ++r)
                    for (int c = 0; c < 3; ++c) kv(r, c) = 6.0 * rng.next_double() - 3.0;
                expect(variational_value(w, nu, DualKernel(space, 4, kv)) <= h + 1e-10,
                       "dual bound");
            }
            expect(std::abs(variational_value(w, nu, optimal_kernel(w, nu)) - h) <= 1e-10,
                   "attainment");
        }
    });

    check("discrete: projection composition is exact", [] {
        CounterRng rng(51, 0);
        NestedPartitionScheme scheme(0.0, 1.0, 8);
        for (int rep = 0; rep < 10; ++rep) {
            Eigen::VectorXd bp(3), vals(2);
            const double cut = 0.2 + 0.6 * rng.next_double();
            bp << 0.0, cut, 1.0;
            vals << 0.5 / cut, 0.5 / (1.0 - cut);
            DensityMeasure mu(bp, vals);
            const int m = 1 + static_cast<int>(rng.next_u64() % 4);
            const int n = m + 1 + static_cast<int>(rng.next_u64() % (7 - m));
            auto direct = project_measure(mu, scheme, m);
            auto via = project_between(project_measure(mu, scheme, n), scheme, m);
            expect(direct.weights() == via.weights(), "composition");
        }
    });

    check("discrete: projected rate is monotone and matches the closed form", [] {
        NestedPartitionScheme scheme(0.0, 1.0, 14);
        const int depth = 14;
        const Eigen::Index k = Eigen::Index(1) << depth;
        Eigen::VectorXd bp(k + 1), vals(k);
        for (Eigen::Index i = 0; i <= k; ++i) bp[i] = static_cast<double>(i) / k;
        for (Eigen::Index i = 0; i < k; ++i) vals[i] = bp[i] + bp[i + 1];
        DensityMeasure omega(bp, vals);
        auto rates = rate_by_projections(DensityGraphon::constant(omega, 1),
                                         DensityMeasure::uniform(0.0, 1.0), scheme, 12);
        double prev = -1.0;
        for (double v : rates.values) {
            expect(v >= prev - 1e-12, "monotone in level");
            prev = v;
        }
        expect(std::abs(rates.supremum - (std::log(2.0) - 0.5)) <= 1e-4, "closed form");
    });

    check("discrete: projections approximate the identity uniformly", [] {
        Eigen::VectorXd bp(3), vals(2);
        bp << 0.0, 0.35, 1.0;
        vals << 2.0, 0.3 / 0.65;
        DensityMeasure mu(bp, vals);
        NestedPartitionScheme scheme(0.0, 1.0, 12);
        double prev = 1e9;
        for (int m : {2, 3, 4, 5}) {
            auto coarse = project_measure(mu, scheme, m);
            auto fine = project_measure(mu, scheme, m + 4);
            // union space carrying both levels' atoms
            std::vector<double> pts;
            for (Eigen::Index i = 0; i < coarse.space()->size(); ++i)
                pts.push_back(coarse.space()->points()[i]);
            for (Eigen::Index i = 0; i < fine.space()->size(); ++i)
                pts.push_back(fine.space()->points()[i]);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            Eigen::VectorXd upts(static_cast<Eigen::Index>(pts.size()));
            for (std::size_t i = 0; i < pts.size(); ++i)
                upts[static_cast<Eigen::Index>(i)] = pts[i];
            auto uspace = WeightSpace::line(upts, 0);
            auto lift = [&](const FiniteMeasure& m_in) {
                Eigen::VectorXd w = Eigen::VectorXd::Zero(upts.size());
                for (Eigen::Index i = 0; i < m_in.space()->size(); ++i) {
                    auto it = std::lower_bound(pts.begin(), pts.end(),
                                               m_in.space()->points()[i]);
                    w[static_cast<Eigen::Index>(it - pts.begin())] += m_in.weights()[i];
                }
                return FiniteMeasure(uspace, w);
            };
            const double d = lp_distance(lift(coarse), lift(fine));
            expect(d <= 1.0 / (1 << m) + 1e-12, "rate bound");
            expect(d <= prev + 1e-12, "trend");
            prev = d;
        }
    });

    check("sampling: factorized divergence equals graph enumeration", [] {
        CounterRng rng(61, 0);
        auto space2 = rand_space(2, rng);
        auto w2 = rand_graphon(space2, 4, rng);
        auto nu2 = rand_measure(space2, rng);
        expect(std::abs(kl_product(w2, nu2).sum - product_kl_by_enumeration(w2, nu2)) <= 1e-10,
               "binary case");
        auto space3 = rand_space(3, rng);
        auto w3 = rand_graphon(space3, 3, rng);
        auto nu3 = rand_measure(space3, rng);
        expect(std::abs(kl_product(w3, nu3).sum - product_kl_by_enumeration(w3, nu3)) <= 1e-10,
               "ternary case");
    });

    check("sampling: diagonal bookkeeping identity", [] {
        CounterRng rng(62, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 10; ++rep) {
            auto w = rand_graphon(space, 4, rng);
            auto nu = rand_measure(space, rng);
            auto r = kl_product(w, nu);
            expect(std::abs(r.scaled + r.diagonal_term - graphon_entropy(w, nu)) <= 1e-12,
                   "identity");
        }
    });

    check("sampling: exact event oracle matches the binomial tail", [] {
        CounterRng rng(63, 0);
        for (int n : {10, 16, 20}) {
            const int edges = n * (n - 1) / 2;
            const double p = 0.15 + 0.7 * rng.next_double();
            const double t = 0.2 + 0.6 * rng.next_double();
            const double got =
                event_log_prob_exact(n, bernoulli(p), MeanEvent(binary_f(), Direction::ge, t));
            const int from = static_cast<int>(std::ceil(t * edges - 1e-9));
            expect(std::abs(got - binomial_tail_log(edges, p, from)) <= 1e-9, "tail match");
        }
    });

    check("sampling: deterministic draws, conditioned draws obey the event", [] {
        auto nu = bernoulli(0.35);
        expect(sample_graph(10, nu, 7).weights() == sample_graph(10, nu, 7).weights(),
               "same seed, same graph");
        expect(sample_graph(10, nu, 7).weights() != sample_graph(10, nu, 8).weights(),
               "different seed, different graph");
        MeanEvent ev(binary_f(), Direction::ge, 0.5);
        ConditionalSampler sampler(6, nu, ev);
        for (int r = 0; r < 50; ++r) {
            auto g = sampler.sample(static_cast<std::uint64_t>(r));
            int sum = 0;
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) sum += g.weights()(i, j);
            expect(sum >= static_cast<int>(std::ceil(0.5 * 15 - 1e-9)), "event holds");
        }
    });

    check("sampling: verification gap shrinks with n", [] {
        EventSpec ev = MeanEvent(binary_f(), Direction::ge, 0.5);
        auto rep = verify_ldp(bernoulli(0.3), ev, {20, 40}, VerifyMode::exact);
        expect(std::abs(rep.rows[1].gap) <= std::abs(rep.rows[0].gap), "monotone gap");
    });

    check("minimizer: averaging dominance over feasible graphons", [] {
        CounterRng rng(71, 0);
        auto space = rand_space(2, rng);
        for (int rep = 0; rep < 20; ++rep) {
            auto w = rand_graphon(space, 3, rng);
            auto nu = rand_measure(space, rng);
            Eigen::VectorXd f(2);
            f << 0.0, 1.0;
            double mean = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) mean += w.cell(i, j).dot(f) / 9.0;
            ConstraintSet cs;
            cs.n = 3;
            cs.items.push_back({f, Direction::ge, mean, {}});
            expect(minimize_rate(nu, cs).value <= graphon_entropy(w, nu) + 1e-9, "dominance");
        }
    });

    check("minimizer: single constraint matches the legendre value", [] {
        CounterRng rng(72, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 6; ++rep) {
            auto nu = rand_measure(space, rng);
            Eigen::VectorXd f(3);
            for (int i = 0; i < 3; ++i) f[i] = rng.next_double();
            const double base = nu.weights().dot(f);
            const double top = f.maxCoeff();
            const double t = base + (0.2 + 0.6 * rng.next_double()) * (top - base);
            ConstraintSet cs;
            cs.n = 1;
            cs.items.push_back({f, Direction::ge, t, {}});
            const double got = minimize_rate(nu, cs).value;
            auto val = [&](double th) { return th * t - log_mgf((th * f).eval(), nu); };
            double lo = -60.0, hi = 60.0;
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (val(m1) < val(m2))
                    lo = m1;
                else
                    hi = m2;
            }
            const double legendre = val(0.5 * (lo + hi));
            expect(std::abs(got - legendre) <= 1e-8, "legendre match");
        }
    });

    check("minimizer: objective gradient matches finite differences", [] {
        CounterRng rng(73, 0);
        auto space = rand_space(3, rng);
        for (int rep = 0; rep < 5; ++rep) {
            FiniteMeasure nu(space, rand_simplex(3, rng));
            Eigen::MatrixXd x(2, 3);
            for (int r = 0; r < 2; ++r)
                x.row(r) = (0.9 * rand_simplex(3, rng) +
                            0.1 * Eigen::VectorXd::Constant(3, 1.0 / 3))
                               .transpose();
            Eigen::MatrixXd grad = detail::entropy_gradient(x, nu);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 3; ++c) {
                    Eigen::MatrixXd hi = x, lo = x;
                    hi(r, c) += 1e-6;
                    lo(r, c) -= 1e-6;
                    const double fd = (detail::entropy_objective(hi, nu) -
                                       detail::entropy_objective(lo, nu)) /
                                      2e-6;
                    expect(std::abs(grad(r, c) - fd) <= 1e-5 * (1.0 + std::abs(grad(r, c))),
                           "gradient");
                }
        }
    });

    check("minimizer: tightening thresholds never lowers the value", [] {
        auto nu = bernoulli(0.4);
        double prev = -1.0;
        for (double t = 0.45; t <= 0.9; t += 0.05) {
            ConstraintSet cs;
            cs.n = 1;
            cs.items.push_back({binary_f(), Direction::ge, t, {}});
            const double v = minimize_rate(nu, cs).value;
            expect(v >= prev - 1e-12, "monotone");
            prev = v;
        }
    });

    check("io: documents round-trip and rewrite byte-identically", [] {
        namespace fs = std::filesystem;
        CounterRng rng(81, 0);
        const auto dir = fs::temp_directory_path() / "graphon_selftest";
        fs::create_directories(dir);
        auto space = rand_space(3, rng);
        auto nu = rand_measure(space, rng);
        auto w = rand_graphon(space, 3, rng);
        io::Manifest man{42, io::fnv1a_hex("selftest"), io::kArtifactVersion};
        const auto mpath = (dir / "m.json").string();
        const auto gpath = (dir / "g.json").string();
        io::write_measure(mpath, nu, man);
        io::write_graphon(gpath, w, man);
        auto nu2 = io::load_measure(mpath);
        auto w2 = io::load_graphon(gpath);
        expect(nu2.weights() == nu.weights(), "measure weights survive");
        expect(nu2.space()->same_as(*nu.space()), "space survives");
        expect(w2.cells() == w.cells(), "graphon cells survive");
        const auto mpath2 = (dir / "m2.json").string();
        io::write_measure(mpath2, nu2, man);
        std::ifstream f1(mpath), f2(mpath2);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        expect(s1.str() == s2.str(), "byte-identical rewrite");
        expect(s1.str().find("\"seed\": 42") != std::string::npos, "manifest embedded");
        fs::remove_all(dir);
    });

    check("io: reports are identical across thread counts", [] {
        EventSpec ev = BallEvent(StepGraphon::constant(bernoulli(0.6), 2), 0.3);
        const char* saved = std::getenv("GRAPHON_LDP_THREADS");
        const std::string keep = saved ? saved : "";
        setenv("GRAPHON_LDP_THREADS", "1", 1);
        auto a = verify_ldp(bernoulli(0.5), ev, {4}, VerifyMode::monte_carlo, 5, 200);
        setenv("GRAPHON_LDP_THREADS", "3", 1);
        auto b = verify_ldp(bernoulli(0.5), ev, {4}, VerifyMode::monte_carlo, 5, 200);
        if (saved)
            setenv("GRAPHON_LDP_THREADS", keep.c_str(), 1);
        else
            unsetenv("GRAPHON_LDP_THREADS");
        expect(a.rows[0].log_prob == b.rows[0].log_prob, "log_prob stable");
        expect(a.rows[0].ess == b.rows[0].ess, "ess stable");
    });

    out << "selftest: " << (total - failed) << "/" << total << " checks passed"
        << (failed ? " [FAILURE]" : "") << "\n";
    return failed ? 3 : 0;
}

}  // namespace graphon
