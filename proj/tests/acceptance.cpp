// Acceptance gate: one check per shipped guarantee, each printing a single
// PASS/FAIL line with the measured quantity next to its bound. Exits nonzero
// if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "graphon/cut_metric.hpp"
#include "graphon/discretization.hpp"
#include "graphon/entropy.hpp"
#include "graphon/events.hpp"
#include "graphon/minimizer.hpp"
#include "graphon/rng.hpp"
#include "graphon/sampling.hpp"
#include "graphon/step_graphon.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace graphon;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. Factorized product divergence equals whole-graph enumeration.
Outcome check_product_identity() {
    const auto start = std::chrono::steady_clock::now();
    CounterRng rng(101, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        auto s2 = testutil::random_space(2, rng);
        auto w2 = testutil::random_graphon(s2, 4, rng);
        auto nu2 = testutil::random_probability(s2, rng);
        worst = std::max(worst, std::abs(kl_product(w2, nu2).sum -
                                         oracle::product_kl_enumeration(w2, nu2)));
        auto s3 = testutil::random_space(3, rng);
        auto w3 = testutil::random_graphon(s3, 3, rng);
        auto nu3 = testutil::random_probability(s3, rng);
        worst = std::max(worst, std::abs(kl_product(w3, nu3).sum -
                                         oracle::product_kl_enumeration(w3, nu3)));
    }
    const double secs = elapsed_s(start);
    return {worst <= 1e-10 && secs < 1.0,
            "worst gap " + fmt(worst) + " vs 1e-10, " + fmt(secs) + "s vs 1s"};
}

// 2. Edge-density decay matches the closed-form rate.
Outcome check_edge_density_rate() {
    const auto start = std::chrono::steady_clock::now();
    Eigen::VectorXd f(2);
    f << 0.0, 1.0;
    EventSpec ev = MeanEvent(f, Direction::ge, 0.5);
    auto rep = verify_ldp(bernoulli(0.3), ev, {10, 20, 40, 80}, VerifyMode::exact);
    const double rate_err = std::abs(rep.rate_target - 0.08717669357238891);
    const double g10 = std::abs(rep.rows[0].gap);
    const double g80 = std::abs(rep.rows[3].gap);
    const double secs = elapsed_s(start);
    const bool pass = rate_err <= 1e-9 && g80 < g10 && g80 <= 0.015 && secs < 10.0;
    return {pass, "rate err " + fmt(rate_err) + ", |gap80| " + fmt(g80) + " vs min(|gap10| " +
                      fmt(g10) + ", 0.015), " + fmt(secs) + "s vs 10s"};
}

// 3. Transportation-based Prokhorov distance equals the subset definition.
Outcome check_lp_oracle() {
    const auto start = std::chrono::steady_clock::now();
    CounterRng rng(103, 0);
    double worst = 0.0, worst_tri = 0.0;
    for (Eigen::Index s = 2; s <= 6; ++s) {
        for (int rep = 0; rep < 200; ++rep) {
            auto space = testutil::random_space(s, rng);
            auto a = testutil::random_probability(space, rng);
            auto b = testutil::random_probability(space, rng);
            const double d = lp_distance(a, b);
            worst = std::max(worst, std::abs(d - oracle::lp_distance_subsets(a, b)));
            if (d != lp_distance(b, a)) worst = std::max(worst, 1.0);
            if (rep % 10 == 0) {
                auto c = testutil::random_probability(space, rng);
                worst_tri = std::max(worst_tri,
                                     d - lp_distance(a, c) - lp_distance(c, b));
            }
        }
    }
    const double secs = elapsed_s(start);
    return {worst <= 1e-9 && worst_tri <= 1e-9 && secs < 30.0,
            "worst oracle gap " + fmt(worst) + " vs 1e-9, worst triangle slack " +
                fmt(worst_tri) + ", " + fmt(secs) + "s vs 30s"};
}

// 4. The optimal kernel attains the rate; no kernel exceeds it.
Outcome check_variational_equality() {
    CounterRng rng(104, 0);
    double worst_eq = 0.0, worst_bound = -1.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = 2 + static_cast<Eigen::Index>(rng.next_u64() % 3);
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        auto space = testutil::random_space(s, rng);
        auto w = testutil::random_graphon(space, n, rng);
        auto nu = testutil::random_probability(space, rng);
        const double h = graphon_entropy(w, nu);
        worst_eq = std::max(
            worst_eq, std::abs(variational_value(w, nu, optimal_kernel(w, nu)) - h));
        for (int probe = 0; probe < 10; ++probe) {
            Eigen::MatrixXd kv(static_cast<Eigen::Index>(n) * n, s);
            for (Eigen::Index r = 0; r < kv.rows(); ++r)
                for (Eigen::Index c = 0; c < kv.cols(); ++c)
                    kv(r, c) = 8.0 * rng.next_double() - 4.0;
            worst_bound = std::max(
                worst_bound, variational_value(w, nu, DualKernel(space, n, kv)) - h);
        }
    }
    return {worst_eq <= 1e-10 && worst_bound <= 1e-10,
            "worst equality gap " + fmt(worst_eq) + " vs 1e-10, worst excess " +
                fmt(worst_bound) + " vs 1e-10"};
}

// 5. Averaging lowers the rate; approximant chains recover it.
Outcome check_entropy_monotonicity() {
    CounterRng rng(105, 0);
    double worst_step = -1.0, worst_chain = -1.0, worst_top = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        auto space = testutil::random_space(3, rng);
        auto w = testutil::random_graphon(space, 4, rng);
        auto nu = testutil::random_probability(space, rng);
        std::vector<std::vector<int>> classes{{0, 2}, {1, 3}};
        worst_step = std::max(worst_step,
                              graphon_entropy(step(w, classes), nu) - graphon_entropy(w, nu));
    }
    auto space = testutil::random_space(2, rng);
    for (int rep = 0; rep < 20; ++rep) {
        auto w = testutil::random_graphon(space, 8, rng);
        auto nu = testutil::random_probability(space, rng);
        const double full = graphon_entropy(w, nu);
        double prev = -1.0;
        for (int k : {1, 2, 4, 8}) {
            const double h = graphon_entropy(approximant(w, k), nu);
            worst_chain = std::max(worst_chain, prev - h);
            prev = h;
        }
        worst_top = std::max(worst_top, std::abs(prev - full));
    }
    return {worst_step <= 1e-12 && worst_chain <= 1e-12 && worst_top == 0.0,
            "worst step excess " + fmt(worst_step) + " vs 1e-12, worst chain dip " +
                fmt(worst_chain) + ", top gap " + fmt(worst_top) + " vs 0"};
}

// 6. Dyadic projection laws and the closed-form projected rate.
Outcome check_projection_laws() {
    const auto start = std::chrono::steady_clock::now();
    CounterRng rng(106, 0);
    NestedPartitionScheme scheme(0.0, 1.0, 14);
    auto random_density = [&rng](int pieces) {
        Eigen::VectorXd bp(pieces + 1), vals(pieces);
        bp[0] = 0.0;
        bp[pieces] = 1.0;
        for (int i = 1; i < pieces; ++i)
            bp[i] = (i + 0.6 * (rng.next_double() - 0.5)) / pieces;
        double mass = 0.0;
        for (int i = 0; i < pieces; ++i) {
            vals[i] = 0.2 + rng.next_double();
            mass += vals[i] * (bp[i + 1] - bp[i]);
        }
        vals /= mass;
        return DensityMeasure(bp, vals);
    };
    double worst_comp = 0.0, worst_mono = -1.0;
    for (int rep = 0; rep < 50; ++rep) {
        auto omega = random_density(2 + static_cast<int>(rng.next_u64() % 4));
        auto nu = random_density(2 + static_cast<int>(rng.next_u64() % 4));
        const int m = 1 + static_cast<int>(rng.next_u64() % 5);
        const int n = m + 1 + static_cast<int>(rng.next_u64() % 3);
        auto direct = project_measure(omega, scheme, m);
        auto via = project_between(project_measure(omega, scheme, n), scheme, m);
        worst_comp = std::max(worst_comp,
                              (direct.weights() - via.weights()).cwiseAbs().maxCoeff());
        auto rates = rate_by_projections(DensityGraphon::constant(omega, 1), nu, scheme, 8);
        for (std::size_t i = 1; i < rates.values.size(); ++i)
            worst_mono = std::max(worst_mono, rates.values[i - 1] - rates.values[i]);
    }
    const Eigen::Index leaves = Eigen::Index(1) << 14;
    Eigen::VectorXd bp(leaves + 1), vals(leaves);
    for (Eigen::Index i = 0; i <= leaves; ++i) bp[i] = static_cast<double>(i) / leaves;
    for (Eigen::Index i = 0; i < leaves; ++i) vals[i] = bp[i] + bp[i + 1];
    auto rates = rate_by_projections(DensityGraphon::constant(DensityMeasure(bp, vals), 1),
                                     DensityMeasure::uniform(0.0, 1.0), scheme, 12);
    const double closed_err = std::abs(rates.supremum - (std::log(2.0) - 0.5));
    const double secs = elapsed_s(start);
    const bool pass =
        worst_comp == 0.0 && worst_mono <= 1e-12 && closed_err <= 1e-4 && secs < 5.0;
    return {pass, "composition gap " + fmt(worst_comp) + " vs 0, worst dip " + fmt(worst_mono) +
                      " vs 1e-12, closed-form err " + fmt(closed_err) + " vs 1e-4, " +
                      fmt(secs) + "s vs 5s"};
}

// 7. Relabelings are at unlabeled distance zero; the triangle law holds.
Outcome check_weak_isomorphism() {
    CounterRng rng(107, 0);
    double worst_zero = 0.0, worst_tri = -1.0;
    for (int n = 2; n <= 5; ++n)
        for (int rep = 0; rep < 20; ++rep) {
            auto space = testutil::random_space(2, rng);
            auto w = testutil::random_graphon(space, n, rng);
            auto sigma = testutil::random_permutation(n, rng);
            auto r = delta_cut(w, relabel(w, sigma));
            if (r.mode != CutMode::exact) return {false, "expected exact mode"};
            worst_zero = std::max(worst_zero, r.value);
        }
    auto space = testutil::random_space(2, rng);
    for (int rep = 0; rep < 50; ++rep) {
        auto u = testutil::random_graphon(space, 4, rng);
        auto v = testutil::random_graphon(space, 4, rng);
        auto w = testutil::random_graphon(space, 4, rng);
        worst_tri = std::max(worst_tri, delta_cut(u, w).value - delta_cut(u, v).value -
                                            delta_cut(v, w).value);
    }
    return {worst_zero == 0.0 && worst_tri <= 1e-9,
            "worst self-distance " + fmt(worst_zero) + " vs 0, worst triangle slack " +
                fmt(worst_tri) + " vs 1e-9"};
}

// 8. Conditioned samples concentrate on the entropy minimizer.
Outcome check_conditional_concentration() {
    const auto start = std::chrono::steady_clock::now();
    Eigen::VectorXd f(2);
    f << 0.0, 1.0;
    MeanEvent ev(f, Direction::ge, 0.5);
    auto table = concentration_experiment(bernoulli(0.3), ev, {16, 32, 64}, 50, 2026);
    const bool decreasing =
        table.rows[1].median < table.rows[0].median && table.rows[2].median < table.rows[1].median;
    const double secs = elapsed_s(start);
    return {decreasing && secs < 120.0,
            "medians " + fmt(table.rows[0].median) + " > " + fmt(table.rows[1].median) + " > " +
                fmt(table.rows[2].median) + " required, " + fmt(secs) + "s vs 120s"};
}

// 9. The minimizer agrees with the Legendre transform and a grid search.
Outcome check_minimizer_duality() {
    CounterRng rng(109, 0);
    double worst_leg = 0.0, worst_grid = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index s = 2 + static_cast<Eigen::Index>(rng.next_u64() % 2);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        Eigen::VectorXd f(s);
        for (Eigen::Index i = 0; i < s; ++i) f[i] = rng.next_double();
        const double base = nu.weights().dot(f);
        const double top = f.maxCoeff();
        const double t = base + (0.15 + 0.45 * rng.next_double()) * (top - base);
        ConstraintSet cs;
        cs.n = 1;
        cs.items.push_back({f, Direction::ge, t, {}});
        const double got = minimize_rate(nu, cs).value;
        worst_leg = std::max(worst_leg, std::abs(got - oracle::legendre_value(nu, f, t)));
        worst_grid = std::max(
            worst_grid, std::abs(got - oracle::constant_grid_min(nu, f, t, true, 1e-3)));
    }
    return {worst_leg <= 1e-8 && worst_grid <= 2e-3,
            "worst legendre gap " + fmt(worst_leg) + " vs 1e-8, worst grid gap " +
                fmt(worst_grid) + " vs 2e-3"};
}

}  // namespace

int main() {
    struct Item {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Item> items = {
        {"product-divergence identity", check_product_identity},
        {"edge-density rate", check_edge_density_rate},
        {"prokhorov oracle equivalence", check_lp_oracle},
        {"variational equality", check_variational_equality},
        {"entropy monotonicity", check_entropy_monotonicity},
        {"projection laws", check_projection_laws},
        {"weak isomorphism", check_weak_isomorphism},
        {"conditional concentration", check_conditional_concentration},
        {"minimizer duality", check_minimizer_duality},
    };
    int failures = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        Outcome o;
        try {
            o = items[i].fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("ACCEPTANCE %zu %s: %s (%s)\n", i + 1, items[i].name,
                    o.pass ? "PASS" : "FAIL", o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
