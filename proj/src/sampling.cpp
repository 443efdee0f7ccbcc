#include "graphon/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphon/cut_metric.hpp"
#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"
#include "graphon/minimizer.hpp"
#include "graphon/parallel.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long edge_count(int n) { return static_cast<long>(n) * (n - 1) / 2; }

// f values as offsets on a rational lattice: f = fmin + k / q with integer
// k >= 0 and the smallest denominator q <= 10^4, if one exists.
struct Lattice {
    bool ok = false;
    long q = 0;
    std::vector<long> k;
    long kmax = 0;
    double fmin = 0.0;
};

Lattice detect_lattice(const Eigen::VectorXd& f) {
    Lattice lat;
    lat.fmin = f.minCoeff();
    const Eigen::ArrayXd d = f.array() - lat.fmin;
    for (long q = 1; q <= 10000; ++q) {
        bool hit = true;
        for (Eigen::Index z = 0; z < d.size() && hit; ++z)
            hit = std::abs(d[z] * static_cast<double>(q) -
                           std::round(d[z] * static_cast<double>(q))) <= 1e-9;
        if (!hit) continue;
        lat.ok = true;
        lat.q = q;
        lat.k.resize(static_cast<std::size_t>(d.size()));
        for (Eigen::Index z = 0; z < d.size(); ++z) {
            lat.k[static_cast<std::size_t>(z)] = std::llround(d[z] * static_cast<double>(q));
            lat.kmax = std::max(lat.kmax, lat.k[static_cast<std::size_t>(z)]);
        }
        return lat;
    }
    return lat;
}

// Qualifying window [lo, hi] of lattice totals for a closed threshold; the
// guard band keeps ties on the lattice from flipping on rounding noise.
std::pair<long, long> lattice_window(const MeanEvent& event, const Lattice& lat, long edges) {
    const long smax = edges * lat.kmax;
    const double tau =
        static_cast<double>(lat.q) * static_cast<double>(edges) * (event.threshold - lat.fmin);
    if (event.dir == Direction::ge)
        return {static_cast<long>(std::ceil(tau - 1e-9)), smax};
    return {0, static_cast<long>(std::floor(tau + 1e-9))};
}

Eigen::VectorXd log_weights(const FiniteMeasure& nu) {
    Eigen::VectorXd lw(nu.size());
    for (Eigen::Index z = 0; z < nu.size(); ++z)
        lw[z] = nu.weight(z) > 0.0 ? std::log(nu.weight(z)) : kNegInf;
    return lw;
}

double log_sum_exp(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double m = kNegInf;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, v[i]);
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
        if (v[i] != kNegInf) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

// One in-place convolution step with the lattice increments; descending
// order keeps the k = 0 source untouched until it is consumed.
void convolve_step(std::vector<double>& dp, long reach, const Lattice& lat,
                   const Eigen::VectorXd& lw) {
    for (long s = reach; s >= 0; --s) {
        double m = kNegInf;
        for (std::size_t z = 0; z < lat.k.size(); ++z) {
            if (lw[static_cast<Eigen::Index>(z)] == kNegInf) continue;
            const long src = s - lat.k[z];
            if (src < 0) continue;
            m = std::max(m, lw[static_cast<Eigen::Index>(z)] + dp[static_cast<std::size_t>(src)]);
        }
        if (m == kNegInf) {
            dp[static_cast<std::size_t>(s)] = kNegInf;
            continue;
        }
        double acc = 0.0;
        for (std::size_t z = 0; z < lat.k.size(); ++z) {
            if (lw[static_cast<Eigen::Index>(z)] == kNegInf) continue;
            const long src = s - lat.k[z];
            if (src < 0) continue;
            const double v = lw[static_cast<Eigen::Index>(z)] + dp[static_cast<std::size_t>(src)];
            if (v != kNegInf) acc += std::exp(v - m);
        }
        dp[static_cast<std::size_t>(s)] = m + std::log(acc);
    }
}

void check_event_inputs(int n, const FiniteMeasure& nu, const MeanEvent& event) {
    require_input(n >= 2, "events need at least two vertices");
    require_input(nu.kind() == MeasureKind::probability, "edge law must be a probability");
    require_input(event.f.size() == nu.size(), "event functional size does not match nu");
    require_input(edge_count(n) <= 1000000, "edge count beyond the exact-oracle limit 10^6");
}

Lattice require_lattice(const Eigen::VectorXd& f, long edges) {
    Lattice lat = detect_lattice(f);
    if (!lat.ok)
        fail_input(
            "event functional is not on a rational lattice with denominator <= 10000; "
            "rescale the values to exact rationals");
    require_input(static_cast<double>(edges) * static_cast<double>(lat.kmax) <= 5e7,
                  "lattice too fine for exact convolution at this size");
    return lat;
}

}  // namespace

WeightedGraph sample_graph(int n, const FiniteMeasure& nu, std::uint64_t seed) {
    require_input(n >= 1, "graphs need at least one vertex");
    require_input(nu.kind() == MeasureKind::probability, "edge law must be a probability");
    Eigen::MatrixXi m(n, n);
    m.setConstant(static_cast<int>(nu.space()->zero_index()));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            CounterRng rng(seed, stream_tag::edge |
                                     (static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
                                      static_cast<std::uint64_t>(j)));
            const int z = static_cast<int>(rng.next_categorical(nu.weights()));
            m(i, j) = z;
            m(j, i) = z;
        }
    return WeightedGraph(nu.space(), m);
}

WeightedGraph sample_from_graphon(const StepGraphon& w, std::uint64_t seed) {
    const int n = w.n();
    Eigen::MatrixXi m(n, n);
    m.setConstant(static_cast<int>(w.space()->zero_index()));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            CounterRng rng(seed, stream_tag::edge |
                                     (static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
                                      static_cast<std::uint64_t>(j)));
            const int z = static_cast<int>(rng.next_categorical(w.cell(i, j).transpose()));
            m(i, j) = z;
            m(j, i) = z;
        }
    return WeightedGraph(w.space(), m);
}

KlProduct kl_product(const StepGraphon& w, const FiniteMeasure& nu) {
    require_input(w.space()->same_as(*nu.space()), "kl_product: weight space mismatch");
    require_input(nu.kind() == MeasureKind::probability, "kl_product: nu must be a probability");
    require_input(w.symmetric(), "kl_product: tilted graph laws need a symmetric graphon");
    const int n = w.n();
    const double nn = static_cast<double>(n) * n;
    KlProduct r;
    for (int i = 0; i < n && r.offending_i < 0; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = kl_divergence(w.cell_measure(i, j), nu);
            if (std::isinf(v)) {
                r.offending_i = i;
                r.offending_j = j;
                r.sum = v;
                break;
            }
            r.sum += v;
        }
    r.scaled = 2.0 * r.sum / nn;
    for (int i = 0; i < n; ++i) r.diagonal_term += kl_divergence(w.cell_measure(i, i), nu) / nn;
    return r;
}

double event_log_prob_exact(int n, const FiniteMeasure& nu, const MeanEvent& event) {
    check_event_inputs(n, nu, event);
    const long edges = edge_count(n);
    const Lattice lat = require_lattice(event.f, edges);
    const auto [lo, hi] = lattice_window(event, lat, edges);
    const long smax = edges * lat.kmax;
    if (lo <= 0 && hi >= smax) return 0.0;  // event always holds
    if (lo > smax || hi < 0) return kNegInf;

    const Eigen::VectorXd lw = log_weights(nu);
    std::vector<double> dp(static_cast<std::size_t>(smax) + 1, kNegInf);
    dp[0] = 0.0;
    for (long e = 1; e <= edges; ++e) convolve_step(dp, e * lat.kmax, lat, lw);
    return log_sum_exp(dp, static_cast<std::size_t>(std::max(0L, lo)),
                       static_cast<std::size_t>(std::min(hi, smax)) + 1);
}

struct ConditionalSampler::Impl {
    int n = 0;
    FiniteMeasure nu;
    MeanEvent event;
    long edges = 0;
    Lattice lat;
    long lo = 0, hi = 0;  // qualifying window of totals
    Eigen::VectorXd lw;
    std::vector<std::vector<double>> tables;  // tables[m]: log P(sum of m edges = s)
    double log_prob = kNegInf;

    Impl(int n_, FiniteMeasure nu_, MeanEvent event_)
        : n(n_), nu(std::move(nu_)), event(std::move(event_)) {
        check_event_inputs(n, nu, event);
        edges = edge_count(n);
        lat = require_lattice(event.f, edges);
        require_input(static_cast<double>(edges) * static_cast<double>(edges) *
                              static_cast<double>(lat.kmax) / 2.0 <=
                          5e7,
                      "conditional tables too large at this size; reduce n or coarsen f");
        std::tie(lo, hi) = lattice_window(event, lat, edges);
        const long smax = edges * lat.kmax;
        lo = std::max(lo, 0L);
        hi = std::min(hi, smax);
        if (lo > hi) fail_runtime("conditioned event has probability zero");

        lw = log_weights(nu);
        tables.resize(static_cast<std::size_t>(edges) + 1);
        tables[0] = {0.0};
        for (long m = 1; m <= edges; ++m) {
            const long reach = m * lat.kmax;
            tables[static_cast<std::size_t>(m)] = tables[static_cast<std::size_t>(m - 1)];
            tables[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(reach) + 1,
                                                       kNegInf);
            convolve_step(tables[static_cast<std::size_t>(m)], reach, lat, lw);
        }
        log_prob = log_sum_exp(tables[static_cast<std::size_t>(edges)],
                               static_cast<std::size_t>(lo), static_cast<std::size_t>(hi) + 1);
        if (log_prob == kNegInf) fail_runtime("conditioned event has probability zero");
    }

    WeightedGraph sample(std::uint64_t seed) const {
        CounterRng rng(seed, stream_tag::conditional);
        const auto& last = tables[static_cast<std::size_t>(edges)];
        double shift = kNegInf;
        for (long s = lo; s <= hi; ++s) shift = std::max(shift, last[static_cast<std::size_t>(s)]);
        Eigen::VectorXd wts(hi - lo + 1);
        for (long s = lo; s <= hi; ++s) {
            const double v = last[static_cast<std::size_t>(s)];
            wts[s - lo] = v == kNegInf ? 0.0 : std::exp(v - shift);
        }
        long total = lo + rng.next_categorical(wts);

        Eigen::MatrixXi m(n, n);
        m.setConstant(static_cast<int>(nu.space()->zero_index()));
        Eigen::VectorXd ew(nu.size());
        long e = edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const auto& prev = tables[static_cast<std::size_t>(e - 1)];
                const long reach = (e - 1) * lat.kmax;
                double sh = kNegInf;
                for (Eigen::Index z = 0; z < nu.size(); ++z) {
                    const long src = total - lat.k[static_cast<std::size_t>(z)];
                    if (lw[z] == kNegInf || src < 0 || src > reach) continue;
                    sh = std::max(sh, lw[z] + prev[static_cast<std::size_t>(src)]);
                }
                for (Eigen::Index z = 0; z < nu.size(); ++z) {
                    const long src = total - lat.k[static_cast<std::size_t>(z)];
                    if (lw[z] == kNegInf || src < 0 || src > reach ||
                        prev[static_cast<std::size_t>(src)] == kNegInf) {
                        ew[z] = 0.0;
                        continue;
                    }
                    ew[z] = std::exp(lw[z] + prev[static_cast<std::size_t>(src)] - sh);
                }
                const Eigen::Index z = rng.next_categorical(ew);
                m(i, j) = static_cast<int>(z);
                m(j, i) = static_cast<int>(z);
                total -= lat.k[static_cast<std::size_t>(z)];
                --e;
            }
        return WeightedGraph(nu.space(), m);
    }
};

ConditionalSampler::ConditionalSampler(int n, FiniteMeasure nu, MeanEvent event)
    : impl_(std::make_unique<Impl>(n, std::move(nu), std::move(event))) {}
ConditionalSampler::~ConditionalSampler() = default;
ConditionalSampler::ConditionalSampler(ConditionalSampler&&) noexcept = default;
WeightedGraph ConditionalSampler::sample(std::uint64_t seed) const { return impl_->sample(seed); }
double ConditionalSampler::log_prob() const { return impl_->log_prob; }
int ConditionalSampler::n() const { return impl_->n; }

WeightedGraph conditional_sample(int n, const FiniteMeasure& nu, const MeanEvent& event,
                                 std::uint64_t seed) {
    check_event_inputs(n, nu, event);
    if (detect_lattice(event.f).ok) {
        ConditionalSampler sampler(n, nu, event);
        return sampler.sample(seed);
    }
    // Off-lattice functional: accept/reject against the plain sampler.
    const long edges = edge_count(n);
    for (long attempt = 0; attempt < 200000; ++attempt) {
        const std::uint64_t s2 =
            mix64(seed ^ mix64(0x51u + static_cast<std::uint64_t>(attempt)));
        WeightedGraph g = sample_graph(n, nu, s2);
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) acc += event.f[g.weights()(i, j)];
        const double mean = acc / static_cast<double>(edges);
        const bool inside =
            event.dir == Direction::ge ? mean >= event.threshold : mean <= event.threshold;
        if (inside) return g;
    }
    fail_runtime("rejection sampling exhausted; the event is too rare for the fallback path");
}

LdpReport verify_ldp(const FiniteMeasure& nu, const EventSpec& event,
                     const std::vector<int>& n_list, VerifyMode mode, std::uint64_t seed,
                     long samples) {
    require_input(!n_list.empty(), "verify needs at least one graph size");
    LdpReport rep;
    rep.rows.resize(n_list.size());

    if (mode == VerifyMode::exact) {
        const MeanEvent* me = std::get_if<MeanEvent>(&event);
        require_input(me != nullptr, "exact mode verifies mean events");
        for (int n : n_list) check_event_inputs(n, nu, *me);
        require_lattice(me->f, edge_count(*std::max_element(n_list.begin(), n_list.end())));

        ConstraintSet cs;
        cs.n = 1;
        cs.items.push_back({me->f, me->dir, me->threshold, {}});
        rep.rate_target = minimize_rate(nu, cs).value;

        parallel_for(n_list.size(), [&](std::size_t ix) {
            const int n = n_list[ix];
            LdpRow row;
            row.n = n;
            row.method = "exact";
            row.log_prob = event_log_prob_exact(n, nu, *me);
            row.scaled = 2.0 * row.log_prob / (static_cast<double>(n) * n);
            row.rate_target = rep.rate_target;
            row.gap = row.scaled + rep.rate_target;
            rep.rows[ix] = row;
        });
        return rep;
    }

    const BallEvent* be = std::get_if<BallEvent>(&event);
    require_input(be != nullptr, "monte-carlo mode verifies ball events");
    const StepGraphon& center = be->center;
    require_input(center.space()->same_as(*nu.space()), "ball center lives on another space");
    require_input(center.symmetric(), "ball center must be symmetric");
    require_input(nu.kind() == MeasureKind::probability, "edge law must be a probability");
    require_input(samples >= 2, "monte-carlo mode needs at least two samples");
    for (int i = 0; i < center.n(); ++i)
        for (int j = 0; j < center.n(); ++j)
            for (Eigen::Index z = 0; z < nu.size(); ++z)
                require_input(nu.weight(z) == 0.0 || center.cell(i, j)[z] > 0.0,
                              "importance sampling needs center cells covering supp(nu)");
    // The center's own rate: an upper bound for the infimum over the ball.
    rep.rate_target = graphon_entropy(center, nu);

    for (std::size_t ix = 0; ix < n_list.size(); ++ix) {
        const int n = n_list[ix];
        require_input(n >= 2, "graph sizes must be at least two");
        require_input(n % center.n() == 0, "graph sizes must be multiples of the center grid");
        const StepGraphon wn = refine(center, n / center.n());
        std::vector<double> logw(static_cast<std::size_t>(samples), kNegInf);

        parallel_for(static_cast<std::size_t>(samples), [&](std::size_t r) {
            CounterRng rng(seed, stream_tag::importance | (static_cast<std::uint64_t>(ix) << 32) |
                                     static_cast<std::uint64_t>(r));
            Eigen::MatrixXi m(n, n);
            m.setConstant(static_cast<int>(nu.space()->zero_index()));
            double ll = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const Eigen::Index z = rng.next_categorical(wn.cell(i, j).transpose());
                    m(i, j) = static_cast<int>(z);
                    m(j, i) = static_cast<int>(z);
                    ll += (nu.weight(z) > 0.0 ? std::log(nu.weight(z)) : kNegInf) -
                          std::log(wn.cell(i, j)[z]);
                }
            CutOptions copts;
            copts.seed = mix64(seed ^ (static_cast<std::uint64_t>(ix) << 32) ^ r);
            const double dist =
                delta_cut(embed_graph(WeightedGraph(nu.space(), m)), wn, copts).value;
            if (dist <= be->radius) logw[r] = ll;
        });

        const double lse = log_sum_exp(logw, 0, logw.size());
        double lse2 = kNegInf;
        {
            std::vector<double> twice(logw);
            for (double& v : twice)
                if (v != kNegInf) v *= 2.0;
            lse2 = log_sum_exp(twice, 0, twice.size());
        }
        LdpRow row;
        row.n = n;
        row.method = "monte-carlo";
        row.samples = samples;
        row.rate_target = rep.rate_target;
        row.log_prob = lse - std::log(static_cast<double>(samples));
        row.scaled = 2.0 * row.log_prob / (static_cast<double>(n) * n);
        row.gap = row.scaled + rep.rate_target;
        if (lse != kNegInf) {
            row.ess = std::exp(2.0 * lse - lse2);
            const double msamp = static_cast<double>(samples);
            const double hw_log =
                1.96 * std::sqrt(std::max(0.0, (msamp / row.ess - 1.0) / (msamp - 1.0)));
            row.half_width = 2.0 * hw_log / (static_cast<double>(n) * n);
        }
        rep.rows[ix] = row;
    }
    return rep;
}

ConcentrationTable concentration_experiment(const FiniteMeasure& nu, const MeanEvent& event,
                                            const std::vector<int>& n_list, int reps,
                                            std::uint64_t seed) {
    require_input(!n_list.empty(), "concentration needs at least one graph size");
    require_input(reps >= 1, "concentration needs at least one replica");

    ConstraintSet cs;
    cs.n = 1;
    cs.items.push_back({event.f, event.dir, event.threshold, {}});
    const MinimizerResult opt = minimize_rate(nu, cs);
    const FiniteMeasure star = opt.graphon.cell_measure(0, 0);

    ConcentrationTable table;
    table.rate_value = opt.value;
    const bool lattice_ok = detect_lattice(event.f).ok;

    for (int n : n_list) {
        check_event_inputs(n, nu, event);
        const StepGraphon target = StepGraphon::constant(star, n);
        std::vector<double> dist(static_cast<std::size_t>(reps));
        auto measure_one = [&](std::size_t r, const WeightedGraph& g) {
            CutOptions copts;
            copts.seed = mix64(seed ^ 0xD15ull ^ (static_cast<std::uint64_t>(n) << 32) ^ r);
            dist[r] = delta_cut(embed_graph(g), target, copts).value;
        };
        if (lattice_ok) {
            const ConditionalSampler sampler(n, nu, event);
            parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
                const std::uint64_t s2 =
                    mix64(seed ^ mix64((static_cast<std::uint64_t>(n) << 32) | r));
                measure_one(r, sampler.sample(s2));
            });
        } else {
            for (std::size_t r = 0; r < static_cast<std::size_t>(reps); ++r) {
                const std::uint64_t s2 =
                    mix64(seed ^ mix64((static_cast<std::uint64_t>(n) << 32) | r));
                measure_one(r, conditional_sample(n, nu, event, s2));
            }
        }
        std::sort(dist.begin(), dist.end());
        ConcentrationRow row;
        row.n = n;
        row.median = reps % 2 == 1 ? dist[static_cast<std::size_t>(reps / 2)]
                                   : 0.5 * (dist[static_cast<std::size_t>(reps / 2 - 1)] +
                                            dist[static_cast<std::size_t>(reps / 2)]);
        const auto qix = static_cast<std::size_t>(
            std::min<long>(reps - 1, static_cast<long>(std::ceil(0.9 * reps)) - 1));
        row.q90 = dist[qix];
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace graphon
