#include "graphon/cut_metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "assignment.hpp"
#include "graphon/errors.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kImprove = 1e-14;

std::vector<int> mask_to_blocks(unsigned long mask, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1UL) out.push_back(i);
    return out;
}

double lp_between_aggregates(const WeightSpacePtr& space, const Eigen::VectorXd& au,
                             const Eigen::VectorXd& aw, double scale) {
    FiniteMeasure mu(space, au * scale, MeasureKind::subprobability);
    FiniteMeasure mw(space, aw * scale, MeasureKind::subprobability);
    return lp_distance(mu, mw);
}

// Exhaustive supremum over block subset pairs, Gray-coded so each step
// adjusts the aggregates by one block row or column. Aborts early (returning
// +inf) once the running max exceeds abort_above; used by the delta_cut
// branch-and-bound, where such a permutation can no longer win.
struct ExactCut {
    const StepGraphon& u;
    const StepGraphon& w;
    double abort_above = kInf;

    CutResult run() const {
        const int n = u.n();
        const Eigen::Index s = u.space()->size();
        const double scale = 1.0 / (static_cast<double>(n) * n);
        CutResult best;
        best.value = -1.0;
        unsigned long best_s = 0, best_t = 0;

        Eigen::MatrixXd pu = Eigen::MatrixXd::Zero(n, s);  // row j: sum_{i in S} u(i, j)
        Eigen::MatrixXd pw = Eigen::MatrixXd::Zero(n, s);
        unsigned long smask = 0;
        for (unsigned long gs = 0; gs < (1UL << n); ++gs) {
            if (gs > 0) {
                int bit = std::countr_zero(gs);
                bool added = !((smask >> bit) & 1UL);
                smask ^= 1UL << bit;
                double sign = added ? 1.0 : -1.0;
                for (int j = 0; j < n; ++j) {
                    pu.row(j) += sign * u.cell(bit, j);
                    pw.row(j) += sign * w.cell(bit, j);
                }
            }
            Eigen::VectorXd au = Eigen::VectorXd::Zero(s);
            Eigen::VectorXd aw = Eigen::VectorXd::Zero(s);
            unsigned long tmask = 0;
            for (unsigned long gt = 0; gt < (1UL << n); ++gt) {
                if (gt > 0) {
                    int bit = std::countr_zero(gt);
                    bool added = !((tmask >> bit) & 1UL);
                    tmask ^= 1UL << bit;
                    double sign = added ? 1.0 : -1.0;
                    au += sign * pu.row(bit).transpose();
                    aw += sign * pw.row(bit).transpose();
                }
                double v = lp_between_aggregates(u.space(), au, aw, scale);
                if (v > best.value + kImprove) {
                    best.value = v;
                    best_s = smask;
                    best_t = tmask;
                    if (v > abort_above) {
                        best.value = kInf;
                        return best;
                    }
                } else if (v >= best.value - kImprove &&
                           std::pair(smask, tmask) < std::pair(best_s, best_t)) {
                    best_s = smask;
                    best_t = tmask;
                }
            }
        }
        best.s_blocks = mask_to_blocks(best_s, n);
        best.t_blocks = mask_to_blocks(best_t, n);
        best.mode = CutMode::exact;
        return best;
    }
};

// Coordinate ascent over indicator vectors. Keeps, for both graphons, the
// column partials given S and the row partials given T, so a candidate flip
// is evaluated from O(s) updated aggregates and commits cost O(n s).
struct AscentCut {
    AscentCut(const StepGraphon& u_, const StepGraphon& w_) : u(u_), w(w_) {}

    const StepGraphon& u;
    const StepGraphon& w;

    int n = u.n();
    Eigen::Index s = u.space()->size();
    double scale = 1.0 / (static_cast<double>(n) * n);

    std::vector<char> in_s, in_t;
    Eigen::MatrixXd pu, pw;  // row j: sum_{i in S} cell(i, j)
    Eigen::MatrixXd ru, rw;  // row i: sum_{j in T} cell(i, j)
    Eigen::VectorXd au, aw;
    double value = 0.0;

    void init(const std::vector<char>& smask, const std::vector<char>& tmask) {
        in_s = smask;
        in_t = tmask;
        pu = Eigen::MatrixXd::Zero(n, s);
        pw = Eigen::MatrixXd::Zero(n, s);
        ru = Eigen::MatrixXd::Zero(n, s);
        rw = Eigen::MatrixXd::Zero(n, s);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (in_s[static_cast<std::size_t>(i)]) {
                    pu.row(j) += u.cell(i, j);
                    pw.row(j) += w.cell(i, j);
                }
                if (in_t[static_cast<std::size_t>(j)]) {
                    ru.row(i) += u.cell(i, j);
                    rw.row(i) += w.cell(i, j);
                }
            }
        au.setZero(s);
        aw.setZero(s);
        for (int j = 0; j < n; ++j)
            if (in_t[static_cast<std::size_t>(j)]) {
                au += pu.row(j).transpose();
                aw += pw.row(j).transpose();
            }
        value = lp_between_aggregates(u.space(), au, aw, scale);
    }

    bool try_flip_s(int i) {
        double sign = in_s[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
        Eigen::VectorXd nau = au + sign * ru.row(i).transpose();
        Eigen::VectorXd naw = aw + sign * rw.row(i).transpose();
        double v = lp_between_aggregates(u.space(), nau, naw, scale);
        if (v <= value + kImprove) return false;
        value = v;
        au = std::move(nau);
        aw = std::move(naw);
        in_s[static_cast<std::size_t>(i)] ^= 1;
        for (int j = 0; j < n; ++j) {
            pu.row(j) += sign * u.cell(i, j);
            pw.row(j) += sign * w.cell(i, j);
        }
        return true;
    }

    bool try_flip_t(int j) {
        double sign = in_t[static_cast<std::size_t>(j)] ? -1.0 : 1.0;
        Eigen::VectorXd nau = au + sign * pu.row(j).transpose();
        Eigen::VectorXd naw = aw + sign * pw.row(j).transpose();
        double v = lp_between_aggregates(u.space(), nau, naw, scale);
        if (v <= value + kImprove) return false;
        value = v;
        au = std::move(nau);
        aw = std::move(naw);
        in_t[static_cast<std::size_t>(j)] ^= 1;
        for (int i = 0; i < n; ++i) {
            ru.row(i) += sign * u.cell(i, j);
            rw.row(i) += sign * w.cell(i, j);
        }
        return true;
    }

    void climb() {
        for (int pass = 0; pass < 100 + n; ++pass) {
            bool moved = false;
            for (int i = 0; i < n; ++i) moved |= try_flip_s(i);
            for (int j = 0; j < n; ++j) moved |= try_flip_t(j);
            if (!moved) break;
        }
    }
};

std::vector<char> random_mask(int n, CounterRng& rng) {
    std::vector<char> mask(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = rng.next_u64() & 1;
    return mask;
}

// Multi-start ascent; optional warm start masks go first.
CutResult heuristic_cut(const StepGraphon& u, const StepGraphon& w, int starts,
                        std::uint64_t seed, const std::vector<char>* warm_s = nullptr,
                        const std::vector<char>* warm_t = nullptr) {
    const int n = u.n();
    CutResult best;
    best.value = -1.0;
    AscentCut ascent(u, w);
    for (int start = 0; start < starts; ++start) {
        CounterRng rng(seed, stream_tag::ascent + static_cast<std::uint64_t>(start));
        std::vector<char> sm, tm;
        if (start == 0 && warm_s && warm_t) {
            sm = *warm_s;
            tm = *warm_t;
        } else {
            sm = random_mask(n, rng);
            tm = random_mask(n, rng);
        }
        ascent.init(sm, tm);
        ascent.climb();
        if (ascent.value > best.value) {
            best.value = ascent.value;
            best.s_blocks.clear();
            best.t_blocks.clear();
            for (int i = 0; i < n; ++i) {
                if (ascent.in_s[static_cast<std::size_t>(i)]) best.s_blocks.push_back(i);
                if (ascent.in_t[static_cast<std::size_t>(i)]) best.t_blocks.push_back(i);
            }
        }
    }
    best.value = std::max(best.value, 0.0);
    best.mode = CutMode::heuristic_lower_bound;
    return best;
}

void check_compatible(const StepGraphon& u, const StepGraphon& w) {
    require_input(u.space()->same_as(*w.space()),
                  "cut metrics need graphons on the same weight space");
    require_input(u.n() == w.n(),
                  "cut metrics need matching block counts; refine to a common grid first");
}

bool all_cells_equal(const StepGraphon& w) {
    for (Eigen::Index r = 1; r < w.cells().rows(); ++r)
        if (w.cells().row(r) != w.cells().row(0)) return false;
    return true;
}

std::vector<int> identity_permutation(int n) {
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    return sigma;
}

double overlay_objective(const StepGraphon& w, const DualKernel& a,
                         const std::vector<int>& sigma) {
    const int n = w.n();
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sum += a.cell(i, j).dot(w.cell(sigma[static_cast<std::size_t>(i)],
                                           sigma[static_cast<std::size_t>(j)]));
    return sum / (static_cast<double>(n) * n);
}

}  // namespace

const char* cut_mode_name(CutMode mode) {
    switch (mode) {
        case CutMode::exact: return "exact";
        case CutMode::heuristic_lower_bound: return "heuristic-lower-bound";
        case CutMode::heuristic_upper_bound: return "heuristic-upper-bound";
    }
    return "unknown";
}

CutResult d_cut(const StepGraphon& u, const StepGraphon& w, const CutOptions& opts) {
    check_compatible(u, w);
    require_input(opts.exact_cut_blocks <= 16,
                  "exhaustive cut enumeration is limited to 16 blocks");
    if (u.n() <= opts.exact_cut_blocks) return ExactCut{u, w}.run();
    return heuristic_cut(u, w, opts.starts, opts.seed);
}

CutResult delta_cut(const StepGraphon& u, const StepGraphon& w, const CutOptions& opts) {
    require_input(u.space()->same_as(*w.space()),
                  "cut metrics need graphons on the same weight space");
    require_input(opts.refine >= 1, "refinement parameter must be positive");
    require_input(opts.exact_delta_blocks <= 9,
                  "exhaustive relabeling enumeration is limited to 9 blocks");
    // Unequal block counts are lifted to the least common refinement; cell
    // replication leaves the underlying kernel unchanged.
    const int common = std::lcm(u.n(), w.n());
    require_input(static_cast<long long>(common) * opts.refine <= 512,
                  "common refinement exceeds 512 blocks; coarsen the graphons first");
    const int fu = (common / u.n()) * opts.refine;
    const int fw = (common / w.n()) * opts.refine;
    const StepGraphon uu = fu > 1 ? refine(u, fu) : u;
    const StepGraphon ww = fw > 1 ? refine(w, fw) : w;
    const int n = uu.n();

    // A constant graphon is fixed by every relabeling: the infimum collapses
    // to a single cut distance.
    if (all_cells_equal(ww) || all_cells_equal(uu)) {
        CutResult res = d_cut(uu, ww, opts);
        res.sigma = identity_permutation(n);
        return res;
    }

    if (n <= opts.exact_delta_blocks) {
        CutResult best;
        best.value = kInf;
        std::vector<int> sigma = identity_permutation(n);
        do {
            StepGraphon rel = relabel(ww, sigma);
            CutResult cur = ExactCut{uu, rel, best.value}.run();
            if (cur.value < best.value) {
                best = cur;
                best.sigma = sigma;
                if (best.value <= 0.0) break;
            }
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        best.mode = CutMode::exact;
        return best;
    }

    // First-moment seeding: match blocks by the Prokhorov distance between
    // their row-average measures.
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd rowu = Eigen::VectorXd::Zero(uu.space()->size());
        for (int j = 0; j < n; ++j) rowu += uu.cell(i, j).transpose();
        FiniteMeasure mu(uu.space(), rowu / n, MeasureKind::subprobability);
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd roww = Eigen::VectorXd::Zero(ww.space()->size());
            for (int j = 0; j < n; ++j) roww += ww.cell(k, j).transpose();
            FiniteMeasure mw(ww.space(), roww / n, MeasureKind::subprobability);
            cost(i, k) = lp_distance(mu, mw);
        }
    }
    std::vector<int> sigma = detail::min_cost_assignment(cost);

    auto objective = [&](const std::vector<int>& sg, const std::vector<char>* ws,
                         const std::vector<char>* wt) {
        return heuristic_cut(uu, relabel(ww, sg), opts.inner_starts, opts.seed, ws, wt);
    };

    CounterRng rng(opts.seed, stream_tag::anneal);
    CutResult cur = objective(sigma, nullptr, nullptr);
    std::vector<int> best_sigma = sigma;
    double best_value = cur.value;

    // Temperature scale from the spread of objective values over random
    // relabelings; geometric cooling once per n proposals.
    double spread_min = cur.value, spread_max = cur.value;
    for (int probe = 0; probe < 8; ++probe) {
        std::vector<int> rp = sigma;
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(rp[static_cast<std::size_t>(i)], rp[static_cast<std::size_t>(j)]);
        }
        double v = objective(rp, nullptr, nullptr).value;
        spread_min = std::min(spread_min, v);
        spread_max = std::max(spread_max, v);
    }
    double t0 = std::max(1e-3, spread_max - spread_min);

    std::vector<char> warm_s(static_cast<std::size_t>(n), 0), warm_t(warm_s);
    for (int b : cur.s_blocks) warm_s[static_cast<std::size_t>(b)] = 1;
    for (int b : cur.t_blocks) warm_t[static_cast<std::size_t>(b)] = 1;

    const long iters = static_cast<long>(opts.anneal_iters_per_block) * n;
    for (long it = 0; it < iters; ++it) {
        double temp = t0 * std::pow(opts.cooling, static_cast<double>(it / n));
        int p = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        int q = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        if (q >= p) ++q;
        std::vector<int> proposal = sigma;
        std::swap(proposal[static_cast<std::size_t>(p)], proposal[static_cast<std::size_t>(q)]);
        CutResult trial = objective(proposal, &warm_s, &warm_t);
        double delta = trial.value - cur.value;
        if (delta < 0.0 || rng.next_double() < std::exp(-delta / temp)) {
            sigma = std::move(proposal);
            cur = trial;
            warm_s.assign(static_cast<std::size_t>(n), 0);
            warm_t.assign(static_cast<std::size_t>(n), 0);
            for (int b : cur.s_blocks) warm_s[static_cast<std::size_t>(b)] = 1;
            for (int b : cur.t_blocks) warm_t[static_cast<std::size_t>(b)] = 1;
            if (cur.value < best_value) {
                best_value = cur.value;
                best_sigma = sigma;
            }
        }
    }

    StepGraphon rel = relabel(ww, best_sigma);
    CutResult polished = heuristic_cut(uu, rel, opts.starts, opts.seed);
    polished.sigma = best_sigma;
    polished.mode = CutMode::heuristic_upper_bound;
    return polished;
}

CutResult overlay(const StepGraphon& w, const DualKernel& a, const CutOptions& opts) {
    require_input(w.space()->same_as(*a.space()),
                  "overlay needs a kernel on the graphon's weight space");
    require_input(w.n() == a.n(), "overlay needs a kernel on the graphon's grid");
    const int n = w.n();

    if (n <= opts.exact_delta_blocks) {
        CutResult best;
        best.value = -kInf;
        std::vector<int> sigma = identity_permutation(n);
        do {
            double v = overlay_objective(w, a, sigma);
            if (v > best.value + kImprove) {
                best.value = v;
                best.sigma = sigma;
            }
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        best.mode = CutMode::exact;
        return best;
    }

    CounterRng rng(opts.seed, stream_tag::anneal + 1);
    std::vector<int> sigma = identity_permutation(n);
    double cur = overlay_objective(w, a, sigma);
    std::vector<int> best_sigma = sigma;
    double best_value = cur;

    double spread_min = cur, spread_max = cur;
    for (int probe = 0; probe < 8; ++probe) {
        std::vector<int> rp = sigma;
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(rp[static_cast<std::size_t>(i)], rp[static_cast<std::size_t>(j)]);
        }
        double v = overlay_objective(w, a, rp);
        spread_min = std::min(spread_min, v);
        spread_max = std::max(spread_max, v);
    }
    double t0 = std::max(1e-3, spread_max - spread_min);

    const long iters = static_cast<long>(opts.anneal_iters_per_block) * n;
    for (long it = 0; it < iters; ++it) {
        double temp = t0 * std::pow(opts.cooling, static_cast<double>(it / n));
        int p = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        int q = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        if (q >= p) ++q;
        std::swap(sigma[static_cast<std::size_t>(p)], sigma[static_cast<std::size_t>(q)]);
        double v = overlay_objective(w, a, sigma);
        double delta = cur - v;  // maximizing
        if (delta < 0.0 || rng.next_double() < std::exp(-delta / temp)) {
            cur = v;
            if (cur > best_value) {
                best_value = cur;
                best_sigma = sigma;
            }
        } else {
            std::swap(sigma[static_cast<std::size_t>(p)], sigma[static_cast<std::size_t>(q)]);
        }
    }

    CutResult res;
    res.value = best_value;
    res.sigma = best_sigma;
    res.mode = CutMode::heuristic_lower_bound;
    return res;
}

}  // namespace graphon
