#include "graphon/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "graphon/errors.hpp"
#include "maxflow.hpp"

namespace graphon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_no_nan(const Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::isnan(v[i])) fail_runtime(std::string(what) + " contains NaN");
}

// Largest one-sided Prokhorov deficiency max(m1, m2) - maxflow for the
// bipartite transport network whose arcs are the pairs with adj(i, j) true.
// By symmetry of the metric the two flow directions have equal value, so one
// flow decides both inequalities.
double deficiency(const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                  const Eigen::MatrixXd& dist, double radius, bool strict) {
    const int s = static_cast<int>(w1.size());
    detail::MaxFlow flow(2 * s + 2);
    const int source = 2 * s;
    const int sink = 2 * s + 1;
    const double big = w1.sum() + w2.sum() + 1.0;
    for (int i = 0; i < s; ++i) {
        if (w1[i] > 0.0) flow.add_edge(source, i, w1[i]);
        if (w2[i] > 0.0) flow.add_edge(s + i, sink, w2[i]);
    }
    for (int i = 0; i < s; ++i) {
        if (w1[i] <= 0.0) continue;
        for (int j = 0; j < s; ++j) {
            if (w2[j] <= 0.0) continue;
            double d = dist(i, j);
            if (strict ? d < radius : d <= radius) flow.add_edge(i, s + j, big);
        }
    }
    double moved = flow.run(source, sink);
    return std::max(0.0, std::max(w1.sum(), w2.sum()) - moved);
}

}  // namespace

FiniteMeasure::FiniteMeasure(WeightSpacePtr space, Eigen::VectorXd weights, MeasureKind kind)
    : space_(std::move(space)), weights_(std::move(weights)), kind_(kind) {
    require_input(space_ != nullptr, "measure needs a weight space");
    require_input(weights_.size() == space_->size(),
                  "measure weight count does not match the space");
    check_no_nan(weights_, "measure weights");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (weights_[i] < -kMassTol)
            fail_input("signed measures are not supported (negative weight at index " +
                       std::to_string(i) + ")");
        if (weights_[i] < 0.0) weights_[i] = 0.0;
    }
    double m = weights_.sum();
    if (kind_ == MeasureKind::probability) {
        if (std::abs(m - 1.0) > kMassTol)
            fail_input("probability measure has mass " + std::to_string(m));
    } else {
        if (m > 1.0 + kMassTol)
            fail_input("subprobability measure has mass " + std::to_string(m) + " > 1");
    }
}

bool FiniteMeasure::is_probability() const { return std::abs(mass() - 1.0) <= kMassTol; }

FiniteMeasure FiniteMeasure::dirac(WeightSpacePtr space, Eigen::Index i) {
    require_input(space != nullptr && i >= 0 && i < space->size(),
                  "dirac point index out of range");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(space->size());
    w[i] = 1.0;
    return FiniteMeasure(std::move(space), std::move(w), MeasureKind::probability);
}

FiniteMeasure bernoulli(double p) {
    require_input(p >= 0.0 && p <= 1.0, "bernoulli parameter must lie in [0, 1]");
    Eigen::VectorXd w(2);
    w << 1.0 - p, p;
    return FiniteMeasure(binary_space(), std::move(w), MeasureKind::probability);
}

double kl_divergence(const FiniteMeasure& omega, const FiniteMeasure& nu) {
    require_input(omega.space()->same_as(*nu.space()),
                  "relative entropy needs measures on the same weight space");
    require_input(nu.is_probability(), "relative entropy reference must be a probability measure");
    if (!omega.is_probability()) return kInf;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
        double w = omega.weight(i);
        if (w <= 0.0) continue;
        double q = nu.weight(i);
        if (q <= 0.0) return kInf;
        sum += w * std::log(w / q);
    }
    return sum;
}

bool lp_feasible(const FiniteMeasure& eta1, const FiniteMeasure& eta2, double eps) {
    require_input(eta1.space()->same_as(*eta2.space()),
                  "Prokhorov feasibility needs measures on the same weight space");
    if (!std::isfinite(eps)) fail_input("Prokhorov radius must be finite");
    if (eps < 0.0) return false;
    double g = deficiency(eta1.weights(), eta2.weights(), eta1.space()->dist(), eps,
                          /*strict=*/true);
    return g <= eps;
}

double lp_distance(const FiniteMeasure& eta1, const FiniteMeasure& eta2) {
    require_input(eta1.space()->same_as(*eta2.space()),
                  "Prokhorov distance needs measures on the same weight space");
    // Canonical argument order makes symmetry bitwise exact.
    bool swap_args = std::lexicographical_compare(
        eta2.weights().begin(), eta2.weights().end(), eta1.weights().begin(),
        eta1.weights().end());
    const Eigen::VectorXd& w1 = swap_args ? eta2.weights() : eta1.weights();
    const Eigen::VectorXd& w2 = swap_args ? eta1.weights() : eta2.weights();
    if (w1 == w2) return 0.0;
    const Eigen::MatrixXd& dist = eta1.space()->dist();
    const Eigen::Index s = w1.size();

    // Sorted distinct distances delimit the intervals on which the strict
    // thickening is constant; on (d_k, d_{k+1}] feasibility at radius eps is
    // exactly eps >= g_k, the deficiency under adjacency d <= d_k. The first
    // interval containing feasible radii holds the infimum max(d_k, g_k), and
    // that predicate is monotone in k, so binary search applies.
    std::vector<double> levels;
    levels.reserve(static_cast<std::size_t>(s) * (s - 1) / 2 + 1);
    levels.push_back(0.0);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = i + 1; j < s; ++j) levels.push_back(dist(i, j));
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const int K = static_cast<int>(levels.size());

    auto gap_at = [&](int k) {
        return deficiency(w1, w2, dist, levels[static_cast<std::size_t>(k)], /*strict=*/false);
    };
    auto interval_feasible = [&](int k, double g) {
        return k + 1 >= K || g <= levels[static_cast<std::size_t>(k) + 1];
    };

    int lo = 0, hi = K - 1;
    double g_hi = gap_at(hi);  // the last interval always admits feasible radii
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        double g_mid = gap_at(mid);
        if (interval_feasible(mid, g_mid)) {
            hi = mid;
            g_hi = g_mid;
        } else {
            lo = mid + 1;
        }
    }
    return std::max(levels[static_cast<std::size_t>(hi)], g_hi);
}

double log_mgf(const Eigen::VectorXd& f, const FiniteMeasure& nu) {
    require_input(f.size() == nu.size(), "function length does not match the weight space");
    require_input(nu.is_probability(), "log-mgf reference must be a probability measure");
    check_no_nan(f, "log-mgf argument");
    double shift = -kInf;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (nu.weight(i) > 0.0) shift = std::max(shift, f[i]);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (nu.weight(i) > 0.0) sum += nu.weight(i) * std::exp(f[i] - shift);
    return shift + std::log(sum);
}

FiniteMeasure tilt(const FiniteMeasure& nu, const Eigen::VectorXd& f, double theta) {
    require_input(f.size() == nu.size(), "function length does not match the weight space");
    require_input(nu.is_probability(), "tilting needs a probability measure");
    check_no_nan(f, "tilt function");
    if (std::isnan(theta)) fail_runtime("tilt parameter is NaN");
    Eigen::VectorXd g = theta * f;
    double shift = -kInf;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (nu.weight(i) > 0.0) shift = std::max(shift, g[i]);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(nu.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (nu.weight(i) > 0.0) w[i] = nu.weight(i) * std::exp(g[i] - shift);
    w /= w.sum();
    return FiniteMeasure(nu.space(), std::move(w), MeasureKind::probability);
}

}  // namespace graphon
