#include "graphon/discretization.hpp"

#include <cmath>
#include <string>

#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"

namespace graphon {

namespace {

// Pairwise adjacent reduction, one level up the dyadic tree at a time. All
// projections funnel through this so equal leaves give equal sums bit for bit.
Eigen::VectorXd tree_sum(Eigen::VectorXd leaves, Eigen::Index target_cells) {
    while (leaves.size() > target_cells) {
        Eigen::Index half = leaves.size() / 2;
        Eigen::VectorXd next(half);
        for (Eigen::Index i = 0; i < half; ++i) next[i] = leaves[2 * i] + leaves[2 * i + 1];
        leaves = std::move(next);
    }
    return leaves;
}

Eigen::VectorXd leaf_masses(const DensityMeasure& mu, const NestedPartitionScheme& scheme) {
    const Eigen::Index leaves = scheme.cells(scheme.depth_max());
    const double w = scheme.width(scheme.depth_max());
    Eigen::VectorXd out(leaves);
    for (Eigen::Index i = 0; i < leaves; ++i) {
        double lo = scheme.a() + static_cast<double>(i) * w;
        double hi = (i + 1 == leaves) ? scheme.b() : scheme.a() + static_cast<double>(i + 1) * w;
        out[i] = mu.integral(lo, hi);
    }
    return out;
}

}  // namespace

NestedPartitionScheme::NestedPartitionScheme(double a, double b, int depth_max)
    : a_(a), b_(b), depth_max_(depth_max) {
    require_input(std::isfinite(a) && std::isfinite(b) && a < b,
                  "partition scheme needs a finite interval with a < b");
    require_input(depth_max >= 1 && depth_max <= 14,
                  "partition depth must lie in [1, 14]");
}

void NestedPartitionScheme::check_level(int m) const {
    require_input(m >= 0 && m <= depth_max_,
                  "level " + std::to_string(m) + " outside [0, " + std::to_string(depth_max_) +
                      "]");
}

double NestedPartitionScheme::representative(int m, Eigen::Index i) const {
    check_level(m);
    require_input(i >= 0 && i < cells(m), "cell index out of range");
    return a_ + (static_cast<double>(i) + 0.5) * width(m);
}

Eigen::Index NestedPartitionScheme::zero_cell(int m) const {
    check_level(m);
    double z = std::min(std::max(0.0, a_), b_);
    auto idx = static_cast<Eigen::Index>(std::floor((z - a_) / width(m)));
    return std::min(std::max<Eigen::Index>(idx, 0), cells(m) - 1);
}

WeightSpacePtr NestedPartitionScheme::level_space(int m) const {
    check_level(m);
    Eigen::VectorXd points(cells(m));
    for (Eigen::Index i = 0; i < cells(m); ++i) points[i] = representative(m, i);
    return WeightSpace::line(std::move(points), zero_cell(m));
}

DensityMeasure::DensityMeasure(Eigen::VectorXd breakpoints, Eigen::VectorXd values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    require_input(breakpoints_.size() >= 2, "density needs at least one piece");
    require_input(values_.size() + 1 == breakpoints_.size(),
                  "density needs one value per piece");
    for (Eigen::Index i = 0; i < breakpoints_.size(); ++i)
        require_input(std::isfinite(breakpoints_[i]), "density breakpoints must be finite");
    for (Eigen::Index i = 0; i + 1 < breakpoints_.size(); ++i)
        require_input(breakpoints_[i] < breakpoints_[i + 1],
                      "density breakpoints must be strictly increasing");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (std::isnan(values_[i])) fail_runtime("density value is NaN");
        require_input(values_[i] >= 0.0 && std::isfinite(values_[i]),
                      "density values must be finite and nonnegative");
    }
    require_input(std::abs(mass() - 1.0) <= kMassTol,
                  "density must integrate to one (mass " + std::to_string(mass()) + ")");
}

double DensityMeasure::mass() const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        sum += values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
    return sum;
}

double DensityMeasure::integral(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        double l = std::max(lo, breakpoints_[i]);
        double h = std::min(hi, breakpoints_[i + 1]);
        if (h > l) sum += values_[i] * (h - l);
    }
    return sum;
}

DensityMeasure DensityMeasure::uniform(double a, double b) {
    Eigen::VectorXd bp(2);
    bp << a, b;
    Eigen::VectorXd v(1);
    v << 1.0 / (b - a);
    return DensityMeasure(std::move(bp), std::move(v));
}

DensityGraphon::DensityGraphon(int n, std::vector<DensityMeasure> cells)
    : n_(n), cells_(std::move(cells)) {
    require_input(n_ >= 1, "density graphon needs at least one block");
    require_input(cells_.size() == static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_),
                  "density graphon needs n^2 cells in row-major order");
}

const DensityMeasure& DensityGraphon::cell(int i, int j) const {
    require_input(i >= 0 && i < n_ && j >= 0 && j < n_, "cell index out of range");
    return cells_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(j)];
}

DensityGraphon DensityGraphon::constant(const DensityMeasure& mu, int n) {
    return DensityGraphon(n, std::vector<DensityMeasure>(
                                 static_cast<std::size_t>(n) * static_cast<std::size_t>(n), mu));
}

DensityGraphon relabel(const DensityGraphon& w, const std::vector<int>& sigma) {
    const int n = w.n();
    require_input(is_permutation(sigma, n), "relabeling must be a permutation of the blocks");
    std::vector<DensityMeasure> cells;
    cells.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cells.push_back(w.cell(sigma[static_cast<std::size_t>(i)],
                                   sigma[static_cast<std::size_t>(j)]));
    return DensityGraphon(n, std::move(cells));
}

FiniteMeasure project_measure(const DensityMeasure& mu, const NestedPartitionScheme& scheme,
                              int m) {
    require_input(m >= 1 && m <= scheme.depth_max(), "projection level out of range");
    require_input(mu.support_lo() >= scheme.a() - 1e-12 && mu.support_hi() <= scheme.b() + 1e-12,
                  "density support must lie inside the partition interval");
    Eigen::VectorXd weights = tree_sum(leaf_masses(mu, scheme), scheme.cells(m));
    return FiniteMeasure(scheme.level_space(m), std::move(weights), MeasureKind::probability);
}

FiniteMeasure project_between(const FiniteMeasure& mu_n, const NestedPartitionScheme& scheme,
                              int m) {
    Eigen::Index size = mu_n.size();
    int n = 0;
    while ((Eigen::Index(1) << n) < size) ++n;
    require_input((Eigen::Index(1) << n) == size && n <= scheme.depth_max(),
                  "input measure does not live on a level of this scheme");
    require_input(m >= 1 && m <= n, "target level must be coarser than the source level");
    Eigen::VectorXd expected(size);
    for (Eigen::Index i = 0; i < size; ++i) expected[i] = scheme.representative(n, i);
    require_input(mu_n.space()->points() == expected,
                  "input measure points do not match the scheme's level representatives");
    Eigen::VectorXd weights = tree_sum(mu_n.weights(), scheme.cells(m));
    return FiniteMeasure(scheme.level_space(m), std::move(weights), mu_n.kind());
}

StepGraphon project_graphon(const DensityGraphon& w, const NestedPartitionScheme& scheme,
                            int m) {
    require_input(m >= 1 && m <= scheme.depth_max(), "projection level out of range");
    const int n = w.n();
    WeightSpacePtr space = scheme.level_space(m);
    Eigen::MatrixXd cells(static_cast<Eigen::Index>(n) * n, space->size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const DensityMeasure& cell = w.cell(i, j);
            require_input(cell.support_lo() >= scheme.a() - 1e-12 &&
                              cell.support_hi() <= scheme.b() + 1e-12,
                          "density support must lie inside the partition interval");
            cells.row(static_cast<Eigen::Index>(i) * n + j) =
                tree_sum(leaf_masses(cell, scheme), scheme.cells(m)).transpose();
        }
    return StepGraphon(std::move(space), n, std::move(cells));
}

ProjectionRates rate_by_projections(const DensityGraphon& w, const DensityMeasure& nu,
                                    const NestedPartitionScheme& scheme, int m_max) {
    require_input(m_max >= 1 && m_max <= scheme.depth_max(),
                  "projection levels must lie within the scheme depth");
    require_input(nu.support_lo() >= scheme.a() - 1e-12 && nu.support_hi() <= scheme.b() + 1e-12,
                  "density support must lie inside the partition interval");
    ProjectionRates out;
    for (int m = 1; m <= m_max; ++m) {
        StepGraphon w_m = project_graphon(w, scheme, m);
        // reference projected onto the same space instance as the cells
        FiniteMeasure nu_m(w_m.space(), tree_sum(leaf_masses(nu, scheme), scheme.cells(m)),
                           MeasureKind::probability);
        double h = graphon_entropy(w_m, nu_m);
        if (out.plateau_level < 0 && !out.values.empty() &&
            std::abs(h - out.values.back()) < 1e-10)
            out.plateau_level = m;
        out.values.push_back(h);
    }
    out.supremum = out.values.back();
    return out;
}

}  // namespace graphon
