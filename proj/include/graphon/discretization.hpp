#pragma once

#include <Eigen/Core>
#include <vector>

#include "graphon/measure.hpp"
#include "graphon/step_graphon.hpp"
#include "graphon/weight_space.hpp"

namespace graphon {

// Dyadic partitions of an interval: level m splits [a, b] into 2^m equal
// cells represented by their midpoints. Nested by construction: every
// level-m cell is the union of two level-(m+1) cells.
class NestedPartitionScheme {
  public:
    NestedPartitionScheme(double a, double b, int depth_max);

    double a() const { return a_; }
    double b() const { return b_; }
    int depth_max() const { return depth_max_; }
    Eigen::Index cells(int m) const { return Eigen::Index(1) << m; }
    double width(int m) const { return (b_ - a_) / static_cast<double>(cells(m)); }
    double representative(int m, Eigen::Index i) const;
    // Cell whose midpoint represents the distinguished point: the cell
    // containing 0 clamped into [a, b].
    Eigen::Index zero_cell(int m) const;
    // Midpoint representatives with the |x - y| metric.
    WeightSpacePtr level_space(int m) const;

  private:
    void check_level(int m) const;

    double a_;
    double b_;
    int depth_max_;
};

// Probability measure on [a, b] with a piecewise-constant density:
// breakpoints (k+1, strictly increasing) and one value per piece. The total
// mass must equal one to measure tolerance.
class DensityMeasure {
  public:
    DensityMeasure(Eigen::VectorXd breakpoints, Eigen::VectorXd values);

    const Eigen::VectorXd& breakpoints() const { return breakpoints_; }
    const Eigen::VectorXd& values() const { return values_; }
    double support_lo() const { return breakpoints_[0]; }
    double support_hi() const { return breakpoints_[breakpoints_.size() - 1]; }
    double mass() const;
    // Exact piecewise integral over [lo, hi].
    double integral(double lo, double hi) const;

    static DensityMeasure uniform(double a, double b);

  private:
    Eigen::VectorXd breakpoints_;
    Eigen::VectorXd values_;
};

// Graphon whose cells are density measures on a common interval.
class DensityGraphon {
  public:
    DensityGraphon(int n, std::vector<DensityMeasure> cells);

    int n() const { return n_; }
    const DensityMeasure& cell(int i, int j) const;

    static DensityGraphon constant(const DensityMeasure& mu, int n);

  private:
    int n_;
    std::vector<DensityMeasure> cells_;
};

DensityGraphon relabel(const DensityGraphon& w, const std::vector<int>& sigma);

// Level-m projection: cell masses as atoms at the representatives. All
// levels aggregate the same depth_max leaf integrals through a pairwise
// summation tree, which makes the composition law with project_between hold
// bit for bit.
FiniteMeasure project_measure(const DensityMeasure& mu, const NestedPartitionScheme& scheme,
                              int m);

// Coarsening between discrete levels: level-n weights summed pairwise down
// to level m <= n. Input must live on the scheme's level-n space.
FiniteMeasure project_between(const FiniteMeasure& mu_n, const NestedPartitionScheme& scheme,
                              int m);

// Cell-wise measure projection.
StepGraphon project_graphon(const DensityGraphon& w, const NestedPartitionScheme& scheme, int m);

struct ProjectionRates {
    std::vector<double> values;  // entropy of the level-m projections, m = 1..m_max
    int plateau_level = -1;      // first level whose increment falls below 1e-10
    double supremum = 0.0;       // last value: the rate by the monotone limit
};

// Entropy of the projected pair per level; nondecreasing in m.
ProjectionRates rate_by_projections(const DensityGraphon& w, const DensityMeasure& nu,
                                    const NestedPartitionScheme& scheme, int m_max);

}  // namespace graphon
