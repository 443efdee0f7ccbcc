#pragma once

#include <Eigen/Core>

#include "graphon/weight_space.hpp"

namespace graphon {

enum class MeasureKind { probability, subprobability };

// Mass tolerances shared across the library.
inline constexpr double kMassTol = 1e-12;
inline constexpr double kMetricTol = 1e-9;

// Nonnegative measure on a WeightSpace, stored as one weight per point.
// Signed input is rejected at construction; entries in [-1e-12, 0] are
// clamped to zero. A probability measure must have mass within 1e-12 of 1;
// a subprobability must have mass at most 1 + 1e-12.
class FiniteMeasure {
  public:
    FiniteMeasure(WeightSpacePtr space, Eigen::VectorXd weights,
                  MeasureKind kind = MeasureKind::probability);

    const WeightSpacePtr& space() const { return space_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    double weight(Eigen::Index i) const { return weights_[i]; }
    Eigen::Index size() const { return weights_.size(); }
    MeasureKind kind() const { return kind_; }
    double mass() const { return weights_.sum(); }
    bool is_probability() const;

    // Dirac measure at point i.
    static FiniteMeasure dirac(WeightSpacePtr space, Eigen::Index i);

  private:
    WeightSpacePtr space_;
    Eigen::VectorXd weights_;
    MeasureKind kind_;
};

// Bernoulli(p) on binary_space(): mass p at point 1.
FiniteMeasure bernoulli(double p);

// Relative entropy sum_i w_i log(w_i / nu_i) with 0 log 0 = 0. Returns +inf
// when omega is not a probability measure or fails absolute continuity
// (omega_i > 0 where nu_i = 0). Never returns NaN.
double kl_divergence(const FiniteMeasure& omega, const FiniteMeasure& nu);

// Prokhorov condition at radius eps: both one-sided inequalities
// eta1(U) <= eta2(U^eps) + eps over every subset U, with the strict
// thickening U^eps = { x : d(x, U) < eps }. Decided exactly via a
// transportation (max-flow) feasibility computation.
bool lp_feasible(const FiniteMeasure& eta1, const FiniteMeasure& eta2, double eps);

// Levy-Prokhorov distance: the infimum of the feasible radii. Computed
// exactly by scanning the finite candidate set (pairwise distances and
// achievable mass gaps); the result is feasible for every radius strictly
// above it, but may itself be infeasible because the thickening is strict.
double lp_distance(const FiniteMeasure& eta1, const FiniteMeasure& eta2);

// log integral of e^f dnu, stabilized by shifting with max f. Requires nu a
// probability measure. log_mgf is 1-Lipschitz in f under the sup norm.
double log_mgf(const Eigen::VectorXd& f, const FiniteMeasure& nu);

// Exponential tilt: weights proportional to nu_i * exp(theta * f_i),
// normalized to a probability measure.
FiniteMeasure tilt(const FiniteMeasure& nu, const Eigen::VectorXd& f, double theta);

}  // namespace graphon
