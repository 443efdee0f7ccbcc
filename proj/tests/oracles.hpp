#pragma once

// Independent reference implementations used only by tests. Each takes the
// most direct route available (full enumeration, bisection, long double or
// multiprecision arithmetic) and shares no code with the library paths it
// cross-checks.

#include <Eigen/Core>

#include "graphon/measure.hpp"
#include "graphon/step_graphon.hpp"

namespace oracle {

// Prokhorov condition checked literally: both inequalities over every
// nonempty subset, strict thickening. |Z| <= 20.
bool lp_feasible_subsets(const graphon::FiniteMeasure& a, const graphon::FiniteMeasure& b,
                         double eps);

// Infimum of feasible radii by bisection on lp_feasible_subsets.
double lp_distance_subsets(const graphon::FiniteMeasure& a, const graphon::FiniteMeasure& b);

// Relative entropy accumulated in long double.
double kl_direct(const Eigen::VectorXd& w, const Eigen::VectorXd& nu);

// KL between the graph distribution induced by w and the product null model,
// by enumerating every weighted graph on n vertices. Returns the raw sum
// (not scaled); s^(n(n-1)/2) must stay small.
double product_kl_enumeration(const graphon::StepGraphon& w, const graphon::FiniteMeasure& nu);

// log P(Binomial(N, p) >= k) summed in 100-digit floats.
double log_binomial_tail_mp(int trials, double p, int k);

// Cut distance by plain enumeration of all block subset pairs, aggregates
// rebuilt from scratch each time and compared with the subset-oracle metric.
double d_cut_plain(const graphon::StepGraphon& u, const graphon::StepGraphon& w);

// Legendre value sup_theta [theta * t - log mgf(theta * f)] by ternary search.
double legendre_value(const graphon::FiniteMeasure& nu, const Eigen::VectorXd& f, double t);

// Minimum KL over constant graphons on a simplex grid subject to a mean
// constraint <f, mu> >= t (or <= when ge is false). |Z| in {2, 3}.
double constant_grid_min(const graphon::FiniteMeasure& nu, const Eigen::VectorXd& f, double t,
                         bool ge, double grid_step);

}  // namespace oracle
