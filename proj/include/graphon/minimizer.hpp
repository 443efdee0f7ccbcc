#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "graphon/events.hpp"
#include "graphon/measure.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon {

// Linear mean constraint on a step graphon: the average of <f, cell> over
// the scope cells compared against the threshold. An empty scope means all
// cells. Scopes must be symmetric so the minimizer stays symmetric.
struct Constraint {
    Eigen::VectorXd f;
    Direction dir = Direction::ge;
    double threshold = 0.0;
    std::vector<std::pair<int, int>> scope;
};

struct ConstraintSet {
    int n = 1;  // grid size of the minimizing graphon
    std::vector<Constraint> items;
    double tolerance = 1e-9;  // feasibility slack
};

struct MinimizerResult {
    StepGraphon graphon;
    double value = 0.0;
    // Tilt coefficient per constraint: the minimizer's cells are tilts of nu
    // by the scoped sums of dual[c] * f_c. Signs match the direction.
    Eigen::VectorXd dual;
    double kkt_residual = 0.0;
    bool feasible = true;
    int iterations = 0;
    const char* method = "closed-form";
};

// Minimize the relative-entropy rate over graphons subject to the
// constraints. A single global constraint is solved in closed form by a
// monotone bisection on the tilt parameter; anything else runs entropic
// mirror descent on the cell simplices with dual ascent on the multipliers
// and returns the best feasible iterate.
MinimizerResult minimize_rate(const FiniteMeasure& nu, const ConstraintSet& constraints);

// Stationarity residual max over cells and supported points of
// |log(W_z / nu_z) - sum_c dual_c f_c(z) + lambda_cell| with the per-cell
// normalizer lambda at its minimizing midrange, plus primal feasibility,
// dual sign, and complementarity violations. Points outside the support of
// a cell are excluded: boundary solutions put stationarity in the normal
// cone there.
double kkt_check(const MinimizerResult& result, const FiniteMeasure& nu,
                 const ConstraintSet& constraints);

namespace detail {
// Relative entropy of raw positive cell rows against nu, extended off the
// simplex, and its coordinate gradient (testing hooks for the descent).
double entropy_objective(const Eigen::MatrixXd& cells, const FiniteMeasure& nu);
Eigen::MatrixXd entropy_gradient(const Eigen::MatrixXd& cells, const FiniteMeasure& nu);
}  // namespace detail

}  // namespace graphon
