#pragma once

#include <Eigen/Core>

#include "graphon/weight_space.hpp"

namespace graphon {

// Bounded test kernel on the n x n grid: cell (i, j) carries one real value
// per weight-space point, stored like StepGraphon cells (row i*n + j).
class DualKernel {
  public:
    DualKernel(WeightSpacePtr space, int n, Eigen::MatrixXd values);

    const WeightSpacePtr& space() const { return space_; }
    int n() const { return n_; }
    const Eigen::MatrixXd& values() const { return values_; }
    auto cell(int i, int j) const { return values_.row(static_cast<Eigen::Index>(i) * n_ + j); }
    double bound() const { return values_.cwiseAbs().maxCoeff(); }

  private:
    WeightSpacePtr space_;
    int n_;
    Eigen::MatrixXd values_;
};

}  // namespace graphon
