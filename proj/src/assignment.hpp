#pragma once

#include <Eigen/Core>
#include <vector>

namespace graphon::detail {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns sigma with row i matched to sigma[i].
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace graphon::detail
