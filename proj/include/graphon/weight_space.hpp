#pragma once

#include <Eigen/Core>
#include <memory>

namespace graphon {

// Finite metric space of edge weights. Points carry numeric labels; the
// metric is a full matrix validated at construction (symmetry, zero diagonal,
// strict positivity off the diagonal, triangle inequality). zero_index marks
// the distinguished "no edge" point used on diagonals of embedded graphs.
class WeightSpace {
  public:
    WeightSpace(Eigen::VectorXd points, Eigen::MatrixXd dist, Eigen::Index zero_index);

    Eigen::Index size() const { return points_.size(); }
    const Eigen::VectorXd& points() const { return points_; }
    const Eigen::MatrixXd& dist() const { return dist_; }
    double dist(Eigen::Index i, Eigen::Index j) const { return dist_(i, j); }
    Eigen::Index zero_index() const { return zero_index_; }
    double diameter() const { return diameter_; }

    // Structural equality of (points, dist, zero_index); measures and
    // graphons may only be combined when their spaces agree.
    bool same_as(const WeightSpace& other) const;

    // Discrete 0/1 metric on the given labels.
    static std::shared_ptr<const WeightSpace> discrete(Eigen::VectorXd points,
                                                       Eigen::Index zero_index);

    // |x - y| metric on distinct real points. The axioms hold by construction,
    // so the cubic triangle scan is skipped; needed for fine dyadic levels.
    static std::shared_ptr<const WeightSpace> line(Eigen::VectorXd points,
                                                   Eigen::Index zero_index);

  private:
    struct Trusted {};
    WeightSpace(Trusted, Eigen::VectorXd points, Eigen::MatrixXd dist, Eigen::Index zero_index);

    Eigen::VectorXd points_;
    Eigen::MatrixXd dist_;
    Eigen::Index zero_index_;
    double diameter_;
};

using WeightSpacePtr = std::shared_ptr<const WeightSpace>;

// Two-point space {0, 1} at distance 1, zero point first. The workhorse of
// the Bernoulli examples and tests.
WeightSpacePtr binary_space();

}  // namespace graphon
