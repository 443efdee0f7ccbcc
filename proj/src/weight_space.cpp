#include "graphon/weight_space.hpp"

#include <cmath>
#include <string>

#include "graphon/errors.hpp"

namespace graphon {

namespace {

void check_finite(const Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            fail_input(std::string(what) + " contains a non-finite entry at index " +
                       std::to_string(i));
    }
}

}  // namespace

WeightSpace::WeightSpace(Eigen::VectorXd points, Eigen::MatrixXd dist, Eigen::Index zero_index)
    : points_(std::move(points)), dist_(std::move(dist)), zero_index_(zero_index) {
    const Eigen::Index s = points_.size();
    require_input(s >= 1, "weight space needs at least one point");
    check_finite(points_, "weight space points");
    require_input(dist_.rows() == s && dist_.cols() == s,
                  "metric matrix shape does not match the point count");
    require_input(zero_index_ >= 0 && zero_index_ < s, "zero_index out of range");
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
            double d = dist_(i, j);
            if (!std::isfinite(d) || d < 0.0)
                fail_input("metric entries must be finite and nonnegative");
            if (std::abs(d - dist_(j, i)) > 1e-12) fail_input("metric matrix is not symmetric");
            if (i == j && std::abs(d) > 1e-12) fail_input("metric diagonal must be zero");
            if (i != j && d <= 0.0)
                fail_input("metric must be strictly positive between distinct points (" +
                           std::to_string(i) + ", " + std::to_string(j) + ")");
        }
    }
    // Canonicalize so downstream comparisons are exact.
    dist_ = ((dist_ + dist_.transpose()) / 2.0).eval();
    dist_.diagonal().setZero();
    for (Eigen::Index k = 0; k < s; ++k)
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index j = 0; j < s; ++j)
                if (dist_(i, j) > dist_(i, k) + dist_(k, j) + 1e-12)
                    fail_input("metric violates the triangle inequality on points (" +
                               std::to_string(i) + ", " + std::to_string(j) + ", " +
                               std::to_string(k) + ")");
    diameter_ = dist_.maxCoeff();
}

WeightSpace::WeightSpace(Trusted, Eigen::VectorXd points, Eigen::MatrixXd dist,
                         Eigen::Index zero_index)
    : points_(std::move(points)),
      dist_(std::move(dist)),
      zero_index_(zero_index),
      diameter_(dist_.maxCoeff()) {}

bool WeightSpace::same_as(const WeightSpace& other) const {
    if (this == &other) return true;
    return points_.size() == other.points_.size() && zero_index_ == other.zero_index_ &&
           points_ == other.points_ && dist_ == other.dist_;
}

std::shared_ptr<const WeightSpace> WeightSpace::discrete(Eigen::VectorXd points,
                                                         Eigen::Index zero_index) {
    const Eigen::Index s = points.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(s, s) - Eigen::MatrixXd::Identity(s, s);
    return std::make_shared<WeightSpace>(std::move(points), std::move(d), zero_index);
}

std::shared_ptr<const WeightSpace> WeightSpace::line(Eigen::VectorXd points,
                                                     Eigen::Index zero_index) {
    const Eigen::Index s = points.size();
    require_input(s >= 1, "weight space needs at least one point");
    check_finite(points, "weight space points");
    require_input(zero_index >= 0 && zero_index < s, "zero_index out of range");
    Eigen::MatrixXd d(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j) d(i, j) = std::abs(points[i] - points[j]);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = i + 1; j < s; ++j)
            if (d(i, j) == 0.0) fail_input("line space points must be distinct");
    return std::shared_ptr<const WeightSpace>(
        new WeightSpace(Trusted{}, std::move(points), std::move(d), zero_index));
}

WeightSpacePtr binary_space() {
    static const WeightSpacePtr space = [] {
        Eigen::VectorXd pts(2);
        pts << 0.0, 1.0;
        Eigen::MatrixXd d(2, 2);
        d << 0.0, 1.0, 1.0, 0.0;
        return std::make_shared<const WeightSpace>(pts, d, 0);
    }();
    return space;
}

}  // namespace graphon
