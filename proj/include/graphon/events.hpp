#pragma once

#include <Eigen/Core>
#include <cmath>
#include <utility>

#include "graphon/errors.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon {

enum class Direction { ge, le };

inline const char* direction_name(Direction d) { return d == Direction::ge ? ">=" : "<="; }

// Edge-mean event: the average of f over all edge weights compared against
// a threshold. Thresholds are closed inequalities.
struct MeanEvent {
    MeanEvent(Eigen::VectorXd f_, Direction dir_, double threshold_)
        : f(std::move(f_)), dir(dir_), threshold(threshold_) {
        require_input(f.size() > 0 && f.allFinite(), "event functional must be finite and nonempty");
        require_input(std::isfinite(threshold), "event threshold must be finite");
    }

    Eigen::VectorXd f;
    Direction dir;
    double threshold;
};

// Cut-ball event: the sampled graph lies within the given unlabeled cut
// radius of the center graphon.
struct BallEvent {
    BallEvent(StepGraphon center_, double radius_) : center(std::move(center_)), radius(radius_) {
        require_input(std::isfinite(radius) && radius > 0.0, "ball radius must be positive");
    }

    StepGraphon center;
    double radius;
};

}  // namespace graphon
