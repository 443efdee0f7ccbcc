#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numeric>
#include <vector>

#include "graphon/measure.hpp"
#include "graphon/rng.hpp"
#include "graphon/step_graphon.hpp"
#include "graphon/weight_space.hpp"

namespace testutil {

// Random metric space from planar points; Euclidean distances satisfy the
// axioms up to rounding, which the validator tolerates.
inline graphon::WeightSpacePtr random_space(int s, graphon::CounterRng& rng) {
    Eigen::MatrixXd xy(s, 2);
    for (int i = 0; i < s; ++i) {
        xy(i, 0) = rng.next_double();
        xy(i, 1) = rng.next_double();
    }
    Eigen::VectorXd points(s);
    for (int i = 0; i < s; ++i) points[i] = i;
    Eigen::MatrixXd d(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) d(i, j) = (xy.row(i) - xy.row(j)).norm();
    return std::make_shared<graphon::WeightSpace>(points, d, 0);
}

inline Eigen::VectorXd random_simplex(Eigen::Index s, graphon::CounterRng& rng,
                                      bool allow_zeros = false) {
    Eigen::VectorXd w(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        double u = rng.next_double();
        w[i] = -std::log(1.0 - u);
        if (allow_zeros && rng.next_double() < 0.25) w[i] = 0.0;
    }
    if (w.sum() <= 0.0) w.setConstant(1.0);
    return w / w.sum();
}

inline graphon::FiniteMeasure random_probability(graphon::WeightSpacePtr space,
                                                 graphon::CounterRng& rng,
                                                 bool allow_zeros = false) {
    return graphon::FiniteMeasure(space, random_simplex(space->size(), rng, allow_zeros),
                                  graphon::MeasureKind::probability);
}

inline graphon::StepGraphon random_graphon(graphon::WeightSpacePtr space, int n,
                                           graphon::CounterRng& rng, bool symmetric = true,
                                           bool allow_zeros = false) {
    const Eigen::Index s = space->size();
    Eigen::MatrixXd cells(static_cast<Eigen::Index>(n) * n, s);
    for (int i = 0; i < n; ++i)
        for (int j = symmetric ? i : 0; j < n; ++j) {
            Eigen::VectorXd w = random_simplex(s, rng, allow_zeros);
            cells.row(static_cast<Eigen::Index>(i) * n + j) = w.transpose();
            if (symmetric) cells.row(static_cast<Eigen::Index>(j) * n + i) = w.transpose();
        }
    return graphon::StepGraphon(std::move(space), n, std::move(cells));
}

inline std::vector<int> random_permutation(int n, graphon::CounterRng& rng) {
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
    }
    return sigma;
}

}  // namespace testutil
