#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"
#include "graphon/minimizer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace graphon;

namespace {

Eigen::VectorXd identity_f() {
    Eigen::VectorXd f(2);
    f << 0.0, 1.0;
    return f;
}

ConstraintSet single(int n, Eigen::VectorXd f, Direction dir, double t) {
    ConstraintSet cs;
    cs.n = n;
    cs.items.push_back({std::move(f), dir, t, {}});
    return cs;
}

}  // namespace

TEST_CASE("empty constraint set returns the null model with zero rate") {
    auto nu = bernoulli(0.3);
    auto r = minimize_rate(nu, ConstraintSet{3, {}, 1e-9});
    CHECK(r.value == 0.0);
    CHECK(r.kkt_residual == 0.0);
    CHECK(r.graphon.n() == 3);
    CHECK(r.graphon.cell(1, 2)[1] == 0.3);
    CHECK(std::string(r.method) == "closed-form");
}

TEST_CASE("active edge-density constraint tilts to the threshold") {
    auto nu = bernoulli(0.3);
    auto r = minimize_rate(nu, single(4, identity_f(), Direction::ge, 0.5));
    CHECK(r.value == doctest::Approx(0.08717669357238891).epsilon(1e-10));
    CHECK(std::abs(r.graphon.cell(0, 0)[1] - 0.5) < 1e-11);
    CHECK(std::abs(r.dual[0] - std::log(7.0 / 3.0)) < 1e-9);
    CHECK(r.kkt_residual < 1e-10);
    CHECK(r.feasible);
}

TEST_CASE("constraint already satisfied by the null model costs nothing") {
    auto nu = bernoulli(0.3);
    auto r = minimize_rate(nu, single(2, identity_f(), Direction::ge, 0.2));
    CHECK(r.value == 0.0);
    CHECK(r.dual[0] == 0.0);
    CHECK(r.graphon.cell(0, 1)[1] == 0.3);
}

TEST_CASE("upper constraints tilt downward with a negative multiplier") {
    auto nu = bernoulli(0.7);
    auto r = minimize_rate(nu, single(2, identity_f(), Direction::le, 0.5));
    CHECK(r.value == doctest::Approx(0.08717669357238891).epsilon(1e-10));
    CHECK(std::abs(r.graphon.cell(0, 1)[1] - 0.5) < 1e-11);
    CHECK(std::abs(r.dual[0] - std::log(3.0 / 7.0)) < 1e-9);
    CHECK(r.kkt_residual < 1e-10);
}

TEST_CASE("threshold at the top of the range conditions on the argmax") {
    Eigen::VectorXd labels(3);
    labels << 0.0, 1.0, 2.0;
    auto space = WeightSpace::discrete(labels, 0);
    Eigen::VectorXd w(3), f(3);
    w << 0.2, 0.3, 0.5;
    f << 0.0, 1.0, 1.0;
    auto r = minimize_rate(FiniteMeasure(space, w), single(2, f, Direction::ge, 1.0));
    CHECK(r.value == doctest::Approx(-std::log(0.8)).epsilon(1e-12));
    CHECK(r.graphon.cell(0, 0)[0] == 0.0);
    CHECK(r.graphon.cell(0, 0)[1] == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(std::isinf(r.dual[0]));
    CHECK(r.kkt_residual < 1e-9);
}

TEST_CASE("minimized value matches the Legendre transform on random active constraints") {
    CounterRng rng(71, 0);
    for (int rep = 0; rep < 20; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 4);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        Eigen::VectorXd f(s);
        for (int z = 0; z < s; ++z) f[z] = 2.0 * rng.next_double() - 1.0;
        double mean = f.dot(nu.weights());
        double top = f.maxCoeff();
        if (top - mean < 1e-3) continue;
        double t = mean + (0.1 + 0.8 * rng.next_double()) * (top - mean);
        auto r = minimize_rate(nu, single(1, f, Direction::ge, t));
        CHECK(r.value == doctest::Approx(oracle::legendre_value(nu, f, t)).epsilon(1e-8));
        CHECK(r.kkt_residual < 1e-8);
    }
}

TEST_CASE("minimized value matches the constant-graphon grid search") {
    CounterRng rng(72, 0);
    auto binary = binary_space();
    for (int rep = 0; rep < 6; ++rep) {
        auto nu = testutil::random_probability(binary, rng);
        double t = 0.05 + 0.9 * rng.next_double();
        bool ge = t > nu.weight(1);
        auto r = minimize_rate(
            nu, single(2, identity_f(), ge ? Direction::ge : Direction::le, t));
        double grid = oracle::constant_grid_min(nu, identity_f(), t, ge, 1e-3);
        CHECK(std::abs(r.value - grid) < 2e-3);
    }
    auto space = testutil::random_space(3, rng);
    for (int rep = 0; rep < 3; ++rep) {
        auto nu = testutil::random_probability(space, rng);
        Eigen::VectorXd f(3);
        f << 0.0, 0.4, 1.0;
        double mean = f.dot(nu.weights());
        double t = mean + 0.5 * (f.maxCoeff() - mean);
        auto r = minimize_rate(nu, single(1, f, Direction::ge, t));
        CHECK(std::abs(r.value - oracle::constant_grid_min(nu, f, t, true, 1e-3)) < 2e-3);
    }
}

TEST_CASE("tightening the threshold never lowers the rate") {
    auto nu = bernoulli(0.4);
    double last = -1.0;
    for (double t = 0.1; t <= 0.95; t += 0.05) {
        auto r = minimize_rate(nu, single(1, identity_f(), Direction::ge, t));
        CHECK(r.value >= last - 1e-12);
        last = r.value;
    }
}

TEST_CASE("averaging dominance: the minimizer never beats a feasible graphon") {
    CounterRng rng(73, 0);
    for (int rep = 0; rep < 100; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 3);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        auto w = testutil::random_graphon(space, 3, rng);
        Eigen::VectorXd f(s);
        for (int z = 0; z < s; ++z) f[z] = rng.next_double();
        double mean = f.dot(total_measure(w).weights());
        auto r = minimize_rate(nu, single(3, f, Direction::ge, mean));
        CHECK(r.value <= graphon_entropy(w, nu) + 1e-9);
    }
}

TEST_CASE("infeasible thresholds raise explicit errors") {
    auto nu = bernoulli(0.3);
    CHECK_THROWS_AS(minimize_rate(nu, single(2, identity_f(), Direction::ge, 1.2)), Error);
    CHECK_THROWS_AS(minimize_rate(nu, single(2, identity_f(), Direction::le, -0.2)), Error);
    ConstraintSet clash;
    clash.n = 2;
    clash.items.push_back({identity_f(), Direction::ge, 0.8, {}});
    clash.items.push_back({identity_f(), Direction::le, 0.2, {}});
    CHECK_THROWS_AS(minimize_rate(nu, clash), Error);
}

TEST_CASE("input validation rejects malformed problems") {
    auto nu = bernoulli(0.3);
    Eigen::VectorXd bad(3);
    bad << 0.0, 1.0, 2.0;
    CHECK_THROWS_AS(minimize_rate(nu, single(2, bad, Direction::ge, 0.5)), Error);
    CHECK_THROWS_AS(minimize_rate(FiniteMeasure::dirac(binary_space(), 1),
                                  single(2, identity_f(), Direction::ge, 0.5)),
                    Error);
    ConstraintSet lopsided;
    lopsided.n = 2;
    lopsided.items.push_back({identity_f(), Direction::ge, 0.5, {{0, 1}}});
    CHECK_THROWS_AS(minimize_rate(nu, lopsided), Error);
    ConstraintSet doubled;
    doubled.n = 2;
    doubled.items.push_back({identity_f(), Direction::ge, 0.5, {{0, 1}, {1, 0}, {0, 1}}});
    CHECK_THROWS_AS(minimize_rate(nu, doubled), Error);
}

TEST_CASE("two coupled global constraints settle near the grid optimum") {
    Eigen::VectorXd pts(3), w(3), f1(3), f2(3);
    pts << 0.0, 0.5, 1.0;
    w << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    f1 << 0.0, 0.5, 1.0;
    f2 << 1.0, 0.0, 0.0;
    auto space = WeightSpace::line(pts, 0);
    FiniteMeasure nu(space, w);
    ConstraintSet cs;
    cs.n = 2;
    cs.tolerance = 1e-6;
    cs.items.push_back({f1, Direction::ge, 0.6, {}});
    cs.items.push_back({f2, Direction::ge, 0.2, {}});
    auto r = minimize_rate(nu, cs);
    CHECK(std::string(r.method) == "mirror-descent");
    CHECK(r.feasible);
    CHECK(f1.dot(total_measure(r.graphon).weights()) >= 0.6 - 1e-5);
    CHECK(f2.dot(total_measure(r.graphon).weights()) >= 0.2 - 1e-5);

    // simplex grid reference with both constraints enforced
    double best = std::numeric_limits<double>::infinity();
    const int grid = 1000;
    for (int a = 0; a <= grid; ++a)
        for (int b = 0; b <= grid - a; ++b) {
            Eigen::VectorXd q(3);
            q << a / double(grid), b / double(grid), (grid - a - b) / double(grid);
            if (f1.dot(q) < 0.6 || f2.dot(q) < 0.2) continue;
            best = std::min(best, oracle::kl_direct(q, w));
        }
    CHECK(std::abs(r.value - best) < 5e-3);
}

TEST_CASE("scoped constraint tilts only the cells it names") {
    auto nu = bernoulli(0.3);
    ConstraintSet cs;
    cs.n = 2;
    cs.tolerance = 1e-6;
    cs.items.push_back({identity_f(), Direction::ge, 0.6, {{0, 1}, {1, 0}}});
    auto r = minimize_rate(nu, cs);
    double half_kl = 0.5 * oracle::kl_direct(bernoulli(0.6).weights(),
                                             nu.weights());
    CHECK(std::abs(r.value - half_kl) < 2e-3);
    CHECK(std::abs(r.graphon.cell(0, 1)[1] - 0.6) < 2e-2);
    CHECK(std::abs(r.graphon.cell(0, 0)[1] - 0.3) < 2e-2);
    CHECK(r.graphon.cell(0, 1) == r.graphon.cell(1, 0));
}

TEST_CASE("kkt residual grows linearly under a deliberate perturbation") {
    auto nu = bernoulli(0.3);
    auto cs = single(1, identity_f(), Direction::ge, 0.5);
    auto r = minimize_rate(nu, cs);
    auto perturbed = [&](double delta) {
        Eigen::MatrixXd cells(1, 2);
        cells << 0.5 - delta, 0.5 + delta;
        MinimizerResult p = r;
        p.graphon = StepGraphon(nu.space(), 1, cells);
        return kkt_check(p, nu, cs);
    };
    double r1 = perturbed(1e-4), r2 = perturbed(2e-4);
    CHECK(r1 > 1e-5);
    CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-2));
}

TEST_CASE("entropy gradient matches central finite differences") {
    CounterRng rng(74, 0);
    for (int rep = 0; rep < 20; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 3);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        Eigen::MatrixXd x(4, s);
        for (int rr = 0; rr < 4; ++rr)
            x.row(rr) = (testutil::random_simplex(s, rng) * 0.9 +
                         Eigen::VectorXd::Constant(s, 0.1 / s))
                            .transpose();
        auto grad = detail::entropy_gradient(x, nu);
        const double h = 1e-6;
        for (int rr = 0; rr < 4; ++rr)
            for (int z = 0; z < s; ++z) {
                Eigen::MatrixXd up = x, dn = x;
                up(rr, z) += h;
                dn(rr, z) -= h;
                double fd = (detail::entropy_objective(up, nu) -
                             detail::entropy_objective(dn, nu)) /
                            (2.0 * h);
                CHECK(std::abs(grad(rr, z) - fd) <= 1e-5 * (1.0 + std::abs(grad(rr, z))));
            }
    }
}
