#include <doctest.h>

#include <cmath>
#include <limits>

#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace graphon;

TEST_CASE("entropy of a constant graphon is the cell relative entropy") {
    auto w = StepGraphon::constant(bernoulli(0.5), 3);
    double h = graphon_entropy(w, bernoulli(0.3));
    CHECK(std::abs(h - kl_divergence(bernoulli(0.5), bernoulli(0.3))) < 1e-15);
}

TEST_CASE("optimal kernel frozen value and exact duality on the constant case") {
    auto w = StepGraphon::constant(bernoulli(0.5), 2);
    auto nu = bernoulli(0.3);
    auto a = optimal_kernel(w, nu);
    // log(0.5/0.3) - log(0.5/0.7)
    CHECK(std::abs(a.cell(0, 0)[1] - 0.8472978603872034) < 1e-12);
    CHECK(a.cell(0, 0)[0] == 0.0);
    CHECK(std::abs(variational_value(w, nu, a) - graphon_entropy(w, nu)) < 1e-14);
}

TEST_CASE("variational equality at the optimal kernel on random positive pairs") {
    CounterRng rng(51, 0);
    for (int rep = 0; rep < 60; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 3);
        int n = 1 + static_cast<int>(rng.next_u64() % 5);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        auto w = testutil::random_graphon(space, n, rng);
        auto a = optimal_kernel(w, nu);
        CHECK(std::abs(variational_value(w, nu, a) - graphon_entropy(w, nu)) < 1e-12);
    }
}

TEST_CASE("random kernels never beat the entropy") {
    CounterRng rng(52, 0);
    for (int rep = 0; rep < 40; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 3);
        int n = 1 + static_cast<int>(rng.next_u64() % 4);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        auto w = testutil::random_graphon(space, n, rng);
        double h = graphon_entropy(w, nu);
        for (int k = 0; k < 25; ++k) {
            Eigen::MatrixXd vals(n * n, s);
            for (Eigen::Index r = 0; r < vals.rows(); ++r)
                for (Eigen::Index c = 0; c < vals.cols(); ++c)
                    vals(r, c) = 10.0 * rng.next_double() - 5.0;
            CHECK(variational_value(w, nu, DualKernel(space, n, vals)) <= h + 1e-12);
        }
    }
}

TEST_CASE("entropy infinities and input errors") {
    auto space = binary_space();
    auto w = StepGraphon::constant(bernoulli(0.5), 2);
    auto dirac = FiniteMeasure::dirac(space, 1);
    CHECK(graphon_entropy(w, dirac) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(optimal_kernel(w, dirac), Error);
    auto wd = StepGraphon::constant(dirac, 2);
    CHECK_THROWS_AS(optimal_kernel(wd, bernoulli(0.3)), Error);
    CHECK(std::isfinite(graphon_entropy(wd, bernoulli(0.3))));

    Eigen::MatrixXd bad(1, 2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DualKernel(space, 1, bad), Error);
}

TEST_CASE("entropy decreases under stepping and approximant chains increase") {
    CounterRng rng(53, 0);
    for (int rep = 0; rep < 30; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 3);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        auto w = testutil::random_graphon(space, 8, rng, true, true);

        // random partition of the 8 blocks
        std::vector<std::vector<int>> classes;
        int c = 2 + static_cast<int>(rng.next_u64() % 3);
        classes.resize(static_cast<std::size_t>(c));
        for (int b = 0; b < 8; ++b)
            classes[static_cast<std::size_t>(b) % classes.size()].push_back(b);
        double stepped = graphon_entropy(step(w, classes), nu);
        double full = graphon_entropy(w, nu);
        if (std::isfinite(full)) CHECK(stepped <= full + 1e-12);

        double prev = -1.0;
        for (int k : {1, 2, 4, 8}) {
            double h = graphon_entropy(approximant(w, k), nu);
            CHECK(h >= prev - 1e-12);
            prev = h;
        }
        if (std::isfinite(full)) CHECK(std::abs(prev - full) < 1e-12);
    }
}

TEST_CASE("entropy matches a long double direct accumulation") {
    CounterRng rng(54, 0);
    for (int rep = 0; rep < 20; ++rep) {
        int s = 2 + static_cast<int>(rng.next_u64() % 4);
        int n = 1 + static_cast<int>(rng.next_u64() % 5);
        auto space = testutil::random_space(s, rng);
        auto nu = testutil::random_probability(space, rng);
        auto w = testutil::random_graphon(space, n, rng);
        long double acc = 0.0L;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                acc += oracle::kl_direct(w.cell(i, j).transpose(), nu.weights());
        CHECK(std::abs(graphon_entropy(w, nu) - static_cast<double>(acc) / (n * n)) < 1e-13);
    }
}
