#include <doctest.h>

#include <cmath>

#include "graphon/errors.hpp"
#include "graphon/step_graphon.hpp"
#include "test_util.hpp"

using namespace graphon;

namespace {

WeightedGraph random_graph(WeightSpacePtr space, int n, CounterRng& rng) {
    Eigen::MatrixXi w = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            w(i, j) = w(j, i) =
                static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(space->size()));
    return WeightedGraph(std::move(space), std::move(w));
}

double max_cell_gap(const StepGraphon& a, const StepGraphon& b) {
    return (a.cells() - b.cells()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("graph embedding puts Diracs on cells and the zero point on the diagonal") {
    CounterRng rng(21, 0);
    auto space = testutil::random_space(3, rng);
    auto g = random_graph(space, 4, rng);
    auto w = embed_graph(g);
    CHECK(w.n() == 4);
    CHECK(w.symmetric());
    for (int i = 0; i < 4; ++i) {
        CHECK(w.cell(i, i)[space->zero_index()] == 1.0);
        for (int j = 0; j < 4; ++j) {
            CHECK(w.cell(i, j).sum() == 1.0);
            CHECK(w.cell(i, j)[g.weights()(i, j)] == 1.0);
        }
    }
}

TEST_CASE("aggregate mass and consistency between block and fraction forms") {
    CounterRng rng(22, 0);
    auto space = testutil::random_space(3, rng);
    auto w = testutil::random_graphon(space, 5, rng);

    auto all = aggregate(w, std::vector<int>{0, 1, 2, 3, 4}, std::vector<int>{0, 1, 2, 3, 4});
    CHECK(std::abs(all.mass() - 1.0) < 1e-12);
    CHECK((all.weights() - total_measure(w).weights()).cwiseAbs().maxCoeff() < 1e-14);

    std::vector<int> s_blocks{0, 2}, t_blocks{1, 3, 4};
    auto part = aggregate(w, s_blocks, t_blocks);
    CHECK(std::abs(part.mass() - 6.0 / 25.0) < 1e-12);

    Eigen::VectorXd sf = Eigen::VectorXd::Zero(5), tf = Eigen::VectorXd::Zero(5);
    sf[0] = sf[2] = 1.0;
    tf[1] = tf[3] = tf[4] = 1.0;
    auto part2 = aggregate(w, sf, tf);
    CHECK((part.weights() - part2.weights()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd bad = sf;
    bad[0] = 1.5;
    CHECK_THROWS_AS(aggregate(w, bad, tf), Error);
}

TEST_CASE("stepping: identity, full coarsening, projection property") {
    CounterRng rng(23, 0);
    auto space = testutil::random_space(2, rng);
    auto w = testutil::random_graphon(space, 6, rng);

    std::vector<std::vector<int>> singletons{{0}, {1}, {2}, {3}, {4}, {5}};
    CHECK(max_cell_gap(step(w, singletons), w) == 0.0);

    std::vector<std::vector<int>> whole{{0, 1, 2, 3, 4, 5}};
    auto coarse = step(w, whole);
    auto expect = StepGraphon::constant(total_measure(w), 6);
    CHECK(max_cell_gap(coarse, expect) < 1e-14);

    // stepping twice with the same partition changes nothing
    std::vector<std::vector<int>> classes{{0, 3}, {1, 2, 5}, {4}};
    auto once = step(w, classes);
    CHECK(max_cell_gap(step(once, classes), once) < 1e-14);

    std::vector<std::vector<int>> overlap{{0, 1}, {1, 2, 3, 4, 5}};
    CHECK_THROWS_AS(step(w, overlap), Error);
    std::vector<std::vector<int>> gap{{0, 1}, {3, 4, 5}};
    CHECK_THROWS_AS(step(w, gap), Error);
}

TEST_CASE("approximant: divisibility, endpoints, refine consistency") {
    CounterRng rng(24, 0);
    auto space = testutil::random_space(3, rng);
    auto w = testutil::random_graphon(space, 12, rng);

    CHECK_THROWS_AS(approximant(w, 5), Error);
    CHECK(max_cell_gap(approximant(w, 12), w) == 0.0);
    auto one = approximant(w, 1);
    CHECK((one.cell(0, 0).transpose() - total_measure(w).weights()).cwiseAbs().maxCoeff() < 1e-14);

    // approximant then refine equals stepping with contiguous classes
    auto k4 = refine(approximant(w, 4), 3);
    std::vector<std::vector<int>> contiguous{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {9, 10, 11}};
    CHECK(max_cell_gap(k4, step(w, contiguous)) < 1e-13);

    // total measure is preserved by averaging
    CHECK((total_measure(approximant(w, 4)).weights() - total_measure(w).weights())
              .cwiseAbs()
              .maxCoeff() < 1e-13);
}

TEST_CASE("relabeling is an involution through the inverse and keeps totals") {
    CounterRng rng(25, 0);
    auto space = testutil::random_space(3, rng);
    auto w = testutil::random_graphon(space, 7, rng, /*symmetric=*/false);
    auto sigma = testutil::random_permutation(7, rng);
    std::vector<int> inverse(7);
    for (int i = 0; i < 7; ++i) inverse[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = i;

    auto back = relabel(relabel(w, sigma), inverse);
    CHECK(max_cell_gap(back, w) == 0.0);
    CHECK((total_measure(relabel(w, sigma)).weights() - total_measure(w).weights())
              .cwiseAbs()
              .maxCoeff() < 1e-13);

    CHECK_THROWS_AS(relabel(w, std::vector<int>{0, 0, 1, 2, 3, 4, 5}), Error);
}

TEST_CASE("apply_function evaluates cell integrals") {
    CounterRng rng(26, 0);
    auto space = testutil::random_space(4, rng);
    auto g = random_graph(space, 5, rng);
    auto w = embed_graph(g);
    Eigen::VectorXd f(4);
    f << -1.0, 0.5, 2.0, 7.0;
    Eigen::MatrixXd m = apply_function(w, f);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(m(i, j) == f[g.weights()(i, j)]);

    auto u = testutil::random_graphon(space, 5, rng);
    Eigen::MatrixXd mu = apply_function(u, f);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(std::abs(mu(i, j) - u.cell(i, j).dot(f.transpose())) < 1e-14);
}

TEST_CASE("cell mass validation") {
    auto space = binary_space();
    Eigen::MatrixXd cells(1, 2);
    cells << 0.5, 0.4;
    CHECK_THROWS_AS(StepGraphon(space, 1, cells), Error);
}
