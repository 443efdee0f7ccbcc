#include "graphon/step_graphon.hpp"

#include <cmath>
#include <string>

#include "graphon/errors.hpp"

namespace graphon {

namespace {

Eigen::Index flat(int n, int i, int j) { return static_cast<Eigen::Index>(i) * n + j; }

}  // namespace

StepGraphon::StepGraphon(WeightSpacePtr space, int n, Eigen::MatrixXd cells)
    : space_(std::move(space)), n_(n), cells_(std::move(cells)) {
    require_input(space_ != nullptr, "step graphon needs a weight space");
    require_input(n_ >= 1, "step graphon needs at least one block");
    require_input(cells_.rows() == static_cast<Eigen::Index>(n_) * n_ &&
                      cells_.cols() == space_->size(),
                  "cell matrix shape does not match the grid and weight space");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            double m = cells_.row(flat(n_, i, j)).sum();
            for (Eigen::Index z = 0; z < cells_.cols(); ++z) {
                double v = cells_(flat(n_, i, j), z);
                if (std::isnan(v)) fail_runtime("graphon cell contains NaN");
                if (v < -kMassTol)
                    fail_input("graphon cell (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") has a negative weight");
                if (v < 0.0) cells_(flat(n_, i, j), z) = 0.0;
            }
            if (std::abs(m - 1.0) > kMassTol)
                fail_input("graphon cell (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") has mass " + std::to_string(m));
        }
    symmetric_ = true;
    for (int i = 0; i < n_ && symmetric_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (cells_.row(flat(n_, i, j)) != cells_.row(flat(n_, j, i))) {
                symmetric_ = false;
                break;
            }
}

FiniteMeasure StepGraphon::cell_measure(int i, int j) const {
    require_input(i >= 0 && i < n_ && j >= 0 && j < n_, "cell index out of range");
    return FiniteMeasure(space_, cell(i, j).transpose(), MeasureKind::probability);
}

StepGraphon StepGraphon::constant(const FiniteMeasure& mu, int n) {
    require_input(mu.is_probability(), "constant graphon needs a probability measure");
    Eigen::MatrixXd cells = mu.weights().transpose().replicate(static_cast<Eigen::Index>(n) * n, 1);
    return StepGraphon(mu.space(), n, std::move(cells));
}

WeightedGraph::WeightedGraph(WeightSpacePtr space, Eigen::MatrixXi weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
    require_input(space_ != nullptr, "weighted graph needs a weight space");
    require_input(weights_.rows() == weights_.cols() && weights_.rows() >= 1,
                  "weighted graph needs a square weight matrix");
    const Eigen::Index s = space_->size();
    for (Eigen::Index i = 0; i < weights_.rows(); ++i)
        for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
            require_input(weights_(i, j) >= 0 && weights_(i, j) < s,
                          "graph weight index out of range");
            require_input(weights_(i, j) == weights_(j, i), "graph weights must be symmetric");
        }
    weights_.diagonal().setConstant(static_cast<int>(space_->zero_index()));
}

StepGraphon embed_graph(const WeightedGraph& g) {
    const int n = g.n();
    const Eigen::Index s = g.space()->size();
    Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cells(flat(n, i, j), g.weights()(i, j)) = 1.0;
    return StepGraphon(g.space(), n, std::move(cells));
}

FiniteMeasure aggregate(const StepGraphon& w, const std::vector<int>& s_blocks,
                        const std::vector<int>& t_blocks) {
    Eigen::VectorXd s_frac = Eigen::VectorXd::Zero(w.n());
    Eigen::VectorXd t_frac = Eigen::VectorXd::Zero(w.n());
    for (int b : s_blocks) {
        require_input(b >= 0 && b < w.n(), "aggregate block index out of range");
        s_frac[b] = 1.0;
    }
    for (int b : t_blocks) {
        require_input(b >= 0 && b < w.n(), "aggregate block index out of range");
        t_frac[b] = 1.0;
    }
    return aggregate(w, s_frac, t_frac);
}

FiniteMeasure aggregate(const StepGraphon& w, const Eigen::VectorXd& s_frac,
                        const Eigen::VectorXd& t_frac) {
    const int n = w.n();
    require_input(s_frac.size() == n && t_frac.size() == n,
                  "aggregate fraction vectors must have one entry per block");
    for (Eigen::Index i = 0; i < n; ++i)
        require_input(s_frac[i] >= 0.0 && s_frac[i] <= 1.0 && t_frac[i] >= 0.0 && t_frac[i] <= 1.0,
                      "aggregate fractions must lie in [0, 1]");
    Eigen::VectorXd mix(static_cast<Eigen::Index>(n) * n);
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mix[flat(n, i, j)] = s_frac[i] * t_frac[j] * scale;
    Eigen::VectorXd weights = w.cells().transpose() * mix;
    return FiniteMeasure(w.space(), std::move(weights), MeasureKind::subprobability);
}

FiniteMeasure total_measure(const StepGraphon& w) {
    const Eigen::Index cells = w.cells().rows();
    Eigen::VectorXd weights = w.cells().colwise().sum().transpose() / static_cast<double>(cells);
    return FiniteMeasure(w.space(), std::move(weights), MeasureKind::probability);
}

StepGraphon step(const StepGraphon& w, const std::vector<std::vector<int>>& classes) {
    const int n = w.n();
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        require_input(!classes[c].empty(), "partition classes must be nonempty");
        for (int b : classes[c]) {
            require_input(b >= 0 && b < n, "partition block index out of range");
            require_input(owner[static_cast<std::size_t>(b)] < 0,
                          "partition classes must be disjoint");
            owner[static_cast<std::size_t>(b)] = static_cast<int>(c);
        }
    }
    for (int b = 0; b < n; ++b)
        require_input(owner[static_cast<std::size_t>(b)] >= 0,
                      "partition must cover every block");

    // Class-product averages, then broadcast back onto the original grid.
    const Eigen::Index s = w.space()->size();
    const int c = static_cast<int>(classes.size());
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c) * c, s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            avg.row(flat(c, owner[static_cast<std::size_t>(i)],
                         owner[static_cast<std::size_t>(j)])) += w.cell(i, j);
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b)
            avg.row(flat(c, a, b)) /= static_cast<double>(classes[static_cast<std::size_t>(a)].size()) *
                                      static_cast<double>(classes[static_cast<std::size_t>(b)].size());
    Eigen::MatrixXd cells(static_cast<Eigen::Index>(n) * n, s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cells.row(flat(n, i, j)) = avg.row(flat(c, owner[static_cast<std::size_t>(i)],
                                                    owner[static_cast<std::size_t>(j)]));
    return StepGraphon(w.space(), n, std::move(cells));
}

StepGraphon approximant(const StepGraphon& w, int k) {
    const int n = w.n();
    require_input(k >= 1 && n % k == 0,
                  "approximant level must divide the block count (" + std::to_string(k) +
                      " does not divide " + std::to_string(n) + ")");
    const int r = n / k;
    const Eigen::Index s = w.space()->size();
    Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k) * k, s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cells.row(flat(k, i / r, j / r)) += w.cell(i, j);
    cells /= static_cast<double>(r) * r;
    return StepGraphon(w.space(), k, std::move(cells));
}

StepGraphon refine(const StepGraphon& w, int r) {
    require_input(r >= 1, "refinement factor must be positive");
    const int n = w.n();
    const int m = n * r;
    Eigen::MatrixXd cells(static_cast<Eigen::Index>(m) * m, w.space()->size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) cells.row(flat(m, i, j)) = w.cell(i / r, j / r);
    return StepGraphon(w.space(), m, std::move(cells));
}

StepGraphon relabel(const StepGraphon& w, const std::vector<int>& sigma) {
    const int n = w.n();
    require_input(is_permutation(sigma, n), "relabeling must be a permutation of the blocks");
    Eigen::MatrixXd cells(static_cast<Eigen::Index>(n) * n, w.space()->size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cells.row(flat(n, i, j)) =
                w.cell(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
    return StepGraphon(w.space(), n, std::move(cells));
}

Eigen::MatrixXd apply_function(const StepGraphon& w, const Eigen::VectorXd& f) {
    require_input(f.size() == w.space()->size(),
                  "function length does not match the weight space");
    Eigen::VectorXd per_cell = w.cells() * f;
    return per_cell.reshaped<Eigen::RowMajor>(w.n(), w.n());
}

bool is_permutation(const std::vector<int>& sigma, int n) {
    if (static_cast<int>(sigma.size()) != n) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v : sigma) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
        seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
}

}  // namespace graphon
