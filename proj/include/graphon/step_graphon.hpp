#pragma once

#include <Eigen/Core>
#include <vector>

#include "graphon/measure.hpp"
#include "graphon/weight_space.hpp"

namespace graphon {

// Measure-valued step function on the n x n equal grid of [0, 1]^2. Cell
// (i, j) is a probability measure on the weight space, stored as row i*n + j
// of an (n^2) x s matrix, so column operations act on all cells at once.
class StepGraphon {
  public:
    StepGraphon(WeightSpacePtr space, int n, Eigen::MatrixXd cells);

    const WeightSpacePtr& space() const { return space_; }
    int n() const { return n_; }
    const Eigen::MatrixXd& cells() const { return cells_; }
    bool symmetric() const { return symmetric_; }

    auto cell(int i, int j) const { return cells_.row(static_cast<Eigen::Index>(i) * n_ + j); }
    FiniteMeasure cell_measure(int i, int j) const;

    // Constant graphon with every cell equal to mu.
    static StepGraphon constant(const FiniteMeasure& mu, int n);

  private:
    WeightSpacePtr space_;
    int n_;
    Eigen::MatrixXd cells_;
    bool symmetric_;
};

// Edge-weighted graph: entry (i, j) indexes a point of the weight space.
// Diagonal entries are forced to the distinguished zero point.
class WeightedGraph {
  public:
    WeightedGraph(WeightSpacePtr space, Eigen::MatrixXi weights);

    const WeightSpacePtr& space() const { return space_; }
    int n() const { return static_cast<int>(weights_.rows()); }
    const Eigen::MatrixXi& weights() const { return weights_; }

  private:
    WeightSpacePtr space_;
    Eigen::MatrixXi weights_;
};

// Graph as a step graphon: cell (i, j) is the Dirac at the edge weight,
// diagonal cells the Dirac at the zero point.
StepGraphon embed_graph(const WeightedGraph& g);

// Aggregated measure W(S x T; .) = integral of the cell measures over S x T.
// Index-set form takes whole blocks; the fraction form weighs block i by
// s_frac[i] * t_frac[j] / n^2 with fractions in [0, 1]. Subprobability.
FiniteMeasure aggregate(const StepGraphon& w, const std::vector<int>& s_blocks,
                        const std::vector<int>& t_blocks);
FiniteMeasure aggregate(const StepGraphon& w, const Eigen::VectorXd& s_frac,
                        const Eigen::VectorXd& t_frac);

// Average of all cells; a probability measure.
FiniteMeasure total_measure(const StepGraphon& w);

// Conditional expectation onto a partition of the blocks: every cell is
// replaced by the equal-weight average over its class product. The grid
// stays n x n so classes of unequal size remain representable.
StepGraphon step(const StepGraphon& w, const std::vector<std::vector<int>>& classes);

// k-block approximant: contiguous groups of n/k blocks averaged; needs k | n.
StepGraphon approximant(const StepGraphon& w, int k);

// Each block split into r equal sub-blocks; represents the same graphon.
StepGraphon refine(const StepGraphon& w, int r);

// Block relabeling: result cell (i, j) = original cell (sigma[i], sigma[j]).
StepGraphon relabel(const StepGraphon& w, const std::vector<int>& sigma);

// Matrix of cell integrals of f.
Eigen::MatrixXd apply_function(const StepGraphon& w, const Eigen::VectorXd& f);

bool is_permutation(const std::vector<int>& sigma, int n);

}  // namespace graphon
