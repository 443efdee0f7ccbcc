#pragma once

#include <cstdint>
#include <vector>

#include "graphon/kernel.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon {

// How a cut-type value was obtained. Exhaustive enumeration is exact;
// coordinate ascent explores a subset of cut pairs, so for a supremum it
// reports a lower bound; annealing explores a subset of relabelings, so for
// the infimum in delta_cut it reports an upper bound.
enum class CutMode { exact, heuristic_lower_bound, heuristic_upper_bound };

struct CutOptions {
    int exact_cut_blocks = 10;    // exhaustive S, T enumeration up to this n
    int exact_delta_blocks = 7;   // full permutation enumeration up to this n
    int starts = 32;              // coordinate-ascent restarts
    int inner_starts = 4;         // ascent restarts inside the annealing loop
    int anneal_iters_per_block = 200;
    double cooling = 0.97;        // applied once per n proposals
    int refine = 1;               // block refinement before annealing
    std::uint64_t seed = 1;
};

struct CutResult {
    double value = 0.0;
    std::vector<int> s_blocks;  // cut witness
    std::vector<int> t_blocks;
    std::vector<int> sigma;     // relabeling witness (delta_cut, overlay)
    CutMode mode = CutMode::exact;
};

const char* cut_mode_name(CutMode mode);

// Cut distance between two step graphons on the same grid: the largest
// Prokhorov distance between aggregated measures over block unions S x T.
// Restriction to block unions loses nothing because the Prokhorov metric is
// quasi-convex in each aggregate.
CutResult d_cut(const StepGraphon& u, const StepGraphon& w, const CutOptions& opts = {});

// Unlabeled cut distance: inf over block relabelings of d_cut, after an
// optional refinement. Exact mode enumerates all permutations; otherwise a
// simulated annealing search seeded by a first-moment assignment.
CutResult delta_cut(const StepGraphon& u, const StepGraphon& w, const CutOptions& opts = {});

// Overlay value: sup over block relabelings sigma of
// (1/n^2) sum_ij <A(i, j), W(sigma(i), sigma(j))>.
CutResult overlay(const StepGraphon& w, const DualKernel& a, const CutOptions& opts = {});

}  // namespace graphon
