#pragma once

#include "graphon/kernel.hpp"
#include "graphon/measure.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon {

// Rate functional: the cell average (1/n^2) sum_ij KL(cell_ij | nu).
// +inf as soon as one cell fails absolute continuity.
double graphon_entropy(const StepGraphon& w, const FiniteMeasure& nu);

// Value of the dual pairing under kernel A:
// (1/n^2) sum_ij [ <A_ij, cell_ij> - log integral of e^{A_ij} dnu ].
// Never exceeds graphon_entropy, with equality at the optimal kernel.
double variational_value(const StepGraphon& w, const FiniteMeasure& nu, const DualKernel& a);

// The maximizing kernel A*_ij(z) = log dW_ij/dnu(z) - log dW_ij/dnu(zero).
// Requires strictly positive cells and reference; the offending cell is
// named otherwise.
DualKernel optimal_kernel(const StepGraphon& w, const FiniteMeasure& nu);

}  // namespace graphon
