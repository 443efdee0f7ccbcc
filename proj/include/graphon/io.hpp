#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "graphon/cut_metric.hpp"
#include "graphon/discretization.hpp"
#include "graphon/measure.hpp"
#include "graphon/minimizer.hpp"
#include "graphon/sampling.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon::io {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Provenance block embedded in every output file: the run seed, a 64-bit
// FNV-1a hash of the canonical configuration line, and the artifact version.
struct Manifest {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string version = kArtifactVersion;
};

std::string fnv1a_hex(const std::string& text);

// 17 significant digits, '.' decimal separator; nonfinite values render as
// inf / -inf / nan.
std::string format_number(double v);

// Structured-text loaders. Parse or schema failures surface as input errors
// carrying the offending path.
FiniteMeasure load_measure(const std::string& path);
StepGraphon load_graphon(const std::string& path);
WeightedGraph load_graph(const std::string& path);
NestedPartitionScheme load_scheme(const std::string& path);
DensityMeasure load_density(const std::string& path);
ConstraintSet load_constraints(const std::string& path);
EventSpec load_event(const std::string& path);

// Atomic writers: content lands under a temporary name in the target
// directory and is renamed into place, so readers never see partial files.
void write_text_atomic(const std::string& path, const std::string& content);

void write_measure(const std::string& path, const FiniteMeasure& nu, const Manifest& m);
void write_graphon(const std::string& path, const StepGraphon& w, const Manifest& m);
void write_graph(const std::string& path, const WeightedGraph& g, const Manifest& m);
void write_manifest(const std::string& path, const Manifest& m);

// per_cell is the n x n matrix of cell divergences; dual_kernel, when
// non-null, is the n^2 x |Z| coefficient table of the optimal test kernel.
void write_entropy_report(const std::string& path, double entropy,
                          const Eigen::MatrixXd& per_cell, const Eigen::MatrixXd* dual_kernel,
                          const Manifest& m);

void write_dist_report(const std::string& path, const CutResult& r, bool emit_witness,
                       const Manifest& m);

void write_minimize_report(const std::string& path, const MinimizerResult& r, const Manifest& m);

void write_rates_report(const std::string& path, const ProjectionRates& r, const Manifest& m);

// CSV with the fixed header "n, method, log_prob, scaled, rate_target, gap,
// ess", '\n' line endings, and a leading '#' manifest comment.
void write_ldp_csv(const std::string& path, const std::vector<LdpRow>& rows, const Manifest& m);

// Companion table for concentration runs: header "n, median, q90".
void write_quantiles_csv(const std::string& path, const std::vector<ConcentrationRow>& rows,
                         const Manifest& m);

}  // namespace graphon::io
