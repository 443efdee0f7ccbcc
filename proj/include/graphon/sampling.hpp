#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "graphon/events.hpp"
#include "graphon/measure.hpp"
#include "graphon/step_graphon.hpp"

namespace graphon {

using EventSpec = std::variant<MeanEvent, BallEvent>;

// Graph on n vertices with iid edge weights from nu. Each edge draws from
// its own counter stream, so the result is independent of evaluation order.
WeightedGraph sample_graph(int n, const FiniteMeasure& nu, std::uint64_t seed);

// Graph with one vertex per block: edge (i, j) drawn from cell (i, j). For a
// constant graphon this reproduces sample_graph draw for draw.
WeightedGraph sample_from_graphon(const StepGraphon& w, std::uint64_t seed);

// Edge-factorized divergence of the graphon-tilted graph law from the iid
// null model, with the diagonal bookkeeping split out:
//   full-square entropy = scaled + diagonal_term.
struct KlProduct {
    double sum = 0.0;            // sum over i < j of KL(cell_ij | nu)
    double scaled = 0.0;         // (2 / n^2) * sum
    double diagonal_term = 0.0;  // (1 / n^2) * sum_i KL(cell_ii | nu)
    Eigen::Index offending_i = -1;  // first cell breaking absolute
    Eigen::Index offending_j = -1;  // continuity when the value is infinite
};
KlProduct kl_product(const StepGraphon& w, const FiniteMeasure& nu);

// log P(sum of f over the n(n-1)/2 edge weights >=/<= t * edge count) by
// exact log-domain convolution. Requires the distinct f values to sit on a
// common rational lattice with denominator at most 10^4; refuses otherwise.
// Thresholds are closed; probability zero comes back as -infinity.
double event_log_prob_exact(int n, const FiniteMeasure& nu, const MeanEvent& event);

// Exact sampler for the edge-mean conditioned graph law: the total f-sum is
// drawn from its conditioned lattice distribution, then edge values from the
// backward decomposition given the remaining total. Shares its convolution
// tables across draws.
class ConditionalSampler {
  public:
    ConditionalSampler(int n, FiniteMeasure nu, MeanEvent event);
    ~ConditionalSampler();
    ConditionalSampler(ConditionalSampler&&) noexcept;

    WeightedGraph sample(std::uint64_t seed) const;  // safe to call concurrently
    double log_prob() const;                         // log P(event)
    int n() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Conditioned draw; falls back to rejection sampling when the functional is
// not on a rational lattice. Errors on probability-zero events.
WeightedGraph conditional_sample(int n, const FiniteMeasure& nu, const MeanEvent& event,
                                 std::uint64_t seed);

enum class VerifyMode { exact, monte_carlo };

struct LdpRow {
    int n = 0;
    const char* method = "exact";
    double log_prob = 0.0;
    double scaled = 0.0;       // (2 / n^2) * log_prob
    double rate_target = 0.0;
    double gap = 0.0;          // scaled - (-rate_target)
    double ess = 0.0;          // effective sample size; 0 for exact rows
    long samples = 0;          // draws behind a monte-carlo row
    double half_width = 0.0;   // 95% half width of scaled; 0 for exact rows
};

struct LdpReport {
    std::vector<LdpRow> rows;
    double rate_target = 0.0;
};

// Compare measured event probabilities against the minimized rate. Exact
// mode takes mean events through the lattice convolution; monte-carlo mode
// takes ball events through importance sampling from the product law tilted
// to the ball center (naive sampling cannot see e^{-c n^2} events). The ball
// target is the rate at the center, an upper bound for the infimum over the
// ball; sample sizes and confidence half widths are reported per row.
LdpReport verify_ldp(const FiniteMeasure& nu, const EventSpec& event,
                     const std::vector<int>& n_list, VerifyMode mode, std::uint64_t seed = 1,
                     long samples = 2000);

struct ConcentrationRow {
    int n = 0;
    double median = 0.0;
    double q90 = 0.0;
};

struct ConcentrationTable {
    std::vector<ConcentrationRow> rows;
    double rate_value = 0.0;  // minimized rate behind the reference graphon
};

// Distance of conditioned samples to the rate minimizer: reps conditional
// draws per n, unlabeled cut distance to the minimizer refined to the sample
// resolution, median and 0.9 quantile per row.
ConcentrationTable concentration_experiment(const FiniteMeasure& nu, const MeanEvent& event,
                                            const std::vector<int>& n_list, int reps,
                                            std::uint64_t seed);

}  // namespace graphon
