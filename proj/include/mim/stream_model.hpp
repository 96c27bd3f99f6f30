#pragma once

#include "mim/distribution.hpp"
#include "mim/rng.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace mim {

// Streaming minority-subset model: length-M category sequences where the
// event of interest is the count of the first category deviating from its
// probability by at least epsilon. The deviation event is rare, so it is
// scored with the empirical MIM at the focusing coefficient 1/p_hat.

struct MinorityModel {
    // Requires M >= 1 and epsilon > 0 finite. epsilon >= 1 is admitted and
    // makes the deviation event impossible for interior category probs.
    MinorityModel(FiniteDistribution category_probs, std::int64_t sequence_length,
                  double epsilon);

    FiniteDistribution category_probs;
    std::int64_t sequence_length; // M
    double epsilon;
};

// JSON ingestion: {"probs": [...], "M": int, "epsilon": real}.
MinorityModel model_from_json(const std::string& json_text);
MinorityModel model_from_json_file(const std::string& path);

// Deviation predicate for a category count: m >= M p + M eps or
// m <= M p - M eps, boundaries inclusive. Evaluated in this literal double
// form by both the exact tail sum and the simulator, so the two can never
// disagree on boundary rounding.
bool minority_deviation(std::int64_t m, std::int64_t sequence_length, double p,
                        double epsilon);

// ln P(m = successes) for m ~ Binomial(trials, prob); -inf outside the
// support and at degenerate prob edges.
double binomial_log_pmf(std::int64_t trials, std::int64_t successes, double prob);

// Exact P(|m/M - p_1| >= eps) for m ~ Binomial(M, p_1), p_1 the first
// category: the binomial point masses summed over the deviation set.
// Monotone nonincreasing in eps.
double minority_event_probability(const MinorityModel& model);

struct UnionBoundReport {
    std::vector<double> category_tails; // exact P(category k deviates)
    double bound;                       // K * max_k tail_k
    double union_estimate;              // Monte Carlo P(any category deviates)
    double union_std_error;
    double typical_estimate;            // 1 - union_estimate
    std::int64_t replicas;
    bool holds_within_error;            // union <= bound + 3 std errors
};

// Checks the union bound P(any deviation) <= K max_k tail_k: exact marginal
// tails per category, multinomial Monte Carlo for the union. Requires K >= 2.
UnionBoundReport union_bound_check(const MinorityModel& model,
                                   std::int64_t replicas = 100000,
                                   std::uint64_t seed = kDefaultSeed);

struct BatchRecord {
    std::int64_t delta_occurrences; // event count within the batch
    std::int64_t delta_trials;      // sequences drawn in the batch
    std::int64_t occurrences;       // cumulative n_i
    std::int64_t trials;            // cumulative N_i
    double p_hat;                   // n_i / N_i
    std::optional<double> mim;      // empirical_mim(p_hat); nullopt while n_i = 0
};

// Batch-wise record of empirical event probability and empirical MIM.
// Cumulative counts are exact integer sums, and each cumulative frequency is
// sandwiched between the previous cumulative frequency and the batch
// frequency (mediant inequality).
class EmpiricalTracker {
  public:
    // delta_trials >= 1, 0 <= delta_occurrences <= delta_trials.
    void append(std::int64_t delta_occurrences, std::int64_t delta_trials);

    const std::vector<BatchRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }
    const BatchRecord& back() const { return records_.back(); }

  private:
    std::vector<BatchRecord> records_;
};

// RFC-4180 style CSV: header i,delta_n,delta_N,n,N,p_hat,L_hat; the L_hat
// field is empty while undefined.
void write_tracker_csv(std::ostream& out, const EmpiricalTracker& tracker);

// Runs one batch per entry of batch_sizes: each trial draws the first
// category's count m ~ Binomial(M, p_1) directly (only m matters for the
// event) and tests the deviation predicate. Deterministic per seed; trial t
// consumes exactly the substream (seed, t).
EmpiricalTracker simulate_batches(const MinorityModel& model,
                                  std::span<const std::int64_t> batch_sizes,
                                  std::uint64_t seed);

// Empirical MIM of the binary split (p_hat, 1 - p_hat) at its focusing
// coefficient 1/p_hat:
//   ln( p_hat e^{1/p_hat - 1} + (1 - p_hat) e ),
// via the stable max-factored form, so small p_hat cannot overflow. Strictly
// decreasing on (0, 1]. p_hat = 0 has no defined value (the coefficient
// diverges): returns nullopt, never +inf. Requires 0 <= p_hat <= 1.
std::optional<double> empirical_mim(double p_hat);

struct SandwichViolation {
    std::size_t batch;   // 1-based index i of the violating record
    std::string kind;    // "p_hat" or "mim"
    double lo;
    double value;
    double hi;
};

struct SandwichReport {
    std::int64_t p_hat_checked = 0;
    std::int64_t mim_checked = 0;
    std::vector<SandwichViolation> violations;
    bool clean() const { return violations.empty(); }
};

// Verifies for each i >= 2, with f_prev = n_{i-1}/N_{i-1} and
// f_batch = dn_i/dN_i:
//   min(f_prev, f_batch) <= p_hat_i <= max(f_prev, f_batch)  exactly, by
//   integer cross-multiplication, and the mirrored sandwich for the mim
//   values within 1e-12 slack (empirical_mim is decreasing, so the bounds
//   swap sides). Records with undefined mim are skipped in the mim check.
SandwichReport tracker_sandwich_check(const EmpiricalTracker& tracker);

struct MomentEstimates {
    double mu;       // true event probability p
    double sigma_sq; // p (1 - p) / N, variance of p_hat
    double mean_mim; // second-order approximation of E[empirical_mim(p_hat)]
    double var_mim;  // first-order approximation of Var[...]
    std::int64_t trials; // N
};

// Delta-method moments of the empirical MIM after N trials, with
// p_hat ~ Binomial(N, p)/N. Kept in the derived printed forms:
//   mean = L(p) + (sigma^2/2) [ (2/p - 1) e^{2/p - 4}
//          + (1/p^3 - 1/p^2 - 2/p + 2) e^{1/p - 2} - 1 ]
//          / (p e^{1/p - 1} + (1 - p) e)^2
//   var  = sigma^2 [ ((1 - 1/p) e^{1/p - 2} - 1) / (p e^{1/p - 2} + 1 - p) ]^2
// evaluated with the dominant exponential factored out so small p cannot
// overflow. Requires 0 < p < 1/2, N >= 1.
MomentEstimates delta_moments(double p, std::int64_t trials);

struct ChebyshevBound {
    double bound;        // min(1, var_mim / eps^2); the valid concentration form
    double printed_form; // var_mim / eps, reported for side-by-side comparison
};

// Chebyshev bound on P(|empirical mim - mean| >= eps). The pass/fail bound is
// var/eps^2; the var/eps variant appears in print and is carried along as a
// reported value only. Requires eps > 0.
ChebyshevBound chebyshev_bound(const MomentEstimates& moments, double eps);

struct MonteCarloMoments {
    double mean;
    double variance;       // unbiased sample variance
    std::int64_t used;     // replicas with defined empirical mim
    std::int64_t skipped;  // replicas with p_hat = 0
};

// Monte Carlo oracle for delta_moments: draws `replicas` values of
// p_hat = Binomial(N, p)/N through per-replica substreams of `seed`, maps
// them through empirical_mim, and reduces with compensated summation (the
// reported moments are reduction-order independent beyond 1e-12).
// Requires 0 < p < 1, replicas >= 2; errors if every draw is undefined.
MonteCarloMoments monte_carlo_moments(double p, std::int64_t trials,
                                      std::int64_t replicas, std::uint64_t seed);

// Inverse-CDF binomial sampler. The table is built from log point masses, so
// parameter ranges where pmf(0) underflows (large trials) stay exact to
// rounding; one uniform in [0,1) maps to one draw by binary search.
class BinomialSampler {
  public:
    BinomialSampler(std::int64_t trials, double prob);
    std::int64_t sample(double unit) const;
    std::int64_t trials() const { return trials_; }

  private:
    std::int64_t trials_;
    std::vector<double> cdf_;
};

} // namespace mim
