#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace mim {

// Accepted deviation of sum(probs) from 1 when renormalization is off.
inline constexpr double kProbSumTolerance = 1e-9;

// Probability mass function on a finite alphabet. Entries are finite,
// nonnegative, and sum to 1 within kProbSumTolerance. Zero entries are
// allowed; operations that focus on an element reject them individually.
// Immutable after construction.
class FiniteDistribution {
  public:
    Eigen::Index size() const { return probs_.size(); }
    const Eigen::ArrayXd& probs() const { return probs_; }
    double operator[](Eigen::Index i) const { return probs_[i]; }

  private:
    explicit FiniteDistribution(Eigen::ArrayXd probs) : probs_(std::move(probs)) {}
    friend FiniteDistribution make_distribution(Eigen::ArrayXd probs, bool renormalize);

    Eigen::ArrayXd probs_;
};

// Validates and wraps a probability vector. With renormalize set, any vector
// of nonnegative entries with a positive finite sum is scaled to sum 1;
// without it the sum must already be within kProbSumTolerance of 1.
FiniteDistribution make_distribution(Eigen::ArrayXd probs, bool renormalize = false);
FiniteDistribution make_distribution(const std::vector<double>& probs, bool renormalize = false);

FiniteDistribution uniform_distribution(Eigen::Index n);

// Parametric families used by the figure tables and the CLI.
struct GeneratorSpec {
    enum class Kind { Uniform, Binomial, TruncatedPoisson, TruncatedGeometric, Explicit };

    Kind kind = Kind::Uniform;
    Eigen::Index n = 0;            // Uniform: alphabet size
    Eigen::Index trials = 0;       // Binomial: trial count (support 0..trials)
    double theta = 0.0;            // Binomial: success probability
    double lambda = 0.0;           // TruncatedPoisson: rate, support {0..support-1}
    double q = 0.0;                // TruncatedGeometric: success prob, support {1..support}
    Eigen::Index support = 0;      // truncation size K for the two families above
    std::vector<double> probs;     // Explicit: raw entries
    bool renormalize = false;      // Explicit only

    static GeneratorSpec uniform(Eigen::Index n);
    static GeneratorSpec binomial(Eigen::Index trials, double theta);
    static GeneratorSpec truncated_poisson(double lambda, Eigen::Index support);
    static GeneratorSpec truncated_geometric(double q, Eigen::Index support);
    static GeneratorSpec explicit_probs(std::vector<double> probs, bool renormalize = false);
};

// Builds the distribution a GeneratorSpec describes. Truncated families are
// renormalized to sum 1; every result passes make_distribution validation.
FiniteDistribution generate(const GeneratorSpec& spec);

// Smallest entry; with require_positive set, a zero entry is an error.
double min_prob(const FiniteDistribution& dist, bool require_positive = false);
// Largest entry (always positive for a valid distribution).
double max_prob(const FiniteDistribution& dist);

// JSON ingestion. Accepts {"probs": [...], "renormalize": bool} or
// {"kind": "...", ...generator params}; errors name the offending field.
FiniteDistribution distribution_from_json(const std::string& json_text);
FiniteDistribution distribution_from_json_file(const std::string& path);

} // namespace mim
