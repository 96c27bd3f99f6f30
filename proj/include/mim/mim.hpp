#pragma once

#include "mim/distribution.hpp"

#include <Eigen/Core>
#include <vector>

namespace mim {

// Message importance measure of a finite distribution,
//
//   L(p, omega) = ln( sum_i p_i * exp(omega * (1 - p_i)) ),   omega >= 0,
//
// in nats. Evaluated through the stable form
//   max_i a_i + ln sum_i exp(a_i - max_i a_i),  a_i = ln p_i + omega (1 - p_i),
// so omega as large as 1/min_prob cannot overflow. Zero-probability entries
// contribute nothing. L(p, 0) = 0 exactly and L is nondecreasing in omega.
double evaluate(const FiniteDistribution& dist, double omega);

// Log of each summand: a_i = ln p_i + omega (1 - p_i), -inf where p_i = 0.
Eigen::ArrayXd log_mim_terms(const FiniteDistribution& dist, double omega);

// Stable ln sum exp over log terms; -inf entries are skipped. At least one
// entry must be finite.
double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& log_terms);

// Reciprocal focusing rule: the coefficient omega_j = 1/p_j that makes
// element j the dominant summand of L. Requires p_j > 0.
double coefficient_for_element(const FiniteDistribution& dist, Eigen::Index j);

// L evaluated at the element's own focusing coefficient: L_j = L(p, 1/p_j).
double focused_mim(const FiniteDistribution& dist, Eigen::Index j);

// Index of the largest summand p_i exp(omega (1 - p_i)); ties break to the
// lowest index. At omega = 1/p_j the winner has probability p_j.
Eigen::Index dominant_index(const FiniteDistribution& dist, double omega);

struct ChainRuleEntry {
    Eigen::Index index; // position in the input distribution
    double prob;        // p_j
    double mim;         // L_j = L(p, 1/p_j)
};

// (p_j, L_j) for every element, sorted by p_j descending (ties by index).
// Focusing on a rarer element never yields a smaller value: the mim sequence
// is strictly increasing wherever the probs strictly decrease.
// Requires all entries positive.
std::vector<ChainRuleEntry> chain_rule_values(const FiniteDistribution& dist);

struct LowerBoundReport {
    double at_inverse_pmax; // L(p, 1/max_prob), floor of every focused value
    double at_one;          // L(p, 1) = ln(sum_i p_i e^{-p_i}) + 1
};

// Lower-bound chain: focused_mim(dist, j) >= at_inverse_pmax > at_one for
// every j. Requires all entries positive.
LowerBoundReport lower_bound_report(const FiniteDistribution& dist);

// L(dist, 1/p_min) - L(uniform(n), n), each side at its own floor
// coefficient. Nonnegative, zero exactly for the uniform distribution: the
// uniform minimizes the floor-focused mim over n-element distributions.
// Requires all entries positive.
double uniform_gap(const FiniteDistribution& dist);

} // namespace mim
