#include "mim/mim.hpp"

#include "mim/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mim {

namespace {

void check_omega(double omega) {
    if (!(omega >= 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("omega: must be nonnegative and finite, got " +
                                    format_double(omega));
}

void check_index(const FiniteDistribution& dist, Eigen::Index j) {
    if (j < 0 || j >= dist.size())
        throw std::invalid_argument("j: index " + format_int(j) +
                                    " out of range for alphabet size " + format_int(dist.size()));
}

void check_all_positive(const FiniteDistribution& dist) {
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
        if (dist[i] <= 0.0)
            throw std::invalid_argument("probs[" + format_int(i) +
                                        "]: zero entry where a positive probability is required");
    }
}

} // namespace

Eigen::ArrayXd log_mim_terms(const FiniteDistribution& dist, double omega) {
    check_omega(omega);
    // log(0) = -inf marks zero-probability entries; they drop out of the sum.
    return dist.probs().log() + omega * (1.0 - dist.probs());
}

double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& log_terms) {
    if (log_terms.size() == 0)
        throw std::invalid_argument("log_terms: empty");
    const double peak = log_terms.maxCoeff();
    if (!std::isfinite(peak))
        throw std::invalid_argument("log_terms: need at least one finite entry");
    // -inf - peak stays -inf, so exp() maps dropped entries to 0.
    const double sum = (log_terms - peak).exp().sum();
    return peak + std::log(sum);
}

double evaluate(const FiniteDistribution& dist, double omega) {
    check_omega(omega);
    if (omega == 0.0)
        return 0.0; // ln sum p_i = ln 1, pinned exactly
    return log_sum_exp(log_mim_terms(dist, omega));
}

double coefficient_for_element(const FiniteDistribution& dist, Eigen::Index j) {
    check_index(dist, j);
    if (dist[j] <= 0.0)
        throw std::invalid_argument("probs[" + format_int(j) +
                                    "]: cannot focus an element with zero probability");
    return 1.0 / dist[j];
}

double focused_mim(const FiniteDistribution& dist, Eigen::Index j) {
    return evaluate(dist, coefficient_for_element(dist, j));
}

Eigen::Index dominant_index(const FiniteDistribution& dist, double omega) {
    const Eigen::ArrayXd terms = log_mim_terms(dist, omega);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < terms.size(); ++i) {
        if (terms[i] > terms[best]) // strict: ties keep the lowest index
            best = i;
    }
    return best;
}

std::vector<ChainRuleEntry> chain_rule_values(const FiniteDistribution& dist) {
    check_all_positive(dist);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(dist.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&dist](Eigen::Index a, Eigen::Index b) { return dist[a] > dist[b]; });
    std::vector<ChainRuleEntry> entries;
    entries.reserve(order.size());
    for (Eigen::Index j : order)
        entries.push_back({j, dist[j], focused_mim(dist, j)});
    return entries;
}

LowerBoundReport lower_bound_report(const FiniteDistribution& dist) {
    check_all_positive(dist);
    return {evaluate(dist, 1.0 / max_prob(dist)), evaluate(dist, 1.0)};
}

double uniform_gap(const FiniteDistribution& dist) {
    check_all_positive(dist);
    const double omega0 = 1.0 / min_prob(dist, true);
    // Uniform baseline at the uniform's own floor coefficient 1/(1/n); same
    // code path as the left side so the gap is exactly zero on uniform input.
    const FiniteDistribution baseline = uniform_distribution(dist.size());
    return evaluate(dist, omega0) - evaluate(baseline, 1.0 / min_prob(baseline, true));
}

} // namespace mim
