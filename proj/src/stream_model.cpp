#include "mim/stream_model.hpp"

#include "mim/format.hpp"

#include "json_fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace mim {

namespace {

// Compensated accumulator; keeps long tail sums and moment reductions exact
// to well below the reported tolerances regardless of term count.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void check_prob_closed_unit(double p, const char* field) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(field) + ": must lie in [0, 1], got " +
                                    format_double(p));
}

} // namespace

MinorityModel::MinorityModel(FiniteDistribution category_probs_in, std::int64_t sequence_length_in,
                             double epsilon_in)
    : category_probs(std::move(category_probs_in)),
      sequence_length(sequence_length_in),
      epsilon(epsilon_in) {
    if (sequence_length < 1)
        throw std::invalid_argument("M: sequence length must be >= 1, got " +
                                    format_int(sequence_length));
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("epsilon: must be positive and finite, got " +
                                    format_double(epsilon));
}

MinorityModel model_from_json(const std::string& json_text) {
    const nlohmann::json j = detail::parse_json_text(json_text);
    if (!j.is_object())
        throw std::invalid_argument("model: expected a JSON object");
    return MinorityModel(make_distribution(detail::require_number_array(j, "probs")),
                         detail::require_integer(j, "M"),
                         detail::require_number(j, "epsilon"));
}

MinorityModel model_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("path: cannot open model file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

bool minority_deviation(std::int64_t m, std::int64_t sequence_length, double p, double epsilon) {
    const double count = static_cast<double>(m);
    const double scale = static_cast<double>(sequence_length);
    return count >= scale * p + scale * epsilon || count <= scale * p - scale * epsilon;
}

double binomial_log_pmf(std::int64_t trials, std::int64_t successes, double prob) {
    if (trials < 0)
        throw std::invalid_argument("trials: must be >= 0, got " + format_int(trials));
    check_prob_closed_unit(prob, "prob");
    if (successes < 0 || successes > trials)
        return -std::numeric_limits<double>::infinity();
    if (prob == 0.0)
        return successes == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (prob == 1.0)
        return successes == trials ? 0.0 : -std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(trials);
    const double m = static_cast<double>(successes);
    return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) +
           m * std::log(prob) + (n - m) * std::log1p(-prob);
}

namespace {

// Exact deviation tail for one category count m ~ Binomial(M, p): point
// masses summed over the set picked out by minority_deviation. O(M).
double exact_deviation_tail(std::int64_t sequence_length, double p, double epsilon) {
    KahanSum sum;
    for (std::int64_t m = 0; m <= sequence_length; ++m) {
        if (minority_deviation(m, sequence_length, p, epsilon))
            sum.add(std::exp(binomial_log_pmf(sequence_length, m, p)));
    }
    return std::min(sum.value(), 1.0);
}

} // namespace

double minority_event_probability(const MinorityModel& model) {
    return exact_deviation_tail(model.sequence_length, model.category_probs[0], model.epsilon);
}

BinomialSampler::BinomialSampler(std::int64_t trials, double prob) : trials_(trials) {
    if (trials < 0)
        throw std::invalid_argument("trials: must be >= 0, got " + format_int(trials));
    check_prob_closed_unit(prob, "prob");
    cdf_.resize(static_cast<std::size_t>(trials) + 1);
    KahanSum cum;
    for (std::int64_t m = 0; m <= trials; ++m) {
        cum.add(std::exp(binomial_log_pmf(trials, m, prob)));
        cdf_[static_cast<std::size_t>(m)] = cum.value();
    }
    const double total = cdf_.back();
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::invalid_argument("prob: binomial table has no representable mass");
    for (double& c : cdf_)
        c /= total;
    // Guarantees sample() never falls off the table for unit draws in [0, 1).
    cdf_.back() = 1.0;
}

std::int64_t BinomialSampler::sample(double unit) const {
    if (!(unit >= 0.0 && unit < 1.0))
        throw std::invalid_argument("unit: must lie in [0, 1), got " + format_double(unit));
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), unit);
    return std::min<std::int64_t>(it - cdf_.begin(), trials_);
}

UnionBoundReport union_bound_check(const MinorityModel& model, std::int64_t replicas,
                                   std::uint64_t seed) {
    const Eigen::Index categories = model.category_probs.size();
    if (categories < 2)
        throw std::invalid_argument("probs: union bound needs at least 2 categories, got " +
                                    format_int(categories));
    if (replicas < 1)
        throw std::invalid_argument("replicas: must be >= 1, got " + format_int(replicas));

    UnionBoundReport report;
    report.replicas = replicas;
    double max_tail = 0.0;
    for (Eigen::Index k = 0; k < categories; ++k) {
        const double tail =
            exact_deviation_tail(model.sequence_length, model.category_probs[k], model.epsilon);
        report.category_tails.push_back(tail);
        max_tail = std::max(max_tail, tail);
    }
    report.bound = static_cast<double>(categories) * max_tail;

    // Multinomial draw as sequential conditional binomials. The conditional
    // success probability per stage is replica-independent, so the inverse-CDF
    // tables depend only on (stage, remaining); cache them lazily.
    std::vector<double> conditional(static_cast<std::size_t>(categories - 1));
    double rest = 1.0;
    for (Eigen::Index k = 0; k + 1 < categories; ++k) {
        conditional[static_cast<std::size_t>(k)] =
            rest > 0.0 ? std::clamp(model.category_probs[k] / rest, 0.0, 1.0) : 0.0;
        rest -= model.category_probs[k];
    }
    std::vector<std::vector<std::unique_ptr<BinomialSampler>>> tables(
        static_cast<std::size_t>(categories - 1));
    for (auto& stage : tables)
        stage.resize(static_cast<std::size_t>(model.sequence_length) + 1);

    std::int64_t hits = 0;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(categories));
    for (std::int64_t r = 0; r < replicas; ++r) {
        rng::SplitMix64 engine = rng::substream(seed, static_cast<std::uint64_t>(r));
        std::int64_t remaining = model.sequence_length;
        for (Eigen::Index k = 0; k + 1 < categories; ++k) {
            auto& slot = tables[static_cast<std::size_t>(k)][static_cast<std::size_t>(remaining)];
            if (!slot)
                slot = std::make_unique<BinomialSampler>(remaining,
                                                         conditional[static_cast<std::size_t>(k)]);
            const std::int64_t m = slot->sample(engine.next_unit());
            counts[static_cast<std::size_t>(k)] = m;
            remaining -= m;
        }
        counts[static_cast<std::size_t>(categories - 1)] = remaining;
        bool any = false;
        for (Eigen::Index k = 0; k < categories && !any; ++k) {
            any = minority_deviation(counts[static_cast<std::size_t>(k)], model.sequence_length,
                                     model.category_probs[k], model.epsilon);
        }
        hits += any ? 1 : 0;
    }

    report.union_estimate = static_cast<double>(hits) / static_cast<double>(replicas);
    report.union_std_error = std::sqrt(report.union_estimate * (1.0 - report.union_estimate) /
                                       static_cast<double>(replicas));
    report.typical_estimate = 1.0 - report.union_estimate;
    report.holds_within_error =
        report.union_estimate <= report.bound + 3.0 * report.union_std_error;
    return report;
}

void EmpiricalTracker::append(std::int64_t delta_occurrences, std::int64_t delta_trials) {
    if (delta_trials < 1)
        throw std::invalid_argument("delta_N: batch size must be >= 1, got " +
                                    format_int(delta_trials));
    if (delta_occurrences < 0 || delta_occurrences > delta_trials)
        throw std::invalid_argument("delta_n: must lie in [0, delta_N], got " +
                                    format_int(delta_occurrences));
    const std::int64_t occurrences = (records_.empty() ? 0 : records_.back().occurrences) +
                                     delta_occurrences;
    const std::int64_t trials = (records_.empty() ? 0 : records_.back().trials) + delta_trials;
    const double p_hat = static_cast<double>(occurrences) / static_cast<double>(trials);
    records_.push_back({delta_occurrences, delta_trials, occurrences, trials, p_hat,
                        empirical_mim(p_hat)});
}

void write_tracker_csv(std::ostream& out, const EmpiricalTracker& tracker) {
    out << "i,delta_n,delta_N,n,N,p_hat,L_hat\n";
    std::size_t i = 0;
    for (const BatchRecord& rec : tracker.records()) {
        out << format_int(static_cast<std::int64_t>(++i)) << ','
            << format_int(rec.delta_occurrences) << ',' << format_int(rec.delta_trials) << ','
            << format_int(rec.occurrences) << ',' << format_int(rec.trials) << ','
            << format_double(rec.p_hat) << ','
            << (rec.mim ? format_double(*rec.mim) : std::string()) << '\n';
    }
}

EmpiricalTracker simulate_batches(const MinorityModel& model,
                                  std::span<const std::int64_t> batch_sizes,
                                  std::uint64_t seed) {
    if (batch_sizes.empty())
        throw std::invalid_argument("batch_sizes: need at least one batch");
    for (std::size_t k = 0; k < batch_sizes.size(); ++k) {
        if (batch_sizes[k] < 1)
            throw std::invalid_argument("batch_sizes[" + format_int(static_cast<std::int64_t>(k)) +
                                        "]: must be >= 1, got " + format_int(batch_sizes[k]));
    }
    const double p1 = model.category_probs[0];
    const BinomialSampler sampler(model.sequence_length, p1);
    EmpiricalTracker tracker;
    std::uint64_t trial = 0;
    for (const std::int64_t batch : batch_sizes) {
        std::int64_t events = 0;
        for (std::int64_t t = 0; t < batch; ++t) {
            rng::SplitMix64 engine = rng::substream(seed, trial++);
            const std::int64_t m = sampler.sample(engine.next_unit());
            if (minority_deviation(m, model.sequence_length, p1, model.epsilon))
                ++events;
        }
        tracker.append(events, batch);
    }
    return tracker;
}

std::optional<double> empirical_mim(double p_hat) {
    check_prob_closed_unit(p_hat, "p_hat");
    if (p_hat == 0.0)
        return std::nullopt; // focusing coefficient 1/p_hat diverges
    // ln(p e^{1/p - 1} + (1 - p) e) through max-factored log terms.
    const double a_focus = std::log(p_hat) + 1.0 / p_hat - 1.0;
    if (p_hat == 1.0)
        return a_focus; // second term vanishes; a_focus = 0
    const double a_rest = std::log1p(-p_hat) + 1.0;
    const double peak = std::max(a_focus, a_rest);
    return peak + std::log(std::exp(a_focus - peak) + std::exp(a_rest - peak));
}

namespace {

// fractions a/b <= c/d by exact integer cross-multiplication; counts are
// below 2^63 so the products fit in 128 bits.
bool frac_le(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return static_cast<__int128>(a) * d <= static_cast<__int128>(c) * b;
}

} // namespace

SandwichReport tracker_sandwich_check(const EmpiricalTracker& tracker) {
    SandwichReport report;
    const auto& recs = tracker.records();
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const BatchRecord& prev = recs[i - 1];
        const BatchRecord& cur = recs[i];

        // p_hat sandwich, exact: min/max of n_{i-1}/N_{i-1} and dn_i/dN_i.
        const bool prev_le_batch = frac_le(prev.occurrences, prev.trials,
                                           cur.delta_occurrences, cur.delta_trials);
        const std::int64_t lo_n = prev_le_batch ? prev.occurrences : cur.delta_occurrences;
        const std::int64_t lo_d = prev_le_batch ? prev.trials : cur.delta_trials;
        const std::int64_t hi_n = prev_le_batch ? cur.delta_occurrences : prev.occurrences;
        const std::int64_t hi_d = prev_le_batch ? cur.delta_trials : prev.trials;
        ++report.p_hat_checked;
        if (!frac_le(lo_n, lo_d, cur.occurrences, cur.trials) ||
            !frac_le(cur.occurrences, cur.trials, hi_n, hi_d)) {
            report.violations.push_back({i + 1, "p_hat",
                                         static_cast<double>(lo_n) / static_cast<double>(lo_d),
                                         cur.p_hat,
                                         static_cast<double>(hi_n) / static_cast<double>(hi_d)});
        }

        // Mim sandwich in floating point; skip whenever any of the three
        // values is undefined (a zero count somewhere).
        const double batch_frac = static_cast<double>(cur.delta_occurrences) /
                                  static_cast<double>(cur.delta_trials);
        const std::optional<double> batch_mim = empirical_mim(batch_frac);
        if (prev.mim && cur.mim && batch_mim) {
            const double lo = std::min(*prev.mim, *batch_mim);
            const double hi = std::max(*prev.mim, *batch_mim);
            const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
            ++report.mim_checked;
            if (!(*cur.mim >= lo - slack && *cur.mim <= hi + slack))
                report.violations.push_back({i + 1, "mim", lo, *cur.mim, hi});
        }
    }
    return report;
}

MomentEstimates delta_moments(double p, std::int64_t trials) {
    if (!(p > 0.0 && p < 0.5))
        throw std::invalid_argument("p: must lie in (0, 1/2), got " + format_double(p));
    if (trials < 1)
        throw std::invalid_argument("N: must be >= 1, got " + format_int(trials));
    const double sigma_sq = p * (1.0 - p) / static_cast<double>(trials);
    const double mim_at_p = *empirical_mim(p);

    // Second-order mean correction
    //   (sigma^2/2) [ (2/p - 1) e^{2/p - 4} + (1/p^3 - 1/p^2 - 2/p + 2) e^{1/p - 2} - 1 ]
    //              / (p e^{1/p - 1} + (1 - p) e)^2
    // with e^{2/p - 4} factored from numerator and e^{2/p - 2} from the
    // squared denominator: every remaining exponent is <= 0 on (0, 1/2).
    const double inv = 1.0 / p;
    const double decay = std::exp(2.0 - inv); // e^{2 - 1/p} <= 1
    const double numerator = (2.0 * inv - 1.0) +
                             (inv * inv * inv - inv * inv - 2.0 * inv + 2.0) * decay -
                             decay * decay;
    const double denom_root = p + (1.0 - p) * decay;
    const double correction =
        0.5 * sigma_sq * std::exp(-2.0) * numerator / (denom_root * denom_root);

    // First-order variance factor ((1 - 1/p) e^{1/p - 2} - 1) / (p e^{1/p - 2} + 1 - p),
    // numerator and denominator both divided by e^{1/p - 2}.
    const double ratio = ((1.0 - inv) - decay) / (p + (1.0 - p) * decay);

    return {p, sigma_sq, mim_at_p + correction, sigma_sq * ratio * ratio, trials};
}

ChebyshevBound chebyshev_bound(const MomentEstimates& moments, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("eps: must be positive and finite, got " + format_double(eps));
    return {std::min(1.0, moments.var_mim / (eps * eps)), moments.var_mim / eps};
}

MonteCarloMoments monte_carlo_moments(double p, std::int64_t trials, std::int64_t replicas,
                                      std::uint64_t seed) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("p: must lie in (0, 1), got " + format_double(p));
    if (trials < 1)
        throw std::invalid_argument("N: must be >= 1, got " + format_int(trials));
    if (replicas < 2)
        throw std::invalid_argument("replicas: must be >= 2, got " + format_int(replicas));

    const BinomialSampler sampler(trials, p);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(replicas));
    std::int64_t skipped = 0;
    for (std::int64_t r = 0; r < replicas; ++r) {
        rng::SplitMix64 engine = rng::substream(seed, static_cast<std::uint64_t>(r));
        const std::int64_t m = sampler.sample(engine.next_unit());
        const double p_hat = static_cast<double>(m) / static_cast<double>(trials);
        if (const std::optional<double> v = empirical_mim(p_hat))
            values.push_back(*v);
        else
            ++skipped;
    }
    if (values.size() < 2)
        throw std::runtime_error("replicas: fewer than 2 draws produced a defined empirical mim");

    KahanSum mean_sum;
    for (double v : values)
        mean_sum.add(v);
    const double mean = mean_sum.value() / static_cast<double>(values.size());
    KahanSum var_sum;
    for (double v : values)
        var_sum.add((v - mean) * (v - mean));
    const double variance = var_sum.value() / static_cast<double>(values.size() - 1);
    return {mean, variance, static_cast<std::int64_t>(values.size()), skipped};
}

} // namespace mim
