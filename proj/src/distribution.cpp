#include "mim/distribution.hpp"

#include "mim/format.hpp"

#include "json_fields.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace mim {

namespace {

void check_entries(const Eigen::ArrayXd& probs) {
    if (probs.size() == 0)
        throw std::invalid_argument("probs: distribution must have at least one entry");
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]) || probs[i] < 0.0)
            throw std::invalid_argument("probs[" + format_int(i) +
                                        "]: entries must be finite and nonnegative, got " +
                                        format_double(probs[i]));
    }
}

} // namespace

FiniteDistribution make_distribution(Eigen::ArrayXd probs, bool renormalize) {
    check_entries(probs);
    const double sum = probs.sum();
    if (renormalize) {
        if (!(sum > 0.0) || !std::isfinite(sum))
            throw std::invalid_argument("probs: sum must be positive and finite to renormalize, got " +
                                        format_double(sum));
        probs /= sum;
    } else if (std::abs(sum - 1.0) > kProbSumTolerance) {
        throw std::invalid_argument("probs: sum " + format_double(sum) +
                                    " is off 1 beyond tolerance " +
                                    format_double(kProbSumTolerance) +
                                    "; pass renormalize to rescale");
    }
    return FiniteDistribution(std::move(probs));
}

FiniteDistribution make_distribution(const std::vector<double>& probs, bool renormalize) {
    Eigen::ArrayXd arr = Eigen::Map<const Eigen::ArrayXd>(probs.data(),
                                                          static_cast<Eigen::Index>(probs.size()));
    return make_distribution(std::move(arr), renormalize);
}

FiniteDistribution uniform_distribution(Eigen::Index n) {
    if (n < 1)
        throw std::invalid_argument("n: uniform alphabet size must be >= 1, got " + format_int(n));
    return make_distribution(Eigen::ArrayXd::Constant(n, 1.0 / static_cast<double>(n)), true);
}

GeneratorSpec GeneratorSpec::uniform(Eigen::Index n) {
    GeneratorSpec spec;
    spec.kind = Kind::Uniform;
    spec.n = n;
    return spec;
}

GeneratorSpec GeneratorSpec::binomial(Eigen::Index trials, double theta) {
    GeneratorSpec spec;
    spec.kind = Kind::Binomial;
    spec.trials = trials;
    spec.theta = theta;
    return spec;
}

GeneratorSpec GeneratorSpec::truncated_poisson(double lambda, Eigen::Index support) {
    GeneratorSpec spec;
    spec.kind = Kind::TruncatedPoisson;
    spec.lambda = lambda;
    spec.support = support;
    return spec;
}

GeneratorSpec GeneratorSpec::truncated_geometric(double q, Eigen::Index support) {
    GeneratorSpec spec;
    spec.kind = Kind::TruncatedGeometric;
    spec.q = q;
    spec.support = support;
    return spec;
}

GeneratorSpec GeneratorSpec::explicit_probs(std::vector<double> probs, bool renormalize) {
    GeneratorSpec spec;
    spec.kind = Kind::Explicit;
    spec.probs = std::move(probs);
    spec.renormalize = renormalize;
    return spec;
}

namespace {

FiniteDistribution generate_binomial(Eigen::Index trials, double theta) {
    if (trials < 1)
        throw std::invalid_argument("trials: must be >= 1, got " + format_int(trials));
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("theta: must lie in [0, 1], got " + format_double(theta));
    // Log point masses through lgamma keep symmetric entries exactly tied
    // (k and trials - k see the same lgamma arguments at theta = 1/2).
    Eigen::ArrayXd probs(trials + 1);
    const double n = static_cast<double>(trials);
    const double log_theta = std::log(theta);   // -inf at theta = 0
    const double log_comp = std::log1p(-theta); // -inf at theta = 1
    for (Eigen::Index k = 0; k <= trials; ++k) {
        const double kk = static_cast<double>(k);
        double logp = std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0);
        logp += (k == 0) ? 0.0 : kk * log_theta;
        logp += (k == trials) ? 0.0 : (n - kk) * log_comp;
        probs[k] = std::exp(logp);
    }
    return make_distribution(std::move(probs), true);
}

FiniteDistribution generate_truncated_poisson(double lambda, Eigen::Index support) {
    if (support < 1)
        throw std::invalid_argument("support: must be >= 1, got " + format_int(support));
    if (!(lambda >= 0.0) || lambda > 700.0)
        throw std::invalid_argument("lambda: must lie in [0, 700], got " + format_double(lambda));
    // Unnormalized weights lambda^k / k! by recurrence; exact ties between
    // adjacent k (lambda integral) survive, unlike an lgamma formulation.
    Eigen::ArrayXd weights(support);
    weights[0] = 1.0;
    for (Eigen::Index k = 1; k < support; ++k)
        weights[k] = weights[k - 1] * lambda / static_cast<double>(k);
    return make_distribution(std::move(weights), true);
}

FiniteDistribution generate_truncated_geometric(double q, Eigen::Index support) {
    if (support < 1)
        throw std::invalid_argument("support: must be >= 1, got " + format_int(support));
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("q: must lie in (0, 1], got " + format_double(q));
    // Support {1..K}: weight q (1-q)^(k-1) at position k-1.
    Eigen::ArrayXd weights(support);
    weights[0] = q;
    for (Eigen::Index k = 1; k < support; ++k)
        weights[k] = weights[k - 1] * (1.0 - q);
    return make_distribution(std::move(weights), true);
}

} // namespace

FiniteDistribution generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
    case GeneratorSpec::Kind::Uniform:
        return uniform_distribution(spec.n);
    case GeneratorSpec::Kind::Binomial:
        return generate_binomial(spec.trials, spec.theta);
    case GeneratorSpec::Kind::TruncatedPoisson:
        return generate_truncated_poisson(spec.lambda, spec.support);
    case GeneratorSpec::Kind::TruncatedGeometric:
        return generate_truncated_geometric(spec.q, spec.support);
    case GeneratorSpec::Kind::Explicit:
        return make_distribution(spec.probs, spec.renormalize);
    }
    throw std::invalid_argument("kind: unknown generator kind");
}

double min_prob(const FiniteDistribution& dist, bool require_positive) {
    const double m = dist.probs().minCoeff();
    if (require_positive && m <= 0.0)
        throw std::invalid_argument("probs: zero entry where a positive probability is required");
    return m;
}

double max_prob(const FiniteDistribution& dist) {
    return dist.probs().maxCoeff();
}

namespace {

using nlohmann::json;

FiniteDistribution distribution_from_parsed(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("distribution: expected a JSON object");
    if (j.contains("kind")) {
        const json& kind = j.at("kind");
        if (!kind.is_string())
            throw std::invalid_argument("kind: expected a string");
        const std::string name = kind.get<std::string>();
        if (name == "uniform")
            return generate(GeneratorSpec::uniform(detail::require_integer(j, "n")));
        if (name == "binomial")
            return generate(GeneratorSpec::binomial(detail::require_integer(j, "trials"),
                                                    detail::require_number(j, "theta")));
        if (name == "truncated-poisson")
            return generate(GeneratorSpec::truncated_poisson(detail::require_number(j, "lambda"),
                                                             detail::require_integer(j, "support")));
        if (name == "truncated-geometric")
            return generate(GeneratorSpec::truncated_geometric(detail::require_number(j, "q"),
                                                               detail::require_integer(j, "support")));
        if (name == "explicit")
            return generate(GeneratorSpec::explicit_probs(detail::require_number_array(j, "probs"),
                                                          detail::optional_bool(j, "renormalize", false)));
        throw std::invalid_argument("kind: unknown value \"" + name + "\"");
    }
    if (j.contains("probs"))
        return make_distribution(detail::require_number_array(j, "probs"),
                                 detail::optional_bool(j, "renormalize", false));
    throw std::invalid_argument("distribution: expected field \"probs\" or \"kind\"");
}

} // namespace

FiniteDistribution distribution_from_json(const std::string& json_text) {
    return distribution_from_parsed(detail::parse_json_text(json_text));
}

FiniteDistribution distribution_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("path: cannot open distribution file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return distribution_from_json(buf.str());
}

} // namespace mim
