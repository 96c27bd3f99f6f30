#include "mim/verify.hpp"

#include "mim/figures.hpp"
#include "mim/format.hpp"
#include "mim/mim.hpp"
#include "mim/param_select.hpp"
#include "mim/stream_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mim::verify {

bool SuiteReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

FiniteDistribution sample_simplex(Eigen::Index n, rng::SplitMix64& gen) {
    // -ln U with U in (0, 1), normalized: flat Dirichlet, entries never zero.
    Eigen::ArrayXd raw(n);
    for (Eigen::Index i = 0; i < n; ++i)
        raw[i] = -std::log(gen.next_unit_open());
    return make_distribution(std::move(raw), true);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Accumulates one margin-style check: `worst` is the minimum margin seen and
// the check passes while it stays >= 0.
struct MarginCheck {
    std::string name;
    std::int64_t cases = 0;
    double worst = kInf;
    std::string detail;

    explicit MarginCheck(std::string check_name) : name(std::move(check_name)) {}

    void observe(double margin, const std::string& where) {
        ++cases;
        if (margin < worst) {
            worst = margin;
            detail = where;
        }
    }
    CheckResult result() const {
        return {name, cases > 0 && worst >= 0.0, cases, worst, detail};
    }
};

std::string describe_dist(std::int64_t sample, Eigen::Index n) {
    return "sample " + format_int(sample) + " (n = " + format_int(n) + ")";
}

// Direct high-precision rendition of ln sum p e^{omega (1 - p)}; safe for the
// small omega it is used with.
double naive_mim(const FiniteDistribution& dist, double omega) {
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
        const long double p = dist[i];
        sum += p * std::exp(static_cast<long double>(omega) * (1.0L - p));
    }
    return static_cast<double>(std::log(sum));
}

} // namespace

SuiteReport verify_properties(std::int64_t samples, std::uint64_t seed) {
    if (samples < 1)
        throw std::invalid_argument("samples: must be >= 1, got " + format_int(samples));

    MarginCheck dominance("focused element dominates at omega = 1/p_j");
    MarginCheck monotone("mim strictly increases with omega");
    MarginCheck zero_at_zero("mim at omega = 0 is exactly 0");
    MarginCheck chain("chain rule: rarer focus, strictly larger mim");
    MarginCheck lower_bound("lower bound chain L_j >= L(1/p_max) > L(1)");
    MarginCheck floor("uniform floor gap nonnegative at omega_0 = 1/p_min");
    MarginCheck naive("stable evaluation matches naive summation");

    for (std::int64_t s = 0; s < samples; ++s) {
        rng::SplitMix64 gen = rng::substream(seed, static_cast<std::uint64_t>(s));
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen.next() % 9); // 2..10
        const FiniteDistribution dist = sample_simplex(n, gen);
        const std::string where = describe_dist(s, n);

        // Dominance: at omega = 1/p_j the winning summand carries p_j. Ties
        // between equal terms resolve to either index; compare probabilities.
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index k = dominant_index(dist, coefficient_for_element(dist, j));
            dominance.observe(1e-8 - std::abs(dist[k] - dist[j]) / dist[j],
                              where + " j = " + format_int(j));
        }

        // Monotonicity over an increasing omega ladder up to the floor
        // coefficient; strict because no distribution here is degenerate.
        zero_at_zero.observe(evaluate(dist, 0.0) == 0.0 ? 0.0 : -1.0, where);
        const double omega_top = 1.0 / min_prob(dist, true);
        std::vector<double> ladder;
        for (int step = 1; step <= 10; ++step)
            ladder.push_back(0.5 * step);
        ladder.push_back(0.5 * omega_top);
        ladder.push_back(omega_top);
        std::sort(ladder.begin(), ladder.end());
        ladder.erase(std::unique(ladder.begin(), ladder.end(),
                                 [](double a, double b) { return b - a <= 1e-6; }),
                     ladder.end());
        double prev = 0.0; // L at omega = 0
        for (const double omega : ladder) {
            const double value = evaluate(dist, omega);
            monotone.observe(value - prev, where + " omega = " + format_double(omega));
            prev = value;
        }

        // Chain rule: sorted by p descending, mim must strictly increase
        // wherever p strictly decreases.
        const std::vector<ChainRuleEntry> entries = chain_rule_values(dist);
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].prob < entries[i - 1].prob)
                chain.observe(entries[i].mim - entries[i - 1].mim,
                              where + " rank " + format_int(static_cast<std::int64_t>(i)));
        }

        // Lower bound chain.
        const LowerBoundReport bounds = lower_bound_report(dist);
        lower_bound.observe(bounds.at_inverse_pmax - bounds.at_one, where + " (floor > L(1))");
        for (const ChainRuleEntry& entry : entries)
            lower_bound.observe(entry.mim - bounds.at_inverse_pmax + 1e-12,
                                where + " j = " + format_int(entry.index));

        // Uniform floor.
        floor.observe(uniform_gap(dist) + 1e-12, where);

        // Agreement with naive long double summation at small omega.
        for (const double omega : {0.5, 1.0, 2.0, 5.0}) {
            const double reference = naive_mim(dist, omega);
            const double err = std::abs(evaluate(dist, omega) - reference) /
                               std::max(1.0, std::abs(reference));
            naive.observe(1e-10 - err, where + " omega = " + format_double(omega));
        }
    }

    SuiteReport report;
    report.suite = "properties";
    report.checks = {dominance.result(), monotone.result(),   zero_at_zero.result(),
                     chain.result(),     lower_bound.result(), floor.result(),
                     naive.result()};
    return report;
}

SuiteReport verify_select(double grid_lo, double grid_hi, double grid_step) {
    if (!(grid_lo > 0.0 && grid_lo < 0.5))
        throw std::invalid_argument("grid_lo: must lie in (0, 1/2), got " + format_double(grid_lo));
    if (!(grid_hi >= grid_lo && grid_hi < 0.5))
        throw std::invalid_argument("grid_hi: need grid_lo <= grid_hi < 1/2, got " +
                                    format_double(grid_hi));
    if (!(grid_step > 0.0))
        throw std::invalid_argument("grid_step: must be positive, got " + format_double(grid_step));

    std::vector<double> grid;
    for (int i = 0; grid_lo + static_cast<double>(i) * grid_step <= grid_hi + 1e-12; ++i)
        grid.push_back(grid_lo + static_cast<double>(i) * grid_step);

    MarginCheck residual("solver residual below 1e-8");
    MarginCheck bracket("root inside the open bracket (1/p, 2/p)");
    MarginCheck above4("root above 4");
    MarginCheck decreasing("root strictly decreasing in p");
    MarginCheck stationary("importance sum stationary at the root");
    MarginCheck margin("dominance margin nonnegative at the root");
    MarginCheck surrogate("surrogate root within factor 2 of exact");
    MarginCheck antisym("g(p, omega) = -g(1 - p, omega)");

    double prev_root = kInf;
    for (const double p : grid) {
        const std::string where = "p = " + format_double(p);
        const RootSolveResult sol = solve_coefficient_exact(p, 1e-8);

        residual.observe(1e-8 - sol.residual, where);
        bracket.observe(std::min(sol.omega_star - 1.0 / p, 2.0 / p - sol.omega_star), where);
        above4.observe(sol.omega_star - 4.0, where);
        decreasing.observe(prev_root - sol.omega_star, where);
        prev_root = sol.omega_star;

        // T(q) = q e^{w (1 - q)} + (1 - q) e^{w q} has derivative g(q, w); a
        // central difference at the root must vanish to relative 1e-6.
        const double w = sol.omega_star;
        const auto importance_sum = [w](double q) {
            return q * std::exp(w * (1.0 - q)) + (1.0 - q) * std::exp(w * q);
        };
        const double h = 1e-6;
        const double derivative = (importance_sum(p + h) - importance_sum(p - h)) / (2.0 * h);
        stationary.observe(1e-6 - std::abs(derivative) / importance_sum(p), where);

        margin.observe(dominance_margin(p, sol.omega_star), where);

        if (p >= 0.05 - 1e-12) {
            const double ratio = taylor_coefficient(p) / sol.omega_star;
            surrogate.observe(std::min(ratio - 0.5, 2.0 - ratio), where);
        }

        // Moderate omega only: near omega = 1/p the coefficient 1 - p omega
        // rounds at ~1e-16 and e^{omega (1 - p)} amplifies that far past the
        // true value, so a double evaluation of g cannot witness the identity
        // there.
        for (const double omega : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double fwd = g(p, omega);
            const double mirrored = g(1.0 - p, omega);
            const double scale = std::max({1.0, std::abs(fwd), std::abs(mirrored)});
            antisym.observe(1e-12 - std::abs(fwd + mirrored) / scale,
                            where + " omega = " + format_double(omega));
        }
    }

    SuiteReport report;
    report.suite = "select";
    report.checks = {residual.result(),   bracket.result(),  above4.result(),
                     decreasing.result(), stationary.result(), margin.result(),
                     surrogate.result(),  antisym.result()};
    return report;
}

SuiteReport verify_stream(std::int64_t replicas, std::uint64_t seed) {
    if (replicas < 100)
        throw std::invalid_argument("replicas: must be >= 100, got " + format_int(replicas));

    SuiteReport report;
    report.suite = "stream";

    // Reference model: M = 100, p_1 = 0.3, eps = 0.1.
    const MinorityModel model(make_distribution(std::vector<double>{0.3, 0.7}), 100, 0.1);

    // 1. Exact deviation tail against a Monte Carlo frequency.
    {
        const double exact = minority_event_probability(model);
        const BinomialSampler sampler(model.sequence_length, model.category_probs[0]);
        std::int64_t hits = 0;
        for (std::int64_t r = 0; r < replicas; ++r) {
            rng::SplitMix64 gen = rng::substream(seed, static_cast<std::uint64_t>(r));
            if (minority_deviation(sampler.sample(gen.next_unit()), model.sequence_length,
                                   model.category_probs[0], model.epsilon))
                ++hits;
        }
        const double freq = static_cast<double>(hits) / static_cast<double>(replicas);
        const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(replicas));
        const double gap = std::abs(freq - exact);
        report.checks.push_back({"exact deviation tail matches Monte Carlo", gap <= 3.0 * se,
                                 replicas, 3.0 * se - gap,
                                 "exact = " + format_double(exact, 12) +
                                     ", mc = " + format_double(freq, 12) +
                                     ", se = " + format_double(se, 6)});
    }

    // 2. Sandwich inequalities across 100 seeded simulation runs.
    {
        const std::vector<std::int64_t> batches(5, 200);
        std::int64_t violations = 0;
        std::int64_t checked = 0;
        for (std::uint64_t run = 0; run < 100; ++run) {
            const EmpiricalTracker tracker =
                simulate_batches(model, batches, rng::mix64(seed ^ (run + 1)));
            const SandwichReport sandwich = tracker_sandwich_check(tracker);
            violations += static_cast<std::int64_t>(sandwich.violations.size());
            checked += sandwich.p_hat_checked + sandwich.mim_checked;
        }
        report.checks.push_back({"sandwich inequalities hold over seeded runs", violations == 0,
                                 checked, static_cast<double>(violations),
                                 format_int(violations) + " violations in " +
                                     format_int(checked) + " comparisons"});
    }

    // 3-5. Delta-method moments and the Chebyshev bound at p = 0.1, N = 1e4.
    {
        const double p = 0.1;
        const std::int64_t trials = 10000;
        const MomentEstimates est = delta_moments(p, trials);
        const MonteCarloMoments mc = monte_carlo_moments(p, trials, replicas, seed);

        const double mean_gap = std::abs(mc.mean - est.mean_mim);
        report.checks.push_back({"delta-method mean within 0.01 of Monte Carlo",
                                 mean_gap <= 0.01, mc.used, 0.01 - mean_gap,
                                 "approx = " + format_double(est.mean_mim, 12) +
                                     ", mc = " + format_double(mc.mean, 12)});

        const double var_rel = std::abs(mc.variance / est.var_mim - 1.0);
        report.checks.push_back({"delta-method variance within 15% of Monte Carlo",
                                 var_rel <= 0.15, mc.used, 0.15 - var_rel,
                                 "approx = " + format_double(est.var_mim, 12) +
                                     ", mc = " + format_double(mc.variance, 12)});

        // Exceedance of |L_hat - E L_hat| >= eps against min(1, var/eps^2);
        // same substreams as monte_carlo_moments, so the draws agree.
        const double eps = 1.0;
        const ChebyshevBound cheb = chebyshev_bound(est, eps);
        const BinomialSampler sampler(trials, p);
        std::int64_t exceed = 0;
        std::int64_t used = 0;
        for (std::int64_t r = 0; r < replicas; ++r) {
            rng::SplitMix64 gen = rng::substream(seed, static_cast<std::uint64_t>(r));
            const double p_hat = static_cast<double>(sampler.sample(gen.next_unit())) /
                                 static_cast<double>(trials);
            if (const std::optional<double> v = empirical_mim(p_hat)) {
                ++used;
                if (std::abs(*v - est.mean_mim) >= eps)
                    ++exceed;
            }
        }
        const double freq = static_cast<double>(exceed) / static_cast<double>(used);
        const double se = std::sqrt(std::max(freq * (1.0 - freq), 1.0 / static_cast<double>(used)) /
                                    static_cast<double>(used));
        const double slack = cheb.bound + 3.0 * se - freq;
        report.checks.push_back({"chebyshev bound respected at eps = 1", slack >= 0.0, used, slack,
                                 "exceedance = " + format_double(freq, 6) +
                                     ", bound = " + format_double(cheb.bound, 6) +
                                     ", var/eps form = " + format_double(cheb.printed_form, 6)});

        // p_hat itself: mean p, variance p (1 - p) / N, from the same draws.
        double sum = 0.0;
        for (std::int64_t r = 0; r < replicas; ++r) {
            rng::SplitMix64 gen = rng::substream(seed, static_cast<std::uint64_t>(r));
            sum += static_cast<double>(sampler.sample(gen.next_unit()));
        }
        const double mean_p_hat = sum / (static_cast<double>(replicas) * trials);
        const double sigma = std::sqrt(est.sigma_sq / static_cast<double>(replicas));
        const double p_gap = std::abs(mean_p_hat - p);
        report.checks.push_back({"p_hat mean matches the category probability",
                                 p_gap <= 3.0 * sigma, replicas, 3.0 * sigma - p_gap,
                                 "mean p_hat = " + format_double(mean_p_hat, 10)});
    }

    // 6. Union bound across categories.
    {
        const MinorityModel uniform3(uniform_distribution(3), 50, 0.2);
        const UnionBoundReport union_report =
            union_bound_check(uniform3, std::min<std::int64_t>(replicas, 100000), seed);
        report.checks.push_back(
            {"union bound dominates the any-category deviation", union_report.holds_within_error,
             union_report.replicas, union_report.bound - union_report.union_estimate,
             "bound = " + format_double(union_report.bound, 10) +
                 ", union = " + format_double(union_report.union_estimate, 10) +
                 ", typical = " + format_double(union_report.typical_estimate, 10)});
    }

    // 7. Empirical mim strictly decreasing in p_hat.
    {
        rng::SplitMix64 gen = rng::substream(seed, 0xe0ull);
        std::vector<double> points;
        for (int i = 0; i < 200; ++i)
            points.push_back(gen.next_unit_open());
        points.push_back(1.0);
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        MarginCheck decreasing("empirical mim strictly decreasing in p_hat");
        for (std::size_t i = 1; i < points.size(); ++i)
            decreasing.observe(*empirical_mim(points[i - 1]) - *empirical_mim(points[i]),
                               "p_hat = " + format_double(points[i]));
        report.checks.push_back(decreasing.result());
    }

    // 8. Exact tail nonincreasing in epsilon.
    {
        MarginCheck monotone("deviation tail nonincreasing in epsilon");
        double prev = 1.0;
        for (int i = 1; i <= 25; ++i) {
            const double eps = 0.02 * static_cast<double>(i);
            const MinorityModel varied(make_distribution(std::vector<double>{0.3, 0.7}), 100, eps);
            const double tail = minority_event_probability(varied);
            monotone.observe(prev - tail, "eps = " + format_double(eps));
            prev = tail;
        }
        report.checks.push_back(monotone.result());
    }

    return report;
}

} // namespace mim::verify
