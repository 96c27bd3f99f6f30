#include "mim/stream_model.hpp"

#include "mim/mim.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace mim;

namespace {

MinorityModel reference_model() {
    return MinorityModel(make_distribution(std::vector<double>{0.3, 0.7}), 100, 0.1);
}

// Frozen 50-digit references.
constexpr double kTail_100_03_01 = 0.037451429245794154; // P(|m/100 - 0.3| >= 0.1)
constexpr double kLhat_01 = 6.7004295221353554;          // empirical mim at p_hat = 0.1
constexpr double kLhat_02 = 2.5721736202452597;          // empirical mim at p_hat = 0.2
constexpr double kDeltaMean_01_1e4 = 6.7015975941835734; // delta-method mean, p=0.1 N=1e4
constexpr double kDeltaVar_01_1e4 = 0.072467193399661496;
constexpr double kUnionTail_3_50_02 = 0.0025978741230699488;  // per-category, K=3 M=50 eps=0.2
constexpr double kUnionBound_3_50_02 = 0.0077936223692098465; // 3 * max tail

} // namespace

TEST_CASE("model validation") {
    CHECK_NOTHROW(reference_model());
    // epsilon >= 1 is allowed: the deviation event is simply impossible.
    CHECK_NOTHROW(MinorityModel(make_distribution(std::vector<double>{0.3, 0.7}), 10, 2.0));
    CHECK_THROWS_WITH_AS(MinorityModel(make_distribution(std::vector<double>{0.3, 0.7}), 0, 0.1),
                         doctest::Contains("M"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(MinorityModel(make_distribution(std::vector<double>{0.3, 0.7}), 10, 0.0),
                         doctest::Contains("epsilon"), std::invalid_argument);
}

TEST_CASE("model json ingestion") {
    const MinorityModel m = model_from_json(R"({"probs": [0.3, 0.7], "M": 100, "epsilon": 0.1})");
    CHECK(m.sequence_length == 100);
    CHECK(m.epsilon == 0.1);
    CHECK(m.category_probs[0] == 0.3);
    CHECK_THROWS_WITH_AS(model_from_json(R"({"probs": [0.3, 0.7], "epsilon": 0.1})"),
                         doctest::Contains("M"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(model_from_json(R"({"probs": [0.3, 0.7], "M": 100})"),
                         doctest::Contains("epsilon"), std::invalid_argument);
    CHECK_THROWS_AS(model_from_json_file("/no/such/model.json"), std::invalid_argument);
}

TEST_CASE("deviation predicate boundaries are inclusive") {
    // M = 100, p = 0.3, eps = 0.1: thresholds land exactly on 40 and 20.
    CHECK(minority_deviation(40, 100, 0.3, 0.1));
    CHECK(minority_deviation(20, 100, 0.3, 0.1));
    CHECK_FALSE(minority_deviation(39, 100, 0.3, 0.1));
    CHECK_FALSE(minority_deviation(21, 100, 0.3, 0.1));
    CHECK_FALSE(minority_deviation(30, 100, 0.3, 0.1));
    CHECK(minority_deviation(100, 100, 0.3, 0.1));
    CHECK(minority_deviation(0, 100, 0.3, 0.1));
}

TEST_CASE("binomial log pmf matches a long double recurrence oracle") {
    const std::int64_t trials = 100;
    const double p = 0.3;
    // pmf_{m+1} = pmf_m (trials - m)/(m + 1) * p/(1 - p), from (1-p)^trials.
    long double pmf = std::pow(0.7L, 100);
    for (std::int64_t m = 0; m <= trials; ++m) {
        const double expected = static_cast<double>(std::log(pmf));
        CHECK(binomial_log_pmf(trials, m, p) == doctest::Approx(expected).epsilon(1e-12));
        pmf *= static_cast<long double>(trials - m) / static_cast<long double>(m + 1) *
               (0.3L / 0.7L);
    }
}

TEST_CASE("binomial log pmf edges") {
    CHECK(binomial_log_pmf(10, -1, 0.3) == -std::numeric_limits<double>::infinity());
    CHECK(binomial_log_pmf(10, 11, 0.3) == -std::numeric_limits<double>::infinity());
    CHECK(binomial_log_pmf(10, 0, 0.0) == 0.0);
    CHECK(binomial_log_pmf(10, 3, 0.0) == -std::numeric_limits<double>::infinity());
    CHECK(binomial_log_pmf(10, 10, 1.0) == 0.0);
    CHECK_THROWS_AS(binomial_log_pmf(10, 3, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(binomial_log_pmf(-1, 0, 0.3), std::invalid_argument);
}

TEST_CASE("exact minority event probability matches frozen and oracle values") {
    CHECK(minority_event_probability(reference_model()) ==
          doctest::Approx(kTail_100_03_01).epsilon(1e-10));

    // Independent oracle: long double pmf recurrence over the deviation set.
    long double pmf = std::pow(0.7L, 100);
    long double tail = 0.0L;
    for (std::int64_t m = 0; m <= 100; ++m) {
        if (minority_deviation(m, 100, 0.3, 0.1))
            tail += pmf;
        pmf *= static_cast<long double>(100 - m) / static_cast<long double>(m + 1) *
               (0.3L / 0.7L);
    }
    CHECK(minority_event_probability(reference_model()) ==
          doctest::Approx(static_cast<double>(tail)).epsilon(1e-12));

    // M = 1: only m = 1 deviates at eps = 0.5; the tail is p itself.
    const MinorityModel tiny(make_distribution(std::vector<double>{0.3, 0.7}), 1, 0.5);
    CHECK(minority_event_probability(tiny) == doctest::Approx(0.3).epsilon(1e-15));

    // Impossible event: empty deviation set sums to exactly zero.
    const MinorityModel impossible(make_distribution(std::vector<double>{0.3, 0.7}), 100, 1.5);
    CHECK(minority_event_probability(impossible) == 0.0);
}

TEST_CASE("exact tail is nonincreasing in epsilon") {
    double prev = 1.0;
    for (int i = 1; i <= 50; ++i) {
        const MinorityModel m(make_distribution(std::vector<double>{0.3, 0.7}), 100, 0.01 * i);
        const double tail = minority_event_probability(m);
        CHECK(tail <= prev);
        prev = tail;
    }
}

TEST_CASE("binomial sampler inverts the cdf") {
    const BinomialSampler sampler(10, 0.3);
    CHECK(sampler.trials() == 10);
    CHECK(sampler.sample(0.0) == 0);
    CHECK(sampler.sample(std::nextafter(1.0, 0.0)) == 10);
    // cdf(2) ~ 0.3828, cdf(3) ~ 0.6496: a draw of 0.5 lands on 3.
    CHECK(sampler.sample(0.5) == 3);
    CHECK_THROWS_AS(sampler.sample(1.0), std::invalid_argument);
    CHECK_THROWS_AS(sampler.sample(-0.1), std::invalid_argument);
}

TEST_CASE("binomial sampler survives pmf(0) underflow at large N") {
    // 0.9^10000 underflows to zero; the log-pmf table still carries the bulk.
    const BinomialSampler sampler(10000, 0.1);
    rng::SplitMix64 gen(12345);
    double sum = 0.0;
    const int draws = 20000;
    std::int64_t lo = 10000;
    std::int64_t hi = 0;
    for (int i = 0; i < draws; ++i) {
        const std::int64_t m = sampler.sample(gen.next_unit());
        sum += static_cast<double>(m);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const double mean = sum / draws;
    // Mean 1000, sd 30; the sample mean of 20000 draws has sd ~0.21.
    CHECK(std::abs(mean - 1000.0) < 1.5);
    CHECK(lo > 800);
    CHECK(hi < 1200);
}

TEST_CASE("empirical mim matches the two-element evaluation exactly where defined") {
    CHECK(*empirical_mim(0.1) == doctest::Approx(kLhat_01).epsilon(1e-14));
    CHECK(*empirical_mim(0.2) == doctest::Approx(kLhat_02).epsilon(1e-14));
    // Cross-module consistency: the same quantity through evaluate().
    for (const double p : {0.05, 0.1, 0.25, 0.4, 0.49}) {
        const FiniteDistribution d = make_distribution(std::vector<double>{p, 1.0 - p});
        CHECK(*empirical_mim(p) ==
              doctest::Approx(evaluate(d, 1.0 / p)).epsilon(1e-13));
    }
    CHECK(*empirical_mim(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(*empirical_mim(1.0) == 0.0);
    CHECK_FALSE(empirical_mim(0.0).has_value());
    CHECK_THROWS_AS(empirical_mim(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(empirical_mim(1.1), std::invalid_argument);
}

TEST_CASE("empirical mim is finite and strictly decreasing down to tiny p_hat") {
    double prev = *empirical_mim(1e-9);
    CHECK(std::isfinite(prev));
    for (const double p : {1e-6, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.9, 1.0}) {
        const double value = *empirical_mim(p);
        CHECK(std::isfinite(value));
        CHECK(value < prev);
        prev = value;
    }
}

TEST_CASE("tracker accumulates exact integer counts") {
    EmpiricalTracker tracker;
    CHECK(tracker.empty());
    tracker.append(1, 10);
    tracker.append(0, 10);
    tracker.append(3, 30);
    REQUIRE(tracker.size() == 3);
    CHECK(tracker.records()[0].p_hat == 0.1);
    CHECK(tracker.records()[1].occurrences == 1);
    CHECK(tracker.records()[1].trials == 20);
    CHECK(tracker.records()[1].p_hat == 0.05);
    CHECK(tracker.back().occurrences == 4);
    CHECK(tracker.back().trials == 50);
    CHECK(tracker.back().p_hat == doctest::Approx(0.08).epsilon(1e-15));
    CHECK(tracker.records()[0].mim.has_value());
    CHECK_THROWS_WITH_AS(tracker.append(1, 0), doctest::Contains("delta_N"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(tracker.append(-1, 10), doctest::Contains("delta_n"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(tracker.append(11, 10), doctest::Contains("delta_n"),
                         std::invalid_argument);
}

TEST_CASE("tracker csv has the pinned header and an empty field for undefined mim") {
    EmpiricalTracker tracker;
    tracker.append(0, 10); // p_hat = 0: L_hat undefined
    tracker.append(2, 10);
    std::ostringstream out;
    write_tracker_csv(out, tracker);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "i,delta_n,delta_N,n,N,p_hat,L_hat");
    REQUIRE(std::getline(in, line));
    CHECK(line == "1,0,10,0,10,0,");
    REQUIRE(std::getline(in, line));
    // Shortest round-trip formatting: parse back and compare exactly.
    CHECK(line.substr(0, 15) == "2,2,10,2,20,0.1");
    const std::string mim_field = line.substr(line.rfind(',') + 1);
    CHECK(std::stod(mim_field) == *tracker.back().mim);
    CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("simulation is deterministic and batch-partition independent") {
    const MinorityModel model = reference_model();
    const std::vector<std::int64_t> batches{100, 100};
    const EmpiricalTracker a = simulate_batches(model, batches, 42);
    const EmpiricalTracker b = simulate_batches(model, batches, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.records()[i].delta_occurrences == b.records()[i].delta_occurrences);
        CHECK(a.records()[i].p_hat == b.records()[i].p_hat);
    }
    // Per-trial substreams: the cumulative count after 200 trials does not
    // depend on how the trials are split into batches.
    const EmpiricalTracker c =
        simulate_batches(model, std::vector<std::int64_t>{200}, 42);
    CHECK(c.back().occurrences == a.back().occurrences);
    // A different seed almost surely changes the draw.
    const EmpiricalTracker d =
        simulate_batches(model, std::vector<std::int64_t>{200}, 43);
    CHECK(d.back().occurrences != a.back().occurrences);
}

TEST_CASE("simulation frequencies concentrate near the exact tail") {
    const MinorityModel model = reference_model();
    const EmpiricalTracker tracker =
        simulate_batches(model, std::vector<std::int64_t>{20000}, kDefaultSeed);
    const double exact = minority_event_probability(model);
    const double se = std::sqrt(exact * (1.0 - exact) / 20000.0);
    CHECK(std::abs(tracker.back().p_hat - exact) <= 4.0 * se);
}

TEST_CASE("simulate validates batches") {
    const MinorityModel model = reference_model();
    CHECK_THROWS_AS(simulate_batches(model, std::vector<std::int64_t>{}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_batches(model, std::vector<std::int64_t>{10, 0}, 1),
                    std::invalid_argument);
}

TEST_CASE("impossible event yields an all-zero tracker with undefined mim") {
    const MinorityModel model(make_distribution(std::vector<double>{0.3, 0.7}), 50, 2.0);
    const EmpiricalTracker tracker =
        simulate_batches(model, std::vector<std::int64_t>{100, 100}, 7);
    for (const BatchRecord& rec : tracker.records()) {
        CHECK(rec.delta_occurrences == 0);
        CHECK(rec.p_hat == 0.0);
        CHECK_FALSE(rec.mim.has_value());
    }
}

TEST_CASE("sandwich check validates the mediant inequality") {
    EmpiricalTracker tracker;
    tracker.append(1, 10);
    tracker.append(3, 10);
    const SandwichReport report = tracker_sandwich_check(tracker);
    CHECK(report.p_hat_checked == 1);
    CHECK(report.mim_checked == 1);
    CHECK(report.clean());

    // First batch empty: the mim comparison is skipped, p_hat still checked.
    EmpiricalTracker zero_start;
    zero_start.append(0, 10);
    zero_start.append(2, 10);
    const SandwichReport partial = tracker_sandwich_check(zero_start);
    CHECK(partial.p_hat_checked == 1);
    CHECK(partial.mim_checked == 0);
    CHECK(partial.clean());
}

TEST_CASE("sandwich check stays clean over seeded simulations") {
    const MinorityModel model = reference_model();
    const std::vector<std::int64_t> batches(5, 200);
    for (std::uint64_t run = 0; run < 25; ++run) {
        const EmpiricalTracker tracker = simulate_batches(model, batches, 1000 + run);
        const SandwichReport report = tracker_sandwich_check(tracker);
        CHECK(report.clean());
        CHECK(report.p_hat_checked == 4);
    }
}

TEST_CASE("delta moments match the frozen printed-form evaluation") {
    const MomentEstimates est = delta_moments(0.1, 10000);
    CHECK(est.mu == 0.1);
    CHECK(est.sigma_sq == doctest::Approx(9e-6).epsilon(1e-14));
    CHECK(est.mean_mim == doctest::Approx(kDeltaMean_01_1e4).epsilon(1e-12));
    CHECK(est.var_mim == doctest::Approx(kDeltaVar_01_1e4).epsilon(1e-12));
    CHECK(est.trials == 10000);
    // The mean correction is positive at p = 0.1 (convexity of L there).
    CHECK(est.mean_mim > kLhat_01);
    CHECK_THROWS_AS(delta_moments(0.5, 100), std::invalid_argument);
    CHECK_THROWS_AS(delta_moments(0.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(delta_moments(0.1, 0), std::invalid_argument);
}

TEST_CASE("delta moments stay finite for small p") {
    // The factored evaluation must not overflow even when 1/p is large.
    for (const double p : {1e-3, 1e-6, 1e-9}) {
        const MomentEstimates est = delta_moments(p, 1000);
        CHECK(std::isfinite(est.mean_mim));
        CHECK(std::isfinite(est.var_mim));
        CHECK(est.var_mim >= 0.0);
    }
}

TEST_CASE("chebyshev bound caps at one and reports the printed variant") {
    const MomentEstimates est = delta_moments(0.1, 10000);
    const ChebyshevBound at1 = chebyshev_bound(est, 1.0);
    CHECK(at1.bound == doctest::Approx(est.var_mim).epsilon(1e-15));
    CHECK(at1.printed_form == doctest::Approx(est.var_mim).epsilon(1e-15));
    const ChebyshevBound at01 = chebyshev_bound(est, 0.1);
    CHECK(at01.bound == 1.0); // var/eps^2 = 7.2 caps at 1
    CHECK(at01.printed_form == doctest::Approx(est.var_mim / 0.1).epsilon(1e-15));
    CHECK_THROWS_AS(chebyshev_bound(est, 0.0), std::invalid_argument);
}

TEST_CASE("monte carlo moments are deterministic and consistent with delta moments") {
    const MonteCarloMoments a = monte_carlo_moments(0.3, 50, 2000, 99);
    const MonteCarloMoments b = monte_carlo_moments(0.3, 50, 2000, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
    CHECK(a.used + a.skipped == 2000);

    // The second-order approximation is asymptotic in the trial count, so
    // compare in its regime: sd(p_hat) ~ 0.01 makes the curvature terms small
    // while the sample mean still has sd ~ sqrt(var/2000) ~ 0.0012.
    const MomentEstimates est = delta_moments(0.3, 2000);
    const MonteCarloMoments mc = monte_carlo_moments(0.3, 2000, 2000, 99);
    CHECK(std::abs(mc.mean - est.mean_mim) < 0.01);
    CHECK(mc.variance / est.var_mim > 0.8);
    CHECK(mc.variance / est.var_mim < 1.25);
    CHECK_THROWS_AS(monte_carlo_moments(0.0, 50, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_moments(0.3, 50, 1, 1), std::invalid_argument);
}

TEST_CASE("union bound holds with exact marginals and monte carlo union") {
    const MinorityModel model(uniform_distribution(3), 50, 0.2);
    const UnionBoundReport report = union_bound_check(model, 20000, kDefaultSeed);
    REQUIRE(report.category_tails.size() == 3);
    for (const double tail : report.category_tails)
        CHECK(tail == doctest::Approx(kUnionTail_3_50_02).epsilon(1e-10));
    CHECK(report.bound == doctest::Approx(kUnionBound_3_50_02).epsilon(1e-10));
    CHECK(report.holds_within_error);
    CHECK(report.union_estimate <= report.bound + 3.0 * report.union_std_error);
    // The union dominates each marginal up to Monte Carlo error.
    CHECK(report.union_estimate >=
          kUnionTail_3_50_02 - 3.0 * report.union_std_error);
    CHECK(report.typical_estimate == 1.0 - report.union_estimate);
    CHECK(report.replicas == 20000);

    CHECK_THROWS_AS(union_bound_check(
                        MinorityModel(make_distribution(std::vector<double>{1.0}), 10, 0.1), 100, 1),
                    std::invalid_argument);
}
