#include "mim/distribution.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mim;

TEST_CASE("make_distribution accepts a valid vector and preserves entries") {
    const FiniteDistribution d = make_distribution(std::vector<double>{0.2, 0.8});
    CHECK(d.size() == 2);
    CHECK(d[0] == 0.2);
    CHECK(d[1] == 0.8);
}

TEST_CASE("make_distribution rejects invalid input naming the entry") {
    CHECK_THROWS_WITH_AS(make_distribution(std::vector<double>{}),
                         doctest::Contains("probs"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(make_distribution(std::vector<double>{0.5, -0.5, 1.0}),
                         doctest::Contains("probs[1]"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(make_distribution(std::vector<double>{0.5, std::nan("")}),
                         doctest::Contains("probs[1]"), std::invalid_argument);
    // Sum off beyond 1e-9 without renormalize.
    CHECK_THROWS_AS(make_distribution(std::vector<double>{0.5, 0.5 + 1e-8}),
                    std::invalid_argument);
    // Within tolerance: accepted as is.
    CHECK_NOTHROW(make_distribution(std::vector<double>{0.5, 0.5 + 1e-10}));
}

TEST_CASE("renormalization scales any positive vector to sum 1") {
    const FiniteDistribution d = make_distribution(std::vector<double>{2.0, 6.0}, true);
    CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(make_distribution(std::vector<double>{0.0, 0.0}, true),
                    std::invalid_argument);
}

TEST_CASE("zero entries are allowed") {
    const FiniteDistribution d = make_distribution(std::vector<double>{0.0, 1.0});
    CHECK(d[0] == 0.0);
    CHECK(min_prob(d) == 0.0);
    CHECK(max_prob(d) == 1.0);
    CHECK_THROWS_AS(min_prob(d, true), std::invalid_argument);
}

TEST_CASE("uniform distribution") {
    const FiniteDistribution u = uniform_distribution(4);
    CHECK(u.size() == 4);
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(u[i] == 0.25);
    CHECK_THROWS_AS(uniform_distribution(0), std::invalid_argument);
}

TEST_CASE("binomial generator matches a Pascal-triangle oracle") {
    const FiniteDistribution d = generate(GeneratorSpec::binomial(10, 0.3));
    REQUIRE(d.size() == 11);
    // Independent oracle: integer binomial coefficients, long double powers.
    long double choose[11];
    choose[0] = 1.0L;
    for (int k = 1; k <= 10; ++k)
        choose[k] = choose[k - 1] * static_cast<long double>(11 - k) / static_cast<long double>(k);
    for (int k = 0; k <= 10; ++k) {
        const long double expected =
            choose[k] * std::pow(0.3L, k) * std::pow(0.7L, 10 - k);
        CHECK(d[k] == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
    }
    CHECK(d.probs().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("symmetric binomial keeps mirror entries exactly tied") {
    const FiniteDistribution d = generate(GeneratorSpec::binomial(10, 0.5));
    for (int k = 0; k <= 10; ++k)
        CHECK(d[k] == d[10 - k]);
}

TEST_CASE("binomial generator edge parameters") {
    const FiniteDistribution zero = generate(GeneratorSpec::binomial(5, 0.0));
    CHECK(zero[0] == 1.0);
    CHECK(zero[5] == 0.0);
    const FiniteDistribution one = generate(GeneratorSpec::binomial(5, 1.0));
    CHECK(one[5] == 1.0);
    CHECK_THROWS_WITH_AS(generate(GeneratorSpec::binomial(0, 0.5)),
                         doctest::Contains("trials"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(generate(GeneratorSpec::binomial(5, 1.5)),
                         doctest::Contains("theta"), std::invalid_argument);
}

TEST_CASE("truncated poisson matches the closed form and keeps exact ties") {
    // lambda = 1, K = 3: weights 1, 1, 1/2 -> (0.4, 0.4, 0.2) exactly.
    const FiniteDistribution d = generate(GeneratorSpec::truncated_poisson(1.0, 3));
    CHECK(d[0] == 0.4);
    CHECK(d[1] == 0.4);
    CHECK(d[2] == 0.2);
    CHECK(d[0] == d[1]); // the deliberate tie survives normalization

    // lambda = 2: weights 1, 2, 2, ... -> p_1 == p_2 exactly.
    const FiniteDistribution e = generate(GeneratorSpec::truncated_poisson(2.0, 11));
    CHECK(e[1] == e[2]);
    CHECK(e[0] < e[1]);
    for (Eigen::Index k = 2; k + 1 < e.size(); ++k)
        CHECK(e[k] > e[k + 1]);
    CHECK_THROWS_WITH_AS(generate(GeneratorSpec::truncated_poisson(-1.0, 3)),
                         doctest::Contains("lambda"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(generate(GeneratorSpec::truncated_poisson(1.0, 0)),
                         doctest::Contains("support"), std::invalid_argument);
}

TEST_CASE("truncated geometric is strictly decreasing with ratio 1 - q") {
    const FiniteDistribution d = generate(GeneratorSpec::truncated_geometric(0.3, 11));
    REQUIRE(d.size() == 11);
    for (Eigen::Index k = 0; k + 1 < d.size(); ++k) {
        CHECK(d[k] > d[k + 1]);
        CHECK(d[k + 1] / d[k] == doctest::Approx(0.7).epsilon(1e-14));
    }
    CHECK(d.probs().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_WITH_AS(generate(GeneratorSpec::truncated_geometric(0.0, 5)),
                         doctest::Contains("q"), std::invalid_argument);
}

TEST_CASE("explicit generator honors renormalize") {
    const FiniteDistribution d =
        generate(GeneratorSpec::explicit_probs({1.0, 3.0}, true));
    CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(generate(GeneratorSpec::explicit_probs({1.0, 3.0}, false)),
                    std::invalid_argument);
}

TEST_CASE("json ingestion: raw probs") {
    const FiniteDistribution d = distribution_from_json(R"({"probs": [0.2, 0.8]})");
    CHECK(d[0] == 0.2);
    const FiniteDistribution r =
        distribution_from_json(R"({"probs": [2, 8], "renormalize": true})");
    CHECK(r[0] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("json ingestion: generator kinds") {
    CHECK(distribution_from_json(R"({"kind": "uniform", "n": 5})").size() == 5);
    CHECK(distribution_from_json(R"({"kind": "binomial", "trials": 10, "theta": 0.3})").size() ==
          11);
    CHECK(distribution_from_json(R"({"kind": "truncated-poisson", "lambda": 2, "support": 11})")
              .size() == 11);
    CHECK(distribution_from_json(R"({"kind": "truncated-geometric", "q": 0.3, "support": 11})")
              .size() == 11);
    CHECK(distribution_from_json(R"({"kind": "explicit", "probs": [0.5, 0.5]})").size() == 2);
}

TEST_CASE("json ingestion errors name the offending field") {
    CHECK_THROWS_WITH_AS(distribution_from_json(R"({"kind": "uniform"})"),
                         doctest::Contains("n"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(distribution_from_json(R"({"kind": "binomial", "trials": 10})"),
                         doctest::Contains("theta"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(distribution_from_json(R"({"kind": "nope"})"),
                         doctest::Contains("kind"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(distribution_from_json(R"({"probs": [0.5, "x"]})"),
                         doctest::Contains("probs[1]"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(distribution_from_json(R"({"n": 5})"),
                         doctest::Contains("probs"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(distribution_from_json("not json"),
                         doctest::Contains("json"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(distribution_from_json_file("/no/such/file.json"),
                         doctest::Contains("path"), std::invalid_argument);
}
