#pragma once

#include "mim/distribution.hpp"
#include "mim/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mim::verify {

// Seeded invariant suites shared by the verify CLI subcommand and the
// acceptance tests. Output is deterministic for fixed arguments: no wall
// times, no pointer values.

struct CheckResult {
    std::string name;
    bool passed;
    std::int64_t cases;  // how many instances were checked
    double worst;        // worst margin observed (sign convention per check)
    std::string detail;  // failing case or summary statistics
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

// Random distribution for property checks: symmetric Dirichlet (flat on the
// simplex) with strictly positive entries.
FiniteDistribution sample_simplex(Eigen::Index n, rng::SplitMix64& gen);

// Core MIM properties over seeded random distributions with n in 2..10:
// dominance of the focused element, strict monotonicity in omega and along
// the chain rule, the lower-bound chain, the uniform floor, agreement with
// naive summation, and L(p, 0) = 0.
SuiteReport verify_properties(std::int64_t samples, std::uint64_t seed);

// Solver invariants on a p grid: residual < 1e-8, root inside (1/p, 2/p) and
// above 4, strict decrease in p, finite-difference stationarity of the
// importance sum, nonnegative dominance margin, surrogate/exact ratio within
// a factor 2 on [0.05, 0.45], and antisymmetry of g.
SuiteReport verify_select(double grid_lo = 0.02, double grid_hi = 0.45,
                          double grid_step = 0.01);

// Stream-model invariants: exact tail vs Monte Carlo, sandwich cleanliness
// over seeded simulations, moment estimates vs Monte Carlo, the Chebyshev
// exceedance bound, p_hat moments, union bound, and monotonicity checks.
SuiteReport verify_stream(std::int64_t replicas, std::uint64_t seed);

} // namespace mim::verify
