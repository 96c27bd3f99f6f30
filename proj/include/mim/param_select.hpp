#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mim {

// Coefficient selection for a binary distribution (p, 1-p): pick omega so the
// focused element maximizes the importance sum under the KKT stationarity
// condition g(p, omega) = 0.

// Stationarity residual, as derived:
//   g(p, w) = (1 - p w) e^{w (1 - p)} - (1 - (1 - p) w) e^{w p}.
// Antisymmetric: g(p, w) = -g(1 - p, w); identically zero at p = 1/2.
// Requires 0 < p < 1, w >= 0. Overflows double for w (1 - p) > ~709.
double g(double p, double omega);

// g(p, w) * e^{-w (1 - p)}: same sign and zero set, O(1) conditioning near
// the root, and overflow-free for p <= 1/2. The solver's objective; raw g
// near its root is a cancellation of two terms of size e^{w (1 - p)}, so its
// floating-point value cannot resolve small residuals.
double g_scaled(double p, double omega);

// Quadratic surrogate of the stationarity condition:
//   (2p + 2) + (p^2 - p + 1/2) w + (-p/2 + p^2/2 - p^3) w^2,
// kept exactly in this printed form. Crude; the exact solver is the trusted
// path and tests only require the surrogate root within a factor 2.
double g_taylor(double p, double omega);

// Closed-form root of g_taylor in w:
//   [p^2 - p + 1/2 + sqrt(9p^4 + 2p^3 + 2p^2 + 3p + 1/4)] / (2p^3 - p^2 + p).
// Requires 0 < p < 1/2. Monotonically decreasing in p.
double taylor_coefficient(double p);

// Signals a root-finding failure (no sign change, degenerate p = 1/2, or
// iteration cap); the CLI maps it to the numerical-failure exit code.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct RootSolveResult {
    double omega_star;  // best evaluated point, strictly inside the bracket
    double residual;    // |g_scaled(p, omega_star)|
    double bracket_lo;  // final bisection bracket
    double bracket_hi;
    int iterations;
};

// Bisection for the root of g(p, .) on [1/p, 2/p]. The bracket is analytic:
// g(p, 1/p) = (1/p - 2) e > 0 and g(p, 2/p) < 0 for p in (0, 1/2). Bisection
// runs until the bracket width reaches 1e-10 (absolute) and the residual
// reaches tol, or the bracket degenerates at double resolution; 200 iteration
// cap. Throws SolverError when no sign change exists (p >= 1/2) or the
// residual cannot reach tol.
RootSolveResult solve_coefficient_exact(double p, double tol = 1e-8);

// Prior bounds on the probability of the focused element.
struct PriorInterval {
    PriorInterval(double lo_in, double hi_in); // requires 0 < lo < hi < 1/2
    double lo;
    double hi;
};

// Solves at the lower endpoint: the root decreases with p, so the rarest
// admissible element yields the largest, most anomaly-sensitive coefficient.
RootSolveResult coefficient_with_prior(const PriorInterval& interval, double tol = 1e-8);

// Loose coefficient range (2/p_hi, 2/p_lo); the lower bound tends to 4 as
// p_hi grows to 1/2, so any admissible coefficient exceeds 4.
std::pair<double, double> coefficient_bounds(const PriorInterval& interval);

// Dominance margin z(p) = p e^{w (1 - p)} - (1 - p) e^{w p}: nonnegative at
// w = omega_star(p) for 0 < p <= 1/2, i.e. the focused element stays the
// dominant summand at the selected coefficient. Requires 0 < p <= 1/2 and
// w >= 0.
double dominance_margin(double p, double omega);

struct MonotonicityReport {
    std::vector<double> grid;
    std::vector<double> exact;  // omega_star at each grid point
    std::vector<double> taylor; // closed-form surrogate at each grid point
    bool exact_strictly_decreasing = false;
    bool taylor_strictly_decreasing = false;
};

// Solves on a strictly increasing grid within (0, 1/2) and reports whether
// both coefficient sequences decrease strictly, as the selection rule claims.
MonotonicityReport coefficient_monotonicity_check(std::span<const double> grid,
                                                  double tol = 1e-8);

} // namespace mim
