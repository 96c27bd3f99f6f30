#include "mim/param_select.hpp"

#include "mim/format.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mim {

namespace {

void check_p_open_unit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("p: must lie in (0, 1), got " + format_double(p));
}

void check_omega(double omega) {
    if (!(omega >= 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("omega: must be nonnegative and finite, got " +
                                    format_double(omega));
}

} // namespace

double g(double p, double omega) {
    check_p_open_unit(p);
    check_omega(omega);
    return (1.0 - p * omega) * std::exp(omega * (1.0 - p)) -
           (1.0 - (1.0 - p) * omega) * std::exp(omega * p);
}

double g_scaled(double p, double omega) {
    check_p_open_unit(p);
    check_omega(omega);
    return (1.0 - p * omega) -
           (1.0 - (1.0 - p) * omega) * std::exp(-omega * (1.0 - 2.0 * p));
}

double g_taylor(double p, double omega) {
    check_p_open_unit(p);
    check_omega(omega);
    return (2.0 * p + 2.0) + (p * p - p + 0.5) * omega +
           (-p / 2.0 + p * p / 2.0 - p * p * p) * omega * omega;
}

double taylor_coefficient(double p) {
    if (!(p > 0.0 && p < 0.5))
        throw std::invalid_argument("p: must lie in (0, 1/2), got " + format_double(p));
    const double disc = 9.0 * p * p * p * p + 2.0 * p * p * p + 2.0 * p * p + 3.0 * p + 0.25;
    const double denom = 2.0 * p * p * p - p * p + p; // p (2p^2 - p + 1) > 0 on (0, 1/2)
    return (p * p - p + 0.5 + std::sqrt(disc)) / denom;
}

RootSolveResult solve_coefficient_exact(double p, double tol) {
    check_p_open_unit(p);
    if (!(tol > 0.0))
        throw std::invalid_argument("tol: must be positive, got " + format_double(tol));
    if (p == 0.5)
        throw SolverError("p = 1/2 is degenerate: the stationarity residual vanishes identically");

    double lo = 1.0 / p;
    double hi = 2.0 / p;
    const double g_lo = g_scaled(p, lo);
    const double g_hi = g_scaled(p, hi);
    // g_scaled(p, 1/p) = (1/p - 2) e^{-(1/p - 2)} underflows to +0 below
    // p ~ 1.4e-3; zero at lo is accepted as the positive side.
    if (!(g_lo >= 0.0) || !(g_hi < 0.0))
        throw SolverError("no sign change on [1/p, 2/p] for p = " + format_double(p) +
                          ": g_scaled spans [" + format_double(g_lo) + ", " +
                          format_double(g_hi) + "]");

    constexpr double kWidthTol = 1e-10;
    constexpr int kMaxIterations = 200;

    double best_omega = std::numeric_limits<double>::quiet_NaN();
    double best_resid = std::numeric_limits<double>::infinity();
    double best_lo = lo;
    double best_hi = hi;
    int iterations = 0;
    while (iterations < kMaxIterations) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi))
            break; // bracket exhausted at double resolution
        ++iterations;
        const double g_mid = g_scaled(p, mid);
        if (std::abs(g_mid) < best_resid) {
            best_resid = std::abs(g_mid);
            best_omega = mid;
            best_lo = lo; // bracket at evaluation time strictly encloses mid
            best_hi = hi;
        }
        if (g_mid == 0.0)
            break;
        if (g_mid > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= kWidthTol && best_resid <= tol)
            break;
    }

    if (!(best_resid <= tol))
        throw SolverError("residual " + format_double(best_resid) + " above tol " +
                          format_double(tol) + " after " + format_int(iterations) +
                          " iterations at p = " + format_double(p));
    return {best_omega, best_resid, best_lo, best_hi, iterations};
}

PriorInterval::PriorInterval(double lo_in, double hi_in) : lo(lo_in), hi(hi_in) {
    if (!(lo > 0.0 && lo < hi && hi < 0.5))
        throw std::invalid_argument("prior: need 0 < lo < hi < 1/2, got [" +
                                    format_double(lo) + ", " + format_double(hi) + "]");
}

RootSolveResult coefficient_with_prior(const PriorInterval& interval, double tol) {
    return solve_coefficient_exact(interval.lo, tol);
}

std::pair<double, double> coefficient_bounds(const PriorInterval& interval) {
    return {2.0 / interval.hi, 2.0 / interval.lo};
}

double dominance_margin(double p, double omega) {
    if (!(p > 0.0 && p <= 0.5))
        throw std::invalid_argument("p: must lie in (0, 1/2], got " + format_double(p));
    check_omega(omega);
    return p * std::exp(omega * (1.0 - p)) - (1.0 - p) * std::exp(omega * p);
}

MonotonicityReport coefficient_monotonicity_check(std::span<const double> grid, double tol) {
    if (grid.size() < 2)
        throw std::invalid_argument("grid: need at least two points, got " +
                                    format_int(static_cast<std::int64_t>(grid.size())));
    MonotonicityReport report;
    report.grid.assign(grid.begin(), grid.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = grid[i];
        if (!(p > 0.0 && p < 0.5))
            throw std::invalid_argument("grid[" + format_int(static_cast<std::int64_t>(i)) +
                                        "]: must lie in (0, 1/2), got " + format_double(p));
        if (i > 0 && !(p > grid[i - 1]))
            throw std::invalid_argument("grid[" + format_int(static_cast<std::int64_t>(i)) +
                                        "]: grid must be strictly increasing");
        report.exact.push_back(solve_coefficient_exact(p, tol).omega_star);
        report.taylor.push_back(taylor_coefficient(p));
    }
    auto strictly_decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1]))
                return false;
        return true;
    };
    report.exact_strictly_decreasing = strictly_decreasing(report.exact);
    report.taylor_strictly_decreasing = strictly_decreasing(report.taylor);
    return report;
}

} // namespace mim
