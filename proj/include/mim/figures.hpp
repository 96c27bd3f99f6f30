#pragma once

#include "mim/distribution.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace mim {

// Data tables behind the three reference figures; rendering is left to
// external tools. Default parameters give the four built-in families
// comparable support sizes.
struct FigureParams {
    Eigen::Index binomial_trials = 10;
    double binomial_theta = 0.3;
    double poisson_lambda = 2.0;
    Eigen::Index poisson_support = 11;
    double geometric_q = 0.3;
    Eigen::Index geometric_support = 11;
    Eigen::Index uniform_n = 11;
};

struct NamedDistribution {
    std::string name;
    FiniteDistribution dist;
};

// binomial, truncated-poisson, truncated-geometric, uniform.
std::vector<NamedDistribution> figure_distributions(const FigureParams& params = {});

// fig1: focused MIM per element, L_j at omega_j = 1/p_j, for each built-in
// distribution. Within a family, L_j decreases as p_j increases.
struct FocusRow {
    std::string distribution;
    Eigen::Index index;
    double prob;  // p_j
    double omega; // 1/p_j
    double mim;   // L_j
};
std::vector<FocusRow> focus_table(const FigureParams& params = {});
void write_focus_csv(std::ostream& out, const std::vector<FocusRow>& rows);

// fig2: L at the floor coefficient omega_0 = 1/p_min next to the uniform
// baseline at the same omega_0; the gap is nonnegative.
struct FloorRow {
    std::string distribution;
    Eigen::Index n;
    double p_min;
    double omega0;       // 1/p_min
    double mim;          // L(dist, omega0)
    double uniform_mim;  // L(uniform(n), omega0)
    double gap;          // mim - uniform_mim
};
std::vector<FloorRow> floor_table(const FigureParams& params = {});
void write_floor_csv(std::ostream& out, const std::vector<FloorRow>& rows);

// fig3: the stationarity residual g(p, omega) on a rectangular grid over
// p in (0, 1/2), omega in (0, 25], plus the zero-crossing curve refined by
// bisection within each sign-change cell. Rows of the crossing table exist
// only where the root lies inside the omega range.
struct StationarityCell {
    double p;
    double omega;
    double value; // g(p, omega)
};
struct StationarityCrossing {
    double p;
    double omega; // root of g(p, .) refined to ~1e-12
};
struct StationarityGrid {
    std::vector<StationarityCell> cells;
    std::vector<StationarityCrossing> crossings;
};
// Grid: p = p_step, 2 p_step, ... < 0.5; omega = omega_step, ..., 25.
StationarityGrid stationarity_grid(double p_step = 0.02, double omega_step = 0.1,
                                   double omega_max = 25.0);
void write_stationarity_grid_csv(std::ostream& out, const StationarityGrid& grid);
void write_stationarity_crossings_csv(std::ostream& out, const StationarityGrid& grid);

} // namespace mim
