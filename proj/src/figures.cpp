#include "mim/figures.hpp"

#include "mim/format.hpp"
#include "mim/mim.hpp"
#include "mim/param_select.hpp"

#include <cmath>
#include <stdexcept>

namespace mim {

std::vector<NamedDistribution> figure_distributions(const FigureParams& params) {
    std::vector<NamedDistribution> out;
    out.push_back({"binomial",
                   generate(GeneratorSpec::binomial(params.binomial_trials, params.binomial_theta))});
    out.push_back({"truncated-poisson",
                   generate(GeneratorSpec::truncated_poisson(params.poisson_lambda,
                                                             params.poisson_support))});
    out.push_back({"truncated-geometric",
                   generate(GeneratorSpec::truncated_geometric(params.geometric_q,
                                                               params.geometric_support))});
    out.push_back({"uniform", generate(GeneratorSpec::uniform(params.uniform_n))});
    return out;
}

std::vector<FocusRow> focus_table(const FigureParams& params) {
    std::vector<FocusRow> rows;
    for (const NamedDistribution& named : figure_distributions(params)) {
        for (const ChainRuleEntry& entry : chain_rule_values(named.dist)) {
            rows.push_back({named.name, entry.index, entry.prob,
                            coefficient_for_element(named.dist, entry.index), entry.mim});
        }
    }
    return rows;
}

void write_focus_csv(std::ostream& out, const std::vector<FocusRow>& rows) {
    out << "distribution,index,p,omega,mim\n";
    for (const FocusRow& row : rows) {
        out << row.distribution << ',' << format_int(row.index) << ','
            << format_double(row.prob) << ',' << format_double(row.omega) << ','
            << format_double(row.mim) << '\n';
    }
}

std::vector<FloorRow> floor_table(const FigureParams& params) {
    std::vector<FloorRow> rows;
    for (const NamedDistribution& named : figure_distributions(params)) {
        const double p_min = min_prob(named.dist, true);
        const double omega0 = 1.0 / p_min;
        const double value = evaluate(named.dist, omega0);
        const double baseline = evaluate(uniform_distribution(named.dist.size()), omega0);
        rows.push_back({named.name, named.dist.size(), p_min, omega0, value, baseline,
                        value - baseline});
    }
    return rows;
}

void write_floor_csv(std::ostream& out, const std::vector<FloorRow>& rows) {
    out << "distribution,n,p_min,omega_0,mim,uniform_mim,gap\n";
    for (const FloorRow& row : rows) {
        out << row.distribution << ',' << format_int(row.n) << ','
            << format_double(row.p_min) << ',' << format_double(row.omega0) << ','
            << format_double(row.mim) << ',' << format_double(row.uniform_mim) << ','
            << format_double(row.gap) << '\n';
    }
}

StationarityGrid stationarity_grid(double p_step, double omega_step, double omega_max) {
    if (!(p_step > 0.0 && p_step < 0.5))
        throw std::invalid_argument("p_step: must lie in (0, 1/2), got " + format_double(p_step));
    if (!(omega_step > 0.0) || !(omega_max >= omega_step))
        throw std::invalid_argument("omega_step: need 0 < omega_step <= omega_max, got " +
                                    format_double(omega_step));

    StationarityGrid grid;
    // i * step products, not running sums, keep grid points reproducible.
    for (int i = 1; static_cast<double>(i) * p_step < 0.5 - 1e-12; ++i) {
        const double p = static_cast<double>(i) * p_step;
        double prev_omega = 0.0;
        double prev_value = 0.0;
        bool have_prev = false;
        bool crossed = false;
        for (int j = 1; static_cast<double>(j) * omega_step <= omega_max + 1e-12; ++j) {
            const double omega = static_cast<double>(j) * omega_step;
            const double value = g(p, omega);
            grid.cells.push_back({p, omega, value});
            // First + to - sign change marks the crossing cell; the root is
            // then polished on the scaled residual, whose zero set matches.
            if (!crossed && have_prev && prev_value > 0.0 && value < 0.0) {
                double lo = prev_omega;
                double hi = omega;
                for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
                    const double mid = lo + 0.5 * (hi - lo);
                    if (!(mid > lo && mid < hi))
                        break;
                    if (g_scaled(p, mid) > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                grid.crossings.push_back({p, lo + 0.5 * (hi - lo)});
                crossed = true;
            }
            have_prev = true;
            prev_omega = omega;
            prev_value = value;
        }
    }
    return grid;
}

void write_stationarity_grid_csv(std::ostream& out, const StationarityGrid& grid) {
    out << "p,omega,g\n";
    for (const StationarityCell& cell : grid.cells) {
        out << format_double(cell.p) << ',' << format_double(cell.omega) << ','
            << format_double(cell.value) << '\n';
    }
}

void write_stationarity_crossings_csv(std::ostream& out, const StationarityGrid& grid) {
    out << "p,omega_star\n";
    for (const StationarityCrossing& crossing : grid.crossings) {
        out << format_double(crossing.p) << ',' << format_double(crossing.omega) << '\n';
    }
}

} // namespace mim
