// mim: compute message importance values, select focusing coefficients,
// simulate the streaming minority model, run the verification suites, and
// emit figure data tables.
//
// Exit codes: 0 success, 1 invariant failure (verify), 2 input validation,
// 3 numerical failure (root solver).

#include "mim/distribution.hpp"
#include "mim/figures.hpp"
#include "mim/format.hpp"
#include "mim/mim.hpp"
#include "mim/param_select.hpp"
#include "mim/rng.hpp"
#include "mim/stream_model.hpp"
#include "mim/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// --dist/--model values are inline JSON when they look like an object,
// otherwise a file path.
std::string slurp_json_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{')
        return arg;
    std::ifstream in(arg);
    if (!in)
        throw std::invalid_argument("path: cannot open file \"" + arg + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// "500" -> {500}; "1000x10" -> ten batches of 1000; "100,200,300" -> list.
std::vector<std::int64_t> parse_batches(const std::string& text) {
    const auto parse_count = [](const std::string& field) {
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc() || ptr != field.data() + field.size())
            throw std::invalid_argument("batches: cannot parse \"" + field + "\" as an integer");
        return value;
    };
    std::vector<std::int64_t> sizes;
    if (const auto x = text.find('x'); x != std::string::npos) {
        const std::int64_t size = parse_count(text.substr(0, x));
        const std::int64_t count = parse_count(text.substr(x + 1));
        if (count < 1 || count > 1000000)
            throw std::invalid_argument("batches: repeat count must lie in [1, 1000000], got " +
                                        mim::format_int(count));
        sizes.assign(static_cast<std::size_t>(count), size);
        return sizes;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::size_t end = (comma == std::string::npos) ? text.size() : comma;
        sizes.push_back(parse_count(text.substr(start, end - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return sizes;
}

// "0.02:0.45:0.01" -> (lo, hi, step).
std::array<double, 3> parse_grid(const std::string& text) {
    std::array<double, 3> out{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t colon = text.find(':', start);
        const bool last = (i == 2);
        if (last != (colon == std::string::npos))
            throw std::invalid_argument("grid: expected lo:hi:step, got \"" + text + "\"");
        const std::string field = text.substr(start, last ? std::string::npos : colon - start);
        try {
            out[static_cast<std::size_t>(i)] = std::stod(field);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid: cannot parse \"" + field + "\" as a number");
        }
        start = colon + 1;
    }
    return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-identical reruns
    if (!out)
        throw std::invalid_argument("out: cannot write \"" + path.string() + "\"");
    return out;
}

struct ComputeArgs {
    std::string dist;
    std::optional<double> omega;
    std::optional<std::int64_t> focus;
    bool terms = false;
};

int run_compute(const ComputeArgs& args) {
    if (args.omega.has_value() == args.focus.has_value())
        throw std::invalid_argument("omega/focus: exactly one of --omega and --focus is required");
    const mim::FiniteDistribution dist = mim::distribution_from_json(slurp_json_arg(args.dist));
    double omega = 0.0;
    if (args.focus) {
        omega = mim::coefficient_for_element(dist, *args.focus);
        std::cout << "focus = " << mim::format_int(*args.focus) << '\n';
    }
    if (args.omega)
        omega = *args.omega;
    std::cout << "omega = " << mim::format_double(omega, 12) << '\n';
    std::cout << "L = " << mim::format_double(mim::evaluate(dist, omega), 12) << '\n';
    if (args.terms) {
        const Eigen::ArrayXd log_terms = mim::log_mim_terms(dist, omega);
        const Eigen::Index dominant = mim::dominant_index(dist, omega);
        std::cout << "terms p_i exp(omega (1 - p_i)):\n";
        for (Eigen::Index i = 0; i < dist.size(); ++i) {
            std::cout << "  [" << mim::format_int(i) << "] p = "
                      << mim::format_double(dist[i], 12) << ", term = "
                      << mim::format_double(std::exp(log_terms[i]), 12) << ", log term = "
                      << mim::format_double(log_terms[i], 12)
                      << (i == dominant ? "  <- dominant" : "") << '\n';
        }
    }
    return kExitOk;
}

struct SelectArgs {
    std::optional<double> p;
    std::vector<double> interval;
};

int run_select(const SelectArgs& args) {
    if (args.p.has_value() == !args.interval.empty())
        throw std::invalid_argument("p/interval: exactly one of --p and --interval is required");
    double solve_at = 0.0;
    std::optional<mim::PriorInterval> prior;
    if (args.p) {
        if (!(*args.p > 0.0 && *args.p < 1.0))
            throw std::invalid_argument("p: must lie in (0, 1), got " +
                                        mim::format_double(*args.p));
        solve_at = *args.p;
        std::cout << "p = " << mim::format_double(solve_at, 12) << '\n';
    } else {
        prior.emplace(args.interval[0], args.interval[1]); // validates the interval
        solve_at = prior->lo;
        std::cout << "interval = [" << mim::format_double(prior->lo, 12) << ", "
                  << mim::format_double(prior->hi, 12) << "]\n";
    }
    const mim::RootSolveResult sol = mim::solve_coefficient_exact(solve_at);
    std::cout << "exact omega* = " << mim::format_double(sol.omega_star, 12)
              << "  (solved at p = " << mim::format_double(solve_at, 12) << ")\n";
    std::cout << "residual = " << mim::format_double(sol.residual, 6) << " after "
              << mim::format_int(sol.iterations) << " iterations\n";
    std::cout << "taylor omega* = " << mim::format_double(mim::taylor_coefficient(solve_at), 12)
              << '\n';
    if (prior) {
        const auto [lo, hi] = mim::coefficient_bounds(*prior);
        std::cout << "bounds (2/p_hi, 2/p_lo) = (" << mim::format_double(lo, 12) << ", "
                  << mim::format_double(hi, 12) << ")\n";
    } else {
        std::cout << "bracket = (" << mim::format_double(1.0 / solve_at, 12) << ", "
                  << mim::format_double(2.0 / solve_at, 12) << ")\n";
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string model;
    std::optional<std::int64_t> sequence_length;
    std::optional<double> p1;
    std::optional<double> epsilon;
    std::string batches = "1000x10";
    double cheb_eps = 1.0;
    std::uint64_t seed = mim::kDefaultSeed;
    std::string out = ".";
};

int run_simulate(const SimulateArgs& args) {
    std::optional<mim::MinorityModel> model;
    if (!args.model.empty()) {
        if (args.sequence_length || args.p1 || args.epsilon)
            throw std::invalid_argument("model: --model excludes --M/--p1/--eps");
        model.emplace(mim::model_from_json(slurp_json_arg(args.model)));
    } else {
        if (!(args.sequence_length && args.p1 && args.epsilon))
            throw std::invalid_argument("model: provide --model or all of --M, --p1, --eps");
        model.emplace(mim::make_distribution(std::vector<double>{*args.p1, 1.0 - *args.p1}),
                      *args.sequence_length, *args.epsilon);
    }
    const std::vector<std::int64_t> batch_sizes = parse_batches(args.batches);

    std::cout << "seed = " << mim::format_int(static_cast<std::int64_t>(args.seed)) << '\n';
    const mim::EmpiricalTracker tracker = mim::simulate_batches(*model, batch_sizes, args.seed);
    const mim::SandwichReport sandwich = mim::tracker_sandwich_check(tracker);
    const double exact = mim::minority_event_probability(*model);

    const std::filesystem::path dir(args.out);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv = open_output(dir / "tracker.csv");
        mim::write_tracker_csv(csv, tracker);
    }

    nlohmann::json summary;
    summary["batch_sizes"] = batch_sizes;
    summary["model"] = {
        {"M", model->sequence_length},
        {"epsilon", model->epsilon},
        {"probs", std::vector<double>(model->category_probs.probs().begin(),
                                      model->category_probs.probs().end())},
    };
    summary["seed"] = args.seed;
    summary["exact_event_probability"] = exact;
    const mim::BatchRecord& last = tracker.back();
    summary["final"] = {
        {"L_hat", last.mim ? nlohmann::json(*last.mim) : nlohmann::json()},
        {"N", last.trials},
        {"n", last.occurrences},
        {"p_hat", last.p_hat},
    };
    summary["sandwich"] = {
        {"mim_checked", sandwich.mim_checked},
        {"p_hat_checked", sandwich.p_hat_checked},
        {"violations", nlohmann::json::array()},
    };
    for (const mim::SandwichViolation& v : sandwich.violations) {
        summary["sandwich"]["violations"].push_back({{"batch", v.batch},
                                                     {"hi", v.hi},
                                                     {"kind", v.kind},
                                                     {"lo", v.lo},
                                                     {"value", v.value}});
    }
    // Delta-method moments exist only for exact probabilities in (0, 1/2).
    const double p_exact = exact;
    if (p_exact > 0.0 && p_exact < 0.5) {
        const mim::MomentEstimates moments = mim::delta_moments(p_exact, last.trials);
        const mim::ChebyshevBound cheb = mim::chebyshev_bound(moments, args.cheb_eps);
        summary["delta"] = {
            {"mean_mim", moments.mean_mim},
            {"mu", moments.mu},
            {"sigma_sq", moments.sigma_sq},
            {"var_mim", moments.var_mim},
        };
        summary["chebyshev"] = {
            {"bound", cheb.bound},
            {"eps", args.cheb_eps},
            {"printed_form", cheb.printed_form},
        };
    }
    {
        std::ofstream js = open_output(dir / "summary.json");
        js << summary.dump(2) << '\n';
    }

    std::cout << "wrote " << (dir / "tracker.csv").string() << '\n';
    std::cout << "wrote " << (dir / "summary.json").string() << '\n';
    std::cout << "final p_hat = " << mim::format_double(last.p_hat, 12) << " (n = "
              << mim::format_int(last.occurrences) << ", N = " << mim::format_int(last.trials)
              << ")\n";
    std::cout << "final L_hat = "
              << (last.mim ? mim::format_double(*last.mim, 12) : std::string("undefined")) << '\n';
    std::cout << "exact event probability = " << mim::format_double(exact, 12) << '\n';
    std::cout << "sandwich: " << mim::format_int(static_cast<std::int64_t>(
                     sandwich.violations.size()))
              << " violations in "
              << mim::format_int(sandwich.p_hat_checked + sandwich.mim_checked) << " checks\n";
    return kExitOk;
}

struct VerifyArgs {
    std::string suite;
    std::int64_t samples = 1000;
    std::int64_t replicas = 100000;
    std::string grid = "0.02:0.45:0.01";
    std::uint64_t seed = mim::kDefaultSeed;
};

void print_suite(const mim::verify::SuiteReport& report) {
    std::cout << "suite " << report.suite << ":\n";
    for (const mim::verify::CheckResult& check : report.checks) {
        std::cout << "  [" << (check.passed ? "PASS" : "FAIL") << "] " << check.name
                  << " | cases = " << mim::format_int(check.cases)
                  << " | worst margin = " << mim::format_double(check.worst, 6);
        if (!check.detail.empty())
            std::cout << " | " << check.detail;
        std::cout << '\n';
    }
}

int run_verify(const VerifyArgs& args) {
    const bool all = args.suite == "all";
    if (!all && args.suite != "properties" && args.suite != "select" && args.suite != "stream")
        throw std::invalid_argument(
            "suite: expected one of properties, select, stream, all; got \"" + args.suite + "\"");
    std::cout << "seed = " << mim::format_int(static_cast<std::int64_t>(args.seed)) << '\n';
    std::vector<mim::verify::SuiteReport> reports;
    if (all || args.suite == "properties")
        reports.push_back(mim::verify::verify_properties(args.samples, args.seed));
    if (all || args.suite == "select") {
        const auto [lo, hi, step] = parse_grid(args.grid);
        reports.push_back(mim::verify::verify_select(lo, hi, step));
    }
    if (all || args.suite == "stream")
        reports.push_back(mim::verify::verify_stream(args.replicas, args.seed));

    bool passed = true;
    for (const mim::verify::SuiteReport& report : reports) {
        print_suite(report);
        passed = passed && report.all_passed();
    }
    std::cout << (passed ? "all checks passed" : "FAILED: see checks above") << '\n';
    return passed ? kExitOk : kExitInvariant;
}

struct FiguresArgs {
    std::string which = "all";
    std::string out = ".";
    mim::FigureParams params;
};

int run_figures(const FiguresArgs& args) {
    const bool all = args.which == "all";
    if (!all && args.which != "fig1" && args.which != "fig2" && args.which != "fig3")
        throw std::invalid_argument("which: expected one of fig1, fig2, fig3, all; got \"" +
                                    args.which + "\"");
    const std::filesystem::path dir(args.out);
    std::filesystem::create_directories(dir);
    if (all || args.which == "fig1") {
        std::ofstream out = open_output(dir / "fig1.csv");
        mim::write_focus_csv(out, mim::focus_table(args.params));
        std::cout << "wrote " << (dir / "fig1.csv").string() << '\n';
    }
    if (all || args.which == "fig2") {
        std::ofstream out = open_output(dir / "fig2.csv");
        mim::write_floor_csv(out, mim::floor_table(args.params));
        std::cout << "wrote " << (dir / "fig2.csv").string() << '\n';
    }
    if (all || args.which == "fig3") {
        const mim::StationarityGrid grid = mim::stationarity_grid();
        {
            std::ofstream out = open_output(dir / "fig3_grid.csv");
            mim::write_stationarity_grid_csv(out, grid);
        }
        {
            std::ofstream out = open_output(dir / "fig3_crossings.csv");
            mim::write_stationarity_crossings_csv(out, grid);
        }
        std::cout << "wrote " << (dir / "fig3_grid.csv").string() << '\n';
        std::cout << "wrote " << (dir / "fig3_crossings.csv").string() << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"message importance measure toolkit"};
    app.require_subcommand(1);

    ComputeArgs compute_args;
    CLI::App* compute = app.add_subcommand(
        "compute", "Evaluate L(p, omega) = ln sum_i p_i exp(omega (1 - p_i))");
    compute->add_option("--dist", compute_args.dist,
                        "Distribution: inline JSON or a path to a JSON file")->required();
    double omega_opt = 0.0;
    std::int64_t focus_opt = 0;
    CLI::Option* omega_flag = compute->add_option("--omega", omega_opt, "Importance coefficient");
    CLI::Option* focus_flag =
        compute->add_option("--focus", focus_opt, "Element index; uses omega = 1/p_j");
    compute->add_flag("--terms", compute_args.terms, "Print the per-element summands");

    SelectArgs select_args;
    CLI::App* select = app.add_subcommand(
        "select", "Solve the stationarity condition g(p, omega) = 0 for omega");
    double p_opt = 0.0;
    CLI::Option* p_flag = select->add_option("--p", p_opt, "Probability of the focused element");
    select->add_option("--interval", select_args.interval,
                       "Prior interval lo hi on the probability; solves at lo")
        ->expected(2);

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Stream the minority model and track empirical frequency and MIM");
    simulate->add_option("--model", simulate_args.model,
                         "Model JSON {\"probs\": [...], \"M\": int, \"epsilon\": real} or a path");
    std::int64_t m_opt = 0;
    double p1_opt = 0.0;
    double eps_opt = 0.0;
    CLI::Option* m_flag = simulate->add_option("--M", m_opt, "Sequence length");
    CLI::Option* p1_flag = simulate->add_option("--p1", p1_opt, "First category probability");
    CLI::Option* eps_flag = simulate->add_option("--eps", eps_opt, "Deviation threshold");
    simulate->add_option("--batches", simulate_args.batches,
                         "Batch sizes: '100,200,300', '1000x10', or a single size");
    simulate->add_option("--cheb-eps", simulate_args.cheb_eps,
                         "Deviation (nats) for the Chebyshev report (default 1.0)");
    simulate->add_option("--seed", simulate_args.seed, "RNG seed (default 20170001)");
    simulate->add_option("--out", simulate_args.out,
                         "Output directory for tracker.csv and summary.json (default .)");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Run the seeded invariant suites");
    verify->add_option("suite", verify_args.suite, "properties | select | stream | all")
        ->required();
    verify->add_option("--samples", verify_args.samples,
                       "Random distributions for the properties suite (default 1000)");
    verify->add_option("--replicas", verify_args.replicas,
                       "Monte Carlo replicas for the stream suite (default 100000)");
    verify->add_option("--grid", verify_args.grid,
                       "p grid lo:hi:step for the select suite (default 0.02:0.45:0.01)");
    verify->add_option("--seed", verify_args.seed, "RNG seed (default 20170001)");

    FiguresArgs figures_args;
    CLI::App* figures = app.add_subcommand("figures", "Write the figure data tables as CSV");
    figures->add_option("which", figures_args.which, "fig1 | fig2 | fig3 | all");
    figures->add_option("--out", figures_args.out, "Output directory (default .)");
    figures->add_option("--binomial-trials", figures_args.params.binomial_trials,
                        "Binomial trial count (default 10)");
    figures->add_option("--binomial-theta", figures_args.params.binomial_theta,
                        "Binomial success probability (default 0.3)");
    figures->add_option("--poisson-lambda", figures_args.params.poisson_lambda,
                        "Truncated Poisson rate (default 2)");
    figures->add_option("--poisson-support", figures_args.params.poisson_support,
                        "Truncated Poisson support size (default 11)");
    figures->add_option("--geometric-q", figures_args.params.geometric_q,
                        "Truncated geometric success probability (default 0.3)");
    figures->add_option("--geometric-support", figures_args.params.geometric_support,
                        "Truncated geometric support size (default 11)");
    figures->add_option("--uniform-n", figures_args.params.uniform_n,
                        "Uniform alphabet size (default 11)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (compute->parsed()) {
            if (omega_flag->count() > 0)
                compute_args.omega = omega_opt;
            if (focus_flag->count() > 0)
                compute_args.focus = focus_opt;
            return run_compute(compute_args);
        }
        if (select->parsed()) {
            if (p_flag->count() > 0)
                select_args.p = p_opt;
            return run_select(select_args);
        }
        if (simulate->parsed()) {
            if (m_flag->count() > 0)
                simulate_args.sequence_length = m_opt;
            if (p1_flag->count() > 0)
                simulate_args.p1 = p1_opt;
            if (eps_flag->count() > 0)
                simulate_args.epsilon = eps_opt;
            return run_simulate(simulate_args);
        }
        if (verify->parsed())
            return run_verify(verify_args);
        if (figures->parsed())
            return run_figures(figures_args);
        std::cerr << "error: no subcommand\n";
        return kExitValidation;
    } catch (const mim::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
