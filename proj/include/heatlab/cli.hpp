#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatlab/format.hpp"
#include "heatlab/graph.hpp"
#include "heatlab/graph_io.hpp"
#include "heatlab/heat.hpp"
#include "heatlab/liouville.hpp"
#include "heatlab/report.hpp"
#include "heatlab/spectrum.hpp"

namespace heatlab::cli {

namespace detail {

inline std::string default_out_dir() {
    const char* env = std::getenv("HEATLAB_OUT");
    return env && *env ? env : "out";
}

inline Family parse_family(const std::string& name) {
    static const std::map<std::string, Family> table = {
        {"path", Family::path},
        {"cycle", Family::cycle},
        {"lattice_Z", Family::lattice_Z},
        {"lattice_Z2", Family::lattice_Z2},
        {"tree_regular", Family::tree_regular},
    };
    auto it = table.find(name);
    if (it == table.end())
        raise(ErrorKind::invalid_param,
              "unknown family '" + name +
                  "' (expected path, cycle, lattice_Z, lattice_Z2, tree_regular)");
    return it->second;
}

struct GraphArgs {
    std::string family;
    int size_param = 0;
    int degree = 0;
    std::string graph_file;
};

inline void add_graph_options(CLI::App* cmd, GraphArgs& args, bool allow_file = false) {
    cmd->add_option("--family", args.family,
                    "graph family: path, cycle, lattice_Z, lattice_Z2, tree_regular");
    cmd->add_option("--radius,--size", args.size_param,
                    "truncation radius (lattice/tree) or vertex count (path/cycle)");
    cmd->add_option("--degree", args.degree, "tree degree (tree_regular only)");
    if (allow_file) cmd->add_option("--graph", args.graph_file, "load a graph file instead");
}

inline WeightedGraph build_graph(const GraphArgs& args) {
    if (!args.graph_file.empty()) {
        std::ifstream in(args.graph_file);
        if (!in) raise(ErrorKind::io_error, "cannot open " + args.graph_file);
        return load_graph(in);
    }
    if (args.family.empty())
        raise(ErrorKind::invalid_param, "either --family or --graph is required");
    Family fam = parse_family(args.family);
    std::optional<int> degree;
    if (args.degree > 0) degree = args.degree;
    return generate_family(fam, args.size_param, degree);
}

inline std::vector<double> parse_lambda_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        try {
            std::size_t pos = 0;
            double v = std::stod(token, &pos);
            if (pos != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            raise(ErrorKind::invalid_param, "bad lambda value '" + token + "'");
        }
    }
    if (out.empty()) raise(ErrorKind::invalid_param, "empty lambda list");
    return out;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        auto dt = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(dt).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Echo the parsed options of a subcommand into the report config.
inline nlohmann::json config_echo(const CLI::App* cmd) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : cmd->get_options({})) {
        if (opt->get_lnames().empty()) continue;
        std::string name = opt->get_lnames()[0];
        if (name == "help") continue;
        if (opt->count() == 0) continue;
        if (opt->results().size() == 1)
            j[name] = opt->results().front();
        else
            j[name] = opt->results();
    }
    return j;
}

} // namespace detail

/// CLI entry point. args excludes the program name. Returns 0 on success,
/// 2 when a recorded check fails, 1 on usage or IO errors.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    using nlohmann::json;
    namespace fs = std::filesystem;

    // Allow "--opt -1.5" for numeric options by folding into "--opt=-1.5".
    static const std::vector<std::string> numeric_opts = {
        "--lambda", "--lambdas", "--t-star", "--window-lo", "--window-hi", "--horizon"};
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        for (const std::string& name : numeric_opts) {
            if (args[i] == name && args[i + 1].size() > 1 && args[i + 1][0] == '-' &&
                (std::isdigit(static_cast<unsigned char>(args[i + 1][1])) ||
                 args[i + 1][1] == '.')) {
                args[i] += "=" + args[i + 1];
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                break;
            }
        }
    }

    // JSON config: top-level keys are long option names of the subcommand.
    // File values only fill options absent from the command line, so explicit
    // flags always win.
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            err << "error: io_error: cannot open config file " << config_path << "\n";
            return 1;
        }
        json cfg;
        try {
            in >> cfg;
        } catch (const json::parse_error& e) {
            err << "error: parse_error: " << config_path << ": " << e.what() << "\n";
            return 1;
        }
        if (!cfg.is_object()) {
            err << "error: parse_error: config file must hold a JSON object\n";
            return 1;
        }
        for (const auto& item : cfg.items()) {
            const std::string flag = "--" + item.key();
            bool present = false;
            for (const std::string& a : args)
                if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
            if (present) continue;
            const json& v = item.value();
            if (v.is_boolean()) {
                if (v.get<bool>()) args.push_back(flag);
            } else if (v.is_string()) {
                args.push_back(flag + "=" + v.get<std::string>());
            } else if (v.is_number_integer()) {
                args.push_back(flag + "=" + std::to_string(v.get<long long>()));
            } else if (v.is_number()) {
                args.push_back(flag + "=" + format_double(v.get<double>()));
            } else {
                err << "error: invalid_param: unsupported config value for key '" << item.key()
                    << "'\n";
                return 1;
            }
        }
    }

    CLI::App app{"heatlab: spectral and heat-flow experiments on weighted graphs"};
    app.require_subcommand(1);
    int exit_code = 0;

    auto add_common = [&](CLI::App* cmd, std::string& out_dir, bool& pretty) {
        cmd->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
        cmd->add_flag("--pretty", pretty, "print a human-readable summary to stdout");
        cmd->add_option("--config", "JSON config file; flags override file values");
    };

    auto finish = [&](CLI::App* cmd, RunReport& report, const std::string& out_dir,
                      bool pretty) {
        report.config = detail::config_echo(cmd);
        std::string summary_path = emit_report(report, out_dir);
        report.outputs.push_back(summary_path);
        if (pretty) {
            out << report.command << ": " << (report.all_checks_pass() ? "ok" : "CHECK FAILED")
                << "\n";
            for (const auto& [name, ok] : report.checks)
                out << "  [" << (ok ? "pass" : "FAIL") << "] " << name << "\n";
            for (const auto& path : report.outputs) out << "  wrote " << path << "\n";
        }
        if (!report.all_checks_pass()) exit_code = 2;
    };

    // ---- gen ----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("gen", "generate a graph family and save it");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        detail::add_graph_options(cmd, *opts);
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "gen";
            WeightedGraph g = detail::build_graph(*opts);
            BallDecomposition balls = decompose_balls(g, canonical_root(g));
            GeometryCertificate cert = certify_bounded_geometry(g);

            fs::create_directories(*out_dir);
            fs::path graph_path = fs::path(*out_dir) / "graph.txt";
            std::ostringstream text;
            save_graph(g, text);
            write_text_file(graph_path, text.str());
            report.outputs.push_back(graph_path.string());

            json sphere_sizes = json::array();
            for (const auto& s : balls.spheres) sphere_sizes.push_back(s.size());
            report.results = {
                {"vertices", g.vertex_count()},
                {"edges", g.edges().size()},
                {"family_tag", g.family_tag()},
                {"c0", cert.c0},
                {"max_radius", balls.max_radius},
                {"sphere_sizes", sphere_sizes},
            };
            if (g.truncation_radius()) report.results["truncation_radius"] = *g.truncation_radius();
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty)
                out << "  " << g.vertex_count() << " vertices, " << g.edges().size()
                    << " edges, c0 = " << cert.c0 << "\n";
        });
    }

    // ---- lambda1 ------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("lambda1", "bottom of the spectrum by Dirichlet exhaustion");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto tol = std::make_shared<double>(1e-4);
        auto eigen_tol = std::make_shared<double>(1e-8);
        detail::add_graph_options(cmd, *opts, true);
        cmd->add_option("--tol", *tol, "exhaustion convergence tolerance")->capture_default_str();
        cmd->add_option("--eigen-tol", *eigen_tol, "eigenpair residual tolerance")
            ->capture_default_str();
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "lambda1";
            WeightedGraph g = detail::build_graph(*opts);
            if (!g.truncation_radius()) {
                double bottom = bottom_of_spectrum_finite(g);
                report.results = {{"mode", "finite"}, {"bottom", bottom}};
                report.checks.push_back({"finite_bottom_is_zero", std::abs(bottom) <= 1e-8});
                report.timings_ms.push_back({"total", timer.ms()});
                finish(cmd, report, *out_dir, *pretty);
                return;
            }
            BallDecomposition balls = decompose_balls(g, canonical_root(g));
            SpectrumEstimate estimate = estimate_lambda1_exhaustion(g, balls, *tol, *eigen_tol);

            std::vector<std::vector<std::string>> rows;
            bool nonincreasing = true;
            for (std::size_t i = 0; i < estimate.per_radius.size(); ++i) {
                const auto& [n, value] = estimate.per_radius[i];
                if (i > 0 && value > estimate.per_radius[i - 1].second + 1e-12)
                    nonincreasing = false;
                rows.push_back({std::to_string(n), format_double(value)});
            }
            report.outputs.push_back(
                write_csv(*out_dir, "lambda1.csv", {"radius", "dirichlet_bottom"}, rows));
            report.results = {
                {"mode", "exhaustion"},
                {"lambda1", estimate.lambda1},
                {"lambda1_extrapolated", estimate.lambda1_extrapolated},
                {"converged", estimate.converged},
                {"tol", estimate.tol},
            };
            report.checks.push_back({"per_radius_nonincreasing", nonincreasing});
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty)
                out << "  lambda1 (last) = " << format_double(estimate.lambda1)
                    << ", extrapolated = " << format_double(estimate.lambda1_extrapolated)
                    << "\n";
        });
    }

    // ---- eigfn --------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("eigfn", "construct a positive generalized eigenfunction");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto lambda = std::make_shared<double>(0.0);
        auto tol = std::make_shared<double>(1e-10);
        auto margin = std::make_shared<double>(1e-6);
        detail::add_graph_options(cmd, *opts);
        cmd->add_option("--lambda", *lambda, "eigenvalue")->capture_default_str();
        cmd->add_option("--tol", *tol, "construction residual tolerance")->capture_default_str();
        cmd->add_option("--margin", *margin, "admissibility margin above -lambda1^D")
            ->capture_default_str();
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "eigfn";
            WeightedGraph g = detail::build_graph(*opts);
            BallDecomposition balls = decompose_balls(g, canonical_root(g));
            Eigenfunction ef = construct_positive_eigenfunction(g, balls, *lambda, *tol, *margin);

            std::vector<std::vector<std::string>> rows;
            for (VertexId x = 0; x < g.vertex_count(); ++x)
                rows.push_back({std::to_string(x), std::to_string(balls.distance[x]),
                                format_double(ef.values[x])});
            report.outputs.push_back(
                write_csv(*out_dir, "eigenfunction.csv", {"vertex", "distance", "value"}, rows));
            report.results = {
                {"lambda", ef.lambda},
                {"residual", ef.residual},
                {"positivity", std::string(to_string(ef.positivity))},
                {"root", ef.root},
            };
            report.checks.push_back({"residual_within_tol", ef.residual <= *tol});
            report.checks.push_back({"zero_propagation", verify_zero_propagation(g, ef)});
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty)
                out << "  residual = " << format_double(ef.residual) << ", "
                    << to_string(ef.positivity) << "\n";
        });
    }

    // ---- growth -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("growth", "growth profile and bound audit of an eigenfunction");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto lambda = std::make_shared<double>(1.0);
        auto tol = std::make_shared<double>(1e-10);
        auto tail_fraction = std::make_shared<double>(0.5);
        auto slack = std::make_shared<double>(0.05);
        detail::add_graph_options(cmd, *opts);
        cmd->add_option("--lambda", *lambda, "eigenvalue")->capture_default_str();
        cmd->add_option("--tol", *tol, "construction residual tolerance")->capture_default_str();
        cmd->add_option("--tail-fraction", *tail_fraction, "start of the asymptotic window")
            ->capture_default_str();
        cmd->add_option("--slack", *slack, "tolerance on the rate bounds")->capture_default_str();
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "growth";
            WeightedGraph g = detail::build_graph(*opts);
            BallDecomposition balls = decompose_balls(g, canonical_root(g));
            GeometryCertificate cert = certify_bounded_geometry(g);
            Eigenfunction ef = construct_positive_eigenfunction(g, balls, *lambda, *tol);
            GrowthProfile profile = growth_profile(ef, balls, *tail_fraction);
            GrowthBoundReport bounds = check_growth_bounds(profile, *lambda, cert, *slack);
            auto violations = one_step_harnack_violations(g, ef, balls, cert);

            std::vector<std::vector<std::string>> rows;
            for (const RatioRow& row : bounds.rows)
                rows.push_back({std::to_string(row.n), format_double(row.M),
                                format_double(row.ratio),
                                format_double(bounds.ratio_lower_bound),
                                format_double(bounds.ratio_upper_bound),
                                row.pass ? "1" : "0"});
            report.outputs.push_back(write_csv(
                *out_dir, "growth.csv", {"n", "M_n", "ratio", "lower_bound", "upper_bound", "pass"},
                rows));
            report.results = {
                {"lambda", *lambda},
                {"c0", cert.c0},
                {"rate_lower", profile.rate_lower},
                {"rate_upper", profile.rate_upper},
                {"rate_lower_bound", bounds.rate_lower_bound},
                {"rate_upper_bound", bounds.rate_upper_bound},
                {"ratio_lower_bound", bounds.ratio_lower_bound},
                {"ratio_upper_bound", bounds.ratio_upper_bound},
                {"tail_start", profile.tail_start},
                {"one_step_violations", violations.size()},
            };
            if (bounds.lower_bound_applicable)
                report.checks.push_back({"rate_lower_above_bound", bounds.rate_lower_ok});
            report.checks.push_back({"rate_upper_below_bound", bounds.rate_upper_ok});
            report.checks.push_back({"per_step_ratios_within_bounds", bounds.ratios_ok});
            report.checks.push_back({"one_step_harnack", violations.empty()});
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty)
                out << "  rate in [" << format_double(profile.rate_lower) << ", "
                    << format_double(profile.rate_upper) << "]\n";
        });
    }

    // ---- heat ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("heat", "implicit heat evolution with conservation checks");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto tau = std::make_shared<double>(0.1);
        auto steps = std::make_shared<int>(10);
        auto initial = std::make_shared<std::string>("delta");
        auto crosscheck = std::make_shared<bool>(false);
        detail::add_graph_options(cmd, *opts, true);
        cmd->add_option("--tau", *tau, "time step")->capture_default_str();
        cmd->add_option("--steps", *steps, "number of implicit steps")->capture_default_str();
        cmd->add_option("--initial", *initial, "initial condition: delta or ones")
            ->capture_default_str();
        cmd->add_flag("--crosscheck", *crosscheck, "compare against the spectral solver");
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "heat";
            WeightedGraph g = detail::build_graph(*opts);
            if (*steps < 1) raise(ErrorKind::invalid_param, "steps must be >= 1");

            HeatState state;
            state.time = 0.0;
            state.values.assign(g.vertex_count(), 0.0);
            if (*initial == "delta")
                state.values[canonical_root(g)] = 1.0;
            else if (*initial == "ones")
                state.values.assign(g.vertex_count(), 1.0);
            else
                raise(ErrorKind::invalid_param, "initial must be 'delta' or 'ones'");
            VertexFunction u0 = state.values;

            auto mass = [&](const VertexFunction& u) {
                double s = 0.0;
                for (VertexId x = 0; x < g.vertex_count(); ++x) s += g.measure(x) * u[x];
                return s;
            };
            auto minmax = [&](const VertexFunction& u) {
                double lo = u[0], hi = u[0];
                for (double v : u) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                return std::pair<double, double>(lo, hi);
            };

            const double mass0 = mass(state.values);
            double worst_drift = 0.0;
            double worst_min = 0.0;
            std::vector<std::vector<std::string>> rows;
            auto record = [&](int step) {
                auto [lo, hi] = minmax(state.values);
                worst_min = std::min(worst_min, lo);
                rows.push_back({std::to_string(step), format_double(state.time),
                                format_double(mass(state.values)), format_double(lo),
                                format_double(hi)});
            };
            record(0);
            double prev_mass = mass0;
            for (int s = 1; s <= *steps; ++s) {
                state = step_heat_implicit(g, state, *tau);
                double m = mass(state.values);
                worst_drift =
                    std::max(worst_drift, std::abs(m - prev_mass) / std::max(std::abs(mass0), 1e-300));
                prev_mass = m;
                record(s);
            }
            report.outputs.push_back(write_csv(*out_dir, "heat.csv",
                                               {"step", "time", "mass", "min", "max"}, rows));

            report.results = {
                {"tau", *tau},
                {"steps", *steps},
                {"mass_initial", mass0},
                {"mass_final", prev_mass},
                {"max_relative_mass_drift_per_step", worst_drift},
                {"min_value_seen", worst_min},
            };
            report.checks.push_back({"mass_conserved", worst_drift <= 1e-10});
            report.checks.push_back({"nonnegativity_preserved", worst_min >= -1e-10});
            if (*crosscheck) {
                HeatState exact = solve_heat_spectral(g, u0, state.time);
                double diff = 0.0;
                for (VertexId x = 0; x < g.vertex_count(); ++x)
                    diff = std::max(diff, std::abs(exact.values[x] - state.values[x]));
                double allowance = 10.0 * *tau * (1.0 + max_abs(u0));
                report.results["crosscheck_max_diff"] = diff;
                report.results["crosscheck_allowance"] = allowance;
                report.checks.push_back({"spectral_crosscheck", diff <= allowance});
            }
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
        });
    }

    // ---- synth --------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("synth", "synthesize an ancient solution from spectral atoms");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto atoms_spec = std::make_shared<std::string>("0:1");
        auto horizon = std::make_shared<double>(0.0);
        auto tol = std::make_shared<double>(1e-10);
        auto residual_tol = std::make_shared<double>(1e-8);
        detail::add_graph_options(cmd, *opts);
        cmd->add_option("--atoms", *atoms_spec, "comma list of lambda:nu pairs, e.g. 1:0.5,0:0.5")
            ->capture_default_str();
        cmd->add_option("--horizon", *horizon, "time horizon t0")->capture_default_str();
        cmd->add_option("--tol", *tol, "eigenfunction construction tolerance")
            ->capture_default_str();
        cmd->add_option("--residual-tol", *residual_tol, "heat-equation residual tolerance")
            ->capture_default_str();
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "synth";
            WeightedGraph g = detail::build_graph(*opts);
            BallDecomposition balls = decompose_balls(g, canonical_root(g));
            SpectrumEstimate spectrum = estimate_lambda1_exhaustion(g, balls);

            SpectralMeasure measure;
            measure.lambda1_reference = spectrum.lambda1;
            std::stringstream ss(*atoms_spec);
            std::string token;
            while (std::getline(ss, token, ',')) {
                auto colon = token.find(':');
                if (colon == std::string::npos)
                    raise(ErrorKind::invalid_param, "atom '" + token + "' is not lambda:nu");
                double lambda = std::stod(token.substr(0, colon));
                double nu = std::stod(token.substr(colon + 1));
                if (lambda < -measure.lambda1_reference - 1e-12)
                    raise(ErrorKind::admissibility_violation,
                          "atom lambda = " + std::to_string(lambda) + " below -lambda1 = " +
                              std::to_string(-measure.lambda1_reference));
                Eigenfunction w = construct_positive_eigenfunction(g, balls, lambda, *tol);
                measure.atoms.push_back({lambda, nu, std::move(w)});
            }
            AncientSolution sol = synthesize_ancient(measure, *horizon);

            // Residual is sampled on the deep interior where the construction
            // tolerance is meaningful pointwise.
            const int deep = std::max(1, (*g.truncation_radius() + 1) / 2);
            std::vector<VertexId> sample_vertices = balls.ball(deep);
            std::vector<double> sample_times = {*horizon - 5.0, *horizon - 1.0, *horizon - 0.25};
            double residual = heat_residual(sol, sample_times, sample_vertices);

            std::vector<std::vector<std::string>> rows;
            for (const SpectralAtom& a : measure.atoms)
                rows.push_back({format_double(a.lambda), format_double(a.nu),
                                format_double(a.w.residual)});
            report.outputs.push_back(
                write_csv(*out_dir, "synth.csv", {"lambda", "nu", "eigen_residual"}, rows));
            report.results = {
                {"atoms", measure.atoms.size()},
                {"horizon", *horizon},
                {"lambda1_reference", measure.lambda1_reference},
                {"heat_residual", residual},
                {"sampled_ball_radius", deep},
            };
            report.checks.push_back({"heat_residual_within_tol", residual <= *residual_tol});
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty) out << "  heat residual = " << format_double(residual) << "\n";
        });
    }

    // ---- harnack ------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("harnack", "empirical Harnack constants for a single atom");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto lambda = std::make_shared<double>(1.0);
        auto samples = std::make_shared<int>(1000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto window_lo = std::make_shared<double>(-8.0);
        auto window_hi = std::make_shared<double>(-1.0);
        auto tol = std::make_shared<double>(1e-10);
        detail::add_graph_options(cmd, *opts);
        cmd->add_option("--lambda", *lambda, "atom eigenvalue")->capture_default_str();
        cmd->add_option("--samples", *samples, "number of sampled pairs")->capture_default_str();
        cmd->add_option("--seed", *seed, "random seed")->capture_default_str();
        cmd->add_option("--window-lo", *window_lo, "sampling window start")->capture_default_str();
        cmd->add_option("--window-hi", *window_hi, "sampling window end")->capture_default_str();
        cmd->add_option("--tol", *tol, "eigenfunction construction tolerance")
            ->capture_default_str();
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "harnack";
            WeightedGraph g = detail::build_graph(*opts);
            BallDecomposition balls = decompose_balls(g, canonical_root(g));
            Eigenfunction ef = construct_positive_eigenfunction(g, balls, *lambda, *tol);
            const Eigenfunction& w = ef;
            double lam = *lambda;
            auto u = [&w, lam](VertexId x, double t) {
                return std::exp(lam * t) * w.values[x];
            };

            HarnackSampleSpec spec;
            spec.count = *samples;
            spec.t_lo = *window_lo;
            spec.t_hi = *window_hi;
            spec.seed = *seed;
            HarnackAudit audit = audit_harnack(g, balls, u, spec);

            json hj = {
                {"seed", audit.seed},
                {"window", {audit.window_lo, audit.window_hi}},
                {"sample_count", audit.samples.size()},
                {"fitted_C1", audit.fitted_c1},
                {"fitted_C2", audit.fitted_c2},
                {"max_violation", audit.max_violation},
                {"worst_sample",
                 {{"x", audit.worst.x},
                  {"y", audit.worst.y},
                  {"t1", audit.worst.t1},
                  {"t2", audit.worst.t2},
                  {"rho", audit.worst.rho},
                  {"lhs", audit.worst.lhs}}},
            };
            fs::create_directories(*out_dir);
            fs::path hpath = fs::path(*out_dir) / "harnack.json";
            write_text_file(hpath, hj.dump(2) + "\n");
            report.outputs.push_back(hpath.string());

            report.results = hj;
            report.checks.push_back({"finite_constants",
                                     std::isfinite(audit.fitted_c1) && std::isfinite(audit.fitted_c2)});
            report.checks.push_back({"no_violation_at_fit", audit.max_violation <= 0.0});
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty)
                out << "  C1 = " << format_double(audit.fitted_c1)
                    << ", C2 = " << format_double(audit.fitted_c2)
                    << ", max violation = " << format_double(audit.max_violation) << "\n";
        });
    }

    // ---- liouville ----------------------------------------------------
    {
        auto* cmd = app.add_subcommand("liouville", "dichotomy sweep over a lambda grid");
        auto opts = std::make_shared<detail::GraphArgs>();
        auto out_dir = std::make_shared<std::string>(detail::default_out_dir());
        auto pretty = std::make_shared<bool>(false);
        auto lambdas = std::make_shared<std::string>("0,1");
        auto seed = std::make_shared<std::uint64_t>(1);
        auto t_star = std::make_shared<double>(-1.0);
        auto rate_tol = std::make_shared<double>(0.02);
        auto tol = std::make_shared<double>(1e-8);
        detail::add_graph_options(cmd, *opts);
        cmd->add_option("--lambdas", *lambdas, "comma list of eigenvalues")->capture_default_str();
        cmd->add_option("--seed", *seed, "random seed recorded in the report")
            ->capture_default_str();
        cmd->add_option("--t-star", *t_star, "time at which spatial growth is measured")
            ->capture_default_str();
        cmd->add_option("--rate-tol", *rate_tol, "subexponential rate threshold")
            ->capture_default_str();
        cmd->add_option("--tol", *tol, "stationarity/harmonicity tolerance")
            ->capture_default_str();
        add_common(cmd, *out_dir, *pretty);
        cmd->callback([=, &out, &exit_code]() {
            detail::Timer timer;
            RunReport report;
            report.command = "liouville";
            if (opts->family.empty())
                raise(ErrorKind::invalid_param, "liouville needs --family");

            SweepConfig config;
            config.family.family = detail::parse_family(opts->family);
            if (opts->degree > 0) config.family.degree = opts->degree;
            config.radius = opts->size_param;
            config.lambdas = detail::parse_lambda_list(*lambdas);
            config.seed = *seed;
            config.t_star = *t_star;
            config.rate_tol = *rate_tol;
            config.verdict_tol = *tol;
            std::vector<SweepRow> rows = dichotomy_sweep(config);

            std::vector<std::vector<std::string>> csv_rows;
            json row_json = json::array();
            bool all_consistent = true;
            for (const SweepRow& row : rows) {
                json rj = {{"family", row.family},
                           {"lambda", row.lambda},
                           {"radius", row.radius}};
                if (row.verdict) {
                    const LiouvilleVerdict& v = *row.verdict;
                    all_consistent = all_consistent && v.consistent_with_theorem;
                    csv_rows.push_back({row.family, format_double(row.lambda),
                                        std::to_string(row.radius),
                                        format_double(v.classification.spatial_rate),
                                        format_double(v.classification.temporal_rate),
                                        std::string(to_string(v.support)),
                                        v.stationary ? "1" : "0", v.harmonic ? "1" : "0",
                                        v.consistent_with_theorem ? "1" : "0"});
                    rj["spatial_rate"] = v.classification.spatial_rate;
                    rj["temporal_rate"] = v.classification.temporal_rate;
                    rj["support"] = std::string(to_string(v.support));
                    rj["stationary"] = v.stationary;
                    rj["harmonic"] = v.harmonic;
                    rj["consistent"] = v.consistent_with_theorem;
                } else {
                    csv_rows.push_back({row.family, format_double(row.lambda),
                                        std::to_string(row.radius), "nan", "nan",
                                        "error:" + row.error, "", "", ""});
                    rj["error"] = row.error;
                }
                row_json.push_back(rj);
            }
            report.outputs.push_back(write_csv(*out_dir, "verdict.csv",
                                               {"family", "lambda", "radius", "spatial_rate",
                                                "temporal_rate", "support", "stationary",
                                                "harmonic", "consistent"},
                                               csv_rows));
            report.results = {
                {"rows", row_json},
                {"seed", *seed},
                {"t_star", *t_star},
                {"rate_tol", *rate_tol},
                {"tol", *tol},
                {"scope", "synthesized single-atom solutions with exhaustion eigenfunctions"},
            };
            report.checks.push_back({"all_rendered_verdicts_consistent", all_consistent});
            report.timings_ms.push_back({"total", timer.ms()});
            finish(cmd, report, *out_dir, *pretty);
            if (*pretty)
                for (const auto& row : csv_rows)
                    out << "  lambda=" << row[1] << " support=" << row[5]
                        << " consistent=" << row[8] << "\n";
        });
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

inline int run_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
    return run(std::move(args));
}

} // namespace heatlab::cli
