#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "config.hpp"
#include "harnack/expr.hpp"
#include "harnack/feynman_kac.hpp"
#include "harnack/harnack.hpp"
#include "harnack/sde.hpp"
#include "harnack/solutions.hpp"
#include "harnack/svg.hpp"

namespace harnack::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string out_dir = "out";
    bool svg = false;
    std::vector<std::string> overrides;
};

/// A failure that maps to a nonzero exit code other than the default.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    os << text;
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

json real(double v)
{
    // NaN and infinities have no JSON literal.
    if (!std::isfinite(v))
    {
        return json(format_real(v));
    }
    return json(v);
}

json point(const std::vector<double>& p)
{
    json arr = json::array();
    for (double v : p)
    {
        arr.push_back(real(v));
    }
    return arr;
}

std::string join(const std::vector<double>& p, const char* sep = ",")
{
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        if (i)
        {
            s += sep;
        }
        s += format_real(p[i]);
    }
    return s;
}

bool is_catalog_name(const std::string& text)
{
    for (const char* head : {"kolmogorov(", "separable(", "counterexample(", "constant("})
    {
        if (text.rfind(head, 0) == 0)
        {
            return true;
        }
    }
    return false;
}

/// A function named in the config: a catalog entry or an expression in x, y1, ...
struct NamedFunction
{
    PointFunction f;
    std::optional<AnalyticSolution> analytic;
};

NamedFunction resolve_function(const std::string& text, const RunConfig& cfg,
                               const CylinderDomain& validity)
{
    if (is_catalog_name(text))
    {
        AnalyticSolution s = catalog_solution(text, cfg.beta, validity);
        if (s.dim != cfg.dim)
        {
            throw UsageError("solution '" + text + "' has dimension " + std::to_string(s.dim)
                             + " but operator.dim is " + std::to_string(cfg.dim));
        }
        return {s.u, s};
    }
    CompiledExpr e(parse(text, coordinate_names(cfg.dim - 1, true)));
    return {[e](std::span<const double> p) { return e(p); }, std::nullopt};
}

std::vector<Axis> box_axes(const RunConfig& cfg, const GridSpec& grid)
{
    std::vector<Axis> axes{Axis::from_step(cfg.domain.x_lo, cfg.domain.x_hi, grid.hx)};
    for (std::size_t j = 1; j < cfg.dim; ++j)
    {
        axes.push_back(Axis::from_step(-cfg.domain.outer_radius, cfg.domain.outer_radius,
                                       grid.hy));
    }
    return axes;
}

std::string field_csv(const ScalarField& f)
{
    std::ostringstream os;
    write_csv(os, f);
    return os.str();
}

json report_json(const HarnackReport& r)
{
    json j;
    j["solution"] = r.solution;
    j["sup"] = real(r.sup);
    j["inf"] = real(r.inf);
    j["ratio"] = real(r.ratio);
    j["argmax"] = point(r.argmax);
    j["argmin"] = point(r.argmin);
    return j;
}

json sub_json(const Subcylinder& s)
{
    return json{{"x_lo", s.x_lo}, {"x_hi", s.x_hi}, {"radius", s.radius}};
}

std::string reports_csv(const std::vector<HarnackReport>& reports)
{
    std::string s = "solution,sup,inf,ratio,argmax,argmin\n";
    for (const auto& r : reports)
    {
        s += r.solution + "," + format_real(r.sup) + "," + format_real(r.inf) + ","
             + format_real(r.ratio) + "," + join(r.argmax, " ") + "," + join(r.argmin, " ")
             + "\n";
    }
    return s;
}

// ---------------------------------------------------------------- commands

int cmd_check(const RunConfig& cfg, std::ostream& out)
{
    OperatorSpec op = cfg.make_operator();
    HormanderReport rep = check_hypothesis(op, cfg.domain, cfg.r, cfg.check_grid_step);
    write_file(cfg.out_dir / "hormander.json", to_json(rep) + "\n");
    out << "hypothesis " << (rep.pass ? "PASS" : "FAIL") << " (r=" << rep.r
        << ", min derivative mass " << format_real(rep.min_derivative_mass) << ")\n";
    if (!rep.sign_change_ok)
    {
        out << "beta does not change sign: min " << format_real(rep.beta_min) << ", max "
            << format_real(rep.beta_max) << "\n";
    }
    if (!rep.error.empty())
    {
        out << rep.error << " at (" << join(rep.error_location) << ")\n";
    }
    return rep.pass ? exit_ok : exit_failure;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    OperatorSpec op = cfg.make_operator();
    PathBatch batch = simulate_batch(op, cfg.domain, cfg.start, cfg.sim);
    EmpiricalMeasure nu = histogram(batch, cfg.domain.outer_radius, cfg.bins);

    std::string csv = "path_id,stopped_x";
    for (std::size_t j = 1; j <= batch.y_dim; ++j)
    {
        csv += ",stopped_y" + std::to_string(j);
    }
    csv += ",stop_time,gamma_integral,exited\n";
    for (std::size_t i = 0; i < batch.size(); ++i)
    {
        csv += std::to_string(i) + "," + format_real(batch.stopped_x(i));
        for (double y : batch.y(i))
        {
            csv += "," + format_real(y);
        }
        csv += "," + format_real(batch.stop_time[i]) + "," + format_real(batch.gamma_integral[i])
               + "," + (batch.exited[i] ? "1" : "0") + "\n";
    }
    write_file(cfg.out_dir / "paths.csv", csv);

    std::string nu_csv = "bin";
    for (std::size_t j = 1; j <= nu.y_dim; ++j)
    {
        nu_csv += ",center_y" + std::to_string(j);
    }
    nu_csv += ",count,mass\n";
    for (std::size_t b = 0; b < nu.bin_count(); ++b)
    {
        nu_csv += std::to_string(b) + "," + join(nu.bin_center(b)) + ","
                  + std::to_string(nu.counts[b]) + "," + format_real(nu.mass(b)) + "\n";
    }
    nu_csv += "exit";
    for (std::size_t j = 0; j < nu.y_dim; ++j)
    {
        nu_csv += ",nan";
    }
    nu_csv += "," + std::to_string(nu.exit_count) + "," + format_real(nu.exit_mass()) + "\n";
    write_file(cfg.out_dir / "nu.csv", nu_csv);

    json j;
    j["start"] = point(cfg.start);
    j["n_paths"] = batch.size();
    j["dt"] = cfg.sim.dt;
    j["t_max"] = cfg.sim.t_max;
    j["seed"] = cfg.sim.master_seed;
    j["exit_monitor"] = cfg.sim.monitor == ExitMonitor::BrownianBridge ? "bridge" : "discrete";
    j["mean_stop_time"] = real(batch.mean_stop_time());
    j["stop_time_std_error"] = real(batch.stop_time_std_error());
    j["exit_fraction"] = real(batch.exit_fraction());
    j["bins_per_axis"] = nu.bins_per_axis;
    j["exit_mass"] = real(nu.exit_mass());
    write_file(cfg.out_dir / "simulate.json", dump(j));

    out << "simulated " << batch.size() << " paths; mean stop time "
        << format_real(batch.mean_stop_time()) << " +- "
        << format_real(batch.stop_time_std_error()) << "\n";
    return exit_ok;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out)
{
    OperatorSpec op = cfg.make_operator();
    NamedFunction u = resolve_function(cfg.evaluate_u, cfg, cfg.domain);
    FKEstimate est = evaluate(op, cfg.domain, u.f, cfg.evaluate_start, cfg.evaluate_t, cfg.sim);

    json j;
    j["u"] = cfg.evaluate_u;
    j["start"] = point(cfg.evaluate_start);
    j["t"] = cfg.evaluate_t;
    j["value"] = real(est.value);
    j["std_error"] = real(est.std_error);
    j["n_paths"] = est.n_paths;
    j["seed"] = cfg.sim.master_seed;
    const double u_start = u.f(cfg.evaluate_start);
    j["u_start"] = real(u_start);
    j["z_score"] = est.std_error > 0.0 ? real((est.value - u_start) / est.std_error)
                                       : json(nullptr);

    out << "E = " << format_real(est.value) << " +- " << format_real(est.std_error)
        << "; u(start) = " << format_real(u_start) << "\n";

    int code = exit_ok;
    if (cfg.sandwich)
    {
        ScalarField field = ScalarField::sample(box_axes(cfg, cfg.evaluate_grid), u.f);
        SandwichVerdict v = sandwich_check(op, cfg.domain, field, cfg.evaluate_start,
                                           cfg.evaluate_t, cfg.sim, cfg.k_sigma);
        j["sandwich"] = json{{"pass", v.pass},
                             {"u_start", real(v.u_start)},
                             {"expectation", real(v.expectation)},
                             {"std_error", real(v.std_error)},
                             {"lower", real(v.lower)},
                             {"upper", real(v.upper)},
                             {"k_sigma", cfg.k_sigma},
                             {"horizon", real(v.horizon)}};
        out << "sandwich " << (v.pass ? "PASS" : "FAIL") << ": " << format_real(v.lower)
            << " <= " << format_real(v.u_start) << " <= " << format_real(v.upper) << "\n";
        code = v.pass ? exit_ok : exit_failure;
    }
    write_file(cfg.out_dir / "evaluate.json", dump(j));
    return code;
}

int cmd_make_solution(const RunConfig& cfg, std::ostream& out)
{
    OperatorSpec op = cfg.make_operator();
    NamedFunction g = resolve_function(cfg.boundary_data, cfg, cfg.domain);
    SimConfig sim = cfg.sim;
    sim.n_paths = cfg.solution_paths;
    ManufacturedField m = make_solution(op, cfg.domain, g.f, cfg.t_solve, sim,
                                        box_axes(cfg, cfg.solution_grid));
    ScalarField res = residual(m.value, op);

    write_file(cfg.out_dir / "field.csv", field_csv(m.value));
    write_file(cfg.out_dir / "field_stderr.csv", field_csv(m.std_error));

    json j = json::parse(grid_json(m.value));
    j["g"] = cfg.boundary_data;
    j["t_solve"] = cfg.t_solve;
    j["paths_per_node"] = sim.n_paths;
    j["seed"] = sim.master_seed;
    j["max_std_error"] = real(max_abs(m.std_error));
    j["max_abs_residual"] = real(max_abs(res));
    write_file(cfg.out_dir / "field.json", dump(j));

    if (cfg.svg && cfg.dim == 2)
    {
        write_file(cfg.out_dir / "field.svg", heatmap_svg(m.value, "u = E[g]"));
    }
    out << "field with " << m.value.size() << " nodes; max std error "
        << format_real(max_abs(m.std_error)) << "\n";
    return exit_ok;
}

int write_counterexample(const RunConfig& cfg, const CounterexampleScan& scan,
                         const std::string& stem, std::ostream& out)
{
    std::string csv = "lambda,ratio,closed_form,abs_diff,sup,inf\n";
    json rows = json::array();
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
    {
        const auto& r = scan.reports[i];
        double diff = std::abs(r.ratio - scan.closed_form[i]);
        csv += format_real(scan.lambdas[i]) + "," + format_real(r.ratio) + ","
               + format_real(scan.closed_form[i]) + "," + format_real(diff) + ","
               + format_real(r.sup) + "," + format_real(r.inf) + "\n";
        json row = report_json(r);
        row["lambda"] = scan.lambdas[i];
        row["closed_form"] = real(scan.closed_form[i]);
        rows.push_back(row);
    }
    write_file(cfg.out_dir / (stem + ".csv"), csv);
    json j;
    j["family"] = "counterexample";
    j["subcylinder"] = sub_json(cfg.sub);
    j["reports"] = rows;
    double max_ratio = 0.0;
    for (const auto& r : scan.reports)
    {
        max_ratio = std::max(max_ratio, r.ratio);
    }
    j["max_ratio"] = real(max_ratio);
    j["verdict"] = to_string(scan.verdict);
    write_file(cfg.out_dir / (stem + ".json"), dump(j));
    if (cfg.svg)
    {
        std::vector<double> ratios;
        for (const auto& r : scan.reports)
        {
            ratios.push_back(r.ratio);
        }
        write_file(cfg.out_dir / (stem + ".svg"),
                   line_plot_svg(scan.lambdas, ratios, "sup/inf ratio", "lambda", "ratio",
                                 true));
    }
    out << "verdict: " << to_string(scan.verdict) << "\n";
    return exit_ok;
}

int cmd_counterexample(const RunConfig& cfg, std::ostream& out)
{
    CounterexampleScan scan = counterexample_scan(cfg.lambdas, cfg.sub, cfg.counterexample_grid);
    return write_counterexample(cfg, scan, "counterexample", out);
}

int cmd_harnack(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.family == "counterexample")
    {
        CounterexampleScan scan = counterexample_scan(cfg.lambdas, cfg.sub, cfg.scan_grid);
        return write_counterexample(cfg, scan, "harnack", out);
    }

    const CylinderDomain validity = validity_domain(cfg.sub);
    std::vector<AnalyticSolution> analytic;
    if (cfg.family == "constants")
    {
        for (double c : {1.0, 5.0, 100.0})
        {
            analytic.push_back(constant_solution(c, cfg.dim, validity));
        }
    }
    else if (cfg.family == "kolmogorov")
    {
        for (double c : {2.0, 5.0, 10.0, 100.0})
        {
            analytic.push_back(kolmogorov_poly(c, validity));
        }
    }
    else if (cfg.family == "catalog")
    {
        for (const auto& name : cfg.family_solutions)
        {
            analytic.push_back(resolve_function(name, cfg, validity).analytic.value());
        }
    }
    else if (cfg.family == "shipped")
    {
        analytic = shipped_analytic_family(cfg.sub);
    }

    FamilyScan scan;
    if (!analytic.empty())
    {
        scan = scan_family(analytic, cfg.sub, cfg.scan_grid);
    }
    if (cfg.family == "random" || cfg.family == "shipped")
    {
        OperatorSpec op = cfg.make_operator();
        SimConfig sim = cfg.sim;
        sim.n_paths = cfg.family_paths;
        auto fields = manufactured_family(op, cfg.domain, cfg.sub, cfg.family_size,
                                          cfg.family_t_solve, sim, cfg.family_field_grid);
        std::vector<std::string> ids;
        for (std::size_t k = 0; k < fields.size(); ++k)
        {
            ids.push_back("random(" + std::to_string(k) + ")");
        }
        FamilyScan manufactured = scan_family(fields, ids, cfg.sub);
        for (auto& r : manufactured.reports)
        {
            scan.reports.push_back(std::move(r));
        }
        scan.max_ratio = 0.0;
        for (std::size_t i = 0; i < scan.reports.size(); ++i)
        {
            if (scan.reports[i].ratio > scan.max_ratio)
            {
                scan.max_ratio = scan.reports[i].ratio;
                scan.argmax = i;
            }
        }
    }

    write_file(cfg.out_dir / "harnack.csv", reports_csv(scan.reports));
    json reports = json::array();
    for (const auto& r : scan.reports)
    {
        reports.push_back(report_json(r));
    }
    json j;
    j["family"] = cfg.family;
    j["subcylinder"] = sub_json(cfg.sub);
    j["reports"] = reports;
    j["max_ratio"] = real(scan.max_ratio);
    j["argmax"] = scan.reports.empty() ? json(nullptr) : json(scan.reports[scan.argmax].solution);
    j["verdict"] = to_string(std::isfinite(scan.max_ratio) ? Verdict::Bounded
                                                           : Verdict::NoVerdict);
    write_file(cfg.out_dir / "harnack.json", dump(j));
    if (cfg.svg)
    {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < scan.reports.size(); ++i)
        {
            xs.push_back(static_cast<double>(i));
            ys.push_back(scan.reports[i].ratio);
        }
        write_file(cfg.out_dir / "harnack.svg",
                   line_plot_svg(xs, ys, "sup/inf ratio per solution", "member", "ratio",
                                 false));
    }
    out << "max ratio " << format_real(scan.max_ratio) << " over " << scan.reports.size()
        << " solutions\n";
    return exit_ok;
}

int cmd_regions(const RunConfig& cfg, std::ostream& out)
{
    OperatorSpec op = cfg.make_operator();
    NamedFunction u = resolve_function(cfg.region_solution, cfg, cfg.domain);
    RegionCheck rc = region_inequality_check(u.f, op, cfg.domain, cfg.d, cfg.region_grid,
                                             cfg.region_cap);
    json j;
    j["solution"] = cfg.region_solution;
    j["d"] = cfg.d;
    j["plus_points"] = rc.plus_points;
    j["minus_points"] = rc.minus_points;
    j["sup_on_regions"] = real(rc.sup_on_regions);
    j["inf_on_inner_ball"] = real(rc.inf_on_inner_ball);
    j["ratio"] = real(rc.ratio);
    j["argmax"] = point(rc.argmax);
    j["argmin"] = point(rc.argmin);
    j["cap"] = real(rc.cap);
    j["within_cap"] = rc.within_cap;
    write_file(cfg.out_dir / "regions.json", dump(j));
    out << "region ratio " << format_real(rc.ratio) << (rc.within_cap ? "" : " (exceeds cap)")
        << "\n";
    return rc.within_cap ? exit_ok : exit_failure;
}

int cmd_average(const RunConfig& cfg, std::ostream& out)
{
    NamedFunction u = resolve_function(cfg.average_solution, cfg, cfg.domain);
    std::vector<Axis> axes{
        Axis::from_step(cfg.sub.x_lo - cfg.z, cfg.sub.x_hi + cfg.z, cfg.average_grid.hx)};
    for (std::size_t j = 1; j < cfg.dim; ++j)
    {
        axes.push_back(Axis::from_step(-cfg.sub.radius, cfg.sub.radius, cfg.average_grid.hy));
    }
    ScalarField field = ScalarField::sample(axes, u.f);
    ScalarField v = window_average_x(field, cfg.z);
    HarnackReport ru = sup_inf_ratio(field, cfg.sub, cfg.average_solution);
    HarnackReport rv = sup_inf_ratio(v, cfg.sub, "window average");

    write_file(cfg.out_dir / "average.csv", field_csv(v));
    json j = json::parse(grid_json(v));
    j["solution"] = cfg.average_solution;
    j["z"] = cfg.z;
    j["u"] = report_json(ru);
    j["v"] = report_json(rv);
    write_file(cfg.out_dir / "average.json", dump(j));
    if (cfg.svg && cfg.dim == 2)
    {
        write_file(cfg.out_dir / "average.svg", heatmap_svg(v, "window average"));
    }
    out << "ratio u " << format_real(ru.ratio) << ", ratio v " << format_real(rv.ratio) << "\n";
    return exit_ok;
}

RunConfig build_config(const Options& opt)
{
    RawConfig raw;
    if (!opt.config_path.empty())
    {
        raw = read_config_file(opt.config_path);
    }
    apply_overrides(raw, opt.overrides);
    if (opt.seed)
    {
        raw["sim.seed"] = std::to_string(*opt.seed);
    }
    else if (!raw.count("sim.seed"))
    {
        if (const char* env = std::getenv("HARNACK_LAB_SEED"))
        {
            raw["sim.seed"] = env;
        }
    }
    RunConfig cfg = load_config(raw);
    cfg.sim.workers = opt.workers;
    cfg.out_dir = opt.out_dir;
    cfg.svg = opt.svg;
    return cfg;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Harnack inequality laboratory for Delta_y u + beta(y) u_x + gamma u = 0"};
    app.name("harnack_lab");
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "Sectioned key-value config file");
    app.add_option("--seed", opt.seed, "Master seed (overrides sim.seed)");
    app.add_option("--workers", opt.workers, "Worker threads; never changes any output")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", opt.out_dir, "Output directory");
    app.add_flag("--svg", opt.svg, "Also write SVG plots");
    app.add_option("--set", opt.overrides, "Override a config value: section.key=value")
        ->allow_extra_args(false);

    using Command = int (*)(const RunConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"check", "Check the drift hypothesis", cmd_check},
        {"simulate", "Simulate stopped paths and the law of the stopped y-process", cmd_simulate},
        {"evaluate", "Feynman-Kac estimate at one point, optionally the sandwich check",
         cmd_evaluate},
        {"make-solution", "Manufacture a solution field from boundary data", cmd_make_solution},
        {"harnack", "sup/inf ratios over a solution family", cmd_harnack},
        {"counterexample", "Ratios of the beta = 1 counterexample family", cmd_counterexample},
        {"regions", "Sign-region inequality check", cmd_regions},
        {"average", "x-window average and its sup/inf ratio", cmd_average},
    };
    for (const auto& [name, help, fn] : commands)
    {
        app.add_subcommand(name, help);
    }

    std::vector<const char*> argv{"harnack_lab"};
    for (const auto& a : args)
    {
        argv.push_back(a.c_str());
    }
    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::ParseError& e)
    {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    const std::string chosen = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    int code = exit_ok;
    try
    {
        RunConfig cfg = build_config(opt);
        fs::create_directories(cfg.out_dir);
        for (const auto& [name, help, fn] : commands)
        {
            if (name == chosen)
            {
                code = fn(cfg, out);
            }
        }
    }
    catch (const ConfigError& e)
    {
        err << e.what() << "\n";
        return exit_usage;
    }
    catch (const UsageError& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const UnknownIdentifierError& e)
    {
        err << "error: unknown identifier '" << e.name() << "'\n";
        return exit_usage;
    }
    catch (const ParseError& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const PositivityError& e)
    {
        err << "positivity violated: " << e.what() << " at (" << join(e.location()) << ")\n";
        return exit_failure;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "failed: " << e.what() << "\n";
        return exit_failure;
    }
    const double seconds
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << chosen << " finished in " << seconds << " s\n";
    return code;
}

int run_cli(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace harnack::cli
