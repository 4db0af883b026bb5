#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "harnack/feynman_kac.hpp"
#include "harnack/harnack.hpp"
#include "harnack/operator.hpp"
#include "harnack/sde.hpp"
#include "harnack/solutions.hpp"

#ifdef HARNACK_WITH_CLI
#include "cli.hpp"
#endif

namespace py = pybind11;
using namespace harnack;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v)
{
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

SimConfig sim_config(std::size_t n_paths, double dt, double t_max, std::uint64_t seed,
                     unsigned workers, const std::string& monitor)
{
    SimConfig cfg;
    cfg.n_paths = n_paths;
    cfg.dt = dt;
    cfg.t_max = t_max;
    cfg.master_seed = seed;
    cfg.workers = workers;
    if (monitor == "bridge")
    {
        cfg.monitor = ExitMonitor::BrownianBridge;
    }
    else if (monitor == "discrete")
    {
        cfg.monitor = ExitMonitor::Discrete;
    }
    else
    {
        throw std::invalid_argument("exit monitor must be 'bridge' or 'discrete'");
    }
    return cfg;
}

py::dict report_dict(const HarnackReport& r)
{
    py::dict d;
    d["solution"] = r.solution;
    d["sup"] = r.sup;
    d["inf"] = r.inf;
    d["ratio"] = r.ratio;
    d["argmax"] = r.argmax;
    d["argmin"] = r.argmin;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Simulation core for Kolmogorov-type operators with sign-changing drift";

    py::register_exception<PositivityError>(m, "PositivityError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);

    py::class_<CylinderDomain>(m, "CylinderDomain")
        .def(py::init<>())
        .def_readwrite("x_lo", &CylinderDomain::x_lo)
        .def_readwrite("x_hi", &CylinderDomain::x_hi)
        .def_readwrite("x_lo_inner", &CylinderDomain::x_lo_inner)
        .def_readwrite("x_hi_inner", &CylinderDomain::x_hi_inner)
        .def_readwrite("outer_radius", &CylinderDomain::outer_radius)
        .def_readwrite("inner_radius", &CylinderDomain::inner_radius)
        .def("validate", &CylinderDomain::validate);

    py::class_<Subcylinder>(m, "Subcylinder")
        .def(py::init<>())
        .def(py::init([](double lo, double hi, double radius) { return Subcylinder{lo, hi, radius}; }),
             py::arg("x_lo"), py::arg("x_hi"), py::arg("radius"))
        .def_readwrite("x_lo", &Subcylinder::x_lo)
        .def_readwrite("x_hi", &Subcylinder::x_hi)
        .def_readwrite("radius", &Subcylinder::radius);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def(py::init([](double hx, double hy) { return GridSpec{hx, hy}; }), py::arg("hx"),
             py::arg("hy"))
        .def_readwrite("hx", &GridSpec::hx)
        .def_readwrite("hy", &GridSpec::hy);

    m.def(
        "check_hypothesis",
        [](const std::string& beta, std::size_t dim, int r, double grid_step,
           const CylinderDomain& dom) {
            OperatorSpec op = make_operator(beta, "0", dim, dom);
            HormanderReport rep = check_hypothesis(op, dom, r, grid_step);
            py::dict d;
            d["pass"] = rep.pass;
            d["r"] = rep.r;
            d["sign_change_ok"] = rep.sign_change_ok;
            d["beta_min"] = rep.beta_min;
            d["beta_max"] = rep.beta_max;
            d["witness_minus"] = rep.witness_minus;
            d["witness_plus"] = rep.witness_plus;
            d["min_derivative_mass"] = rep.min_derivative_mass;
            d["smallest_passing_r"] = rep.smallest_passing_r;
            d["error"] = rep.error;
            return d;
        },
        py::arg("beta"), py::arg("dim") = 2, py::arg("r") = 2, py::arg("grid_step") = 0.05,
        py::arg("domain") = CylinderDomain{});

    m.def(
        "simulate",
        [](const std::string& beta, std::vector<double> start, const std::string& gamma,
           std::size_t n_paths, double dt, double t_max, std::uint64_t seed, unsigned workers,
           const std::string& monitor, const CylinderDomain& dom) {
            OperatorSpec op = make_operator(beta, gamma, start.size(), dom);
            SimConfig cfg = sim_config(n_paths, dt, t_max, seed, workers, monitor);
            PathBatch b;
            {
                py::gil_scoped_release release;
                b = simulate_batch(op, dom, start, cfg);
            }
            std::vector<double> x(b.size());
            for (std::size_t i = 0; i < b.size(); ++i)
            {
                x[i] = b.stopped_x(i);
            }
            py::array_t<double> y = to_array(b.stopped_y);
            y.resize({static_cast<py::ssize_t>(b.size()), static_cast<py::ssize_t>(b.y_dim)});
            py::dict d;
            d["stopped_x"] = to_array(x);
            d["stopped_y"] = y;
            d["stop_time"] = to_array(b.stop_time);
            d["gamma_integral"] = to_array(b.gamma_integral);
            d["exited"] = to_array(b.exited);
            return d;
        },
        py::arg("beta"), py::arg("start"), py::arg("gamma") = "0", py::arg("n_paths") = 10000,
        py::arg("dt") = 1e-3, py::arg("t_max") = 1.0, py::arg("seed") = 0, py::arg("workers") = 1,
        py::arg("monitor") = "bridge", py::arg("domain") = CylinderDomain{});

    m.def(
        "evaluate",
        [](const std::string& solution, const std::string& beta, std::vector<double> start,
           double t, std::size_t n_paths, double dt, std::uint64_t seed, unsigned workers,
           const CylinderDomain& dom) {
            AnalyticSolution s = catalog_solution(solution, beta, dom);
            OperatorSpec op = s.make_operator(dom);
            SimConfig cfg = sim_config(n_paths, dt, std::max(t, dt), seed, workers, "bridge");
            FKEstimate e;
            {
                py::gil_scoped_release release;
                e = evaluate(op, dom, s.u, start, t, cfg);
            }
            py::dict d;
            d["value"] = e.value;
            d["std_error"] = e.std_error;
            d["u_start"] = s(start);
            d["n_paths"] = e.n_paths;
            return d;
        },
        py::arg("solution"), py::arg("beta"), py::arg("start"), py::arg("t") = 0.5,
        py::arg("n_paths") = 10000, py::arg("dt") = 1e-3, py::arg("seed") = 0,
        py::arg("workers") = 1, py::arg("domain") = CylinderDomain{});

    m.def(
        "solution_value",
        [](const std::string& solution, const std::string& beta, std::vector<double> point,
           const CylinderDomain& dom) { return catalog_solution(solution, beta, dom)(point); },
        py::arg("solution"), py::arg("beta"), py::arg("point"), py::arg("domain") = CylinderDomain{});

    m.def(
        "residual_max",
        [](const std::string& solution, const std::string& beta, double hx, double hy,
           const CylinderDomain& dom) {
            AnalyticSolution s = catalog_solution(solution, beta, dom);
            std::vector<Axis> grid{Axis::from_step(dom.x_lo_inner, dom.x_hi_inner, hx),
                                   Axis::from_step(-dom.inner_radius, dom.inner_radius, hy)};
            return max_abs(residual(ScalarField::sample(grid, s.u), s.make_operator(dom)));
        },
        py::arg("solution"), py::arg("beta"), py::arg("hx") = 0.05, py::arg("hy") = 0.05,
        py::arg("domain") = CylinderDomain{});

    m.def(
        "harnack_ratio",
        [](const std::string& solution, const std::string& beta, const Subcylinder& sub,
           const GridSpec& grid) {
            return report_dict(
                sup_inf_ratio(catalog_solution(solution, beta, validity_domain(sub)), sub, grid));
        },
        py::arg("solution"), py::arg("beta") = "y1", py::arg("sub") = Subcylinder{},
        py::arg("grid") = GridSpec{});

    m.def("counterexample_ratio", &counterexample_ratio, py::arg("lam"));

    m.def(
        "counterexample_scan",
        [](const std::vector<double>& lambdas, const Subcylinder& sub, const GridSpec& grid) {
            CounterexampleScan s = counterexample_scan(lambdas, sub, grid);
            py::list reports;
            for (const auto& r : s.reports)
            {
                reports.append(report_dict(r));
            }
            py::dict d;
            d["lambdas"] = s.lambdas;
            d["reports"] = reports;
            d["closed_form"] = s.closed_form;
            d["verdict"] = std::string(to_string(s.verdict));
            return d;
        },
        py::arg("lambdas"), py::arg("sub") = Subcylinder{}, py::arg("grid") = GridSpec{});

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
#ifdef HARNACK_WITH_CLI
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = harnack::cli::run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
#else
            (void)args;
            throw std::runtime_error("built without the command-line tool");
#endif
        },
        py::arg("args"), "Run harnack_lab in-process; returns (exit_code, stdout, stderr).");
}
