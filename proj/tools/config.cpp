#include "config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace harnack::cli {

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
          std::string msg = "configuration error";
          for (const auto& p : problems)
          {
              msg += "\n  " + p;
          }
          return msg;
      }()),
      problems_(std::move(problems))
{
}

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
    {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
    {
        item = trim(item);
        if (!item.empty())
        {
            parts.push_back(item);
        }
    }
    return parts;
}

class Reader
{
  public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    const std::string* find(const std::string& key)
    {
        used_.insert(key);
        auto it = raw_.find(key);
        return it == raw_.end() ? nullptr : &it->second;
    }

    template<class T>
    void number(const std::string& key, T& out)
    {
        const std::string* v = find(key);
        if (!v)
        {
            return;
        }
        T parsed{};
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
        if (ec != std::errc{} || ptr != v->data() + v->size())
        {
            problem(key + ": '" + *v + "' is not a valid number");
            return;
        }
        out = parsed;
    }

    void text(const std::string& key, std::string& out)
    {
        if (const std::string* v = find(key))
        {
            out = *v;
        }
    }

    void flag(const std::string& key, bool& out)
    {
        const std::string* v = find(key);
        if (!v)
        {
            return;
        }
        if (*v == "true" || *v == "1" || *v == "yes")
        {
            out = true;
        }
        else if (*v == "false" || *v == "0" || *v == "no")
        {
            out = false;
        }
        else
        {
            problem(key + ": expected true or false, got '" + *v + "'");
        }
    }

    void list(const std::string& key, std::vector<double>& out)
    {
        const std::string* v = find(key);
        if (!v)
        {
            return;
        }
        std::vector<double> values;
        for (const auto& item : split(*v, ','))
        {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
            if (ec != std::errc{} || ptr != item.data() + item.size())
            {
                problem(key + ": '" + item + "' is not a valid number");
                return;
            }
            values.push_back(x);
        }
        out = std::move(values);
    }

    void problem(std::string msg) { problems_.push_back(std::move(msg)); }

    void check_unknown()
    {
        for (const auto& [key, value] : raw_)
        {
            if (!used_.count(key))
            {
                problem("unknown key '" + key + "'");
            }
        }
    }

    std::vector<std::string>& problems() { return problems_; }

  private:
    const RawConfig& raw_;
    std::set<std::string> used_;
    std::vector<std::string> problems_;
};

template<class Fn>
void guard(Reader& reader, const std::string& what, Fn&& fn)
{
    try
    {
        fn();
    }
    catch (const std::exception& e)
    {
        reader.problem(what + ": " + e.what());
    }
}

} // namespace

RawConfig parse_config_text(std::istream& in, const std::string& origin)
{
    RawConfig raw;
    std::vector<std::string> problems;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        std::string body = trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty() || body.front() == ';')
        {
            continue;
        }
        std::string where = origin + ":" + std::to_string(lineno);
        if (body.front() == '[')
        {
            if (body.back() != ']')
            {
                problems.push_back(where + ": malformed section header");
                continue;
            }
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos)
        {
            problems.push_back(where + ": expected 'key = value'");
            continue;
        }
        if (section.empty())
        {
            problems.push_back(where + ": key outside of any section");
            continue;
        }
        raw[section + "." + trim(std::string_view(body).substr(0, eq))]
            = trim(std::string_view(body).substr(eq + 1));
    }
    if (!problems.empty())
    {
        throw ConfigError(problems);
    }
    return raw;
}

RawConfig read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError({"cannot open config file '" + path.string() + "'"});
    }
    return parse_config_text(in, path.string());
}

void apply_overrides(RawConfig& raw, const std::vector<std::string>& overrides)
{
    std::vector<std::string> problems;
    for (const auto& o : overrides)
    {
        auto eq = o.find('=');
        auto dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        {
            problems.push_back("override '" + o + "' must look like section.key=value");
            continue;
        }
        raw[trim(std::string_view(o).substr(0, eq))] = trim(std::string_view(o).substr(eq + 1));
    }
    if (!problems.empty())
    {
        throw ConfigError(problems);
    }
}

OperatorSpec RunConfig::make_operator() const
{
    return harnack::make_operator(beta, gamma, dim, domain);
}

RunConfig load_config(const RawConfig& raw)
{
    RunConfig c;
    Reader r(raw);

    r.text("operator.beta", c.beta);
    r.text("operator.gamma", c.gamma);
    r.number("operator.dim", c.dim);

    r.number("domain.a", c.domain.x_lo);
    r.number("domain.b", c.domain.x_hi);
    r.number("domain.a_inner", c.domain.x_lo_inner);
    r.number("domain.b_inner", c.domain.x_hi_inner);
    r.number("domain.outer_radius", c.domain.outer_radius);
    r.number("domain.inner_radius", c.domain.inner_radius);

    r.number("sim.dt", c.sim.dt);
    r.number("sim.t_max", c.sim.t_max);
    r.number("sim.n_paths", c.sim.n_paths);
    r.number("sim.seed", c.sim.master_seed);
    std::string monitor = "bridge";
    r.text("sim.exit_monitor", monitor);
    if (monitor == "bridge")
    {
        c.sim.monitor = ExitMonitor::BrownianBridge;
    }
    else if (monitor == "discrete")
    {
        c.sim.monitor = ExitMonitor::Discrete;
    }
    else
    {
        r.problem("sim.exit_monitor: expected 'bridge' or 'discrete'");
    }

    r.number("check.r", c.r);
    r.number("check.grid_step", c.check_grid_step);

    r.list("simulate.start", c.start);
    r.number("simulate.bins", c.bins);

    r.text("evaluate.u", c.evaluate_u);
    r.list("evaluate.start", c.evaluate_start);
    r.number("evaluate.t", c.evaluate_t);
    r.flag("evaluate.sandwich", c.sandwich);
    r.number("evaluate.k_sigma", c.k_sigma);
    r.number("evaluate.hx", c.evaluate_grid.hx);
    r.number("evaluate.hy", c.evaluate_grid.hy);

    r.text("make_solution.g", c.boundary_data);
    r.number("make_solution.t_solve", c.t_solve);
    r.number("make_solution.paths", c.solution_paths);
    r.number("make_solution.hx", c.solution_grid.hx);
    r.number("make_solution.hy", c.solution_grid.hy);

    c.sub = {c.domain.x_lo_inner, c.domain.x_hi_inner, c.domain.inner_radius};
    r.text("harnack.family", c.family);
    if (const std::string* list = r.find("harnack.solutions"))
    {
        c.family_solutions = split(*list, ';');
    }
    r.number("harnack.size", c.family_size);
    r.number("harnack.t_solve", c.family_t_solve);
    r.number("harnack.paths", c.family_paths);
    r.number("harnack.field_hx", c.family_field_grid.hx);
    r.number("harnack.field_hy", c.family_field_grid.hy);
    r.number("harnack.hx", c.scan_grid.hx);
    r.number("harnack.hy", c.scan_grid.hy);

    r.list("counterexample.lambdas", c.lambdas);
    r.number("counterexample.hx", c.counterexample_grid.hx);
    r.number("counterexample.hy", c.counterexample_grid.hy);

    r.number("regions.d", c.d);
    r.text("regions.solution", c.region_solution);
    r.number("regions.cap", c.region_cap);
    r.number("regions.hx", c.region_grid.hx);
    r.number("regions.hy", c.region_grid.hy);

    r.text("average.solution", c.average_solution);
    r.number("average.z", c.z);
    r.number("average.hx", c.average_grid.hx);
    r.number("average.hy", c.average_grid.hy);

    r.check_unknown();

    // Module-level preconditions.
    guard(r, "domain", [&] { c.domain.validate(); });
    if (c.dim < 2)
    {
        r.problem("operator.dim: N must be at least 2");
    }
    c.sub = {c.domain.x_lo_inner, c.domain.x_hi_inner, c.domain.inner_radius};
    if (c.start.empty())
    {
        c.start.assign(c.dim, 0.0);
    }
    if (c.evaluate_start.empty())
    {
        c.evaluate_start.assign(c.dim, 0.0);
    }
    if (c.start.size() != c.dim)
    {
        r.problem("simulate.start: expected " + std::to_string(c.dim) + " coordinates");
    }
    if (c.evaluate_start.size() != c.dim)
    {
        r.problem("evaluate.start: expected " + std::to_string(c.dim) + " coordinates");
    }
    if (c.r < 0 || c.r > max_hormander_order)
    {
        r.problem("check.r: must lie in [0, " + std::to_string(max_hormander_order) + "]");
    }
    if (c.bins < 1)
    {
        r.problem("simulate.bins: must be at least 1");
    }
    if (!(c.z > 0.0 && c.z <= 1.0 / 3.0 + 1e-15))
    {
        r.problem("average.z: must lie in (0, 1/3]");
    }
    if (!(c.d > 0.0))
    {
        r.problem("regions.d: must be positive");
    }
    for (double lambda : c.lambdas)
    {
        if (!(lambda > 0.0))
        {
            r.problem("counterexample.lambdas: values must be positive");
            break;
        }
    }
    static const std::set<std::string> families{"constants", "kolmogorov", "catalog",
                                                "random", "shipped", "counterexample"};
    if (!families.count(c.family))
    {
        r.problem("harnack.family: expected constants, kolmogorov, catalog, random, shipped "
                  "or counterexample");
    }
    if (c.family == "catalog" && c.family_solutions.empty())
    {
        r.problem("harnack.solutions: the catalog family needs at least one solution");
    }
    for (const GridSpec* g : {&c.evaluate_grid, &c.solution_grid, &c.family_field_grid,
                              &c.scan_grid, &c.counterexample_grid, &c.region_grid,
                              &c.average_grid})
    {
        if (!(g->hx > 0.0 && g->hy > 0.0))
        {
            r.problem("grid steps must be positive");
            break;
        }
    }
    if (c.solution_paths < 1 || c.family_paths < 1)
    {
        r.problem("path counts must be at least 1");
    }
    if (r.problems().empty())
    {
        guard(r, "operator", [&] {
            OperatorSpec op = c.make_operator();
            c.sim.validate(op, c.domain);
        });
    }
    if (!r.problems().empty())
    {
        throw ConfigError(r.problems());
    }
    return c;
}

} // namespace harnack::cli
