#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harnack/harnack.hpp"
#include "harnack/operator.hpp"
#include "harnack/sde.hpp"

namespace harnack::cli {

/// Configuration problems, collected so that all of them are reported at once.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

  private:
    std::vector<std::string> problems_;
};

/// Flat "section.key" -> value map read from a sectioned key-value file.
using RawConfig = std::map<std::string, std::string>;

/*!
 * Parse lines of the form
 *
 *   [section]
 *   key = value      # comment
 *   ; comment
 *
 * ';' starts a comment only at the beginning of a line, so it can separate
 * list items. Keys before the first section header are rejected.
 */
RawConfig parse_config_text(std::istream& in, const std::string& origin);
RawConfig read_config_file(const std::filesystem::path& path);

/// Apply "section.key=value" overrides; later entries win.
void apply_overrides(RawConfig& raw, const std::vector<std::string>& overrides);

struct RunConfig
{
    // [operator]
    std::string beta = "y1";
    std::string gamma = "0";
    std::size_t dim = 2;
    // [domain]
    CylinderDomain domain;
    // [sim]
    SimConfig sim;
    // [check]
    int r = 2;
    double check_grid_step = 0.05;
    // [simulate]
    std::vector<double> start;
    std::size_t bins = 20;
    // [evaluate]
    std::string evaluate_u = "kolmogorov(10)";
    std::vector<double> evaluate_start;
    double evaluate_t = 0.5;
    bool sandwich = false;
    double k_sigma = 3.0;
    GridSpec evaluate_grid{0.05, 0.05};
    // [make_solution]
    std::string boundary_data = "x - y1^3/6 + 10";
    double t_solve = 2.0;
    std::size_t solution_paths = 1000;
    GridSpec solution_grid{0.5, 0.5};
    // [harnack]
    std::string family = "constants";
    std::vector<std::string> family_solutions;
    std::size_t family_size = 20;
    double family_t_solve = 1.0;
    std::size_t family_paths = 256;
    GridSpec family_field_grid{0.25, 0.25};
    GridSpec scan_grid{0.05, 0.05};
    Subcylinder sub;
    // [counterexample]
    std::vector<double> lambdas{1.0, 2.0, 4.0, 8.0};
    GridSpec counterexample_grid{0.05, 0.05};
    // [regions]
    double d = 0.5;
    std::string region_solution = "kolmogorov(10)";
    double region_cap = 1e6;
    GridSpec region_grid{0.05, 0.05};
    // [average]
    std::string average_solution = "kolmogorov(10)";
    double z = 1.0 / 3.0;
    GridSpec average_grid{0.05, 0.05};

    // Not part of the file.
    std::filesystem::path out_dir = "out";
    bool svg = false;

    /// Operator parsed from beta/gamma/dim on the configured domain.
    OperatorSpec make_operator() const;
};

/*!
 * Typed view of a raw configuration. Every problem (unknown keys, bad
 * numbers, failed module preconditions, unparsable expressions) is
 * collected into one ConfigError.
 */
RunConfig load_config(const RawConfig& raw);

} // namespace harnack::cli
