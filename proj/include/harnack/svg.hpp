#pragma once

#include <string>
#include <vector>

#include "harnack/field.hpp"

namespace harnack {

/// Heatmap of a two-dimensional (x, y1) field; NaN nodes are left blank.
std::string heatmap_svg(const ScalarField& field, const std::string& title);

/// Polyline of ys against xs with point markers.
std::string line_plot_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label, bool log_y);

} // namespace harnack
