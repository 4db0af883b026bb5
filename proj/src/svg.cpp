#include "harnack/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace harnack {

namespace {

constexpr int width = 640;
constexpr int height = 480;
constexpr int margin = 60;

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Piecewise-linear approximation of the viridis colormap.
std::string color(double t)
{
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    double f = t - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

void header(std::ostringstream& os, const std::string& title)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";
}

} // namespace

std::string heatmap_svg(const ScalarField& field, const std::string& title)
{
    if (field.dim() != 2)
    {
        throw std::invalid_argument("heatmap needs a two-dimensional field");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : field.values())
    {
        if (!std::isnan(v))
        {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    const Axis& ax = field.axes()[0];
    const Axis& ay = field.axes()[1];
    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    const double cw = plot_w / static_cast<double>(ax.count);
    const double ch = plot_h / static_cast<double>(ay.count);

    std::ostringstream os;
    header(os, title);
    for (std::size_t i = 0; i < field.size(); ++i)
    {
        if (std::isnan(field[i]))
        {
            continue;
        }
        auto idx = field.multi_index(i);
        double px = margin + static_cast<double>(idx[0]) * cw;
        double py = margin + plot_h - static_cast<double>(idx[1] + 1) * ch;
        os << "<rect x=\"" << fixed(px) << "\" y=\"" << fixed(py) << "\" width=\""
           << fixed(cw + 0.05) << "\" height=\"" << fixed(ch + 0.05) << "\" fill=\""
           << color((field[i] - lo) / span) << "\"/>\n";
    }
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 20
       << "\" text-anchor=\"middle\">x in [" << label(ax.lo) << ", " << label(ax.hi)
       << "]</text>\n"
       << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 "
       << height / 2 << ")\" text-anchor=\"middle\">y1 in [" << label(ay.lo) << ", "
       << label(ay.hi) << "]</text>\n"
       << "<text x=\"" << width - margin << "\" y=\"" << height - 20
       << "\" text-anchor=\"end\">min " << label(lo) << "  max " << label(hi)
       << "</text>\n</svg>\n";
    return os.str();
}

std::string line_plot_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label, bool log_y)
{
    if (xs.empty() || xs.size() != ys.size())
    {
        throw std::invalid_argument("line plot needs matching nonempty series");
    }
    auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };
    auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    double xmin = *xmin_it, xmax = *xmax_it;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (double v : ys)
    {
        ymin = std::min(ymin, ty(v));
        ymax = std::max(ymax, ty(v));
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return margin + plot_h - (ty(y) - ymin) / (ymax - ymin) * plot_h; };

    std::ostringstream os;
    header(os, title);
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#888\"/>\n<polyline fill=\"none\" stroke=\"#3b528b\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        os << (i ? " " : "") << fixed(px(xs[i])) << "," << fixed(py(ys[i]));
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        os << "<circle cx=\"" << fixed(px(xs[i])) << "\" cy=\"" << fixed(py(ys[i]))
           << "\" r=\"4\" fill=\"#21918c\"><title>" << label(xs[i]) << ": "
           << label(ys[i]) << "</title></circle>\n";
    }
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 20
       << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
       << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 "
       << height / 2 << ")\" text-anchor=\"middle\">" << y_label
       << (log_y ? " (log10)" : "") << "</text>\n"
       << "<text x=\"" << margin << "\" y=\"" << margin - 6 << "\">"
       << label(log_y ? std::pow(10.0, ymax) : ymax) << "</text>\n"
       << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\">"
       << label(log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n</svg>\n";
    return os.str();
}

} // namespace harnack
