#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace harnack {

/// Function of a point (x, y1, ..., y{N-1}).
using PointFunction = std::function<double(std::span<const double>)>;

/// Uniform axis with `count` nodes from lo to hi inclusive.
struct Axis
{
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;

    double step() const { return (hi - lo) / static_cast<double>(count - 1); }
    double coord(std::size_t i) const;

    /// Axis covering [lo, hi] whose spacing is as close to `step` as the
    /// interval length allows.
    static Axis from_step(double lo, double hi, double step);
};

/*!
 * Function sampled on a tensor grid over a cylinder box.
 *
 * Axis 0 is x; axes 1.. are y1.. . Storage is row-major with x slowest.
 * Nodes that carry no value (for instance the boundary layer of a residual)
 * hold NaN.
 */
class ScalarField
{
  public:
    ScalarField() = default;
    explicit ScalarField(std::vector<Axis> axes, double fill = 0.0);

    static ScalarField sample(std::vector<Axis> axes, const PointFunction& f);

    std::size_t dim() const { return axes_.size(); }
    std::size_t size() const { return values_.size(); }
    const std::vector<Axis>& axes() const { return axes_; }

    double& operator[](std::size_t flat) { return values_[flat]; }
    double operator[](std::size_t flat) const { return values_[flat]; }
    std::span<const double> values() const { return values_; }

    std::size_t flat_index(std::span<const std::size_t> index) const;
    std::vector<std::size_t> multi_index(std::size_t flat) const;
    std::vector<double> node(std::size_t flat) const;
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    bool contains(std::span<const double> point) const;

    /// Multilinear interpolation; throws std::out_of_range outside the box.
    double interpolate(std::span<const double> point) const;

  private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::vector<double> values_;
};

/// Largest |value| over nodes that carry a value.
double max_abs(const ScalarField& f);

/// "%.17g" formatting shared by every CSV writer.
std::string format_real(double v);

/// CSV with header x,y1,...,value; absent nodes are written as "nan".
void write_csv(std::ostream& os, const ScalarField& f);

/// JSON grid metadata for a field's CSV companion file.
std::string grid_json(const ScalarField& f);

} // namespace harnack
