#pragma once

#include <span>
#include <vector>

namespace flywheel::bspline {

inline constexpr int kCubicOrder = 4;

/// A point of the (radius, thickness) profile plane, in meters.
struct Point {
    double r = 0.0;
    double t = 0.0;
};

/// Parametric derivatives of the profile at one value of u.
struct Derivatives {
    double dr = 0.0;
    double dt = 0.0;
    double d2r = 0.0;
    double d2t = 0.0;
};

/// Basis function values and first/second derivatives of every control point at one u.
/// Entry i belongs to control point i (0-based).
struct BasisRow {
    std::vector<double> value;
    std::vector<double> d1;
    std::vector<double> d2;
};

/// Clamped (nonperiodic) knot vector with n + k entries:
///   v_i = 0 for i < k, i - k + 1 for k <= i <= n, n - k + 1 for i > n.
/// Throws ParameterError unless n >= k >= 2.
std::vector<double> knot_vector(int n, int k);

/// Cox-de Boor recursion for N_{i,k}(u) over `knots` (0-based i).
/// Base intervals are half-open except the last non-empty one, which is closed at the
/// upper end so the curve is defined at u = S. 0/0 terms evaluate to 0.
/// Throws DomainError if u lies outside [knots.front(), knots.back()].
double basis(std::span<const double> knots, int i, int k, double u);

/// All n basis values together with their first two u-derivatives.
BasisRow basis_row(std::span<const double> knots, int n, int k, double u);

/// Nonperiodic B-spline over (r_i, t_i) control points.
class ProfileCurve {
public:
    /// Requires at least `order` points and strictly increasing radii.
    explicit ProfileCurve(std::vector<Point> control_points, int order = kCubicOrder);

    /// Builds the points from separate radius/thickness sequences of equal length.
    static ProfileCurve from_coordinates(std::span<const double> radii,
                                         std::span<const double> thicknesses,
                                         int order = kCubicOrder);

    int size() const noexcept { return static_cast<int>(points_.size()); }
    int order() const noexcept { return order_; }
    /// Upper parameter bound S = n - k + 1.
    double span() const noexcept { return span_; }
    /// Number of polynomial segments (one per unit knot interval).
    int segment_count() const noexcept { return size() - order_ + 1; }

    const std::vector<Point>& control_points() const noexcept { return points_; }
    const std::vector<double>& knots() const noexcept { return knots_; }

    Point eval(double u) const;
    Derivatives eval_derivatives(double u) const;

    /// 0-based index of the segment whose half-open interval holds u (last one closed).
    int segment_of(double u) const;

private:
    std::vector<Point> points_;
    int order_;
    std::vector<double> knots_;
    double span_;
};

} // namespace flywheel::bspline
