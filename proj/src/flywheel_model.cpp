#include "flywheel/flywheel_model.hpp"

#include "flywheel/errors.hpp"
#include "flywheel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace flywheel {

namespace {

// Integrands are piecewise polynomials of degree <= 14 in u, so 16 points per segment
// integrate them exactly; the 32-point pass only guards against a broken rule.
constexpr int kQuadraturePoints = 16;
constexpr double kQuadratureAgreement = 1e-8;

template <class Radial>
std::vector<double> integrate_against_basis(const FlywheelSpec& spec, int points, Radial&& radial) {
    const std::vector<double> radii = control_radii(spec);
    const int n = spec.n_control_points;
    const std::vector<double> knots = bspline::knot_vector(n, bspline::kCubicOrder);
    const GaussRule rule = gauss_legendre(points);

    std::vector<double> coeff(static_cast<std::size_t>(n), 0.0);
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double lo = knots[s];
        const double hi = knots[s + 1];
        if (!(hi > lo)) {
            continue;
        }
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (int q = 0; q < points; ++q) {
            const double u = mid + half * rule.nodes[q];
            const bspline::BasisRow row = bspline::basis_row(knots, n, bspline::kCubicOrder, u);
            double r = 0.0;
            double dr = 0.0;
            for (int i = 0; i < n; ++i) {
                r += row.value[i] * radii[i];
                dr += row.d1[i] * radii[i];
            }
            const double w = half * rule.weights[q] * radial(r) * dr;
            for (int i = 0; i < n; ++i) {
                coeff[i] += w * row.value[i];
            }
        }
    }
    return coeff;
}

template <class Radial>
std::vector<double> checked_coefficients(const FlywheelSpec& spec, const char* what, Radial&& radial) {
    spec.validate();
    std::vector<double> coarse = integrate_against_basis(spec, kQuadraturePoints, radial);
    const std::vector<double> fine = integrate_against_basis(spec, 2 * kQuadraturePoints, radial);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const double scale = std::max(std::abs(fine[i]), std::numeric_limits<double>::min());
        const double rel = std::abs(coarse[i] - fine[i]) / scale;
        if (fine[i] != 0.0 && rel > kQuadratureAgreement) {
            std::ostringstream msg;
            msg << what << " coefficient " << i + 1 << " did not converge: " << coarse[i] << " (" << kQuadraturePoints
                << " pts) vs " << fine[i] << " (" << 2 * kQuadraturePoints << " pts), rel diff " << rel;
            throw NumericalError(msg.str());
        }
    }
    return coarse;
}

double dot(std::span<const double> coeff, std::span<const double> x, const char* what) {
    if (x.size() != coeff.size()) {
        throw ParameterError(std::string(what) + ": expected " + std::to_string(coeff.size()) +
                             " thickness values, got " + std::to_string(x.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += coeff[i] * x[i];
    }
    return acc;
}

} // namespace

void FlywheelSpec::validate() const {
    auto fail = [](const std::string& m) { throw ParameterError("flywheel spec: " + m); };
    if (!(inner_radius > 0.0 && outer_radius > inner_radius)) {
        fail("radii must satisfy 0 < inner_radius < outer_radius");
    }
    if (!(density >= 0.0) || !std::isfinite(density)) {
        fail("density must be finite and non-negative");
    }
    if (!(angular_velocity >= 0.0) || !std::isfinite(angular_velocity)) {
        fail("angular_velocity must be finite and non-negative");
    }
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5)) {
        fail("poisson_ratio must lie in [0, 0.5)");
    }
    if (!(max_mass > 0.0)) {
        fail("max_mass must be positive");
    }
    if (!(allowable_stress > 0.0)) {
        fail("allowable_stress must be positive");
    }
    if (n_control_points < bspline::kCubicOrder) {
        fail("n_control_points must be at least 4");
    }
}

std::vector<double> control_radii(const FlywheelSpec& spec) {
    const int n = spec.n_control_points;
    if (n < 2) {
        throw ParameterError("control_radii needs at least two control points");
    }
    std::vector<double> r(static_cast<std::size_t>(n));
    const double step = (spec.outer_radius - spec.inner_radius) / (n - 1);
    for (int i = 0; i < n; ++i) {
        r[i] = spec.inner_radius + step * i;
    }
    r.back() = spec.outer_radius;
    return r;
}

bspline::ProfileCurve make_profile(const FlywheelSpec& spec, std::span<const double> thickness) {
    const std::vector<double> radii = control_radii(spec);
    return bspline::ProfileCurve::from_coordinates(radii, thickness);
}

std::vector<double> mass_coefficients(const FlywheelSpec& spec) {
    const double scale = 2.0 * std::numbers::pi * spec.density;
    return checked_coefficients(spec, "mass", [scale](double r) { return scale * r; });
}

std::vector<double> energy_coefficients(const FlywheelSpec& spec) {
    const double scale = std::numbers::pi * spec.density * spec.angular_velocity * spec.angular_velocity;
    return checked_coefficients(spec, "energy", [scale](double r) { return scale * r * r * r; });
}

FlywheelModel::FlywheelModel(FlywheelSpec spec)
    : spec_(spec),
      radii_(control_radii(spec_)),
      mass_coeff_(flywheel::mass_coefficients(spec_)),
      energy_coeff_(flywheel::energy_coefficients(spec_)) {}

double FlywheelModel::mass(std::span<const double> thickness) const { return dot(mass_coeff_, thickness, "mass"); }

double FlywheelModel::kinetic_energy(std::span<const double> thickness) const {
    return dot(energy_coeff_, thickness, "kinetic_energy");
}

double mass(std::span<const double> thickness, const FlywheelSpec& spec) {
    return dot(mass_coefficients(spec), thickness, "mass");
}

double kinetic_energy(std::span<const double> thickness, const FlywheelSpec& spec) {
    return dot(energy_coefficients(spec), thickness, "kinetic_energy");
}

} // namespace flywheel
