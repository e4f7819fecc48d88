#pragma once

#include "flywheel/bspline.hpp"

#include <span>
#include <vector>

namespace flywheel {

/// Material, geometry, operating point and constraint limits. SI units throughout.
/// Defaults are grey cast iron on the 8-point thresher flywheel.
struct FlywheelSpec {
    double density = 7250.0;           // kg/m^3
    double elastic_modulus = 210e9;    // Pa
    double poisson_ratio = 0.3;
    double inner_radius = 0.06;        // m
    double outer_radius = 0.5;         // m
    double angular_velocity = 65.45;   // rad/s
    double max_mass = 115.0;           // kg
    double allowable_stress = 6.4e6;   // Pa
    int n_control_points = 8;

    /// Throws ParameterError on violated invariants. Zero density or speed are accepted
    /// (they give a massless / non-rotating wheel); negative values are not.
    void validate() const;
};

/// Equally spaced control radii r_i = R1 + (R2 - R1)(i - 1)/(n - 1).
std::vector<double> control_radii(const FlywheelSpec& spec);

/// Cubic profile through the spec's control radii with the given thicknesses.
bspline::ProfileCurve make_profile(const FlywheelSpec& spec, std::span<const double> thickness);

/// a_i such that M(x) = sum a_i t_i (kg per meter of thickness).
std::vector<double> mass_coefficients(const FlywheelSpec& spec);

/// b_i such that E_k(x) = sum b_i t_i (J per meter of thickness).
std::vector<double> energy_coefficients(const FlywheelSpec& spec);

/// Mass and kinetic energy are linear in the thickness vector once the radii are fixed,
/// so both reduce to dot products with coefficients computed once per spec.
class FlywheelModel {
public:
    explicit FlywheelModel(FlywheelSpec spec);

    const FlywheelSpec& spec() const noexcept { return spec_; }
    const std::vector<double>& radii() const noexcept { return radii_; }
    const std::vector<double>& mass_coefficients() const noexcept { return mass_coeff_; }
    const std::vector<double>& energy_coefficients() const noexcept { return energy_coeff_; }

    double mass(std::span<const double> thickness) const;
    double kinetic_energy(std::span<const double> thickness) const;

private:
    FlywheelSpec spec_;
    std::vector<double> radii_;
    std::vector<double> mass_coeff_;
    std::vector<double> energy_coeff_;
};

double mass(std::span<const double> thickness, const FlywheelSpec& spec);
double kinetic_energy(std::span<const double> thickness, const FlywheelSpec& spec);

} // namespace flywheel
