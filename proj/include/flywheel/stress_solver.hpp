#pragma once

#include "flywheel/bspline.hpp"
#include "flywheel/flywheel_model.hpp"

#include <span>
#include <vector>

namespace flywheel {

/// One-sided stencil used for dZ/du at the inner and outer boundary nodes.
enum class BoundaryStencil {
    first_order,   // (Z1 - Z0)/h and (ZN - ZN-1)/h
    second_order,  // (-3 Z0 + 4 Z1 - Z2)/(2h) and mirror
};

struct SolverOptions {
    double step = 0.01;  // uniform spacing h in the curve parameter u
    BoundaryStencil boundary = BoundaryStencil::second_order;
};

/// Coefficients of C Z'' + D Z' + E Z = F, primes being d/du.
struct OdeCoefficients {
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    double f = 0.0;
};

/// Per-node solution of the stress-function boundary value problem.
struct StressField {
    std::vector<double> u;
    std::vector<double> radius;       // m
    std::vector<double> thickness;    // m
    std::vector<double> z;            // N, Z = t r sigma_r
    std::vector<double> sigma_r;      // Pa
    std::vector<double> sigma_theta;  // Pa
    std::vector<double> sigma_vm;     // Pa

    std::size_t size() const noexcept { return u.size(); }
};

/// Parametric ODE coefficients from profile values and derivatives at one point.
/// Throws GeometryError when dr/du <= 0 or t <= 0.
OdeCoefficients ode_coefficients(const bspline::Point& p, const bspline::Derivatives& d, const FlywheelSpec& spec);

OdeCoefficients ode_coefficients(const bspline::ProfileCurve& curve, const FlywheelSpec& spec, double u);

/// Plane-stress Von-Mises equivalent stress.
double von_mises(double sigma_r, double sigma_theta);

/// Thomas algorithm for a tridiagonal system; lower[0] and upper[n-1] are ignored.
/// Throws NumericalError on a vanishing pivot or non-finite result.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// Finite-difference solve of the stress function with Z = 0 at both radii, followed by
/// radial, tangential and Von-Mises stress recovery at every node.
StressField assemble_and_solve(const bspline::ProfileCurve& curve, const FlywheelSpec& spec,
                               const SolverOptions& options = {});

double max_von_mises(const StressField& field);

/// Caches the grid-dependent geometry (radius, its derivatives and the thickness basis
/// at every node) for a fixed set of control radii, so repeated solves for different
/// thickness vectors only redo the O(N) assembly and tridiagonal solve.
class StressSolver {
public:
    StressSolver(std::span<const double> control_radii, const FlywheelSpec& spec, const SolverOptions& options = {});

    /// Radii from `control_radii(spec)`.
    explicit StressSolver(const FlywheelSpec& spec, const SolverOptions& options = {});

    StressField solve(std::span<const double> thickness) const;
    double max_von_mises(std::span<const double> thickness) const;

    std::size_t node_count() const noexcept { return u_.size(); }
    const SolverOptions& options() const noexcept { return options_; }

private:
    void solve_into(std::span<const double> thickness, StressField& out) const;

    FlywheelSpec spec_;
    SolverOptions options_;
    int n_points_ = 0;
    std::vector<double> u_;
    std::vector<double> r_, dr_, d2r_;
    std::vector<double> basis_;   // node-major, n_points_ entries per node
    std::vector<double> dbasis_;
};

} // namespace flywheel
