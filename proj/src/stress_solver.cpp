#include "flywheel/stress_solver.hpp"

#include "flywheel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flywheel {

namespace {

int interval_count(double span, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ParameterError("solver step must be positive and finite");
    }
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 2.0) {
        std::ostringstream msg;
        msg << "solver step h = " << step << " must divide the parameter span " << span
            << " into an integer number (>= 2) of intervals";
        throw ParameterError(msg.str());
    }
    return static_cast<int>(rounded);
}

[[noreturn]] void geometry_failure(const char* what, double u, double value) {
    std::ostringstream msg;
    msg << what << " at u = " << u << " (value " << value << ")";
    throw GeometryError(msg.str());
}

} // namespace

OdeCoefficients ode_coefficients(const bspline::Point& p, const bspline::Derivatives& d, const FlywheelSpec& spec) {
    if (!(d.dr > 0.0)) {
        throw GeometryError("profile radius is not monotone: dr/du = " + std::to_string(d.dr));
    }
    if (!(p.t > 0.0)) {
        throw GeometryError("profile thickness must be positive: t = " + std::to_string(p.t));
    }
    const double nu = spec.poisson_ratio;
    const double rho_w2 = spec.density * spec.angular_velocity * spec.angular_velocity;
    const double r = p.r;
    const double t = p.t;
    const double dr2 = d.dr * d.dr;
    const double dr3 = dr2 * d.dr;

    OdeCoefficients k;
    k.c = r * r * d.dr;
    k.d = r * dr2 - r * r * d.d2r - (r * r / t) * d.dr * d.dt;
    k.e = nu * (r / t) * d.dt * dr2 - dr3;
    k.f = -(3.0 + nu) * rho_w2 * t * r * r * r * dr3;
    return k;
}

OdeCoefficients ode_coefficients(const bspline::ProfileCurve& curve, const FlywheelSpec& spec, double u) {
    return ode_coefficients(curve.eval(u), curve.eval_derivatives(u), spec);
}

double von_mises(double sigma_r, double sigma_theta) {
    return std::sqrt(std::max(0.0, sigma_r * sigma_r + sigma_theta * sigma_theta - sigma_r * sigma_theta));
}

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw ParameterError("tridiagonal system bands must all have the same length");
    }
    std::vector<double> x(n);
    if (n == 0) {
        return x;
    }
    std::vector<double> c_star(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(diag[i]) + std::abs(lower[i]) + std::abs(upper[i]));
    }
    const double tiny = 1e-14 * scale;

    double pivot = diag[0];
    for (std::size_t i = 0;; ++i) {
        if (!(std::abs(pivot) > tiny)) {
            std::ostringstream msg;
            msg << "tridiagonal solve: near-zero pivot " << pivot << " at row " << i << " (matrix scale " << scale
                << ")";
            throw NumericalError(msg.str());
        }
        c_star[i] = upper[i] / pivot;
        x[i] = (rhs[i] - (i > 0 ? lower[i] * x[i - 1] : 0.0)) / pivot;
        if (i + 1 == n) {
            break;
        }
        pivot = diag[i + 1] - lower[i + 1] * c_star[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c_star[i] * x[i + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) {
            throw NumericalError("tridiagonal solve produced a non-finite value at row " + std::to_string(i));
        }
    }
    return x;
}

StressSolver::StressSolver(std::span<const double> control_radii, const FlywheelSpec& spec,
                           const SolverOptions& options)
    : spec_(spec), options_(options), n_points_(static_cast<int>(control_radii.size())) {
    spec_.validate();
    const std::vector<double> knots = bspline::knot_vector(n_points_, bspline::kCubicOrder);
    for (int i = 1; i < n_points_; ++i) {
        if (!(control_radii[i] > control_radii[i - 1])) {
            throw GeometryError("control radii must be strictly increasing");
        }
    }
    const double span = knots.back();
    const int intervals = interval_count(span, options_.step);
    const std::size_t nodes = static_cast<std::size_t>(intervals) + 1;

    u_.resize(nodes);
    r_.resize(nodes);
    dr_.resize(nodes);
    d2r_.resize(nodes);
    basis_.resize(nodes * n_points_);
    dbasis_.resize(nodes * n_points_);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double u = j + 1 == nodes ? span : span * static_cast<double>(j) / intervals;
        const bspline::BasisRow row = bspline::basis_row(knots, n_points_, bspline::kCubicOrder, u);
        double r = 0.0, dr = 0.0, d2r = 0.0;
        for (int i = 0; i < n_points_; ++i) {
            r += row.value[i] * control_radii[i];
            dr += row.d1[i] * control_radii[i];
            d2r += row.d2[i] * control_radii[i];
            basis_[j * n_points_ + i] = row.value[i];
            dbasis_[j * n_points_ + i] = row.d1[i];
        }
        if (!(dr > 0.0)) {
            geometry_failure("profile radius is not monotone (dr/du <= 0)", u, dr);
        }
        u_[j] = u;
        r_[j] = r;
        dr_[j] = dr;
        d2r_[j] = d2r;
    }
}

StressSolver::StressSolver(const FlywheelSpec& spec, const SolverOptions& options)
    : StressSolver(control_radii(spec), spec, options) {}

StressField StressSolver::solve(std::span<const double> thickness) const {
    StressField field;
    solve_into(thickness, field);
    return field;
}

double StressSolver::max_von_mises(std::span<const double> thickness) const {
    StressField field;
    solve_into(thickness, field);
    return flywheel::max_von_mises(field);
}

void StressSolver::solve_into(std::span<const double> thickness, StressField& out) const {
    if (static_cast<int>(thickness.size()) != n_points_) {
        throw ParameterError("stress solve: expected " + std::to_string(n_points_) + " thickness values, got " +
                             std::to_string(thickness.size()));
    }
    const std::size_t nodes = u_.size();
    const std::size_t last = nodes - 1;
    const double h = u_[last] / static_cast<double>(last);

    out.u = u_;
    out.radius = r_;
    out.thickness.assign(nodes, 0.0);
    std::vector<double> dt(nodes, 0.0);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double* n0 = &basis_[j * n_points_];
        const double* n1 = &dbasis_[j * n_points_];
        double t = 0.0, tu = 0.0;
        for (int i = 0; i < n_points_; ++i) {
            t += n0[i] * thickness[i];
            tu += n1[i] * thickness[i];
        }
        if (!(t > 0.0)) {
            geometry_failure("profile thickness must be positive", u_[j], t);
        }
        out.thickness[j] = t;
        dt[j] = tu;
    }

    // Interior unknowns Z_1 .. Z_{N-1}; Z_0 = Z_N = 0.
    const std::size_t m = nodes - 2;
    std::vector<double> lower(m), diag(m), upper(m), rhs(m);
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 0.5 / h;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = k + 1;
        const OdeCoefficients co = ode_coefficients({r_[j], out.thickness[j]}, {dr_[j], dt[j], d2r_[j], 0.0}, spec_);
        lower[k] = co.c * inv_h2 - co.d * inv_2h;
        diag[k] = -2.0 * co.c * inv_h2 + co.e;
        upper[k] = co.c * inv_h2 + co.d * inv_2h;
        rhs[k] = co.f;
    }
    const std::vector<double> interior = solve_tridiagonal(lower, diag, upper, rhs);

    out.z.assign(nodes, 0.0);
    std::copy(interior.begin(), interior.end(), out.z.begin() + 1);
    const auto& z = out.z;

    std::vector<double> dz(nodes);
    for (std::size_t j = 1; j < last; ++j) {
        dz[j] = (z[j + 1] - z[j - 1]) * inv_2h;
    }
    if (options_.boundary == BoundaryStencil::first_order) {
        dz[0] = (z[1] - z[0]) / h;
        dz[last] = (z[last] - z[last - 1]) / h;
    } else {
        dz[0] = (-3.0 * z[0] + 4.0 * z[1] - z[2]) * inv_2h;
        dz[last] = (3.0 * z[last] - 4.0 * z[last - 1] + z[last - 2]) * inv_2h;
    }

    const double rho_w2 = spec_.density * spec_.angular_velocity * spec_.angular_velocity;
    out.sigma_r.resize(nodes);
    out.sigma_theta.resize(nodes);
    out.sigma_vm.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double r = r_[j];
        const double t = out.thickness[j];
        const double dz_dr = dz[j] / dr_[j];
        out.sigma_r[j] = z[j] / (t * r);
        out.sigma_theta[j] = (dz_dr + rho_w2 * r * r * t) / t;
        out.sigma_vm[j] = von_mises(out.sigma_r[j], out.sigma_theta[j]);
    }
}

StressField assemble_and_solve(const bspline::ProfileCurve& curve, const FlywheelSpec& spec,
                               const SolverOptions& options) {
    if (curve.order() != bspline::kCubicOrder) {
        throw ParameterError("stress solver expects a cubic profile curve");
    }
    std::vector<double> radii, thickness;
    for (const auto& p : curve.control_points()) {
        radii.push_back(p.r);
        thickness.push_back(p.t);
    }
    return StressSolver(radii, spec, options).solve(thickness);
}

double max_von_mises(const StressField& field) {
    double best = 0.0;
    for (double s : field.sigma_vm) {
        best = std::max(best, s);
    }
    return best;
}

} // namespace flywheel
