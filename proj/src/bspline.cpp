#include "flywheel/bspline.hpp"

#include "flywheel/errors.hpp"

#include <algorithm>
#include <sstream>
#include <string>

namespace flywheel::bspline {

namespace {

void require_in_domain(std::span<const double> knots, double u) {
    if (knots.empty() || !(u >= knots.front() && u <= knots.back())) {
        std::ostringstream msg;
        msg << "curve parameter u = " << u << " outside [" << (knots.empty() ? 0.0 : knots.front()) << ", "
            << (knots.empty() ? 0.0 : knots.back()) << "]";
        throw DomainError(msg.str());
    }
}

// Reciprocal knot gap with the 0/0 -> 0 convention for repeated knots.
double inv_gap(double lo, double hi) { return hi > lo ? 1.0 / (hi - lo) : 0.0; }

bool in_base_interval(std::span<const double> knots, int i, double u) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    if (lo <= u && u < hi) {
        return true;
    }
    // Close the last non-empty interval at the upper end of the domain.
    return u == knots.back() && hi == knots.back() && lo < hi;
}

} // namespace

std::vector<double> knot_vector(int n, int k) {
    if (k < 2 || n < k) {
        throw ParameterError("knot_vector requires n >= k >= 2 (got n = " + std::to_string(n) +
                             ", k = " + std::to_string(k) + ")");
    }
    std::vector<double> knots(static_cast<std::size_t>(n + k));
    for (int i = 0; i < n + k; ++i) {
        if (i < k) {
            knots[i] = 0.0;
        } else if (i <= n) {
            knots[i] = static_cast<double>(i - k + 1);
        } else {
            knots[i] = static_cast<double>(n - k + 1);
        }
    }
    return knots;
}

double basis(std::span<const double> knots, int i, int k, double u) {
    const int m = static_cast<int>(knots.size());
    if (k < 1 || i < 0 || i + k >= m) {
        throw ParameterError("basis index out of range (i = " + std::to_string(i) + ", k = " + std::to_string(k) +
                             ", " + std::to_string(m) + " knots)");
    }
    require_in_domain(knots, u);
    if (k == 1) {
        return in_base_interval(knots, i, u) ? 1.0 : 0.0;
    }
    const double left = (u - knots[i]) * inv_gap(knots[i], knots[i + k - 1]);
    const double right = (knots[i + k] - u) * inv_gap(knots[i + 1], knots[i + k]);
    double value = 0.0;
    if (left != 0.0) {
        value += left * basis(knots, i, k - 1, u);
    }
    if (right != 0.0) {
        value += right * basis(knots, i + 1, k - 1, u);
    }
    return value;
}

BasisRow basis_row(std::span<const double> knots, int n, int k, double u) {
    const int m = static_cast<int>(knots.size());
    if (k < 2 || n < k || m != n + k) {
        throw ParameterError("basis_row: knot count must equal n + k with n >= k >= 2");
    }
    require_in_domain(knots, u);

    // table[p][i] = N_{i,p}(u) for i in [0, m - p).
    std::vector<std::vector<double>> table(static_cast<std::size_t>(k + 1));
    table[1].resize(static_cast<std::size_t>(m - 1));
    for (int i = 0; i < m - 1; ++i) {
        table[1][i] = in_base_interval(knots, i, u) ? 1.0 : 0.0;
    }
    for (int p = 2; p <= k; ++p) {
        auto& row = table[p];
        const auto& prev = table[p - 1];
        row.resize(static_cast<std::size_t>(m - p));
        for (int i = 0; i < m - p; ++i) {
            row[i] = (u - knots[i]) * inv_gap(knots[i], knots[i + p - 1]) * prev[i] +
                     (knots[i + p] - u) * inv_gap(knots[i + 1], knots[i + p]) * prev[i + 1];
        }
    }

    // d-th derivative of N_{i,p} from the order p - 1 functions.
    auto derivative = [&](auto&& self, int d, int p, int i) -> double {
        if (d == 0) {
            return table[p][i];
        }
        const double a = inv_gap(knots[i], knots[i + p - 1]);
        const double b = inv_gap(knots[i + 1], knots[i + p]);
        double acc = 0.0;
        if (a != 0.0) {
            acc += a * self(self, d - 1, p - 1, i);
        }
        if (b != 0.0) {
            acc -= b * self(self, d - 1, p - 1, i + 1);
        }
        return (p - 1) * acc;
    };

    BasisRow out;
    out.value.assign(table[k].begin(), table[k].begin() + n);
    out.d1.resize(static_cast<std::size_t>(n));
    out.d2.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.d1[i] = derivative(derivative, 1, k, i);
        out.d2[i] = k > 2 ? derivative(derivative, 2, k, i) : 0.0;
    }
    return out;
}

ProfileCurve::ProfileCurve(std::vector<Point> control_points, int order)
    : points_(std::move(control_points)), order_(order) {
    const int n = static_cast<int>(points_.size());
    knots_ = knot_vector(n, order_);
    span_ = knots_.back();
    for (int i = 1; i < n; ++i) {
        if (!(points_[i].r > points_[i - 1].r)) {
            throw GeometryError("control radii must be strictly increasing (r[" + std::to_string(i) +
                                "] <= r[" + std::to_string(i - 1) + "])");
        }
    }
}

ProfileCurve ProfileCurve::from_coordinates(std::span<const double> radii, std::span<const double> thicknesses,
                                            int order) {
    if (radii.size() != thicknesses.size()) {
        throw ParameterError("radius and thickness sequences differ in length (" + std::to_string(radii.size()) +
                             " vs " + std::to_string(thicknesses.size()) + ")");
    }
    std::vector<Point> pts(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        pts[i] = {radii[i], thicknesses[i]};
    }
    return ProfileCurve(std::move(pts), order);
}

Point ProfileCurve::eval(double u) const {
    const BasisRow row = basis_row(knots_, size(), order_, u);
    Point p;
    for (int i = 0; i < size(); ++i) {
        p.r += row.value[i] * points_[i].r;
        p.t += row.value[i] * points_[i].t;
    }
    return p;
}

Derivatives ProfileCurve::eval_derivatives(double u) const {
    const BasisRow row = basis_row(knots_, size(), order_, u);
    Derivatives d;
    for (int i = 0; i < size(); ++i) {
        d.dr += row.d1[i] * points_[i].r;
        d.dt += row.d1[i] * points_[i].t;
        d.d2r += row.d2[i] * points_[i].r;
        d.d2t += row.d2[i] * points_[i].t;
    }
    return d;
}

int ProfileCurve::segment_of(double u) const {
    require_in_domain(knots_, u);
    // Knot span index s with v_s <= u < v_{s+1}; segments start at s = k - 1.
    const auto first = knots_.begin() + (order_ - 1);
    const auto last = knots_.begin() + size();
    const auto it = std::upper_bound(first, last, u);
    const int s = static_cast<int>(it - knots_.begin()) - 1;
    return std::min(s, size() - 1) - (order_ - 1);
}

} // namespace flywheel::bspline
