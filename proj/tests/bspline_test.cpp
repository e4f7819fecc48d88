#include "flywheel/bspline.hpp"
#include "flywheel/errors.hpp"
#include "flywheel/flywheel_model.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace flywheel;
using namespace flywheel::bspline;

namespace {

ProfileCurve thresher_curve(std::vector<double> t = {0.0296, 0.01, 0.01, 0.01, 0.01, 0.01, 0.0226, 0.06}) {
    return make_profile(FlywheelSpec{}, t);
}

// Independent per-segment route: Lagrange cubic through four eval() samples of a segment,
// differentiated in closed form.
struct SegmentCubic {
    double a0, a1, a2, a3;  // in local s = u - lo

    SegmentCubic(const ProfileCurve& c, double lo, bool radius) {
        std::array<double, 4> s{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
        std::array<double, 4> y{};
        for (int i = 0; i < 4; ++i) {
            const Point p = c.eval(lo + s[i]);
            y[i] = radius ? p.r : p.t;
        }
        // Newton divided differences -> monomial coefficients.
        const double d01 = (y[1] - y[0]) / (s[1] - s[0]);
        const double d12 = (y[2] - y[1]) / (s[2] - s[1]);
        const double d23 = (y[3] - y[2]) / (s[3] - s[2]);
        const double d012 = (d12 - d01) / (s[2] - s[0]);
        const double d123 = (d23 - d12) / (s[3] - s[1]);
        const double d0123 = (d123 - d012) / (s[3] - s[0]);
        // y = y0 + d01 s + d012 s(s-s1) + d0123 s(s-s1)(s-s2)
        a3 = d0123;
        a2 = d012 - d0123 * (s[1] + s[2]);
        a1 = d01 - d012 * s[1] + d0123 * s[1] * s[2];
        a0 = y[0];
    }
    double d1(double s) const { return a1 + 2 * a2 * s + 3 * a3 * s * s; }
    double d2(double s) const { return 2 * a2 + 6 * a3 * s; }
};

} // namespace

TEST_SUITE("bspline") {

TEST_CASE("knot vector follows the clamped three-case rule") {
    CHECK(knot_vector(8, 4) == std::vector<double>{0, 0, 0, 0, 1, 2, 3, 4, 5, 5, 5, 5});
    CHECK(knot_vector(4, 4) == std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1});

    const auto v = knot_vector(8, 4);
    CHECK(std::count(v.begin(), v.end(), 0.0) == 4);
    CHECK(std::count(v.begin(), v.end(), 5.0) == 4);
    CHECK(std::is_sorted(v.begin(), v.end()));

    CHECK_THROWS_AS(knot_vector(3, 4), ParameterError);
    CHECK_THROWS_AS(knot_vector(8, 1), ParameterError);
}

TEST_CASE("order-1 basis is the half-open indicator, closed at the domain end") {
    const auto v = knot_vector(8, 4);
    // Base function over [v_4, v_5) = [1, 2).
    CHECK(basis(v, 4, 1, 1.0) == 1.0);
    CHECK(basis(v, 4, 1, 1.5) == 1.0);
    CHECK(basis(v, 4, 1, 2.0) == 0.0);
    CHECK(basis(v, 5, 1, 2.0) == 1.0);
    // Last non-empty interval [4, 5] includes u = S.
    CHECK(basis(v, 7, 1, 5.0) == 1.0);
    CHECK(basis(v, 8, 1, 5.0) == 0.0);
}

TEST_CASE("clamped endpoints select the first and last control point") {
    const auto v = knot_vector(8, 4);
    for (int i = 0; i < 8; ++i) {
        CHECK(basis(v, i, 4, 0.0) == (i == 0 ? 1.0 : 0.0));
        CHECK(basis(v, i, 4, 5.0) == (i == 7 ? 1.0 : 0.0));
    }
}

TEST_CASE("parameter outside [0, S] is a domain error") {
    const auto v = knot_vector(8, 4);
    CHECK_THROWS_AS(basis(v, 0, 4, -1e-12), DomainError);
    CHECK_THROWS_AS(basis(v, 0, 4, 5.0 + 1e-12), DomainError);
    const ProfileCurve c = thresher_curve();
    CHECK_THROWS_AS(c.eval(-0.1), DomainError);
    CHECK_THROWS_AS(c.eval_derivatives(5.1), DomainError);
    CHECK_THROWS_AS(basis(v, 9, 4, 1.0), ParameterError);
}

TEST_CASE("partition of unity on 1000 samples") {
    const auto v = knot_vector(8, 4);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    for (int s = 0; s < 1000; ++s) {
        const double u = s == 0 ? 0.0 : (s == 1 ? 5.0 : dist(rng));
        double sum = 0.0;
        for (int i = 0; i < 8; ++i) {
            sum += basis(v, i, 4, u);
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-12);
        const BasisRow row = basis_row(v, 8, 4, u);
        double row_sum = 0.0, d1_sum = 0.0, d2_sum = 0.0;
        for (int i = 0; i < 8; ++i) {
            row_sum += row.value[i];
            d1_sum += row.d1[i];
            d2_sum += row.d2[i];
            REQUIRE(std::abs(row.value[i] - basis(v, i, 4, u)) < 1e-14);
        }
        REQUIRE(std::abs(row_sum - 1.0) < 1e-12);
        REQUIRE(std::abs(d1_sum) < 1e-12);
        REQUIRE(std::abs(d2_sum) < 1e-11);
    }
}

TEST_CASE("endpoint interpolation") {
    const ProfileCurve c = thresher_curve();
    const Point p0 = c.eval(0.0);
    const Point pS = c.eval(c.span());
    CHECK(std::abs(p0.r - 0.06) < 1e-12);
    CHECK(std::abs(p0.t - 0.0296) < 1e-12);
    CHECK(std::abs(pS.r - 0.5) < 1e-12);
    CHECK(std::abs(pS.t - 0.06) < 1e-12);
}

TEST_CASE("segments match the per-segment polynomial forms") {
    const ProfileCurve c = thresher_curve();
    const auto& pts = c.control_points();
    double worst = 0.0;
    for (int s = 1; s <= 5; ++s) {
        for (int q = 0; q <= 100; ++q) {
            const double u = (s - 1) + q / 100.0;
            const auto w = test::segment_weights(s, u);
            double r = 0.0, t = 0.0, wsum = 0.0;
            for (int j = 0; j < 4; ++j) {
                r += w[j] * pts[s - 1 + j].r;
                t += w[j] * pts[s - 1 + j].t;
                wsum += w[j];
            }
            REQUIRE(std::abs(wsum - 1.0) < 1e-12);
            const Point p = c.eval(u);
            worst = std::max({worst, std::abs(p.r - r) / std::abs(r), std::abs(p.t - t) / std::abs(t)});
        }
    }
    CHECK(worst < 1e-3);
    CHECK(worst < 1e-12);
}

TEST_CASE("printed 4-digit coefficients round the exact fractions") {
    for (const auto& k : test::kPrintedCoefficients) {
        CAPTURE(k.printed);
        CHECK(std::abs(k.printed - k.exact) <= 5e-5);
        CHECK(std::round(k.exact * 1e4) / 1e4 == doctest::Approx(k.printed).epsilon(1e-12));
    }
}

TEST_CASE("segment 3 equals the exact-fraction polynomial") {
    const ProfileCurve c = thresher_curve();
    const auto& pts = c.control_points();
    for (double u : {2.0, 2.1, 2.5, 2.9}) {
        const test::ExactSegment3 seg(u);
        long double r = 0, dr = 0, d2r = 0;
        for (int j = 0; j < 4; ++j) {
            r += seg.w[j] * pts[2 + j].r;
            dr += seg.dw[j] * pts[2 + j].r;
            d2r += seg.d2w[j] * pts[2 + j].r;
        }
        const Derivatives d = c.eval_derivatives(u);
        CHECK(std::abs(c.eval(u).r - static_cast<double>(r)) < 1e-14);
        CHECK(std::abs(d.dr - static_cast<double>(dr)) < 1e-13);
        CHECK(std::abs(d.d2r - static_cast<double>(d2r)) < 1e-13);
    }
}

TEST_CASE("derivatives agree with finite differences and the per-segment cubic") {
    const ProfileCurve c = thresher_curve();
    const double h = 1e-6;
    for (int q = 1; q < 500; ++q) {
        const double u = 5.0 * q / 500.0;
        const Derivatives d = c.eval_derivatives(u);
        const double fd_r = (c.eval(u + h).r - c.eval(u - h).r) / (2 * h);
        REQUIRE(std::abs(d.dr - fd_r) / std::abs(d.dr) < 1e-6);
        const double fd_t = (c.eval(u + h).t - c.eval(u - h).t) / (2 * h);
        REQUIRE(std::abs(d.dt - fd_t) < 1e-6 * std::max(std::abs(d.dt), 1e-3));
    }
    for (int seg = 0; seg < c.segment_count(); ++seg) {
        const SegmentCubic r(c, seg, true);
        const SegmentCubic t(c, seg, false);
        for (double s : {0.1, 0.5, 0.9}) {
            const Derivatives d = c.eval_derivatives(seg + s);
            CHECK(d.dr == doctest::Approx(r.d1(s)).epsilon(1e-9));
            CHECK(d.d2r == doctest::Approx(r.d2(s)).epsilon(1e-7));
            CHECK(d.dt == doctest::Approx(t.d1(s)).epsilon(1e-9));
            CHECK(d.d2t == doctest::Approx(t.d2(s)).epsilon(1e-7));
        }
    }
}

TEST_CASE("constant thickness has zero thickness derivatives") {
    const ProfileCurve c = thresher_curve(std::vector<double>(8, 0.02));
    for (int q = 0; q <= 100; ++q) {
        const Derivatives d = c.eval_derivatives(0.05 * q);
        CHECK(std::abs(d.dt) < 1e-14);
        CHECK(std::abs(d.d2t) < 1e-13);
        CHECK(std::abs(c.eval(0.05 * q).t - 0.02) < 1e-15);
    }
}

TEST_CASE("equally spaced radii give a monotone but non-uniform r(u)") {
    const ProfileCurve c = thresher_curve();
    double min_dr = 1e300, max_dr = 0.0;
    for (int q = 0; q <= 5000; ++q) {
        const double dr = c.eval_derivatives(5.0 * q / 5000.0).dr;
        min_dr = std::min(min_dr, dr);
        max_dr = std::max(max_dr, dr);
    }
    CHECK(min_dr > 0.0);
    CHECK(max_dr - min_dr > 1e-3);
}

TEST_CASE("C2 continuity across segment joints") {
    const ProfileCurve c = thresher_curve();
    const double eps = 1e-10;
    for (int joint = 1; joint < c.segment_count(); ++joint) {
        const Point a = c.eval(joint - eps), b = c.eval(joint + eps);
        const Derivatives da = c.eval_derivatives(joint - eps), db = c.eval_derivatives(joint + eps);
        CHECK(std::abs(a.r - b.r) < 1e-9);
        CHECK(std::abs(a.t - b.t) < 1e-9);
        CHECK(std::abs(da.dr - db.dr) < 1e-9);
        CHECK(std::abs(da.dt - db.dt) < 1e-9);
        CHECK(std::abs(da.d2r - db.d2r) < 1e-9);
        CHECK(std::abs(da.d2t - db.d2t) < 1e-9);
        CHECK(c.segment_of(joint) == joint);
        CHECK(c.segment_of(joint - eps) == joint - 1);
    }
    CHECK(c.segment_of(c.span()) == c.segment_count() - 1);
}

TEST_CASE("profile rejects bad control polygons") {
    CHECK_THROWS_AS(ProfileCurve({{0.1, 0.02}, {0.2, 0.02}, {0.2, 0.02}, {0.3, 0.02}}), GeometryError);
    CHECK_THROWS_AS(ProfileCurve({{0.1, 0.02}, {0.2, 0.02}, {0.3, 0.02}}), ParameterError);
    const std::vector<double> r{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> t{0.1, 0.2};
    CHECK_THROWS_AS(ProfileCurve::from_coordinates(r, t), ParameterError);
}

TEST_CASE("single-segment curve with n = k") {
    const ProfileCurve c({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}});
    CHECK(c.span() == 1.0);
    CHECK(c.segment_count() == 1);
    // Bernstein cubic: p(0.5) = (p0 + 3 p1 + 3 p2 + p3) / 8.
    CHECK(c.eval(0.5).r == doctest::Approx(1.5));
    CHECK(c.eval(0.5).t == doctest::Approx(0.5));
}

} // TEST_SUITE
