#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "magneto/geometry.hpp"

using namespace magneto;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("torus point reduction and minimal deltas") {
    const Vec2 p{0.3, 0.7};
    CHECK(reduce_torus(p + Vec2{2.0, -3.0}).x == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(reduce_torus(p + Vec2{2.0, -3.0}).y == doctest::Approx(0.7).epsilon(1e-15));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    for (int t = 0; t < 200; ++t) {
        const Vec2 a{uni(rng), uni(rng)}, b{uni(rng), uni(rng)};
        const Vec2 d = torus_delta(a, b);
        CHECK(d.x >= -0.5);
        CHECK(d.x < 0.5);
        CHECK(d.y >= -0.5);
        CHECK(d.y < 0.5);
        // difference is congruent mod 1
        CHECK(wrap_unit(a.x - b.x - d.x) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("flat metric has vanishing Christoffel symbols") {
    const MetricField m = make_metric("flat", {});
    const ChristoffelSymbols g = christoffel(m, {0.37, 0.81});
    for (int i = 0; i < 2; ++i) {
        CHECK(g[i].xx == 0.0);
        CHECK(g[i].xy == 0.0);
        CHECK(g[i].yx == 0.0);
        CHECK(g[i].yy == 0.0);
    }
}

TEST_CASE("conformal Christoffels match the closed form") {
    const double eps = 0.12;
    const MetricField m = make_metric("conformal", {eps});
    // oracle: for G = e^{2u} I,
    //   G^1 = [[u_1, u_2], [u_2, -u_1]],  G^2 = [[-u_2, u_1], [u_1, u_2]]
    auto du = [&](const Vec2& q) {
        return Vec2{-eps * kTwoPi * std::sin(kTwoPi * q.x), 0.0};
    };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Vec2 q{uni(rng), uni(rng)};
        const Vec2 d = du(q);
        const ChristoffelSymbols g = christoffel(m, q);
        CHECK(g[0].xx == doctest::Approx(d.x).epsilon(1e-8));
        CHECK(g[0].xy == doctest::Approx(d.y).epsilon(1e-8));
        CHECK(g[0].yy == doctest::Approx(-d.x).epsilon(1e-8));
        CHECK(g[1].xx == doctest::Approx(-d.y).epsilon(1e-8));
        CHECK(g[1].xy == doctest::Approx(d.x).epsilon(1e-8));
        CHECK(g[1].yy == doctest::Approx(d.y).epsilon(1e-8));
    }
}

TEST_CASE("finite-difference Christoffels agree with analytic mode") {
    const MetricField exact = make_metric("conformal", {0.1, 0.05, -0.07, 0.02});
    const MetricField fd = make_metric("conformal", {0.1, 0.05, -0.07, 0.02}, false);
    CHECK(exact.has_analytic_deriv());
    CHECK(!fd.has_analytic_deriv());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 30; ++t) {
        const Vec2 q{uni(rng), uni(rng)};
        const ChristoffelSymbols a = christoffel(exact, q);
        const ChristoffelSymbols b = christoffel(fd, q);
        for (int i = 0; i < 2; ++i) {
            worst = std::max({worst, std::abs(a[i].xx - b[i].xx), std::abs(a[i].xy - b[i].xy),
                              std::abs(a[i].yy - b[i].yy)});
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("Lorentz force: flat constant field and the defining identity") {
    const MetricField flat = make_metric("flat", {});
    const MagneticDensity fb = make_density("constant", {2.5}, flat);
    const Vec2 y = lorentz(flat, fb, {0.2, 0.9}, {0.3, -0.4});
    CHECK(y.x == doctest::Approx(2.5 * -0.4).epsilon(1e-14));
    CHECK(y.y == doctest::Approx(2.5 * -0.3).epsilon(1e-14));

    const Vec2 y0 = lorentz(flat, fb, {0.1, 0.1}, {0.0, 0.0});
    CHECK(y0.x == 0.0);
    CHECK(y0.y == 0.0);

    // defining identity g(u, Y(q,v)) = f sqrt(det G) (u1 v2 - u2 v1)
    const MetricField conf = make_metric("conformal", {0.15, 0.0, -0.1, 0.04});
    const MagneticDensity f1 = make_density("trigpoly", {1.0, -2.0, 0.3}, conf);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const Vec2 q{uni(rng) + 1.0, uni(rng) + 1.0};
        const Vec2 u{uni(rng), uni(rng)}, v{uni(rng), uni(rng)};
        const Mat2 g = conf.at(q);
        const double lhs = dot(u, g * lorentz(conf, f1, q, v));
        const double rhs = f1.at(q) * std::sqrt(g.det()) * (u.x * v.y - u.y * v.x);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + norm(u) * norm(v)));
    }
}

TEST_CASE("geodesic curvature of circles and lines in the flat metric") {
    const MetricField flat = make_metric("flat", {});

    const int n = 256;
    const double r = 0.2;
    std::vector<Vec2> ccw(n), cw(n);
    for (int i = 0; i < n; ++i) {
        const double phi = kTwoPi * i / n;
        ccw[i] = {0.5 + r * std::cos(phi), 0.5 + r * std::sin(phi)};
        cw[i] = {0.5 + r * std::cos(-phi), 0.5 + r * std::sin(-phi)};
    }
    for (double k : geodesic_curvature(flat, ccw, {0.0, 0.0})) {
        CHECK(std::abs(k - 1.0 / r) / (1.0 / r) < 1e-3);
    }
    for (double k : geodesic_curvature(flat, cw, {0.0, 0.0})) {
        CHECK(std::abs(k + 1.0 / r) / (1.0 / r) < 1e-3);
    }

    std::vector<Vec2> line(64);
    for (int i = 0; i < 64; ++i) line[i] = Vec2{0.1, 0.2} + (i / 64.0) * Vec2{1.0, 2.0};
    for (double k : geodesic_curvature(flat, line, {1.0, 2.0})) {
        CHECK(std::abs(k) < 1e-8);
    }

    CHECK_THROWS_AS(geodesic_curvature(flat, {ccw[0], ccw[1], ccw[2], ccw[3]}, {0, 0}),
                    DomainError);
    std::vector<Vec2> stalled(8, Vec2{0.5, 0.5});
    CHECK_THROWS_AS(geodesic_curvature(flat, stalled, {0.0, 0.0}), UndefinedCurvatureError);
}

TEST_CASE("built-in evaluators are exactly 1-periodic") {
    const MetricField conf = make_metric("conformal", {0.2, -0.1, 0.05, 0.3});
    const MagneticDensity f = make_density("trigpoly", {0.5, 1.0, -0.25, 0.75, 0.1}, conf);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Vec2 q{uni(rng), uni(rng)};
        for (const Vec2 shift : {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}) {
            const Mat2 a = conf.at(q), b = conf.at(q + shift);
            CHECK(a.xx == doctest::Approx(b.xx).epsilon(1e-14));
            CHECK(f.at(q) == doctest::Approx(f.at(q + shift)).epsilon(1e-14));
        }
    }
}

TEST_CASE("flux quadrature matches analytic values") {
    const MetricField flat = make_metric("flat", {});
    const MagneticDensity fb = make_density("constant", {4.0 * 3.14159}, flat);
    CHECK(std::abs(fb.flux() - 4.0 * 3.14159) < 1e-8 * fb.flux());
    CHECK(!fb.oscillating());

    const MagneticDensity osc = make_density("trigpoly", {1.0, -2.0}, flat);
    CHECK(std::abs(osc.flux() - 1.0) < 1e-8);
    CHECK(osc.oscillating());

    // conformal area weight: int e^{2 eps cos} = I_0(2 eps) (Bessel series oracle)
    const double eps = 0.3;
    const MetricField conf = make_metric("conformal", {eps});
    const MagneticDensity one = make_density("constant", {1.0}, conf);
    double bessel = 0.0, term = 1.0;
    for (int m = 0; m < 30; ++m) {
        if (m > 0) term *= (eps * eps) / (m * m);  // ((2eps/2)^2/m^2) iterated
        bessel += term;
    }
    CHECK(std::abs(one.flux() - bessel) < 1e-8 * bessel);
}

TEST_CASE("degenerate metric raises the dedicated error") {
    CHECK_THROWS_AS(MetricField("bad", [](const Vec2& q) {
                        return Mat2{q.x - 0.5, 0.0, 0.0, 1.0};  // indefinite on the grid
                    }),
                    DegenerateMetricError);
}
