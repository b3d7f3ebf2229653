#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magneto/flow.hpp"

using namespace magneto;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

struct LarmorSetup {
    MetricField metric = make_metric("flat", {});
    MagneticDensity density;
    TangentState s0{{0.5, 0.5}, {1.0, 0.0}};
    double B = 4.0 * kPi;
    LarmorSetup() : density(make_density("constant", {4.0 * kPi}, metric)) {}
};

}  // namespace

TEST_CASE("ode_rhs substitutions") {
    const MetricField flat = make_metric("flat", {});
    const MagneticDensity fb = make_density("constant", {3.0}, flat);
    const OdeRhs r = ode_rhs(flat, fb, {{0.1, 0.2}, {1.0, 0.0}});
    CHECK(r.dq.x == 1.0);
    CHECK(r.dq.y == 0.0);
    CHECK(r.dv.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.dv.y == doctest::Approx(-3.0).epsilon(1e-15));

    const MagneticDensity zero = make_density("constant", {0.0}, flat);
    const OdeRhs r0 = ode_rhs(flat, zero, {{0.3, 0.9}, {0.7, -0.2}});
    CHECK(r0.dv.x == 0.0);
    CHECK(r0.dv.y == 0.0);
}

TEST_CASE("geodesic motion on a conformal metric conserves energy") {
    const MetricField conf = make_metric("conformal", {0.15, -0.05, 0.1});
    const MagneticDensity zero = make_density("constant", {0.0}, conf);
    const TangentState s0{{0.21, 0.43}, {0.8, 0.55}};
    const Trajectory traj = integrate(conf, zero, s0, 5.0, 1e-3);
    CHECK(traj.energy_drift < 1e-9);
}

TEST_CASE("Larmor circle: closure, radius, period") {
    LarmorSetup su;
    const Trajectory traj = integrate(su.metric, su.density, su.s0, 0.5, 1e-3);

    // analytic solution: x(t) = x0 + (sin Bt, cos Bt - 1)/B, period 2 pi / B = 1/2
    const TangentState& last = traj.states.back();
    CHECK(norm(torus_delta(last.q, su.s0.q)) < 1e-6);
    CHECK(norm(last.v - su.s0.v) < 1e-6);

    const Trajectory longer = integrate(su.metric, su.density, su.s0, 2.0, 1e-3);
    const auto closure = detect_closure(longer, 1e-5);
    REQUIRE(closure.has_value());
    CHECK(std::abs(closure->period - 0.5) < 1e-6);

    // radius of the circle = 1/B
    double rmax = 0.0;
    const Vec2 center = su.s0.q + Vec2{0.0, -1.0 / su.B};
    for (const TangentState& s : traj.states) {
        rmax = std::max(rmax, std::abs(norm(s.q - center) - 1.0 / su.B));
    }
    CHECK(rmax < 1e-9);
}

TEST_CASE("energy drift stays tiny over long horizons") {
    LarmorSetup su;
    const Trajectory traj = integrate(su.metric, su.density, su.s0, 10.0, 1e-3);
    CHECK(traj.energy_drift < 1e-7);

    const Trajectory proj = integrate(su.metric, su.density, su.s0, 10.0, 1e-3, true);
    CHECK(proj.energy_drift < 1e-14);
}

TEST_CASE("straight geodesics: rational slope closes, irrational does not") {
    const MetricField flat = make_metric("flat", {});
    const MagneticDensity zero = make_density("constant", {0.0}, flat);
    const double r5 = std::sqrt(5.0);
    const TangentState s0{{0.15, 0.85}, {1.0 / r5, 2.0 / r5}};

    const Trajectory traj = integrate(flat, zero, s0, 3.0, 1e-3);
    // q(t) - q(0) - v t == 0 exactly for flat geodesics
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const Vec2 dev = traj.states[i].q - s0.q - traj.times[i] * s0.v;
        CHECK(norm(dev) < 1e-9);
    }
    const auto closure = detect_closure(traj, 1e-5);
    REQUIRE(closure.has_value());
    CHECK(std::abs(closure->period - r5) < 1e-6);
    // winding (1,2)
    const Vec2 disp = closure->period * s0.v;
    CHECK(std::lround(disp.x) == 1);
    CHECK(std::lround(disp.y) == 2);

    const TangentState irr{{0.0, 0.0}, {1.0, std::sqrt(2.0) / 2.0}};
    const Trajectory t2 = integrate(flat, zero, irr, 5.0, 1e-3);
    CHECK(!detect_closure(t2, 1e-5).has_value());
}

TEST_CASE("time reversal with field negation retraces the trajectory") {
    const MetricField conf = make_metric("conformal", {0.1});
    const MagneticDensity f = make_density("trigpoly", {1.0, -2.0}, conf);
    const MagneticDensity fneg = make_density("trigpoly", {-1.0, 2.0}, conf);
    const TangentState s0{{0.3, 0.6}, {0.5, 0.1}};

    const Trajectory fwd = integrate(conf, f, s0, 1.0, 1e-3);
    const TangentState b0{fwd.states.back().q, -fwd.states.back().v};
    const Trajectory bwd = integrate(conf, fneg, b0, 1.0, 1e-3);

    const std::size_t n = fwd.states.size();
    REQUIRE(bwd.states.size() == n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, norm(fwd.states[i].q - bwd.states[n - 1 - i].q) +
                                    norm(fwd.states[i].v + bwd.states[n - 1 - i].v));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("blow-up reports the last valid time") {
    const MetricField flat = make_metric("flat", {});
    const MagneticDensity huge = make_density("constant", {1e8}, flat);
    try {
        integrate(flat, huge, {{0.0, 0.0}, {1.0, 0.0}}, 1000.0, 1.0);
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.last_valid_time >= 0.0);
        CHECK(e.last_valid_time < 1000.0);
    }
}

TEST_CASE("sample_orbit returns uniform samples starting at the seed") {
    LarmorSetup su;
    const std::vector<TangentState> orbit = sample_orbit(su.metric, su.density, su.s0, 0.5, 64);
    REQUIRE(orbit.size() == 64);
    CHECK(norm(orbit[0].q - su.s0.q) == 0.0);
    // sample j sits at angle -B t_j on the circle
    for (int j = 0; j < 64; ++j) {
        const double t = 0.5 * j / 64.0;
        const Vec2 expect = su.s0.q + (1.0 / su.B) * Vec2{std::sin(su.B * t),
                                                          std::cos(su.B * t) - 1.0};
        CHECK(norm(orbit[j].q - expect) < 1e-10);
    }
}
