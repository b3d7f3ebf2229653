#include "magneto/flow.hpp"

#include <cmath>

namespace magneto {

OdeRhs ode_rhs(const MetricField& m, const MagneticDensity& f, const TangentState& s) {
    const ChristoffelSymbols gamma = christoffel(m, s.q);
    const Vec2 y = lorentz(m, f, s.q, s.v);
    return {s.v, {y.x - quad(gamma[0], s.v), y.y - quad(gamma[1], s.v)}};
}

double state_energy(const MetricField& m, const TangentState& s) {
    return 0.5 * quad(m.at(s.q), s.v);
}

namespace {

bool finite(const TangentState& s) {
    return std::isfinite(s.q.x) && std::isfinite(s.q.y) && std::isfinite(s.v.x) &&
           std::isfinite(s.v.y);
}

TangentState rk4_step(const MetricField& m, const MagneticDensity& f, const TangentState& s,
                      double dt) {
    const OdeRhs k1 = ode_rhs(m, f, s);
    const OdeRhs k2 = ode_rhs(m, f, {s.q + 0.5 * dt * k1.dq, s.v + 0.5 * dt * k1.dv});
    const OdeRhs k3 = ode_rhs(m, f, {s.q + 0.5 * dt * k2.dq, s.v + 0.5 * dt * k2.dv});
    const OdeRhs k4 = ode_rhs(m, f, {s.q + dt * k3.dq, s.v + dt * k3.dv});
    return {s.q + (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
            s.v + (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv)};
}

}  // namespace

Trajectory integrate(const MetricField& m, const MagneticDensity& f, const TangentState& s0,
                     double t_end, double dt, bool project_energy) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw DomainError("integrate: t_end and dt must be > 0");

    Trajectory traj;
    const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);

    const double e0 = state_energy(m, s0);
    TangentState s = s0;
    traj.times.push_back(0.0);
    traj.states.push_back(s);

    double drift = 0.0;
    for (int i = 0; i < n_steps; ++i) {
        const double h = std::min(dt, t_end - i * dt);
        TangentState next = rk4_step(m, f, s, h);
        if (!finite(next)) {
            throw BlowUpError("integration blew up", traj.times.back());
        }
        if (project_energy && e0 > 0.0) {
            const double e = state_energy(m, next);
            if (e > 0.0) next.v *= std::sqrt(e0 / e);
        }
        s = next;
        traj.times.push_back(std::min(t_end, (i + 1) * dt));
        traj.states.push_back(s);
        if (e0 > 0.0) drift = std::max(drift, std::abs(state_energy(m, s) - e0) / e0);
    }
    traj.energy_drift = drift;
    return traj;
}

std::optional<Closure> detect_closure(const Trajectory& traj, double tol) {
    const std::size_t n = traj.states.size();
    if (n < 2) return std::nullopt;

    const TangentState& s0 = traj.states[0];
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 dq = torus_delta(traj.states[i].q, s0.q);
        const Vec2 dv = traj.states[i].v - s0.v;
        d2[i] = dot(dq, dq) + dot(dv, dv);
    }

    const double esc2 = 100.0 * tol * tol;  // must leave a 10*tol ball first
    bool escaped = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d2[i] > esc2) {
            escaped = true;
            continue;
        }
        if (!escaped) continue;
        if (!(d2[i] <= d2[i - 1] && d2[i] <= d2[i + 1])) continue;

        // Quadratic fit of d^2 through the three bracketing samples.
        const double t0 = traj.times[i - 1], t1 = traj.times[i], t2 = traj.times[i + 1];
        const double f0 = d2[i - 1], f1 = d2[i], f2 = d2[i + 1];
        const double h1 = t1 - t0, h2 = t2 - t1;
        const double denom = h1 * h2 * (h1 + h2);
        double t_star = t1, f_star = f1;
        if (denom > 0.0) {
            const double a = (h1 * (f2 - f1) - h2 * (f1 - f0)) / denom;  // half curvature
            const double b = (f1 - f0) / h1 + a * h1;                    // slope at t1
            if (a > 0.0) {
                t_star = t1 - 0.5 * b / a;
                f_star = f1 - 0.25 * b * b / a;
            }
        }
        if (f_star < tol * tol) {
            Closure c;
            c.period = t_star;
            for (std::size_t j = 0; j < n && traj.times[j] <= t_star; ++j) {
                c.orbit.push_back(traj.states[j]);
            }
            return c;
        }
    }
    return std::nullopt;
}

std::vector<TangentState> sample_orbit(const MetricField& m, const MagneticDensity& f,
                                       const TangentState& s0, double period, int n,
                                       double dt_max) {
    if (!(period > 0.0) || n < 1) throw DomainError("sample_orbit: invalid period or count");
    std::vector<TangentState> out;
    out.reserve(n);
    const double dt_sample = period / n;
    const int substeps = std::max(1, static_cast<int>(std::ceil(dt_sample / dt_max)));
    const double h = dt_sample / substeps;
    TangentState s = s0;
    for (int i = 0; i < n; ++i) {
        out.push_back(s);
        for (int j = 0; j < substeps; ++j) s = rk4_step(m, f, s, h);
        if (!finite(s)) throw BlowUpError("orbit sampling blew up", i * dt_sample);
    }
    return out;
}

}  // namespace magneto
