#pragma once

#include <optional>
#include <vector>

#include "magneto/geometry.hpp"

namespace magneto {

struct TangentState {
    Vec2 q;  // lifted position
    Vec2 v;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<TangentState> states;
    double energy_drift = 0.0;  // max |E(t)-E(0)|/E(0)
};

struct OdeRhs {
    Vec2 dq;
    Vec2 dv;
};

/// dq = v, dv^i = -Gamma^i_{jk} v^j v^k + Y^i(q,v).
OdeRhs ode_rhs(const MetricField& m, const MagneticDensity& f, const TangentState& s);

double state_energy(const MetricField& m, const TangentState& s);

/// Classical RK4 with fixed step. If project_energy is set, velocities are
/// rescaled to the initial energy shell after each step. Throws BlowUpError
/// (carrying the last valid time) when a state goes non-finite.
Trajectory integrate(const MetricField& m, const MagneticDensity& f, const TangentState& s0,
                     double t_end, double dt, bool project_energy = false);

struct Closure {
    double period = 0.0;
    std::vector<TangentState> orbit;  // trajectory samples with t <= period
};

/// First T with |state(T)-state(0)| < tol (position reduced, velocity full),
/// refined by quadratic interpolation of the squared phase distance.
std::optional<Closure> detect_closure(const Trajectory& traj, double tol);

/// n states at uniform times j*period/n, re-integrated from s0 with internal
/// substeps no larger than dt_max.
std::vector<TangentState> sample_orbit(const MetricField& m, const MagneticDensity& f,
                                       const TangentState& s0, double period, int n,
                                       double dt_max = 1e-3);

}  // namespace magneto
