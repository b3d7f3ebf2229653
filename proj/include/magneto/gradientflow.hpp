#pragma once

#include "magneto/loopspace.hpp"

namespace magneto {

struct FlowParams {
    double step = 0.1;
    double tol_eta = 1e-6;
    int max_iters = 20000;
    double T_min = 1e-3;
    double T_max = 50.0;
    int redistribute_every = 50;
    LoopMetric metric = LoopMetric::h1;
};

enum class FlowStatus { converged, max_iters, shrank_to_point, period_exceeded, numeric_failure };

const char* to_string(FlowStatus s);

struct FlowResult {
    DiscreteLoop final;
    double residual = 0.0;   // covector norm of eta at `final`
    int iterations = 0;
    FlowStatus status = FlowStatus::max_iters;
    int accepted_steps = 0;
    int rejected_steps = 0;
    /// Largest eta line integral over accepted steps; descent means <= 0.
    double max_step_integral = 0.0;
    /// Cumulative eta line integral along the realized path.
    double cumulative_integral = 0.0;
};

/// X_k = -sharp(eta_k) / sqrt(1 + |eta_k|^2) in the configured discrete metric.
LoopTangent xk(const MetricField& m, const MagneticDensity& f, double k, const DiscreteLoop& g,
               const FluxDecomposition& d, LoopMetric mode = LoopMetric::h1);

/// Explicit stepping along X_k with backtracking certified through the eta
/// line integral of each step (must be <= 0), periodic arc-length vertex
/// redistribution, and the period guards of the Palais-Smale dichotomy.
FlowResult flow_to_zero(const MetricField& m, const MagneticDensity& f, double k,
                        DiscreteLoop seed, const FluxDecomposition& d, const FlowParams& params);

/// Damped Newton polish of the zero equation eta(gamma) = 0 with a
/// finite-difference Jacobian; used to certify saddle-type criticals that the
/// descent flow cannot reach. Returns the final covector norm.
double newton_polish(const MetricField& m, const MagneticDensity& f, double k, DiscreteLoop& g,
                     const FluxDecomposition& d, int max_iters = 8, double tol = 1e-10,
                     LoopMetric mode = LoopMetric::h1);

}  // namespace magneto
