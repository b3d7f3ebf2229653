#pragma once

#include <vector>

#include "magneto/geometry.hpp"

namespace magneto {

/// N-vertex closed curve in lifted coordinates with free period T. Vertex i
/// sits at parameter s_i = i/N; the lift extends by x[i+N] = x[i] + (a,b).
struct DiscreteLoop {
    std::vector<Vec2> x;  // lifted vertices
    double T = 1.0;
    int wind_a = 0;
    int wind_b = 0;

    int n() const { return static_cast<int>(x.size()); }
    Vec2 winding_vec() const { return {double(wind_a), double(wind_b)}; }

    /// Lifted vertex for any index (periodic plus winding offsets).
    Vec2 vertex(int i) const;

    /// Edge x[i+1] - x[i], the last one closing through the winding.
    Vec2 edge(int i) const { return vertex(i + 1) - vertex(i); }
};

DiscreteLoop make_loop(std::vector<Vec2> vertices, double T, int wind_a, int wind_b);

/// Build a loop from a closed sample path (last point ~ first + integer
/// vector). The winding is the rounded lift displacement, validated to be
/// within `winding_tol` of an integer vector; the final point is dropped.
DiscreteLoop loop_from_samples(const std::vector<Vec2>& path, double T,
                               double winding_tol = 1e-6);

/// The T-action: start the parametrization at vertex `shift` instead.
DiscreteLoop reindex(const DiscreteLoop& g, int shift);

/// gamma^n: nN vertices traversing gamma n times; winding (na,nb), period nT.
DiscreteLoop iterate(const DiscreteLoop& g, int n);

/// Resample to n_target vertices at uniform metric arc length (winding and
/// period preserved, vertex 0 kept as the starting point).
DiscreteLoop resample_uniform_arclength(const MetricField& m, const DiscreteLoop& g,
                                        int n_target);

double loop_length(const MetricField& m, const DiscreteLoop& g);

// --- action machinery -----------------------------------------------------

/// e(x) = (N/2) sum_i dx_i^T G(mid_i) dx_i (midpoint rule).
double kinetic_energy(const MetricField& m, const DiscreteLoop& g);

/// A_k(x,T) = e(x)/T + kT.
double action(const MetricField& m, double k, const DiscreteLoop& g);

/// Discrete eta_k value: per-vertex cotangent components plus a period
/// component, with the dual norm in the configured discrete metric.
struct ActionCovector {
    std::vector<Vec2> dx;
    double dT = 0.0;
    double h1_norm = 0.0;
};

/// Pairing with a tangent direction (plain component sum; eta is the exact
/// gradient of the discrete local action under this pairing).
struct LoopTangent {
    std::vector<Vec2> dx;
    double dT = 0.0;
};

double pair(const ActionCovector& c, const LoopTangent& xi);

/// Discrete loop-space metric: "h1" pairs vertex components through
/// (I + L), L the periodic graph Laplacian scaled by N^2, period weight 1;
/// "l2" is the identity fallback for cross-checking zeros.
enum class LoopMetric { h1, l2 };

/// sharp(eta) in the chosen metric ((I+L)^{-1} applied per coordinate).
LoopTangent sharp(const ActionCovector& c, LoopMetric mode);

double covector_norm(const ActionCovector& c, LoopMetric mode);

// --- flux decomposition -----------------------------------------------------

/// sigma = c sigma_bar + d theta0 with sigma_bar = dq1 ^ dq2: theta0 =
/// (-d2 psi, d1 psi), where psi solves the periodic Poisson problem
/// Delta psi = f sqrt(det G) - c by trigonometric spectral inversion on an
/// n x n grid. Off-grid evaluation sums the retained modes directly, so
/// theta0 and its Jacobian are smooth and exactly consistent.
struct FluxDecomposition {
    struct Mode {
        int m1 = 0, m2 = 0;   // wave numbers
        double a = 0.0;       // cos amplitude of psi
        double b = 0.0;       // sin amplitude of psi
    };

    double flux = 0.0;
    int grid_n = 0;
    std::vector<Mode> modes;

    double psi(const Vec2& q) const;
    Vec2 theta(const Vec2& q) const;
    /// D_{ab} = d_a theta_b.
    Mat2 theta_jacobian(const Vec2& q) const;
    /// d1 theta_2 - d2 theta_1 at q (equals the truncated Poisson RHS).
    double curl(const Vec2& q) const;
};

FluxDecomposition flux_decompose(const MetricField& m, const MagneticDensity& f, int grid_n);

/// eta_k(x,T): dT = -e/T^2 + k; dx = exact gradient of e(x)/T plus the exact
/// gradient of the magnetic curve term of local_action (which for constant
/// f sqrt(det G) is exactly f sqrt(det G) J (x_{i+1}-x_{i-1})/2).
ActionCovector eta(const MetricField& m, const MagneticDensity& f, double k,
                   const DiscreteLoop& g, const FluxDecomposition& d,
                   LoopMetric mode = LoopMetric::h1);

/// int x1 dx2 along the lifted polygon (trapezoid rule, exact for polylines).
/// Equals the enclosed signed area for contractible loops; for winding loops
/// it is well-defined only modulo integers under deck translations.
double signed_area_lifted(const DiscreteLoop& g);

/// S_k relative to the stored lift:
/// A_k + sum_i theta0(x_i).dx_i + flux * signed_area_lifted.
double local_action(const MetricField& m, const MagneticDensity& f, double k,
                    const DiscreteLoop& g, const FluxDecomposition& d);

}  // namespace magneto
