#pragma once

#include <cstdint>
#include <vector>

#include "magneto/loopspace.hpp"

namespace magneto {

/// Closed lattice curve on the torus in lifted coordinates (torus units),
/// oriented with the region on the left.
struct LatticeCurve {
    std::vector<Vec2> pts;  // lifted lattice vertices, no repeated endpoint
    int wind_a = 0;
    int wind_b = 0;
};

/// Binary film on the m x m periodic cell grid. Cell (i,j) covers
/// [i/m,(i+1)/m) x [j/m,(j+1)/m).
struct GridRegion {
    int m = 0;
    std::vector<std::uint8_t> mask;  // row-major, index j*m + i
    double value = 0.0;              // sqrt(2k) * perimeter + flux
    double perimeter = 0.0;          // metric length of the exposed edges
    double flux = 0.0;               // sum over cells of f sqrt(det G) / m^2
    std::vector<LatticeCurve> boundary;

    bool cell(int i, int j) const;  // torus-wrapped indices
    int count() const;
};

/// T_k = sqrt(2k) * perimeter_g + flux_g recomputed from the mask (midpoint
/// metric evaluation on edges, center-point quadrature on cells).
double taimanov_value(const MetricField& m, const MagneticDensity& f, double k,
                      const GridRegion& region);

/// Exact minimizer of the discrete T_k over all masks via min-cut on the
/// torus-wrapped grid graph. The returned region has value/perimeter/flux and
/// oriented boundary curves filled in.
GridRegion minimize_taimanov(const MetricField& m, const MagneticDensity& f, double k,
                             int grid_m);

/// Bisection on sign(min T_k); requires min T_{k_lo} < 0 <= min T_{k_hi},
/// else throws BracketError. Returns the bracket midpoint once |hi-lo|<=tol_k.
double tau_plus_estimate(const MetricField& m, const MagneticDensity& f, double k_lo,
                         double k_hi, double tol_k, int grid_m);

/// Boundary curves -> smoothed, arc-length resampled seed loops with period
/// T = length_g / sqrt(2k) (constant speed sqrt(2k)). Curves shorter than 4
/// lattice steps are skipped.
std::vector<DiscreteLoop> boundary_to_seed(const MetricField& m, const MagneticDensity& f,
                                           double k, const GridRegion& region, int n_vertices);

/// Oriented boundary extraction (region on the left); exposed for tests.
std::vector<LatticeCurve> trace_boundary(const GridRegion& region);

}  // namespace magneto
