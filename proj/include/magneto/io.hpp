#pragma once

#include <string>
#include <vector>

#include "magneto/flow.hpp"
#include "magneto/minimax.hpp"
#include "magneto/taimanov.hpp"

namespace magneto {

/// Deterministic shortest-round-trip-safe double formatting (%.17g).
std::string fmt_double(double v);

// Loop serialization: header "# T=<period> winding=<a>,<b>", columns i,x1,x2.
std::string loop_to_csv(const DiscreteLoop& g);
DiscreteLoop loop_from_csv_text(const std::string& text);
DiscreteLoop load_loop_csv(const std::string& path);

// Trajectory CSV: columns t,q1,q2,v1,v2,E.
std::string trajectory_to_csv(const MetricField& m, const Trajectory& traj);

// Scan CSV: columns k,n,c,residual,T,winding_a,winding_b,status.
std::string scan_to_csv(const std::vector<ScanRow>& rows);

// Census JSON: {"k": {...}, "orbits": [{id, hash, T, winding}]}.
std::string census_to_json(const Census& census);

// Region record JSON: {k, value, perimeter, flux, n_boundary_curves}.
std::string region_record_json(double k, const GridRegion& region);

// PBM-style text mask (P1).
std::string region_to_pbm(const GridRegion& region);

// SVG of the fundamental domain with optional region shading and curves
// (periodic unwrapping: segments are clipped and re-entered at the
// boundaries).
struct SvgCurve {
    std::vector<Vec2> pts;   // lifted; closing edge derived from winding
    Vec2 winding{0.0, 0.0};
    std::string color = "#1f6feb";
};
std::string render_svg(const GridRegion* region, const std::vector<SvgCurve>& curves,
                       int size_px = 512);

void write_file(const std::string& path, const std::string& content);

}  // namespace magneto
