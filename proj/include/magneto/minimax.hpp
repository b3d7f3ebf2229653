#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "magneto/gradientflow.hpp"
#include "magneto/taimanov.hpp"

namespace magneto {

/// Path in loop space: m+1 nodes with identical vertex count and winding;
/// nodes[0] and nodes[m] must coincide as torus loops up to cyclic reindexing.
struct LoopPath {
    std::vector<DiscreteLoop> nodes;

    int segments() const { return static_cast<int>(nodes.size()) - 1; }
};

/// Discrete int_0^1 u* tau with tau induced by sigma_bar = dq1 ^ dq2
/// (midpoint rule over path edges; exact for translation paths).
double transgression(const LoopPath& path);

/// Cumulative S_k(u, s_j) relative to local_action at node 0 (fixed lift).
std::vector<double> eta_line_integral(const MetricField& m, const MagneticDensity& f, double k,
                                      const LoopPath& path, const FluxDecomposition& d);

/// Path s |-> iterate(alpha, n) translated by s*(p,q). Requires
/// p*b - q*a != 0 (else InvalidDirectionError); transgression = n*(p*b - q*a).
LoopPath build_class_representative(const DiscreteLoop& alpha, int n, int p, int q,
                                    int path_nodes);

/// Smallest-norm integer direction with p*b - q*a != 0 (ties lexicographic).
std::pair<int, int> default_direction(int wind_a, int wind_b);

struct MinimaxParams {
    int max_outer = 400;
    double tol_eta = 1e-5;
    double step = 0.05;
    double T_min = 1e-3;
    double T_max = 50.0;
    LoopMetric metric = LoopMetric::h1;
    bool polish = true;          // Newton-polish the critical loop
    double trans_tol = 1e-8;     // class-preservation guard
};

struct MinimaxRecord {
    int n = 1;
    double k = 0.0;
    double c = 0.0;              // S_k(u, s*) at the final max node
    double c_initial = 0.0;      // max of the S profile before deformation
    DiscreteLoop critical_loop;
    double residual = 0.0;       // covector norm of eta at critical_loop
    int outer_iterations = 0;
    bool converged = false;
};

/// Numerical mountain pass: repeatedly flows interior nodes along X_k with
/// step proportional to their S-excess (endpoints frozen), re-spaces the
/// path, and certifies descent via the max of the S profile. The class is
/// guarded through the transgression each outer iteration.
MinimaxRecord mountain_pass(const MetricField& m, const MagneticDensity& f, double k,
                            LoopPath path, const FluxDecomposition& d,
                            const MinimaxParams& params);

/// 20 random small perturbations of a converged minimizer must all increase
/// the locally defined action (records which case the data exhibits).
bool certify_strict_minimizer(const MetricField& m, const MagneticDensity& f, double k,
                              const DiscreteLoop& g, const FluxDecomposition& d,
                              std::uint64_t seed, int trials = 20, double eps = 1e-3);

// --- energy scan ------------------------------------------------------------

/// Hausdorff distance between the reduced vertex images of two loops
/// (torus metric on point sets; phase-free, so iterates compare equal).
double hausdorff_image_distance(const DiscreteLoop& a, const DiscreteLoop& b);

/// Max vertex distance after the best cyclic reindexing (same vertex count).
double cyclic_aligned_distance(const DiscreteLoop& a, const DiscreteLoop& b);

struct ScanParams {
    int grid_m = 64;
    int n_vertices = 256;
    int path_nodes = 32;
    std::vector<int> n_list = {1, 2};
    FlowParams flow;
    MinimaxParams minimax;
    double distinct_tol = 1e-2;  // geometric distinctness threshold
    int threads = 1;
};

struct ScanRow {
    double k = 0.0;
    int n = 0;  // 0 = local minimizer rows, >= 1 = mountain-pass rows
    double c = 0.0;
    double residual = 0.0;
    double T = 0.0;
    int wind_a = 0;
    int wind_b = 0;
    std::string status;
};

struct OrbitRecord {
    int id = 0;
    std::string hash;
    double T = 0.0;
    int wind_a = 0;
    int wind_b = 0;
    DiscreteLoop loop;
    double residual = 0.0;
    double energy = 0.0;            // the k it was found at
    double curvature_residual = 0;  // max |kappa_g + f/sqrt(2k)|
};

struct Census {
    std::vector<OrbitRecord> orbits;               // geometrically distinct
    std::map<double, std::vector<int>> by_energy;  // k -> sorted orbit ids
};

struct ScanResult {
    std::vector<ScanRow> rows;
    Census census;
};

/// Full pipeline per (k, n): Taimanov seed -> flow_to_zero -> iterate ->
/// mountain_pass; the census groups certified orbits by image Hausdorff
/// distance. Cells run concurrently (params.threads); aggregation order is
/// fixed, so outputs are deterministic.
ScanResult energy_scan(const MetricField& m, const MagneticDensity& f,
                       const std::vector<double>& k_grid, const ScanParams& params);

/// FNV-1a hash of the canonically aligned, 1e-6-quantized reduced vertices.
std::string loop_hash(const DiscreteLoop& g);

}  // namespace magneto
