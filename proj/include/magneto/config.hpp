#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magneto/loopspace.hpp"

namespace magneto {

/// Experiment configuration; a single strict JSON document (unknown keys are
/// rejected, no comments). load/save round-trip through the normalized form.
struct ExperimentConfig {
    struct Metric {
        std::string kind = "flat";
        std::vector<double> params;
    } metric;

    struct Field {
        std::string kind = "constant";
        std::vector<double> params = {1.0};
    } field;

    struct Flow {
        double dt = 1e-3;
        double t_end = 10.0;
        bool project_energy = false;
        double closure_tol = 1e-5;
    } flow;

    struct FlowToZero {
        double step = 0.1;
        double tol_eta = 1e-6;
        int max_iters = 20000;
        double T_min = 1e-3;
        double T_max = 50.0;
    } flow2zero;

    struct Loop {
        int n_vertices = 256;
        std::string metric = "h1";  // "h1" | "l2"
        int flux_grid = 128;
    } loop;

    struct Taimanov {
        int grid_m = 128;
        double k = 0.005;
        double k_lo = 1e-4;
        double k_hi = 0.02;
        double tol_k = 1e-5;
    } taimanov;

    struct Minimax {
        double k = 0.004;  // working energy for the mountainpass subcommand
        int n = 1;         // iterate index
        int path_nodes = 32;
        int max_outer = 400;
        double tol_eta = 1e-5;
        double step = 0.05;
        std::vector<int> direction;  // empty = smallest-norm admissible
    } minimax;

    struct Scan {
        std::vector<double> k_grid;  // empty = derive from tau_plus
        int k_count = 5;
        double k_lo_frac = 0.5;
        double k_hi_frac = 0.9;
        std::vector<int> n_list = {1, 2};
        int grid_m = 64;
        double distinct_tol = 1e-2;
    } scan;

    struct Sim {
        std::vector<double> q = {0.0, 0.0};
        std::vector<double> v = {1.0, 0.0};
    } sim;

    struct Relax {
        std::string seed = "taimanov";  // "taimanov" | "file"
        std::string file;
        double k = 0.004;
        double perturb = 0.0;
    } relax;

    std::string output_dir = "out";
    std::uint64_t seed = 12345;

    LoopMetric loop_metric() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Normalized form: every key explicit, fixed ordering. Reloading it yields
/// an identical configuration.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace magneto
