#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "magneto/config.hpp"
#include "magneto/flow.hpp"
#include "magneto/gradientflow.hpp"
#include "magneto/io.hpp"
#include "magneto/minimax.hpp"
#include "magneto/taimanov.hpp"
#include "magneto/verify.hpp"

namespace {

using namespace magneto;

namespace fs = std::filesystem;

int worker_count(std::size_t cells) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("MAGNETO_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(cells, 1)));
}

fs::path ensure_outdir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

SvgCurve loop_curve(const DiscreteLoop& g, const std::string& color) {
    SvgCurve c;
    c.pts = g.x;
    c.winding = g.winding_vec();
    c.color = color;
    return c;
}

const char* kPalette[] = {"#1f6feb", "#d73a49", "#22863a", "#b08800", "#6f42c1", "#e36209"};

nlohmann::ordered_json flow_record(const FlowResult& r, double k) {
    return {{"status", to_string(r.status)}, {"residual", r.residual},
            {"iterations", r.iterations},   {"T", r.final.T},
            {"winding", {r.final.wind_a, r.final.wind_b}},
            {"energy", k}};
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const MetricField metric = make_metric(cfg.metric.kind, cfg.metric.params);
    const MagneticDensity density = make_density(cfg.field.kind, cfg.field.params, metric);
    const TangentState s0{{cfg.sim.q[0], cfg.sim.q[1]}, {cfg.sim.v[0], cfg.sim.v[1]}};

    const Trajectory traj = integrate(metric, density, s0, cfg.flow.t_end, cfg.flow.dt,
                                      cfg.flow.project_energy);
    const fs::path dir = ensure_outdir(cfg);
    write_file((dir / "orbits.csv").string(), trajectory_to_csv(metric, traj));

    std::vector<Vec2> pts;
    for (const TangentState& s : traj.states) pts.push_back(s.q);
    SvgCurve curve;
    curve.pts = pts;
    curve.winding = {0.0, 0.0};  // consecutive samples are already contiguous
    write_file((dir / "trajectory.svg").string(), render_svg(nullptr, {curve}));

    nlohmann::ordered_json rec;
    rec["energy"] = state_energy(metric, s0);
    rec["energy_drift"] = traj.energy_drift;
    const auto closure = detect_closure(traj, cfg.flow.closure_tol);
    rec["closed"] = closure.has_value();
    if (closure) rec["period"] = closure->period;
    std::cout << rec.dump() << "\n";
    return 0;
}

int cmd_taimanov(const ExperimentConfig& cfg) {
    const MetricField metric = make_metric(cfg.metric.kind, cfg.metric.params);
    const MagneticDensity density = make_density(cfg.field.kind, cfg.field.params, metric);
    if (!density.oscillating()) {
        throw NotOscillatingError("field not oscillating");
    }
    const GridRegion region =
        minimize_taimanov(metric, density, cfg.taimanov.k, cfg.taimanov.grid_m);
    const fs::path dir = ensure_outdir(cfg);
    write_file((dir / "region.pbm").string(), region_to_pbm(region));
    write_file((dir / "region.json").string(), region_record_json(cfg.taimanov.k, region));

    std::vector<SvgCurve> curves;
    for (std::size_t i = 0; i < region.boundary.size(); ++i) {
        SvgCurve c;
        c.pts = region.boundary[i].pts;
        c.winding = {double(region.boundary[i].wind_a), double(region.boundary[i].wind_b)};
        c.color = kPalette[i % 6];
        curves.push_back(std::move(c));
    }
    write_file((dir / "region.svg").string(), render_svg(&region, curves));

    const double tau = tau_plus_estimate(metric, density, cfg.taimanov.k_lo, cfg.taimanov.k_hi,
                                         cfg.taimanov.tol_k, cfg.taimanov.grid_m);
    nlohmann::ordered_json rec;
    rec["k"] = cfg.taimanov.k;
    rec["value"] = region.value;
    rec["perimeter"] = region.perimeter;
    rec["flux"] = region.flux;
    rec["n_boundary_curves"] = region.boundary.size();
    rec["tau_plus"] = tau;
    std::cout << rec.dump() << "\n";
    return 0;
}

int cmd_relax(const ExperimentConfig& cfg) {
    const MetricField metric = make_metric(cfg.metric.kind, cfg.metric.params);
    const MagneticDensity density = make_density(cfg.field.kind, cfg.field.params, metric);
    const FluxDecomposition decomp = flux_decompose(metric, density, cfg.loop.flux_grid);
    const double k = cfg.relax.k;

    std::vector<DiscreteLoop> seeds;
    if (cfg.relax.seed == "file") {
        if (cfg.relax.file.empty()) throw ConfigError("relax.file required when seed=\"file\"");
        seeds.push_back(load_loop_csv(cfg.relax.file));
    } else {
        if (!density.oscillating()) throw NotOscillatingError("field not oscillating");
        const GridRegion region = minimize_taimanov(metric, density, k, cfg.taimanov.grid_m);
        if (region.value >= 0.0 || region.count() == 0) {
            throw DomainError("taimanov minimizer is empty at this energy");
        }
        seeds = boundary_to_seed(metric, density, k, region, cfg.loop.n_vertices);
    }
    if (cfg.relax.perturb > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (DiscreteLoop& s : seeds) {
            for (Vec2& v : s.x) v += cfg.relax.perturb * Vec2{gauss(rng), gauss(rng)};
        }
    }

    FlowParams params;
    params.step = cfg.flow2zero.step;
    params.tol_eta = cfg.flow2zero.tol_eta;
    params.max_iters = cfg.flow2zero.max_iters;
    params.T_min = cfg.flow2zero.T_min;
    params.T_max = cfg.flow2zero.T_max;
    params.metric = cfg.loop_metric();

    const fs::path dir = ensure_outdir(cfg);
    std::string jsonl;
    std::vector<SvgCurve> curves;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const FlowResult r = flow_to_zero(metric, density, k, seeds[i], decomp, params);
        jsonl += flow_record(r, k).dump() + "\n";
        write_file((dir / ("loop_" + std::to_string(i) + ".csv")).string(),
                   loop_to_csv(r.final));
        curves.push_back(loop_curve(r.final, kPalette[i % 6]));
        std::cout << flow_record(r, k).dump() << "\n";
    }
    write_file((dir / "relax.jsonl").string(), jsonl);
    write_file((dir / "relax.svg").string(), render_svg(nullptr, curves));
    return 0;
}

int cmd_mountainpass(const ExperimentConfig& cfg) {
    const MetricField metric = make_metric(cfg.metric.kind, cfg.metric.params);
    const MagneticDensity density = make_density(cfg.field.kind, cfg.field.params, metric);
    if (!density.oscillating()) throw NotOscillatingError("field not oscillating");
    const FluxDecomposition decomp = flux_decompose(metric, density, cfg.loop.flux_grid);
    const double k = cfg.minimax.k;

    const GridRegion region = minimize_taimanov(metric, density, k, cfg.taimanov.grid_m);
    if (region.value >= 0.0 || region.count() == 0) {
        throw DomainError("taimanov minimizer is empty at this energy");
    }
    const std::vector<DiscreteLoop> seeds =
        boundary_to_seed(metric, density, k, region, cfg.loop.n_vertices);

    FlowParams fp;
    fp.step = cfg.flow2zero.step;
    fp.tol_eta = cfg.flow2zero.tol_eta;
    fp.max_iters = cfg.flow2zero.max_iters;
    fp.T_min = cfg.flow2zero.T_min;
    fp.T_max = cfg.flow2zero.T_max;
    fp.metric = cfg.loop_metric();

    DiscreteLoop alpha;
    bool have_alpha = false;
    for (const DiscreteLoop& seed : seeds) {
        const FlowResult r = flow_to_zero(metric, density, k, seed, decomp, fp);
        if (r.status == FlowStatus::converged) {
            alpha = r.final;
            have_alpha = true;
            break;
        }
    }
    if (!have_alpha) throw DomainError("no converged local minimizer to anchor the class");

    std::pair<int, int> dir_pq;
    if (cfg.minimax.direction.size() == 2) {
        dir_pq = {cfg.minimax.direction[0], cfg.minimax.direction[1]};
    } else {
        dir_pq = default_direction(alpha.wind_a, alpha.wind_b);
    }

    MinimaxParams mp;
    mp.max_outer = cfg.minimax.max_outer;
    mp.tol_eta = cfg.minimax.tol_eta;
    mp.step = cfg.minimax.step;
    mp.T_min = cfg.flow2zero.T_min;
    mp.T_max = cfg.flow2zero.T_max;
    mp.metric = cfg.loop_metric();

    LoopPath path = build_class_representative(alpha, cfg.minimax.n, dir_pq.first,
                                               dir_pq.second, cfg.minimax.path_nodes);
    MinimaxRecord rec = mountain_pass(metric, density, k, std::move(path), decomp, mp);
    rec.n = cfg.minimax.n;

    const bool strict = certify_strict_minimizer(metric, density, k, alpha, decomp, cfg.seed);

    const fs::path dir = ensure_outdir(cfg);
    write_file((dir / "critical_loop.csv").string(), loop_to_csv(rec.critical_loop));
    write_file((dir / "mountainpass.svg").string(),
               render_svg(nullptr, {loop_curve(alpha, kPalette[0]),
                                    loop_curve(rec.critical_loop, kPalette[1])}));

    nlohmann::ordered_json out;
    out["k"] = rec.k;
    out["n"] = rec.n;
    out["c"] = rec.c;
    out["residual"] = rec.residual;
    out["converged"] = rec.converged;
    out["outer_iterations"] = rec.outer_iterations;
    out["direction"] = {dir_pq.first, dir_pq.second};
    out["minimizer_strict"] = strict;
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_scan(const ExperimentConfig& cfg) {
    const MetricField metric = make_metric(cfg.metric.kind, cfg.metric.params);
    const MagneticDensity density = make_density(cfg.field.kind, cfg.field.params, metric);

    const fs::path dir = ensure_outdir(cfg);
    std::vector<double> k_grid = cfg.scan.k_grid;
    double tau = 0.0;
    bool have_tau = false;
    if (density.oscillating()) {
        try {
            tau = tau_plus_estimate(metric, density, cfg.taimanov.k_lo, cfg.taimanov.k_hi,
                                    cfg.taimanov.tol_k, cfg.scan.grid_m);
            have_tau = true;
        } catch (const BracketError&) {
            have_tau = false;
        }
    }
    if (k_grid.empty()) {
        if (!have_tau) {
            // symplectic / bracketless field: empty census, no crash
            write_file((dir / "scan.csv").string(), scan_to_csv({}));
            write_file((dir / "census.json").string(), census_to_json(Census{}));
            write_file((dir / "orbits.svg").string(), render_svg(nullptr, {}));
            std::cout << "{\"orbits\":0,\"cells\":0}\n";
            return 0;
        }
        for (int i = 0; i < cfg.scan.k_count; ++i) {
            const double fr =
                cfg.scan.k_count == 1
                    ? cfg.scan.k_lo_frac
                    : cfg.scan.k_lo_frac + (cfg.scan.k_hi_frac - cfg.scan.k_lo_frac) * i /
                                               (cfg.scan.k_count - 1);
            k_grid.push_back(fr * tau);
        }
    } else if (have_tau) {
        for (double k : k_grid) {
            if (!(k > 0.0) || k >= tau) {
                throw DomainError("scan.k_grid must lie inside (0, tau_plus)");
            }
        }
    }

    ScanParams params;
    params.grid_m = cfg.scan.grid_m;
    params.n_vertices = cfg.loop.n_vertices;
    params.path_nodes = cfg.minimax.path_nodes;
    params.n_list = cfg.scan.n_list;
    params.flow.step = cfg.flow2zero.step;
    params.flow.tol_eta = cfg.flow2zero.tol_eta;
    params.flow.max_iters = cfg.flow2zero.max_iters;
    params.flow.T_min = cfg.flow2zero.T_min;
    params.flow.T_max = cfg.flow2zero.T_max;
    params.flow.metric = cfg.loop_metric();
    params.minimax.max_outer = cfg.minimax.max_outer;
    params.minimax.tol_eta = cfg.minimax.tol_eta;
    params.minimax.step = cfg.minimax.step;
    params.minimax.T_min = cfg.flow2zero.T_min;
    params.minimax.T_max = cfg.flow2zero.T_max;
    params.minimax.metric = cfg.loop_metric();
    params.distinct_tol = cfg.scan.distinct_tol;
    params.threads = worker_count(k_grid.size());

    const ScanResult result = energy_scan(metric, density, k_grid, params);

    write_file((dir / "scan.csv").string(), scan_to_csv(result.rows));
    write_file((dir / "census.json").string(), census_to_json(result.census));
    std::vector<SvgCurve> curves;
    for (const OrbitRecord& orb : result.census.orbits) {
        write_file((dir / ("orbit_" + std::to_string(orb.id) + ".csv")).string(),
                   loop_to_csv(orb.loop));
        curves.push_back(loop_curve(orb.loop, kPalette[orb.id % 6]));
    }
    write_file((dir / "orbits.svg").string(), render_svg(nullptr, curves));

    nlohmann::ordered_json summary;
    summary["orbits"] = result.census.orbits.size();
    summary["cells"] = k_grid.size();
    if (have_tau) summary["tau_plus"] = tau;
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    const std::vector<VerifyRow> rows = run_verify(cfg);
    bool all = true;
    for (const VerifyRow& r : rows) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        for (std::size_t i = r.name.size(); i < 30; ++i) std::cout << ' ';
        std::cout << r.detail << "\n";
        all = all && r.pass;
    }
    std::cout << (all ? "all invariants PASS" : "invariant FAILURES present") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magneto: closed magnetic geodesics on the two-torus"};
    app.require_subcommand(1);

    std::string config_path;
    int (*handler)(const ExperimentConfig&) = nullptr;
    for (const auto& [name, desc, fn] :
         std::vector<std::tuple<const char*, const char*, int (*)(const ExperimentConfig&)>>{
             {"simulate", "integrate the magnetic geodesic ODE", cmd_simulate},
             {"taimanov", "minimize the Taimanov functional and estimate tau_plus", cmd_taimanov},
             {"relax", "flow seed loops to zeros of the action 1-form", cmd_relax},
             {"mountainpass", "run the minimax deformation at one energy", cmd_mountainpass},
             {"scan", "energy scan: seeds, flows, mountain passes, census", cmd_scan},
             {"verify", "run the cross-module invariant suite", cmd_verify}}) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("-c,--config", config_path, "config JSON path")->required();
        sub->callback([&handler, fn] { handler = fn; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const magneto::ExperimentConfig cfg = magneto::load_config(config_path);
        return handler(cfg);
    } catch (const magneto::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const magneto::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
