#include "magneto/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "magneto/errors.hpp"

namespace magneto {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& known) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (!known.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for key '") + key + "'");
    }
}

void validate(const ExperimentConfig& c) {
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
    };
    pos(c.flow.dt, "flow.dt");
    pos(c.flow.t_end, "flow.t_end");
    pos(c.flow.closure_tol, "flow.closure_tol");
    pos(c.flow2zero.step, "flow2zero.step");
    pos(c.flow2zero.tol_eta, "flow2zero.tol_eta");
    pos(c.flow2zero.T_min, "flow2zero.T_min");
    pos(c.flow2zero.T_max, "flow2zero.T_max");
    pos(c.taimanov.tol_k, "taimanov.tol_k");
    pos(c.minimax.k, "minimax.k");
    pos(c.minimax.tol_eta, "minimax.tol_eta");
    if (c.minimax.n < 1) throw ConfigError("minimax.n must be >= 1");
    pos(c.minimax.step, "minimax.step");
    pos(c.scan.distinct_tol, "scan.distinct_tol");
    if (c.flow2zero.max_iters < 1) throw ConfigError("flow2zero.max_iters must be >= 1");
    if (c.loop.n_vertices < 8 || c.loop.n_vertices > 16384) {
        throw ConfigError("loop.n_vertices must be in [8, 16384]");
    }
    if (c.loop.metric != "h1" && c.loop.metric != "l2") {
        throw ConfigError("loop.metric must be \"h1\" or \"l2\"");
    }
    if (c.loop.flux_grid < 4 || (c.loop.flux_grid & (c.loop.flux_grid - 1)) != 0 ||
        c.loop.flux_grid > 1024) {
        throw ConfigError("loop.flux_grid must be a power of two in [4, 1024]");
    }
    if (c.taimanov.grid_m < 4 || c.taimanov.grid_m > 512) {
        throw ConfigError("taimanov.grid_m must be in [4, 512]");
    }
    if (c.scan.grid_m < 4 || c.scan.grid_m > 512) {
        throw ConfigError("scan.grid_m must be in [4, 512]");
    }
    if (c.minimax.path_nodes < 2 || c.minimax.path_nodes > 1024) {
        throw ConfigError("minimax.path_nodes must be in [2, 1024]");
    }
    if (!c.minimax.direction.empty() && c.minimax.direction.size() != 2) {
        throw ConfigError("minimax.direction must be [p, q]");
    }
    if (c.sim.q.size() != 2 || c.sim.v.size() != 2) {
        throw ConfigError("sim.q and sim.v must have 2 components");
    }
    if (c.relax.seed != "taimanov" && c.relax.seed != "file") {
        throw ConfigError("relax.seed must be \"taimanov\" or \"file\"");
    }
    pos(c.relax.k, "relax.k");
    if (c.relax.perturb < 0.0) throw ConfigError("relax.perturb must be >= 0");
}

}  // namespace

LoopMetric ExperimentConfig::loop_metric() const {
    return loop.metric == "l2" ? LoopMetric::l2 : LoopMetric::h1;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }

    check_keys(root, "config",
               {"metric", "field", "flow", "flow2zero", "loop", "taimanov", "minimax", "scan",
                "sim", "relax", "output_dir", "seed"});

    ExperimentConfig c;
    if (root.contains("metric")) {
        const json& o = root["metric"];
        check_keys(o, "metric", {"kind", "params"});
        read(o, "kind", c.metric.kind);
        read(o, "params", c.metric.params);
    }
    if (root.contains("field")) {
        const json& o = root["field"];
        check_keys(o, "field", {"kind", "params"});
        read(o, "kind", c.field.kind);
        read(o, "params", c.field.params);
    }
    if (root.contains("flow")) {
        const json& o = root["flow"];
        check_keys(o, "flow", {"dt", "t_end", "project_energy", "closure_tol"});
        read(o, "dt", c.flow.dt);
        read(o, "t_end", c.flow.t_end);
        read(o, "project_energy", c.flow.project_energy);
        read(o, "closure_tol", c.flow.closure_tol);
    }
    if (root.contains("flow2zero")) {
        const json& o = root["flow2zero"];
        check_keys(o, "flow2zero", {"step", "tol_eta", "max_iters", "T_min", "T_max"});
        read(o, "step", c.flow2zero.step);
        read(o, "tol_eta", c.flow2zero.tol_eta);
        read(o, "max_iters", c.flow2zero.max_iters);
        read(o, "T_min", c.flow2zero.T_min);
        read(o, "T_max", c.flow2zero.T_max);
    }
    if (root.contains("loop")) {
        const json& o = root["loop"];
        check_keys(o, "loop", {"n_vertices", "metric", "flux_grid"});
        read(o, "n_vertices", c.loop.n_vertices);
        read(o, "metric", c.loop.metric);
        read(o, "flux_grid", c.loop.flux_grid);
    }
    if (root.contains("taimanov")) {
        const json& o = root["taimanov"];
        check_keys(o, "taimanov", {"grid_m", "k", "k_lo", "k_hi", "tol_k"});
        read(o, "grid_m", c.taimanov.grid_m);
        read(o, "k", c.taimanov.k);
        read(o, "k_lo", c.taimanov.k_lo);
        read(o, "k_hi", c.taimanov.k_hi);
        read(o, "tol_k", c.taimanov.tol_k);
    }
    if (root.contains("minimax")) {
        const json& o = root["minimax"];
        check_keys(o, "minimax",
                   {"k", "n", "path_nodes", "max_outer", "tol_eta", "step", "direction"});
        read(o, "k", c.minimax.k);
        read(o, "n", c.minimax.n);
        read(o, "path_nodes", c.minimax.path_nodes);
        read(o, "max_outer", c.minimax.max_outer);
        read(o, "tol_eta", c.minimax.tol_eta);
        read(o, "step", c.minimax.step);
        read(o, "direction", c.minimax.direction);
    }
    if (root.contains("scan")) {
        const json& o = root["scan"];
        check_keys(o, "scan",
                   {"k_grid", "k_count", "k_lo_frac", "k_hi_frac", "n_list", "grid_m",
                    "distinct_tol"});
        read(o, "k_grid", c.scan.k_grid);
        read(o, "k_count", c.scan.k_count);
        read(o, "k_lo_frac", c.scan.k_lo_frac);
        read(o, "k_hi_frac", c.scan.k_hi_frac);
        read(o, "n_list", c.scan.n_list);
        read(o, "grid_m", c.scan.grid_m);
        read(o, "distinct_tol", c.scan.distinct_tol);
    }
    if (root.contains("sim")) {
        const json& o = root["sim"];
        check_keys(o, "sim", {"q", "v"});
        read(o, "q", c.sim.q);
        read(o, "v", c.sim.v);
    }
    if (root.contains("relax")) {
        const json& o = root["relax"];
        check_keys(o, "relax", {"seed", "file", "k", "perturb"});
        read(o, "seed", c.relax.seed);
        read(o, "file", c.relax.file);
        read(o, "k", c.relax.k);
        read(o, "perturb", c.relax.perturb);
    }
    read(root, "output_dir", c.output_dir);
    read(root, "seed", c.seed);

    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string config_to_json(const ExperimentConfig& c) {
    json root;
    root["metric"] = {{"kind", c.metric.kind}, {"params", c.metric.params}};
    root["field"] = {{"kind", c.field.kind}, {"params", c.field.params}};
    root["flow"] = {{"dt", c.flow.dt},
                    {"t_end", c.flow.t_end},
                    {"project_energy", c.flow.project_energy},
                    {"closure_tol", c.flow.closure_tol}};
    root["flow2zero"] = {{"step", c.flow2zero.step},
                         {"tol_eta", c.flow2zero.tol_eta},
                         {"max_iters", c.flow2zero.max_iters},
                         {"T_min", c.flow2zero.T_min},
                         {"T_max", c.flow2zero.T_max}};
    root["loop"] = {{"n_vertices", c.loop.n_vertices},
                    {"metric", c.loop.metric},
                    {"flux_grid", c.loop.flux_grid}};
    root["taimanov"] = {{"grid_m", c.taimanov.grid_m},
                        {"k", c.taimanov.k},
                        {"k_lo", c.taimanov.k_lo},
                        {"k_hi", c.taimanov.k_hi},
                        {"tol_k", c.taimanov.tol_k}};
    root["minimax"] = {{"k", c.minimax.k},
                       {"n", c.minimax.n},
                       {"path_nodes", c.minimax.path_nodes},
                       {"max_outer", c.minimax.max_outer},
                       {"tol_eta", c.minimax.tol_eta},
                       {"step", c.minimax.step},
                       {"direction", c.minimax.direction}};
    root["scan"] = {{"k_grid", c.scan.k_grid},       {"k_count", c.scan.k_count},
                    {"k_lo_frac", c.scan.k_lo_frac}, {"k_hi_frac", c.scan.k_hi_frac},
                    {"n_list", c.scan.n_list},       {"grid_m", c.scan.grid_m},
                    {"distinct_tol", c.scan.distinct_tol}};
    root["sim"] = {{"q", c.sim.q}, {"v", c.sim.v}};
    root["relax"] = {{"seed", c.relax.seed},
                     {"file", c.relax.file},
                     {"k", c.relax.k},
                     {"perturb", c.relax.perturb}};
    root["output_dir"] = c.output_dir;
    root["seed"] = c.seed;
    return root.dump(2) + "\n";
}

}  // namespace magneto
