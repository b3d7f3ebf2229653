#include "magneto/minimax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>

namespace magneto {

double transgression(const LoopPath& path) {
    double acc = 0.0;
    for (int seg = 0; seg < path.segments(); ++seg) {
        const DiscreteLoop& a = path.nodes[seg];
        const DiscreteLoop& b = path.nodes[seg + 1];
        DiscreteLoop mid = a;
        for (int i = 0; i < a.n(); ++i) mid.x[i] = 0.5 * (a.x[i] + b.x[i]);
        mid.T = 0.5 * (a.T + b.T);
        for (int i = 0; i < a.n(); ++i) {
            acc += cross(b.x[i] - a.x[i], mid.edge(i));
        }
    }
    return acc;
}

std::vector<double> eta_line_integral(const MetricField& m, const MagneticDensity& f, double k,
                                      const LoopPath& path, const FluxDecomposition& d) {
    std::vector<double> s(path.nodes.size());
    s[0] = local_action(m, f, k, path.nodes[0], d);
    for (int seg = 0; seg < path.segments(); ++seg) {
        const DiscreteLoop& a = path.nodes[seg];
        const DiscreteLoop& b = path.nodes[seg + 1];
        DiscreteLoop mid = a;
        for (int i = 0; i < a.n(); ++i) mid.x[i] = 0.5 * (a.x[i] + b.x[i]);
        mid.T = 0.5 * (a.T + b.T);
        const ActionCovector cov = eta(m, f, k, mid, d, LoopMetric::l2);
        LoopTangent diff;
        diff.dx.resize(a.x.size());
        for (int i = 0; i < a.n(); ++i) diff.dx[i] = b.x[i] - a.x[i];
        diff.dT = b.T - a.T;
        s[seg + 1] = s[seg] + pair(cov, diff);
    }
    return s;
}

std::pair<int, int> default_direction(int wind_a, int wind_b) {
    if (wind_a == 0 && wind_b == 0) {
        throw InvalidDirectionError("no admissible direction for a contractible class");
    }
    struct Cand {
        int p, q;
    };
    std::vector<Cand> cands;
    for (int p = -3; p <= 3; ++p) {
        for (int q = -3; q <= 3; ++q) {
            if (p != 0 || q != 0) cands.push_back({p, q});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
        const int nl = l.p * l.p + l.q * l.q, nr = r.p * r.p + r.q * r.q;
        if (nl != nr) return nl < nr;
        if (l.p != r.p) return l.p < r.p;
        return l.q < r.q;
    });
    for (const Cand& c : cands) {
        if (c.p * wind_b - c.q * wind_a != 0) return {c.p, c.q};
    }
    throw InvalidDirectionError("no admissible direction found");
}

LoopPath build_class_representative(const DiscreteLoop& alpha, int n, int p, int q,
                                    int path_nodes) {
    if (n < 1) throw DomainError("build_class_representative: n must be >= 1");
    if (p * alpha.wind_b - q * alpha.wind_a == 0) {
        throw InvalidDirectionError("direction pairs to zero with the winding class");
    }
    if (path_nodes < 2) throw DomainError("build_class_representative: need >= 2 segments");

    const DiscreteLoop base = iterate(alpha, n);
    LoopPath path;
    path.nodes.reserve(path_nodes + 1);
    for (int j = 0; j <= path_nodes; ++j) {
        const Vec2 off{double(p) * j / path_nodes, double(q) * j / path_nodes};
        DiscreteLoop node = base;
        for (Vec2& v : node.x) v += off;
        path.nodes.push_back(std::move(node));
    }
    return path;
}

namespace {

double node_distance(const DiscreteLoop& a, const DiscreteLoop& b) {
    double acc = 0.0;
    for (int i = 0; i < a.n(); ++i) {
        const Vec2 d = b.x[i] - a.x[i];
        acc += dot(d, d);
    }
    const double dT = b.T - a.T;
    return std::sqrt(acc / a.n() + dT * dT);
}

// Piecewise-linear re-spacing of the path nodes at uniform cumulative
// distance; endpoints stay put.
void respace(LoopPath& path) {
    const int mseg = path.segments();
    std::vector<double> cum(mseg + 1, 0.0);
    for (int j = 0; j < mseg; ++j) {
        cum[j + 1] = cum[j] + node_distance(path.nodes[j], path.nodes[j + 1]);
    }
    if (!(cum[mseg] > 0.0)) return;

    std::vector<DiscreteLoop> fresh;
    fresh.reserve(mseg + 1);
    fresh.push_back(path.nodes.front());
    int seg = 0;
    for (int j = 1; j < mseg; ++j) {
        const double t = cum[mseg] * j / mseg;
        while (seg + 1 < mseg && cum[seg + 1] <= t) ++seg;
        const double span = cum[seg + 1] - cum[seg];
        const double u = span > 0.0 ? (t - cum[seg]) / span : 0.0;
        const DiscreteLoop& a = path.nodes[seg];
        const DiscreteLoop& b = path.nodes[seg + 1];
        DiscreteLoop node = a;
        for (int i = 0; i < a.n(); ++i) node.x[i] = (1.0 - u) * a.x[i] + u * b.x[i];
        node.T = (1.0 - u) * a.T + u * b.T;
        fresh.push_back(std::move(node));
    }
    fresh.push_back(path.nodes.back());
    path.nodes = std::move(fresh);
}

}  // namespace

MinimaxRecord mountain_pass(const MetricField& m, const MagneticDensity& f, double k,
                            LoopPath path, const FluxDecomposition& d,
                            const MinimaxParams& params) {
    if (path.nodes.size() < 3) throw DomainError("mountain_pass: path needs >= 3 nodes");
    const int nloop = path.nodes.front().n();
    for (const DiscreteLoop& node : path.nodes) {
        if (node.n() != nloop || node.wind_a != path.nodes[0].wind_a ||
            node.wind_b != path.nodes[0].wind_b) {
            throw DomainError("mountain_pass: nodes must share vertex count and winding");
        }
    }
    if (cyclic_aligned_distance(path.nodes.front(), path.nodes.back()) > 1e-6) {
        throw DomainError("mountain_pass: endpoints must coincide up to cyclic reindexing");
    }
    for (const DiscreteLoop* endp : {&path.nodes.front(), &path.nodes.back()}) {
        const double r = eta(m, f, k, *endp, d, params.metric).h1_norm;
        if (r >= params.tol_eta) {
            throw DomainError("mountain_pass: endpoints are not converged local minimizers");
        }
    }

    const double trans0 = transgression(path);
    const int mseg = path.segments();
    double step = params.step;

    MinimaxRecord rec;
    rec.k = k;

    std::vector<double> s = eta_line_integral(m, f, k, path, d);
    rec.c_initial = *std::max_element(s.begin(), s.end());
    int outer = 0;
    for (; outer < params.max_outer; ++outer) {
        const int jmax = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
        const double res = eta(m, f, k, path.nodes[jmax], d, params.metric).h1_norm;
        rec.c = s[jmax];
        rec.critical_loop = path.nodes[jmax];
        rec.residual = res;
        if (res < params.tol_eta) {
            rec.converged = true;
            break;
        }

        const double s_floor = std::max(s.front(), s.back());
        const double denom = s[jmax] - s_floor;
        LoopPath cand = path;
        for (int j = 1; j < mseg; ++j) {
            double w = denom > 1e-15 * (1.0 + std::abs(s[jmax]))
                           ? std::clamp((s[j] - s_floor) / denom, 0.0, 1.0)
                           : 1.0;
            if (w <= 0.0) continue;
            const LoopTangent dir = xk(m, f, k, cand.nodes[j], d, params.metric);
            DiscreteLoop& node = cand.nodes[j];
            for (int i = 0; i < node.n(); ++i) node.x[i] += step * w * dir.dx[i];
            node.T += step * w * dir.dT;
            if (node.T < params.T_min || node.T > params.T_max) {
                throw DomainError("mountain_pass: period guard violated along the path");
            }
        }
        respace(cand);

        const std::vector<double> s_new = eta_line_integral(m, f, k, cand, d);
        const double old_max = *std::max_element(s.begin(), s.end());
        const double new_max = *std::max_element(s_new.begin(), s_new.end());
        if (new_max <= old_max + 1e-13 * (1.0 + std::abs(old_max))) {
            path = std::move(cand);
            s = s_new;
            const double tr = transgression(path);
            if (std::abs(tr - trans0) > params.trans_tol) {
                throw ClassEscapeError("mountain_pass: transgression changed under deformation");
            }
        } else {
            step *= 0.5;
            if (step < 1e-10) break;  // stalled
        }
    }
    rec.outer_iterations = outer;

    if (params.polish && !rec.critical_loop.x.empty()) {
        DiscreteLoop polished = rec.critical_loop;
        const double res = newton_polish(m, f, k, polished, d, 8, 1e-10, params.metric);
        if (res < rec.residual) {
            rec.critical_loop = std::move(polished);
            rec.residual = res;
        }
        if (rec.residual < params.tol_eta) rec.converged = true;
    }
    return rec;
}

bool certify_strict_minimizer(const MetricField& m, const MagneticDensity& f, double k,
                              const DiscreteLoop& g, const FluxDecomposition& d,
                              std::uint64_t seed, int trials, double eps) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double base = local_action(m, f, k, g, d);
    const int n = g.n();
    constexpr int kModes = 4;  // smooth (H^1-bounded) probe directions
    for (int t = 0; t < trials; ++t) {
        double ax[kModes + 1][2], bx[kModes + 1][2];
        for (int mo = 0; mo <= kModes; ++mo) {
            for (int c = 0; c < 2; ++c) {
                ax[mo][c] = gauss(rng);
                bx[mo][c] = gauss(rng);
            }
        }
        std::vector<Vec2> xi(n);
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = double(i) / n;
            Vec2 v{};
            for (int mo = 0; mo <= kModes; ++mo) {
                const double cs = std::cos(2.0 * 3.141592653589793 * mo * s);
                const double sn = std::sin(2.0 * 3.141592653589793 * mo * s);
                v += Vec2{ax[mo][0] * cs + bx[mo][0] * sn, ax[mo][1] * cs + bx[mo][1] * sn};
            }
            xi[i] = v;
            norm2 += dot(v, v) / n;
        }
        double xiT = gauss(rng);
        norm2 += xiT * xiT;
        const double scale = eps / std::sqrt(norm2);
        DiscreteLoop pert = g;
        for (int i = 0; i < n; ++i) pert.x[i] += scale * xi[i];
        pert.T += scale * xiT;
        if (!(pert.T > 0.0)) return false;
        if (!(local_action(m, f, k, pert, d) > base)) return false;
    }
    return true;
}

double hausdorff_image_distance(const DiscreteLoop& a, const DiscreteLoop& b) {
    auto directed = [](const DiscreteLoop& u, const DiscreteLoop& v) {
        double worst = 0.0;
        for (const Vec2& p : u.x) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& q : v.x) best = std::min(best, torus_dist(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double cyclic_aligned_distance(const DiscreteLoop& a, const DiscreteLoop& b) {
    if (a.n() != b.n()) return hausdorff_image_distance(a, b);
    const int n = a.n();
    double best = std::numeric_limits<double>::infinity();
    for (int shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (int i = 0; i < n && worst < best; ++i) {
            worst = std::max(worst, torus_dist(a.x[i], b.x[(i + shift) % n]));
        }
        best = std::min(best, worst);
    }
    return best;
}

std::string loop_hash(const DiscreteLoop& g) {
    const int n = g.n();
    std::vector<std::pair<long long, long long>> quant(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 r = reduce_torus(g.x[i]);
        long long qx = std::llround(r.x * 1e6) % 1000000;
        long long qy = std::llround(r.y * 1e6) % 1000000;
        quant[i] = {qx, qy};
    }
    int start = 0;
    for (int i = 1; i < n; ++i) {
        if (quant[i] < quant[start]) start = i;
    }
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (v >> (8 * byte)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    for (int i = 0; i < n; ++i) {
        const auto& qv = quant[(start + i) % n];
        mix(static_cast<std::uint64_t>(qv.first));
        mix(static_cast<std::uint64_t>(qv.second));
    }
    mix(static_cast<std::uint64_t>(std::llround(g.T * 1e6)));
    mix(static_cast<std::uint64_t>(g.wind_a + 1000));
    mix(static_cast<std::uint64_t>(g.wind_b + 1000));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

struct CellOutput {
    std::vector<ScanRow> rows;
    struct Candidate {
        DiscreteLoop loop;
        double residual;
        double k;
    };
    std::vector<Candidate> candidates;
};

double curvature_law_residual(const MetricField& m, const MagneticDensity& f, double k,
                              const DiscreteLoop& loop) {
    const DiscreteLoop probe =
        loop.n() >= 256 ? loop : resample_uniform_arclength(m, loop, 256);
    const std::vector<double> kappa = geodesic_curvature(m, probe.x, probe.winding_vec());
    double worst = 0.0;
    const double root2k = std::sqrt(2.0 * k);
    for (int i = 0; i < probe.n(); ++i) {
        worst = std::max(worst, std::abs(kappa[i] + f.at(probe.x[i]) / root2k));
    }
    return worst;
}

CellOutput run_scan_cell(const MetricField& m, const MagneticDensity& f, double k,
                         const FluxDecomposition& d, const ScanParams& params) {
    CellOutput out;
    auto error_row = [&](int n, const std::string& what) {
        out.rows.push_back({k, n, 0.0, 0.0, 0.0, 0, 0, "error:" + what});
    };

    GridRegion region;
    try {
        region = minimize_taimanov(m, f, k, params.grid_m);
    } catch (const DomainError& e) {
        error_row(0, e.what());
        return out;
    }
    if (region.value >= -1e-12 || region.count() == 0) {
        out.rows.push_back({k, 0, 0.0, 0.0, 0.0, 0, 0, "no_seed"});
        return out;
    }

    std::vector<DiscreteLoop> minimizers;
    try {
        for (const DiscreteLoop& seed : boundary_to_seed(m, f, k, region, params.n_vertices)) {
            FlowParams fp = params.flow;
            fp.metric = params.minimax.metric;
            const FlowResult fr = flow_to_zero(m, f, k, seed, d, fp);
            const double c = local_action(m, f, k, fr.final, d);
            out.rows.push_back({k, 0, c, fr.residual, fr.final.T, fr.final.wind_a,
                                fr.final.wind_b, to_string(fr.status)});
            if (fr.status == FlowStatus::converged) {
                out.candidates.push_back({fr.final, fr.residual, k});
                minimizers.push_back(fr.final);
            }
        }
    } catch (const DomainError& e) {
        error_row(0, e.what());
    }
    if (minimizers.empty()) return out;

    const DiscreteLoop& alpha = minimizers.front();
    std::pair<int, int> dir;
    try {
        dir = default_direction(alpha.wind_a, alpha.wind_b);
    } catch (const DomainError& e) {
        error_row(1, e.what());
        return out;
    }

    for (int n : params.n_list) {
        try {
            LoopPath path =
                build_class_representative(alpha, n, dir.first, dir.second, params.path_nodes);
            MinimaxParams mp = params.minimax;
            MinimaxRecord rec = mountain_pass(m, f, k, std::move(path), d, mp);
            rec.n = n;
            out.rows.push_back({k, n, rec.c, rec.residual, rec.critical_loop.T,
                                rec.critical_loop.wind_a, rec.critical_loop.wind_b,
                                rec.converged ? "mp_converged" : "mp_max_outer"});
            if (rec.converged && rec.residual < params.flow.tol_eta) {
                out.candidates.push_back({rec.critical_loop, rec.residual, k});
            }
        } catch (const DomainError& e) {
            error_row(n, e.what());
        }
    }
    return out;
}

}  // namespace

ScanResult energy_scan(const MetricField& m, const MagneticDensity& f,
                       const std::vector<double>& k_grid, const ScanParams& params) {
    const FluxDecomposition d = flux_decompose(m, f, 128);

    std::vector<CellOutput> cells(k_grid.size());
    const int n_threads =
        std::max(1, std::min<int>(params.threads, static_cast<int>(k_grid.size())));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < k_grid.size(); ++i) {
            cells[i] = run_scan_cell(m, f, k_grid[i], d, params);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= k_grid.size()) break;
                    cells[i] = run_scan_cell(m, f, k_grid[i], d, params);
                }
            });
        }
        for (std::thread& th : pool) th.join();
    }

    // Deterministic aggregation in k order.
    ScanResult result;
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        for (const ScanRow& row : cells[i].rows) result.rows.push_back(row);
        for (const CellOutput::Candidate& cand : cells[i].candidates) {
            int match = -1;
            for (const OrbitRecord& orb : result.census.orbits) {
                if (hausdorff_image_distance(orb.loop, cand.loop) <= params.distinct_tol) {
                    match = orb.id;
                    break;
                }
            }
            if (match < 0) {
                OrbitRecord orb;
                orb.id = static_cast<int>(result.census.orbits.size());
                orb.loop = cand.loop;
                orb.hash = loop_hash(cand.loop);
                orb.T = cand.loop.T;
                orb.wind_a = cand.loop.wind_a;
                orb.wind_b = cand.loop.wind_b;
                orb.residual = cand.residual;
                orb.energy = cand.k;
                orb.curvature_residual = curvature_law_residual(m, f, cand.k, cand.loop);
                match = orb.id;
                result.census.orbits.push_back(std::move(orb));
            }
            std::vector<int>& ids = result.census.by_energy[cand.k];
            if (std::find(ids.begin(), ids.end(), match) == ids.end()) ids.push_back(match);
        }
    }
    for (auto& [kk, ids] : result.census.by_energy) std::sort(ids.begin(), ids.end());
    return result;
}

}  // namespace magneto
