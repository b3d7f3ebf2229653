#include "magneto/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "magneto/flow.hpp"
#include "magneto/gradientflow.hpp"
#include "magneto/minimax.hpp"
#include "magneto/taimanov.hpp"

namespace magneto {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

DiscreteLoop random_loop(std::mt19937_64& rng, int n, int wind_a, int wind_b) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const Vec2 base{uni(rng), uni(rng)};
    std::vector<Vec2> verts(n);
    const double r1 = 0.05 + 0.1 * uni(rng), r2 = 0.05 + 0.1 * uni(rng);
    const double ph1 = kTwoPi * uni(rng), ph2 = kTwoPi * uni(rng);
    for (int i = 0; i < n; ++i) {
        const double s = double(i) / n;
        verts[i] = base + Vec2{wind_a * s, wind_b * s} +
                   Vec2{r1 * std::cos(kTwoPi * s + ph1), r2 * std::sin(kTwoPi * s + ph2)};
    }
    return make_loop(std::move(verts), 0.5 + uni(rng), wind_a, wind_b);
}

}  // namespace

std::vector<VerifyRow> run_verify(const ExperimentConfig& cfg) {
    std::vector<VerifyRow> rows;
    auto add = [&rows](const std::string& name, bool pass, const std::string& detail) {
        rows.push_back({name, pass, detail});
    };
    std::ostringstream ss;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const MetricField metric = make_metric(cfg.metric.kind, cfg.metric.params);
    const MagneticDensity density = make_density(cfg.field.kind, cfg.field.params, metric);
    const FluxDecomposition decomp = flux_decompose(metric, density, cfg.loop.flux_grid);

    // metric periodicity and positivity
    {
        double worst = 0.0;
        for (int t = 0; t < 32; ++t) {
            const Vec2 q{uni(rng), uni(rng)};
            const Mat2 g0 = metric.at(q);
            const Mat2 g1 = metric.at(q + Vec2{1.0, 0.0});
            const Mat2 g2 = metric.at(q + Vec2{0.0, 1.0});
            worst = std::max({worst, std::abs(g1.xx - g0.xx), std::abs(g1.yy - g0.yy),
                              std::abs(g2.xx - g0.xx), std::abs(g2.yy - g0.yy),
                              std::abs(g1.xy - g0.xy), std::abs(g2.xy - g0.xy)});
        }
        ss.str("");
        ss << "max deviation " << worst;
        add("metric-periodic", worst == 0.0, ss.str());
    }

    // Lorentz defining identity g(u,Y) = f sqrt(det G) (u1 v2 - u2 v1)
    {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const Vec2 q{uni(rng), uni(rng)};
            const Vec2 u{2.0 * uni(rng) - 1.0, 2.0 * uni(rng) - 1.0};
            const Vec2 v{2.0 * uni(rng) - 1.0, 2.0 * uni(rng) - 1.0};
            const Vec2 y = lorentz(metric, density, q, v);
            const Mat2 g = metric.at(q);
            const double lhs = dot(u, g * y);
            const double rhs = density.at(q) * std::sqrt(g.det()) * cross(u, v);
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + norm(u) * norm(v)));
        }
        ss.str("");
        ss << "max residual " << worst;
        add("lorentz-identity", worst < 1e-10, ss.str());
    }

    // Christoffel symmetry and metric compatibility (finite differences)
    {
        double worst_sym = 0.0, worst_comp = 0.0;
        for (int t = 0; t < 20; ++t) {
            const Vec2 q{uni(rng), uni(rng)};
            const ChristoffelSymbols gam = christoffel(metric, q);
            worst_sym = std::max({worst_sym, std::abs(gam[0].xy - gam[0].yx),
                                  std::abs(gam[1].xy - gam[1].yx)});
            // d_k g_ij - Gamma^l_{ki} g_lj - Gamma^l_{kj} g_il = 0
            const Mat2 g = metric.at(q);
            const std::array<Mat2, 2> dg = metric.deriv(q);
            auto at = [](const Mat2& mm, int r, int c) {
                return r == 0 ? (c == 0 ? mm.xx : mm.xy) : (c == 0 ? mm.yx : mm.yy);
            };
            auto gamma = [&](int i, int j, int kk) { return at(gam[i], j, kk); };
            for (int kk = 0; kk < 2; ++kk) {
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) {
                        double resid = at(dg[kk], i, j);
                        for (int l = 0; l < 2; ++l) {
                            resid -= gamma(l, kk, i) * at(g, l, j) + gamma(l, kk, j) * at(g, i, l);
                        }
                        worst_comp = std::max(worst_comp, std::abs(resid));
                    }
                }
            }
        }
        ss.str("");
        ss << "symmetry " << worst_sym << ", compatibility " << worst_comp;
        add("christoffel", worst_sym == 0.0 && worst_comp < 1e-5, ss.str());
    }

    // flux decomposition: curl theta0 = f sqrt(det G) - c on the grid
    {
        double worst = 0.0;
        for (int j = 0; j < kValidationGrid; ++j) {
            for (int i = 0; i < kValidationGrid; ++i) {
                const Vec2 q{(i + 0.5) / kValidationGrid, (j + 0.5) / kValidationGrid};
                const double target = density.at(q) * metric.sqrt_det(q) - decomp.flux;
                worst = std::max(worst, std::abs(decomp.curl(q) - target));
            }
        }
        ss.str("");
        ss << "max curl residual " << worst;
        add("flux-decomposition", worst < 1e-6, ss.str());
    }

    // energy conservation + time reversal of the ODE
    {
        const TangentState s0{{cfg.sim.q[0], cfg.sim.q[1]}, {cfg.sim.v[0], cfg.sim.v[1]}};
        const Trajectory traj = integrate(metric, density, s0, 1.0, 1e-3, false);
        ss.str("");
        ss << "relative drift " << traj.energy_drift << " over t=1";
        add("energy-conservation", traj.energy_drift < 1e-8, ss.str());

        const MagneticDensity neg = make_density(
            cfg.field.kind,
            [&] {
                std::vector<double> p = cfg.field.params;
                for (double& v : p) v = -v;
                return p;
            }(),
            metric);
        const TangentState back0{traj.states.back().q, -traj.states.back().v};
        const Trajectory back = integrate(metric, neg, back0, 1.0, 1e-3, false);
        double worst = 0.0;
        const std::size_t n = traj.states.size();
        for (std::size_t i = 0; i < n; ++i) {
            const TangentState& fwd = traj.states[i];
            const TangentState& rev = back.states[n - 1 - i];
            worst = std::max(worst, norm(fwd.q - rev.q) + norm(fwd.v + rev.v));
        }
        ss.str("");
        ss << "max retrace deviation " << worst;
        add("time-reversal", worst < 1e-8, ss.str());
    }

    // eta is the exact differential of the local action (FD pairing)
    {
        const int n = 64;
        DiscreteLoop loop = random_loop(rng, n, 0, 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst = 0.0;
        const ActionCovector cov = eta(metric, density, 0.3, loop, decomp);
        for (int t = 0; t < 40; ++t) {
            LoopTangent xi;
            xi.dx.resize(n);
            for (Vec2& v : xi.dx) v = {gauss(rng), gauss(rng)};
            xi.dT = gauss(rng);
            const double h = 1e-6;
            DiscreteLoop up = loop, dn = loop;
            for (int i = 0; i < n; ++i) {
                up.x[i] += h * xi.dx[i];
                dn.x[i] -= h * xi.dx[i];
            }
            up.T += h * xi.dT;
            dn.T -= h * xi.dT;
            const double fd = (local_action(metric, density, 0.3, up, decomp) -
                               local_action(metric, density, 0.3, dn, decomp)) /
                              (2.0 * h);
            const double an = pair(cov, xi);
            worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(fd)));
        }
        ss.str("");
        ss << "max relative mismatch " << worst;
        add("eta-gradient-consistency", worst < 1e-6, ss.str());
    }

    // cyclic reindexing invariance and iteration identities
    {
        DiscreteLoop loop = random_loop(rng, 48, 1, 0);
        const double e0 = kinetic_energy(metric, loop);
        const double a0 = action(metric, 0.2, loop);
        const double n0 = eta(metric, density, 0.2, loop, decomp).h1_norm;
        double worst = 0.0;
        for (int shift : {1, 7, 23}) {
            const DiscreteLoop r = reindex(loop, shift);
            worst = std::max({worst, std::abs(kinetic_energy(metric, r) - e0),
                              std::abs(action(metric, 0.2, r) - a0),
                              std::abs(eta(metric, density, 0.2, r, decomp).h1_norm - n0)});
        }
        ss.str("");
        ss << "max deviation " << worst;
        add("cyclic-invariance", worst < 1e-12, ss.str());

        const DiscreteLoop it3 = iterate(loop, 3);
        const double err_e = std::abs(kinetic_energy(metric, it3) - 9.0 * e0);
        const double err_a = std::abs(action(metric, 0.2, it3) - 3.0 * a0);
        const bool wind_ok = it3.wind_a == 3 * loop.wind_a && it3.wind_b == 3 * loop.wind_b;
        ss.str("");
        ss << "e error " << err_e << ", action error " << err_a;
        add("iteration-identities", err_e < 1e-10 && err_a < 1e-10 && wind_ok, ss.str());
    }

    // X_k normalization and strict descent pairing
    {
        bool ok = true;
        double worst_pair = 0.0;
        for (int t = 0; t < 20; ++t) {
            DiscreteLoop loop = random_loop(rng, 32, 0, 1);
            const ActionCovector cov = eta(metric, density, 0.25, loop, decomp);
            const LoopTangent x = xk(metric, density, 0.25, loop, decomp);
            const double p = pair(cov, x);
            if (cov.h1_norm > 1e-12 && !(p < 0.0)) ok = false;
            worst_pair = std::max(worst_pair, p);
        }
        ss.str("");
        ss << "max pairing " << worst_pair;
        add("xk-descent-direction", ok, ss.str());
    }

    // exact discrete identity S_{k+} - S_{k-} = (k+ - k-) T(s)
    {
        DiscreteLoop alpha = random_loop(rng, 32, 0, 1);
        LoopPath path = build_class_representative(alpha, 1, 1, 0, 12);
        for (std::size_t j = 0; j < path.nodes.size(); ++j) {
            path.nodes[j].T += 0.1 * std::sin(kTwoPi * j / path.nodes.size());
        }
        const double klo = 0.11, khi = 0.29;
        const std::vector<double> slo = eta_line_integral(metric, density, klo, path, decomp);
        const std::vector<double> shi = eta_line_integral(metric, density, khi, path, decomp);
        double worst = 0.0;
        for (std::size_t j = 0; j < path.nodes.size(); ++j) {
            const double lhs = shi[j] - slo[j];
            const double rhs = (khi - klo) * path.nodes[j].T;
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(shi[j])));
        }
        ss.str("");
        ss << "max relative deviation " << worst;
        add("energy-variation-identity", worst < 1e-12, ss.str());
    }

    // transgression pairing on translated paths
    {
        double worst = 0.0;
        for (const auto& [a, b, p, q] :
             std::vector<std::array<int, 4>>{{0, 1, 1, 0}, {1, 2, 1, 0}, {2, 1, 0, 1}}) {
            DiscreteLoop alpha = random_loop(rng, 24, a, b);
            const LoopPath path = build_class_representative(alpha, 1, p, q, 10);
            worst = std::max(worst, std::abs(transgression(path) - double(p * b - q * a)));
        }
        ss.str("");
        ss << "max pairing deviation " << worst;
        add("transgression-pairing", worst < 1e-10, ss.str());
    }

    // Taimanov: small-grid min-cut vs exhaustive enumeration, monotonicity
    {
        const int gm = 4;
        double worst = 0.0;
        bool mono_ok = true;
        double prev = -1e300;
        for (double k : {0.004, 0.008, 0.016, 0.032}) {
            const GridRegion best = minimize_taimanov(metric, density, k, gm);
            double brute = 1e300;
            for (int bits = 0; bits < (1 << (gm * gm)); ++bits) {
                GridRegion r;
                r.m = gm;
                r.mask.assign(gm * gm, 0);
                for (int c = 0; c < gm * gm; ++c) r.mask[c] = (bits >> c) & 1;
                brute = std::min(brute, taimanov_value(metric, density, k, r));
            }
            worst = std::max(worst, std::abs(best.value - brute));
            if (best.value < prev - 1e-12) mono_ok = false;
            prev = best.value;
        }
        ss.str("");
        ss << "max |mincut - enumeration| " << worst;
        add("taimanov-exactness", worst < 1e-10 && mono_ok, ss.str());
    }

    return rows;
}

}  // namespace magneto
