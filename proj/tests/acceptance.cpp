// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magneto/flow.hpp"
#include "magneto/gradientflow.hpp"
#include "magneto/io.hpp"
#include "magneto/minimax.hpp"
#include "magneto/taimanov.hpp"

using namespace magneto;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

struct Reporter {
    int failures = 0;
    void line(const std::string& name, bool pass, const std::string& detail) {
        std::printf("%s  %-34s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        try {
            const auto [pass, detail] = fn();
            line(name, pass, detail);
        } catch (const std::exception& e) {
            line(name, false, std::string("exception: ") + e.what());
        }
    }
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

DiscreteLoop larmor_loop(int n) {
    const double B = 4.0 * kPi;
    std::vector<Vec2> verts(n);
    for (int i = 0; i < n; ++i) {
        const double t = 0.5 * i / n;
        verts[i] = Vec2{0.5, 0.5} + (1.0 / B) * Vec2{std::sin(B * t), std::cos(B * t) - 1.0};
    }
    return make_loop(std::move(verts), 0.5, 0, 0);
}

double curvature_residual(const MetricField& m, const MagneticDensity& f, double k,
                          const DiscreteLoop& loop) {
    const DiscreteLoop probe = loop.n() >= 256 ? loop : resample_uniform_arclength(m, loop, 256);
    const std::vector<double> kappa = geodesic_curvature(m, probe.x, probe.winding_vec());
    double worst = 0.0;
    for (int i = 0; i < probe.n(); ++i) {
        worst = std::max(worst, std::abs(kappa[i] + f.at(probe.x[i]) / std::sqrt(2.0 * k)));
    }
    return worst;
}

DiscreteLoop random_winding_loop(std::mt19937_64& rng, int n, int a, int b) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vec2> verts(n);
    const double r1 = 0.02 + 0.08 * uni(rng), r2 = 0.02 + 0.08 * uni(rng);
    const double p1 = kTwoPi * uni(rng), p2 = kTwoPi * uni(rng);
    const Vec2 base{uni(rng), uni(rng)};
    for (int i = 0; i < n; ++i) {
        const double s = double(i) / n;
        verts[i] = base + Vec2{a * s + r1 * std::cos(kTwoPi * s + p1),
                               b * s + r2 * std::sin(kTwoPi * s + p2)};
    }
    return make_loop(std::move(verts), 0.3 + 2.0 * uni(rng), a, b);
}

}  // namespace

int main() {
    Reporter rep;

    const MetricField flat = make_metric("flat", {});
    const MagneticDensity larmor_field = make_density("constant", {4.0 * kPi}, flat);
    const MagneticDensity osc = make_density("trigpoly", {1.0, -2.0}, flat);
    const FluxDecomposition larmor_decomp = flux_decompose(flat, larmor_field, 64);
    const FluxDecomposition osc_decomp = flux_decompose(flat, osc, 128);

    // shared pipeline products, reused across criteria
    std::vector<DiscreteLoop> certified_orbits;  // (loop, k) pairs via parallel vector
    std::vector<double> certified_energy;

    // 1. Larmor oracle -------------------------------------------------------
    Trajectory larmor_traj;
    rep.run("1-larmor-oracle", [&]() -> std::pair<bool, std::string> {
        const double t0 = now_s();
        larmor_traj = integrate(flat, larmor_field, {{0.5, 0.5}, {1.0, 0.0}}, 100.0, 1e-3);
        const auto closure = detect_closure(larmor_traj, 1e-5);
        const double elapsed = now_s() - t0;
        if (!closure) return {false, "no closure detected"};
        const double period_err = std::abs(closure->period - 0.5);
        std::ostringstream ss;
        ss << "period err " << period_err << ", drift " << larmor_traj.energy_drift << ", "
           << elapsed << " s";
        return {period_err < 1e-6 && larmor_traj.energy_drift < 1e-6 && elapsed < 5.0,
                ss.str()};
    });

    // 2. curvature law for every converged orbit -----------------------------
    // (a) the ODE-closed Larmor orbit at k = 1/2
    rep.run("2-curvature-law", [&]() -> std::pair<bool, std::string> {
        const std::vector<TangentState> samples =
            sample_orbit(flat, larmor_field, {{0.5, 0.5}, {1.0, 0.0}}, 0.5, 512);
        std::vector<Vec2> pts;
        for (const TangentState& s : samples) pts.push_back(s.q);
        const DiscreteLoop ode_orbit = make_loop(pts, 0.5, 0, 0);
        double worst = curvature_residual(flat, larmor_field, 0.5, ode_orbit);

        // (b) eta-residual-converged orbits in the oscillating scenario
        const double k = 0.004;
        const GridRegion region = minimize_taimanov(flat, osc, k, 64);
        FlowParams fp;
        fp.tol_eta = 1e-6;
        fp.max_iters = 60000;
        int n_conv = 0;
        for (const DiscreteLoop& seed : boundary_to_seed(flat, osc, k, region, 256)) {
            const FlowResult r = flow_to_zero(flat, osc, k, seed, osc_decomp, fp);
            if (r.status != FlowStatus::converged) continue;
            ++n_conv;
            certified_orbits.push_back(r.final);
            certified_energy.push_back(k);
            worst = std::max(worst, curvature_residual(flat, osc, k, r.final));
        }
        std::ostringstream ss;
        ss << "max |kappa + f/sqrt(2k)| = " << worst << " over " << (1 + n_conv) << " orbits";
        return {worst < 5e-3 && n_conv >= 2, ss.str()};
    });

    // 3. gradient consistency -------------------------------------------------
    rep.run("3-gradient-consistency", [&]() -> std::pair<bool, std::string> {
        const MetricField conf = make_metric("conformal", {0.12, 0.0, -0.06});
        const MagneticDensity field = make_density("trigpoly", {1.0, -2.0, 0.0, 0.4}, conf);
        const FluxDecomposition d = flux_decompose(conf, field, 64);
        const double k = 0.21;

        std::mt19937_64 rng(2027);
        std::normal_distribution<double> gauss(0.0, 1.0);
        DiscreteLoop base = random_winding_loop(rng, 64, 0, 1);
        const ActionCovector cov = eta(conf, field, k, base, d);
        double worst_fd = 0.0;
        for (int t = 0; t < 200; ++t) {
            LoopTangent xi;
            xi.dx.resize(base.n());
            for (Vec2& v : xi.dx) v = {gauss(rng), gauss(rng)};
            xi.dT = gauss(rng);
            const double h = 1e-6;
            DiscreteLoop up = base, dn = base;
            for (int i = 0; i < base.n(); ++i) {
                up.x[i] += h * xi.dx[i];
                dn.x[i] -= h * xi.dx[i];
            }
            up.T += h * xi.dT;
            dn.T -= h * xi.dT;
            const double fd = (local_action(conf, field, k, up, d) -
                               local_action(conf, field, k, dn, d)) /
                              (2.0 * h);
            worst_fd = std::max(worst_fd,
                                std::abs(fd - pair(cov, xi)) / std::max(1.0, std::abs(fd)));
        }

        std::vector<double> residuals;
        for (int n : {64, 128, 256, 512}) {
            residuals.push_back(eta(flat, larmor_field, 0.5, larmor_loop(n), larmor_decomp)
                                    .h1_norm);
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < residuals.size(); ++i) {
            decreasing = decreasing && residuals[i] < residuals[i - 1];
        }
        const double slope =
            std::log(residuals.back() / residuals.front()) / std::log(512.0 / 64.0);
        std::ostringstream ss;
        ss << "FD rel err " << worst_fd << ", decay slope " << slope;
        return {worst_fd < 1e-6 && decreasing && slope < -1.7 && slope > -3.0, ss.str()};
    });

    // 4. min-cut exactness ----------------------------------------------------
    rep.run("4-mincut-exactness", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(4242);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        double worst = 0.0, slowest = 0.0;
        int instances = 0;
        while (instances < 10) {
            const std::vector<double> params = {0.3 * uni(rng), 2.0 * uni(rng), 2.0 * uni(rng),
                                                2.0 * uni(rng), 2.0 * uni(rng)};
            const MagneticDensity f = make_density("trigpoly", params, flat);
            if (!f.oscillating()) continue;
            ++instances;
            for (double k : {0.002, 0.01, 0.05}) {
                const double t0 = now_s();
                const GridRegion best = minimize_taimanov(flat, f, k, 4);
                double brute = 1e300;
                for (unsigned bits = 0; bits < (1u << 16); ++bits) {
                    GridRegion r;
                    r.m = 4;
                    r.mask.assign(16, 0);
                    for (int c = 0; c < 16; ++c) r.mask[c] = (bits >> c) & 1u;
                    brute = std::min(brute, taimanov_value(flat, f, k, r));
                }
                slowest = std::max(slowest, now_s() - t0);
                worst = std::max(worst, std::abs(best.value - brute));
            }
        }
        std::ostringstream ss;
        ss << "max |mincut - brute| = " << worst << " over 30 instances, slowest " << slowest
           << " s";
        return {worst < 1e-10 && slowest < 1.0, ss.str()};
    });

    // 5. tau_plus bracketing --------------------------------------------------
    rep.run("5-tau-plus-bracketing", [&]() -> std::pair<bool, std::string> {
        const double tau = tau_plus_estimate(flat, osc, 1e-4, 0.02, 1e-5, 128);
        const GridRegion best = minimize_taimanov(flat, osc, 0.005, 128);
        std::ostringstream ss;
        ss << "tau_plus = " << tau << " (>= 0.00584), min value " << best.value
           << " (<= -0.0130)";
        return {tau >= 0.00594 - 1e-4 && best.value <= -0.0180 + 5e-3, ss.str()};
    });

    // 6. exact energy-variation identity --------------------------------------
    rep.run("6-energy-variation-identity", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(606);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_int_distribution<int> wind(-2, 2);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            int a = wind(rng), b = wind(rng);
            if (a == 0 && b == 0) b = 1;
            DiscreteLoop base = random_winding_loop(rng, 32, a, b);
            const auto dir = default_direction(a, b);
            LoopPath path = build_class_representative(base, 1, dir.first, dir.second, 8);
            for (std::size_t j = 0; j < path.nodes.size(); ++j) {
                for (Vec2& v : path.nodes[j].x) v += 0.02 * Vec2{gauss(rng), gauss(rng)};
                path.nodes[j].T += 0.3 * std::abs(gauss(rng));
            }
            const std::pair<double, double> pairs[5] = {
                {0.001, 0.002}, {0.001, 0.01}, {0.003, 0.005}, {0.002, 0.02}, {0.004, 0.0045}};
            for (const auto& [klo, khi] : pairs) {
                const std::vector<double> slo = eta_line_integral(flat, osc, klo, path,
                                                                  osc_decomp);
                const std::vector<double> shi = eta_line_integral(flat, osc, khi, path,
                                                                  osc_decomp);
                for (std::size_t j = 0; j < path.nodes.size(); ++j) {
                    const double lhs = shi[j] - slo[j];
                    const double rhs = (khi - klo) * path.nodes[j].T;
                    worst = std::max(worst, std::abs(lhs - rhs) /
                                                std::max({1.0, std::abs(shi[j]),
                                                          std::abs(slo[j])}));
                }
            }
        }
        std::ostringstream ss;
        ss << "max relative deviation " << worst;
        return {worst < 1e-12, ss.str()};
    });

    // 7. transgression pairing + flux quantization -----------------------------
    rep.run("7-transgression-pairing", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(707);
        double worst_pair = 0.0;
        for (int a = -3; a <= 3; ++a) {
            for (int b = -3; b <= 3; ++b) {
                if (a == 0 && b == 0) continue;
                const DiscreteLoop base = random_winding_loop(rng, 24, a, b);
                for (int p = -3; p <= 3; ++p) {
                    for (int q = -3; q <= 3; ++q) {
                        if (p * b - q * a == 0) continue;
                        const LoopPath tp = build_class_representative(base, 1, p, q, 6);
                        worst_pair = std::max(
                            worst_pair, std::abs(transgression(tp) - double(p * b - q * a)));
                    }
                }
            }
        }
        // Corollary flux quantization: closed translation path integrates
        // eta to flux * (p b - q a)
        const DiscreteLoop vert = random_winding_loop(rng, 48, 0, 1);
        const LoopPath closed = build_class_representative(vert, 1, 1, 0, 32);
        const std::vector<double> s = eta_line_integral(flat, osc, 0.004, closed, osc_decomp);
        const double quant_err = std::abs((s.back() - s.front()) - osc.flux());
        std::ostringstream ss;
        ss << "max pairing err " << worst_pair << ", flux quantization err " << quant_err;
        return {worst_pair < 1e-8 && quant_err < 1e-6, ss.str()};
    });

    // 8 + 9 + 10 share the scan pipeline --------------------------------------
    const double tau = tau_plus_estimate(flat, osc, 1e-4, 0.02, 1e-5, 64);

    rep.run("8-minimax-monotonicity", [&]() -> std::pair<bool, std::string> {
        std::vector<double> k_grid;
        for (int i = 0; i < 10; ++i) k_grid.push_back((0.5 + 0.4 * i / 9.0) * tau);

        FlowParams fp;
        fp.tol_eta = 1e-7;
        fp.max_iters = 60000;
        MinimaxParams mp;
        mp.tol_eta = 1e-5;
        mp.max_outer = 300;

        bool ok = true;
        std::ostringstream ss;
        for (int n : {1, 2}) {
            double prev = -1e300;
            double worst_drop = 0.0;
            for (double k : k_grid) {
                const GridRegion region = minimize_taimanov(flat, osc, k, 64);
                const std::vector<DiscreteLoop> seeds =
                    boundary_to_seed(flat, osc, k, region, 128);
                DiscreteLoop alpha;
                bool have = false;
                for (const DiscreteLoop& seed : seeds) {
                    const FlowResult r = flow_to_zero(flat, osc, k, seed, osc_decomp, fp);
                    if (r.status == FlowStatus::converged) {
                        alpha = r.final;
                        have = true;
                        break;
                    }
                }
                if (!have) return {false, "pipeline failed to produce a minimizer"};
                const auto dir = default_direction(alpha.wind_a, alpha.wind_b);
                LoopPath path =
                    build_class_representative(alpha, n, dir.first, dir.second, 32);
                const MinimaxRecord rec = mountain_pass(flat, osc, k, path, osc_decomp, mp);
                worst_drop = std::max(worst_drop, prev - rec.c);
                ok = ok && rec.c >= prev - 1e-4;
                prev = rec.c;
            }
            ss << "n=" << n << " worst drop " << worst_drop << "  ";
        }
        return {ok, ss.str()};
    });

    ScanResult scan_a, scan_b;
    rep.run("9-multiplicity-at-desk-scale", [&]() -> std::pair<bool, std::string> {
        const double t0 = now_s();
        std::vector<double> k_grid;
        for (int i = 0; i < 5; ++i) k_grid.push_back((0.5 + 0.4 * i / 4.0) * tau);

        ScanParams params;
        params.grid_m = 64;
        params.n_vertices = 256;
        params.path_nodes = 32;
        params.n_list = {1, 2};
        params.flow.tol_eta = 1e-6;
        params.flow.max_iters = 60000;
        params.minimax.tol_eta = 1e-5;
        params.minimax.max_outer = 300;
        params.threads = 2;

        scan_a = energy_scan(flat, osc, k_grid, params);
        params.threads = 1;
        scan_b = energy_scan(flat, osc, k_grid, params);
        const double elapsed = now_s() - t0;

        int best_multi = 0;
        for (const auto& [kk, ids] : scan_a.census.by_energy) {
            best_multi = std::max<int>(best_multi, ids.size());
        }
        bool certified = !scan_a.census.orbits.empty();
        double worst_curv = 0.0;
        for (const OrbitRecord& orb : scan_a.census.orbits) {
            certified = certified && orb.residual < 1e-6;
            worst_curv = std::max(worst_curv, orb.curvature_residual);
        }
        certified = certified && worst_curv < 5e-3;
        std::ostringstream ss;
        ss << scan_a.census.orbits.size() << " distinct orbits, max per energy " << best_multi
           << ", max curvature resid " << worst_curv << ", " << elapsed << " s";
        return {best_multi >= 2 && certified && elapsed < 600.0, ss.str()};
    });

    rep.run("10-determinism", [&]() -> std::pair<bool, std::string> {
        const std::string csv_a = scan_to_csv(scan_a.rows);
        const std::string csv_b = scan_to_csv(scan_b.rows);
        const std::string census_a = census_to_json(scan_a.census);
        const std::string census_b = census_to_json(scan_b.census);
        std::ostringstream ss;
        ss << "scan.csv " << (csv_a == csv_b ? "identical" : "DIFFERS") << ", census.json "
           << (census_a == census_b ? "identical" : "DIFFERS");
        return {csv_a == csv_b && census_a == census_b && !csv_a.empty(), ss.str()};
    });

    std::printf("%s\n", rep.failures == 0 ? "acceptance: all criteria PASS"
                                          : "acceptance: FAILURES present");
    return rep.failures == 0 ? 0 : 1;
}
