#include "magneto/gradientflow.hpp"

#include <cmath>
#include <limits>

namespace magneto {

const char* to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::converged: return "converged";
        case FlowStatus::max_iters: return "max_iters";
        case FlowStatus::shrank_to_point: return "shrank_to_point";
        case FlowStatus::period_exceeded: return "period_exceeded";
        case FlowStatus::numeric_failure: return "numeric_failure";
    }
    return "unknown";
}

LoopTangent xk(const MetricField& m, const MagneticDensity& f, double k, const DiscreteLoop& g,
               const FluxDecomposition& d, LoopMetric mode) {
    const ActionCovector cov = eta(m, f, k, g, d, mode);
    LoopTangent t = sharp(cov, mode);
    const double scale = -1.0 / std::sqrt(1.0 + cov.h1_norm * cov.h1_norm);
    for (Vec2& v : t.dx) v *= scale;
    t.dT *= scale;
    return t;
}

namespace {

bool finite_loop(const DiscreteLoop& g) {
    if (!std::isfinite(g.T)) return false;
    for (const Vec2& v : g.x) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
    }
    return true;
}

DiscreteLoop stepped(const DiscreteLoop& g, const LoopTangent& t, double h) {
    DiscreteLoop out = g;
    for (int i = 0; i < g.n(); ++i) out.x[i] += h * t.dx[i];
    out.T += h * t.dT;
    return out;
}

DiscreteLoop midpoint_loop(const DiscreteLoop& a, const DiscreteLoop& b) {
    DiscreteLoop out = a;
    for (int i = 0; i < a.n(); ++i) out.x[i] = 0.5 * (a.x[i] + b.x[i]);
    out.T = 0.5 * (a.T + b.T);
    return out;
}

// Eta line integral along the straight segment a -> b (midpoint rule); the
// globally well-defined descent certificate for the non-exact eta_k.
double step_integral(const MetricField& m, const MagneticDensity& f, double k,
                     const DiscreteLoop& a, const DiscreteLoop& b, const FluxDecomposition& d,
                     LoopMetric mode) {
    const ActionCovector cov = eta(m, f, k, midpoint_loop(a, b), d, mode);
    LoopTangent diff;
    diff.dx.resize(a.x.size());
    for (int i = 0; i < a.n(); ++i) diff.dx[i] = b.x[i] - a.x[i];
    diff.dT = b.T - a.T;
    return pair(cov, diff);
}

double spacing_ratio(const DiscreteLoop& g) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double len = norm(g.edge(i));
        lo = std::min(lo, len);
        hi = std::max(hi, len);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

FlowResult flow_to_zero(const MetricField& m, const MagneticDensity& f, double k,
                        DiscreteLoop seed, const FluxDecomposition& d,
                        const FlowParams& params) {
    FlowResult res;
    res.max_step_integral = -std::numeric_limits<double>::infinity();

    DiscreteLoop cur = std::move(seed);
    double h = params.step;
    int streak = 0;

    for (int iter = 0; iter <= params.max_iters; ++iter) {
        if (!finite_loop(cur)) {
            res.status = FlowStatus::numeric_failure;
            break;
        }
        const ActionCovector cov = eta(m, f, k, cur, d, params.metric);
        res.final = cur;
        res.residual = cov.h1_norm;
        res.iterations = iter;

        if (cov.h1_norm < params.tol_eta) {
            res.status = FlowStatus::converged;
            return res;
        }
        if (cur.T < params.T_min) {
            res.status = FlowStatus::shrank_to_point;
            return res;
        }
        if (cur.T > params.T_max) {
            res.status = FlowStatus::period_exceeded;
            return res;
        }
        if (iter == params.max_iters) {
            res.status = FlowStatus::max_iters;
            return res;
        }

        LoopTangent dir = sharp(cov, params.metric);
        const double scale = -1.0 / std::sqrt(1.0 + cov.h1_norm * cov.h1_norm);
        for (Vec2& v : dir.dx) v *= scale;
        dir.dT *= scale;

        // Backtrack until the eta line integral certifies descent.
        bool accepted = false;
        while (h > 1e-14) {
            DiscreteLoop cand = stepped(cur, dir, h);
            if (!finite_loop(cand) || cand.T <= 0.0) {
                h *= 0.5;
                ++res.rejected_steps;
                continue;
            }
            const double ds = step_integral(m, f, k, cur, cand, d, params.metric);
            if (ds <= 0.0) {
                cur = std::move(cand);
                res.cumulative_integral += ds;
                res.max_step_integral = std::max(res.max_step_integral, ds);
                ++res.accepted_steps;
                accepted = true;
                if (++streak >= 5) {
                    h = std::min(2.0 * h, 0.5);
                    streak = 0;
                }
                break;
            }
            h *= 0.5;
            streak = 0;
            ++res.rejected_steps;
        }
        if (!accepted) {
            res.status = FlowStatus::max_iters;  // stalled at the numeric floor
            return res;
        }

        // Periodic arc-length redistribution keeps vertices from clustering.
        if (params.redistribute_every > 0 && res.accepted_steps % params.redistribute_every == 0 &&
            cov.h1_norm > 10.0 * params.tol_eta && spacing_ratio(cur) > 2.0) {
            cur = resample_uniform_arclength(m, cur, cur.n());
        }
    }
    if (res.status != FlowStatus::numeric_failure) res.status = FlowStatus::max_iters;
    return res;
}

namespace {

// Dense LU solve with partial pivoting (small systems only).
bool lu_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double factor = a[r * n + col] * inv;
            if (factor == 0.0) continue;
            for (int c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
        b[r] = s / a[r * n + r];
    }
    return true;
}

std::vector<double> eta_flat(const MetricField& m, const MagneticDensity& f, double k,
                             const DiscreteLoop& g, const FluxDecomposition& d) {
    const ActionCovector cov = eta(m, f, k, g, d, LoopMetric::l2);
    std::vector<double> out(2 * g.n() + 1);
    for (int i = 0; i < g.n(); ++i) {
        out[2 * i] = cov.dx[i].x;
        out[2 * i + 1] = cov.dx[i].y;
    }
    out[2 * g.n()] = cov.dT;
    return out;
}

}  // namespace

double newton_polish(const MetricField& m, const MagneticDensity& f, double k, DiscreteLoop& g,
                     const FluxDecomposition& d, int max_iters, double tol, LoopMetric mode) {
    const int N = g.n();
    const int dim = 2 * N + 1;
    const double fd = 1e-7;

    double best = eta(m, f, k, g, d, mode).h1_norm;
    for (int iter = 0; iter < max_iters && best >= tol; ++iter) {
        const std::vector<double> r0 = eta_flat(m, f, k, g, d);
        std::vector<double> jac(static_cast<std::size_t>(dim) * dim);
        for (int c = 0; c < dim; ++c) {
            DiscreteLoop gp = g;
            if (c < 2 * N) {
                (c % 2 == 0 ? gp.x[c / 2].x : gp.x[c / 2].y) += fd;
            } else {
                gp.T += fd;
            }
            const std::vector<double> rp = eta_flat(m, f, k, gp, d);
            for (int r = 0; r < dim; ++r) jac[static_cast<std::size_t>(r) * dim + c] = (rp[r] - r0[r]) / fd;
        }
        std::vector<double> rhs = r0;
        if (!lu_solve(jac, rhs, dim)) break;

        // Damped update; reject steps that do not reduce the residual.
        double lambda = 1.0;
        bool improved = false;
        for (int tries = 0; tries < 6; ++tries, lambda *= 0.5) {
            DiscreteLoop cand = g;
            for (int i = 0; i < N; ++i) {
                cand.x[i].x -= lambda * rhs[2 * i];
                cand.x[i].y -= lambda * rhs[2 * i + 1];
            }
            cand.T -= lambda * rhs[2 * N];
            if (!(cand.T > 0.0)) continue;
            const double res = eta(m, f, k, cand, d, mode).h1_norm;
            if (res < best) {
                g = cand;
                best = res;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return best;
}

}  // namespace magneto
