#include "magneto/loopspace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace magneto {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Vec2 DiscreteLoop::vertex(int i) const {
    const int N = n();
    int w = i >= 0 ? i / N : -((-i - 1) / N + 1);  // floor division
    return x[i - w * N] + double(w) * winding_vec();
}

DiscreteLoop make_loop(std::vector<Vec2> vertices, double T, int wind_a, int wind_b) {
    if (vertices.size() < 3) throw DomainError("loop needs at least 3 vertices");
    if (!(T > 0.0)) throw DomainError("loop period must be positive");
    return DiscreteLoop{std::move(vertices), T, wind_a, wind_b};
}

DiscreteLoop loop_from_samples(const std::vector<Vec2>& path, double T, double winding_tol) {
    if (path.size() < 4) throw DomainError("loop needs at least 3 vertices");
    const Vec2 disp = path.back() - path.front();
    const double a = std::round(disp.x), b = std::round(disp.y);
    if (std::abs(disp.x - a) > winding_tol || std::abs(disp.y - b) > winding_tol) {
        throw DomainError("lift displacement is not close to an integer vector");
    }
    std::vector<Vec2> verts(path.begin(), path.end() - 1);
    return make_loop(std::move(verts), T, static_cast<int>(a), static_cast<int>(b));
}

DiscreteLoop reindex(const DiscreteLoop& g, int shift) {
    const int N = g.n();
    std::vector<Vec2> verts(N);
    for (int i = 0; i < N; ++i) verts[i] = g.vertex(i + shift);
    return DiscreteLoop{std::move(verts), g.T, g.wind_a, g.wind_b};
}

DiscreteLoop iterate(const DiscreteLoop& g, int n) {
    if (n < 1) throw DomainError("iterate: n must be >= 1");
    const int N = g.n();
    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>(n) * N);
    for (int c = 0; c < n; ++c) {
        const Vec2 off = double(c) * g.winding_vec();
        for (int i = 0; i < N; ++i) verts.push_back(g.x[i] + off);
    }
    return DiscreteLoop{std::move(verts), n * g.T, n * g.wind_a, n * g.wind_b};
}

double loop_length(const MetricField& m, const DiscreteLoop& g) {
    double len = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const Vec2 d = g.edge(i);
        len += std::sqrt(quad(m.at(g.vertex(i) + 0.5 * d), d));
    }
    return len;
}

DiscreteLoop resample_uniform_arclength(const MetricField& m, const DiscreteLoop& g,
                                        int n_target) {
    const int N = g.n();
    std::vector<double> cum(N + 1, 0.0);
    for (int i = 0; i < N; ++i) {
        const Vec2 d = g.edge(i);
        cum[i + 1] = cum[i] + std::sqrt(quad(m.at(g.vertex(i) + 0.5 * d), d));
    }
    const double total = cum[N];
    if (!(total > 0.0)) throw DomainError("cannot resample a zero-length loop");

    std::vector<Vec2> verts(n_target);
    int seg = 0;
    for (int j = 0; j < n_target; ++j) {
        const double t = total * j / n_target;
        while (seg + 1 < N && cum[seg + 1] <= t) ++seg;
        const double span = cum[seg + 1] - cum[seg];
        const double u = span > 0.0 ? (t - cum[seg]) / span : 0.0;
        verts[j] = g.vertex(seg) + u * g.edge(seg);
    }
    return DiscreteLoop{std::move(verts), g.T, g.wind_a, g.wind_b};
}

double kinetic_energy(const MetricField& m, const DiscreteLoop& g) {
    const int N = g.n();
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        const Vec2 d = g.edge(i);
        acc += quad(m.at(g.vertex(i) + 0.5 * d), d);
    }
    return 0.5 * N * acc;
}

double action(const MetricField& m, double k, const DiscreteLoop& g) {
    return kinetic_energy(m, g) / g.T + k * g.T;
}

double pair(const ActionCovector& c, const LoopTangent& xi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.dx.size(); ++i) acc += dot(c.dx[i], xi.dx[i]);
    return acc + c.dT * xi.dT;
}

namespace {

// Solve (I + L) u = rhs with L the periodic graph Laplacian scaled by N^2:
// cyclic tridiagonal with diagonal 1+2N^2 and off-diagonals -N^2
// (Thomas + Sherman-Morrison rank-one correction).
void solve_h1(std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    const double nn = double(n) * double(n);
    const double d = 1.0 + 2.0 * nn;
    const double o = -nn;

    const double gamma = -d;
    std::vector<double> diag(n, d);
    diag[0] = d - gamma;
    diag[n - 1] = d - o * o / gamma;

    auto thomas = [&](std::vector<double>& b) {
        std::vector<double> cp(n);
        cp[0] = o / diag[0];
        b[0] /= diag[0];
        for (int i = 1; i < n; ++i) {
            const double m = diag[i] - o * cp[i - 1];
            cp[i] = o / m;
            b[i] = (b[i] - o * b[i - 1]) / m;
        }
        for (int i = n - 2; i >= 0; --i) b[i] -= cp[i] * b[i + 1];
    };

    std::vector<double> z(n, 0.0);
    z[0] = gamma;
    z[n - 1] = o;
    thomas(rhs);
    thomas(z);
    const double fact =
        (rhs[0] + o * rhs[n - 1] / gamma) / (1.0 + z[0] + o * z[n - 1] / gamma);
    for (int i = 0; i < n; ++i) rhs[i] -= fact * z[i];
}

}  // namespace

LoopTangent sharp(const ActionCovector& c, LoopMetric mode) {
    LoopTangent t;
    t.dT = c.dT;
    t.dx.resize(c.dx.size());
    if (mode == LoopMetric::l2) {
        t.dx = c.dx;
        return t;
    }
    const int n = static_cast<int>(c.dx.size());
    std::vector<double> cx(n), cy(n);
    for (int i = 0; i < n; ++i) {
        cx[i] = c.dx[i].x;
        cy[i] = c.dx[i].y;
    }
    solve_h1(cx);
    solve_h1(cy);
    for (int i = 0; i < n; ++i) t.dx[i] = {cx[i], cy[i]};
    return t;
}

double covector_norm(const ActionCovector& c, LoopMetric mode) {
    if (mode == LoopMetric::l2) {
        double acc = c.dT * c.dT;
        for (const Vec2& v : c.dx) acc += dot(v, v);
        return std::sqrt(acc);
    }
    const LoopTangent t = sharp(c, LoopMetric::h1);
    double acc = c.dT * c.dT;
    for (std::size_t i = 0; i < c.dx.size(); ++i) acc += dot(c.dx[i], t.dx[i]);
    return std::sqrt(std::max(0.0, acc));
}

// --- flux decomposition -----------------------------------------------------

double FluxDecomposition::psi(const Vec2& q) const {
    double acc = 0.0;
    for (const Mode& mo : modes) {
        const double phase = kTwoPi * (mo.m1 * q.x + mo.m2 * q.y);
        acc += mo.a * std::cos(phase) + mo.b * std::sin(phase);
    }
    return acc;
}

Vec2 FluxDecomposition::theta(const Vec2& q) const {
    double d1 = 0.0, d2 = 0.0;
    for (const Mode& mo : modes) {
        const double phase = kTwoPi * (mo.m1 * q.x + mo.m2 * q.y);
        const double w = -mo.a * std::sin(phase) + mo.b * std::cos(phase);
        d1 += kTwoPi * mo.m1 * w;
        d2 += kTwoPi * mo.m2 * w;
    }
    return {-d2, d1};
}

Mat2 FluxDecomposition::theta_jacobian(const Vec2& q) const {
    double p11 = 0.0, p12 = 0.0, p22 = 0.0;  // second derivatives of psi
    for (const Mode& mo : modes) {
        const double phase = kTwoPi * (mo.m1 * q.x + mo.m2 * q.y);
        const double w = -kTwoPi * kTwoPi * (mo.a * std::cos(phase) + mo.b * std::sin(phase));
        p11 += mo.m1 * mo.m1 * w;
        p12 += mo.m1 * mo.m2 * w;
        p22 += mo.m2 * mo.m2 * w;
    }
    // D_{ab} = d_a theta_b with theta = (-d2 psi, d1 psi).
    return Mat2{-p12, p11, -p22, p12};
}

double FluxDecomposition::curl(const Vec2& q) const {
    const Mat2 d = theta_jacobian(q);
    return d.xy - d.yx;
}

FluxDecomposition flux_decompose(const MetricField& m, const MagneticDensity& f, int grid_n) {
    if (grid_n < 4 || (grid_n & (grid_n - 1)) != 0) {
        throw DomainError("flux_decompose: grid_n must be a power of two >= 4");
    }
    FluxDecomposition out;
    out.flux = f.flux();
    out.grid_n = grid_n;

    const int n = grid_n;
    std::vector<double> rho(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 q{double(i) / n, double(j) / n};
            rho[static_cast<std::size_t>(j) * n + i] = f.at(q) * m.sqrt_det(q) - out.flux;
        }
    }

    using cplx = std::complex<double>;
    std::vector<cplx> twiddle(n);
    for (int t = 0; t < n; ++t) {
        twiddle[t] = std::polar(1.0, -kTwoPi * t / n);
    }

    const int mmax = std::min(24, n / 2 - 1);
    // Partial transform over j for every needed m2.
    const int n_m2 = 2 * mmax + 1;
    std::vector<cplx> partial(static_cast<std::size_t>(n) * n_m2);
    for (int i = 0; i < n; ++i) {
        for (int m2 = -mmax; m2 <= mmax; ++m2) {
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j) {
                acc += rho[static_cast<std::size_t>(j) * n + i] *
                       twiddle[((m2 * j) % n + n) % n];
            }
            partial[static_cast<std::size_t>(i) * n_m2 + (m2 + mmax)] = acc;
        }
    }

    struct Raw {
        int m1, m2;
        cplx coef;
    };
    std::vector<Raw> raws;
    double max_abs = 0.0;
    for (int m1 = 0; m1 <= mmax; ++m1) {
        for (int m2 = -mmax; m2 <= mmax; ++m2) {
            if (m1 == 0 && m2 <= 0) continue;  // half-plane; zero mode dropped
            cplx acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += partial[static_cast<std::size_t>(i) * n_m2 + (m2 + mmax)] *
                       twiddle[((m1 * i) % n + n) % n];
            }
            acc /= double(n) * double(n);
            raws.push_back({m1, m2, acc});
            max_abs = std::max(max_abs, std::abs(acc));
        }
    }

    const double cutoff = 1e-12 * std::max(max_abs, 1e-300);
    for (const Raw& r : raws) {
        if (std::abs(r.coef) <= cutoff) continue;
        const double lap = -kTwoPi * kTwoPi * (r.m1 * r.m1 + r.m2 * r.m2);
        const cplx psi_hat = r.coef / lap;
        FluxDecomposition::Mode mo;
        mo.m1 = r.m1;
        mo.m2 = r.m2;
        mo.a = 2.0 * psi_hat.real();
        mo.b = -2.0 * psi_hat.imag();
        out.modes.push_back(mo);
    }
    return out;
}

// --- eta and the local action ------------------------------------------------

double signed_area_lifted(const DiscreteLoop& g) {
    double acc = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const Vec2 a = g.vertex(i), b = g.vertex(i + 1);
        acc += 0.5 * (a.x + b.x) * (b.y - a.y);
    }
    return acc;
}

double local_action(const MetricField& m, const MagneticDensity& f, double k,
                    const DiscreteLoop& g, const FluxDecomposition& d) {
    (void)f;  // the magnetic data enters through the decomposition
    double curve = 0.0;
    for (int i = 0; i < g.n(); ++i) curve += dot(d.theta(g.x[i]), g.edge(i));
    return action(m, k, g) + curve + d.flux * signed_area_lifted(g);
}

ActionCovector eta(const MetricField& m, const MagneticDensity& f, double k,
                   const DiscreteLoop& g, const FluxDecomposition& d, LoopMetric mode) {
    (void)f;  // the magnetic data enters through the decomposition
    const int N = g.n();
    ActionCovector out;
    out.dx.assign(N, Vec2{});

    // Exact gradient of the discrete kinetic energy, divided by T.
    double e = 0.0;
    for (int i = 0; i < N; ++i) {
        const Vec2 delta = g.edge(i);
        const Vec2 mid = g.vertex(i) + 0.5 * delta;
        const Mat2 gm = m.at(mid);
        const std::array<Mat2, 2> dgm = m.deriv(mid);
        e += quad(gm, delta);

        const Vec2 ge = gm * delta;
        const Vec2 qv{quad(dgm[0], delta), quad(dgm[1], delta)};
        const Vec2 lo = -double(N) * ge + 0.25 * N * qv;
        const Vec2 hi = double(N) * ge + 0.25 * N * qv;
        out.dx[i] += (1.0 / g.T) * lo;
        out.dx[(i + 1) % N] += (1.0 / g.T) * hi;
    }
    e *= 0.5 * N;

    // Exact gradient of the magnetic curve term of the local action:
    // sum_i theta(x_i).dx_i + flux * int x1 dx2.
    for (int i = 0; i < N; ++i) {
        const Vec2 xi = g.x[i];
        out.dx[i] += d.theta_jacobian(xi) * g.edge(i);
        out.dx[i] += d.theta(g.x[(i + N - 1) % N]) - d.theta(xi);
        out.dx[i] += (0.5 * d.flux) * jrot(g.vertex(i + 1) - g.vertex(i - 1));
    }

    out.dT = -e / (g.T * g.T) + k;
    out.h1_norm = covector_norm(out, mode);
    return out;
}

}  // namespace magneto
