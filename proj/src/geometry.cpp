#include "magneto/geometry.hpp"

#include <cmath>
#include <utility>

namespace magneto {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_spd(const Mat2& g, const char* where) {
    if (!(g.det() > 0.0) || !(g.trace() > 0.0)) {
        throw DegenerateMetricError(std::string("metric not positive definite at ") + where);
    }
}

}  // namespace

MetricField::MetricField(std::string name, MetricEval g, MetricDerivEval dg)
    : name_(std::move(name)), g_(std::move(g)), dg_(std::move(dg)) {
    // Positivity on the validation grid; cheap and catches all built-ins.
    for (int j = 0; j < kValidationGrid; ++j) {
        for (int i = 0; i < kValidationGrid; ++i) {
            const Vec2 q{(i + 0.5) / kValidationGrid, (j + 0.5) / kValidationGrid};
            check_spd(g_(q), "validation grid");
        }
    }
}

Mat2 MetricField::at(const Vec2& q) const {
    Mat2 g = g_(q);
    check_spd(g, "evaluation point");
    return g;
}

std::array<Mat2, 2> MetricField::deriv(const Vec2& q) const {
    if (dg_) return dg_(q);
    const double h = kFiniteDiffStep;
    std::array<Mat2, 2> d;
    d[0] = (1.0 / (2.0 * h)) * (g_({q.x + h, q.y}) - g_({q.x - h, q.y}));
    d[1] = (1.0 / (2.0 * h)) * (g_({q.x, q.y + h}) - g_({q.x, q.y - h}));
    return d;
}

double MetricField::sqrt_det(const Vec2& q) const { return std::sqrt(at(q).det()); }

MagneticDensity::MagneticDensity(std::string name, ScalarEval f, const MetricField& m)
    : name_(std::move(name)), f_(std::move(f)) {
    // Midpoint panel quadrature for the flux.
    double acc = 0.0;
    for (int j = 0; j < kFluxGrid; ++j) {
        for (int i = 0; i < kFluxGrid; ++i) {
            const Vec2 q{(i + 0.5) / kFluxGrid, (j + 0.5) / kFluxGrid};
            acc += f_(q) * m.sqrt_det(q);
        }
    }
    flux_ = acc / double(kFluxGrid) / double(kFluxGrid);

    double fmin = 0.0, fmax = 0.0;
    for (int j = 0; j < kValidationGrid; ++j) {
        for (int i = 0; i < kValidationGrid; ++i) {
            const Vec2 q{(i + 0.5) / kValidationGrid, (j + 0.5) / kValidationGrid};
            const double v = f_(q);
            fmin = std::min(fmin, v);
            fmax = std::max(fmax, v);
        }
    }
    oscillating_ = fmin < 0.0 && fmax > 0.0;
}

ChristoffelSymbols christoffel(const MetricField& m, const Vec2& q) {
    const Mat2 g = m.at(q);
    const Mat2 ginv = g.inverse();
    const std::array<Mat2, 2> dg = m.deriv(q);

    // dg[a].row/col indexing: dg[a] = d_a G, entries (d_a g)_{jk}.
    auto entry = [](const Mat2& mm, int r, int c) {
        return r == 0 ? (c == 0 ? mm.xx : mm.xy) : (c == 0 ? mm.yx : mm.yy);
    };

    ChristoffelSymbols out{};
    for (int i = 0; i < 2; ++i) {
        double vals[2][2];
        for (int j = 0; j < 2; ++j) {
            for (int kk = 0; kk < 2; ++kk) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l) {
                    const double gil = entry(ginv, i, l);
                    s += gil * (entry(dg[j], l, kk) + entry(dg[kk], l, j) - entry(dg[l], j, kk));
                }
                vals[j][kk] = 0.5 * s;
            }
        }
        // Symmetrize exactly; roundoff aside the formula already is.
        const double off = 0.5 * (vals[0][1] + vals[1][0]);
        out[i] = Mat2{vals[0][0], off, off, vals[1][1]};
    }
    return out;
}

Vec2 lorentz(const MetricField& m, const MagneticDensity& f, const Vec2& q, const Vec2& v) {
    const Mat2 g = m.at(q);
    const double scale = f.at(q) * std::sqrt(g.det());
    return g.inverse() * (scale * jrot(v));
}

std::vector<double> geodesic_curvature(const MetricField& m, const std::vector<Vec2>& pts,
                                       const Vec2& winding) {
    const int n = static_cast<int>(pts.size());
    if (n < 5) throw DomainError("geodesic_curvature needs at least 5 samples");

    auto at = [&](int i) -> Vec2 {
        if (i < 0) return pts[i + n] - winding;
        if (i >= n) return pts[i - n] + winding;
        return pts[i];
    };

    const double ds = 1.0 / n;
    double max_speed = 0.0;
    std::vector<Vec2> vel(n), acc(n);
    for (int i = 0; i < n; ++i) {
        vel[i] = (1.0 / (2.0 * ds)) * (at(i + 1) - at(i - 1));
        acc[i] = (1.0 / (ds * ds)) * (at(i + 1) - 2.0 * pts[i] + at(i - 1));
        max_speed = std::max(max_speed, norm(vel[i]));
    }

    std::vector<double> kappa(n);
    for (int i = 0; i < n; ++i) {
        const Mat2 g = m.at(pts[i]);
        const double speed_g = std::sqrt(quad(g, vel[i]));
        if (speed_g < 1e-8 * std::max(1.0, max_speed)) {
            throw UndefinedCurvatureError("near-zero speed sample in curvature computation");
        }
        const ChristoffelSymbols gamma = christoffel(m, pts[i]);
        const Vec2 a{acc[i].x + quad(gamma[0], vel[i]), acc[i].y + quad(gamma[1], vel[i])};
        // kappa_g = sqrt(det G) * cross(x', a) / |x'|_g^3 (orientation of mu_g).
        kappa[i] = std::sqrt(g.det()) * cross(vel[i], a) / (speed_g * speed_g * speed_g);
    }
    return kappa;
}

namespace {

double pick(const std::vector<double>& p, std::size_t i) { return i < p.size() ? p[i] : 0.0; }

}  // namespace

MetricField make_metric(const std::string& kind, const std::vector<double>& params,
                        bool analytic_derivs) {
    if (kind == "flat") {
        MetricEval g = [](const Vec2&) { return Mat2::identity(); };
        MetricDerivEval dg = [](const Vec2&) { return std::array<Mat2, 2>{Mat2{}, Mat2{}}; };
        return MetricField("flat", g, analytic_derivs ? dg : MetricDerivEval{});
    }
    if (kind == "conformal") {
        const double a1 = pick(params, 0), b1 = pick(params, 1);
        const double a2 = pick(params, 2), b2 = pick(params, 3);
        auto u = [=](const Vec2& q) {
            return a1 * std::cos(kTwoPi * q.x) + b1 * std::sin(kTwoPi * q.x) +
                   a2 * std::cos(kTwoPi * q.y) + b2 * std::sin(kTwoPi * q.y);
        };
        auto du = [=](const Vec2& q) {
            return Vec2{kTwoPi * (-a1 * std::sin(kTwoPi * q.x) + b1 * std::cos(kTwoPi * q.x)),
                        kTwoPi * (-a2 * std::sin(kTwoPi * q.y) + b2 * std::cos(kTwoPi * q.y))};
        };
        MetricEval g = [=](const Vec2& q) {
            const double c = std::exp(2.0 * u(q));
            return Mat2{c, 0.0, 0.0, c};
        };
        MetricDerivEval dg = [=](const Vec2& q) {
            const double c = std::exp(2.0 * u(q));
            const Vec2 d = du(q);
            return std::array<Mat2, 2>{Mat2{2.0 * d.x * c, 0.0, 0.0, 2.0 * d.x * c},
                                       Mat2{2.0 * d.y * c, 0.0, 0.0, 2.0 * d.y * c}};
        };
        return MetricField("conformal", g, analytic_derivs ? dg : MetricDerivEval{});
    }
    throw ConfigError("unknown metric kind: " + kind);
}

MagneticDensity make_density(const std::string& kind, const std::vector<double>& params,
                             const MetricField& m) {
    if (kind == "constant") {
        const double b = pick(params, 0);
        return MagneticDensity("constant", [b](const Vec2&) { return b; }, m);
    }
    if (kind == "trigpoly") {
        const double c0 = pick(params, 0);
        const double a1 = pick(params, 1), b1 = pick(params, 2);
        const double a2 = pick(params, 3), b2 = pick(params, 4);
        const double a12 = pick(params, 5), b12 = pick(params, 6);
        ScalarEval f = [=](const Vec2& q) {
            return c0 + a1 * std::cos(kTwoPi * q.x) + b1 * std::sin(kTwoPi * q.x) +
                   a2 * std::cos(kTwoPi * q.y) + b2 * std::sin(kTwoPi * q.y) +
                   a12 * std::cos(kTwoPi * (q.x + q.y)) + b12 * std::sin(kTwoPi * (q.x + q.y));
        };
        return MagneticDensity("trigpoly", f, m);
    }
    throw ConfigError("unknown field kind: " + kind);
}

}  // namespace magneto
