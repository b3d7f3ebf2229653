#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "magneto/errors.hpp"
#include "magneto/vec.hpp"

namespace magneto {

// Position on R^2/Z^2. Lifted (unreduced) coordinates are plain Vec2; the
// canonical representative lives in [0,1)^2 via reduce_torus.
using TorusPoint = Vec2;

using MetricEval = std::function<Mat2(const Vec2&)>;
using MetricDerivEval = std::function<std::array<Mat2, 2>(const Vec2&)>;
using ScalarEval = std::function<double(const Vec2&)>;

// Central finite-difference step for metric derivatives (coordinates are O(1)).
inline constexpr double kFiniteDiffStep = 1e-5;
// Validation grid for positivity / sign-structure checks.
inline constexpr int kValidationGrid = 64;
// Panel count per axis for the flux quadrature.
inline constexpr int kFluxGrid = 256;

/// Doubly periodic Riemannian metric on the unit torus. Evaluators are pure
/// and reentrant; nothing mutates after construction.
class MetricField {
  public:
    MetricField(std::string name, MetricEval g, MetricDerivEval dg = nullptr);

    const std::string& name() const { return name_; }

    /// G(q); throws DegenerateMetricError if not positive definite there.
    Mat2 at(const Vec2& q) const;

    /// [d1 G, d2 G], analytic when supplied, else central differences.
    std::array<Mat2, 2> deriv(const Vec2& q) const;

    bool has_analytic_deriv() const { return static_cast<bool>(dg_); }

    double sqrt_det(const Vec2& q) const;

  private:
    std::string name_;
    MetricEval g_;
    MetricDerivEval dg_;
};

/// Magnetic density f with sigma = f mu_g. Flux and the oscillating flag are
/// computed once at construction.
class MagneticDensity {
  public:
    MagneticDensity(std::string name, ScalarEval f, const MetricField& m);

    const std::string& name() const { return name_; }
    double at(const Vec2& q) const { return f_(q); }

    /// Cached flux int_{T^2} f sqrt(det G) dq1 dq2 (midpoint rule, 256x256).
    double flux() const { return flux_; }

    /// min f < 0 < max f on the 64x64 validation grid.
    bool oscillating() const { return oscillating_; }

  private:
    std::string name_;
    ScalarEval f_;
    double flux_ = 0.0;
    bool oscillating_ = false;
};

// Gamma[i] is the matrix (Gamma^i_{jk})_{jk}; symmetric in (j,k).
using ChristoffelSymbols = std::array<Mat2, 2>;

ChristoffelSymbols christoffel(const MetricField& m, const Vec2& q);

/// Lorentz force Y(q,v) = f sqrt(det G) G^{-1} J v, so that g(u,Y) = sigma(u,v).
Vec2 lorentz(const MetricField& m, const MagneticDensity& f, const Vec2& q, const Vec2& v);

/// Signed geodesic curvature per sample of a closed curve given as lifted
/// vertices at uniform parameter; the closing edge wraps by `winding`.
/// Throws UndefinedCurvatureError on a near-zero-speed sample.
std::vector<double> geodesic_curvature(const MetricField& m, const std::vector<Vec2>& pts,
                                       const Vec2& winding);

// Built-in families (selected and parametrized in config; no expression parser).
//   metric "flat":       params ignored, G = I
//   metric "conformal":  G = e^{2u} I, u = p0 cos(2pi q1) + p1 sin(2pi q1)
//                                        + p2 cos(2pi q2) + p3 sin(2pi q2)
//   field  "constant":   f = p0
//   field  "trigpoly":   f = p0 + p1 cos(2pi q1) + p2 sin(2pi q1)
//                          + p3 cos(2pi q2) + p4 sin(2pi q2)
//                          + p5 cos(2pi(q1+q2)) + p6 sin(2pi(q1+q2))
MetricField make_metric(const std::string& kind, const std::vector<double>& params,
                        bool analytic_derivs = true);
MagneticDensity make_density(const std::string& kind, const std::vector<double>& params,
                             const MetricField& m);

}  // namespace magneto
