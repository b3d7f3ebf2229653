#pragma once

#include <array>
#include <cmath>

namespace magneto {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 v) { return v *= s; }
inline Vec2 operator*(Vec2 v, double s) { return v *= s; }
inline Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }

// J = [[0,1],[-1,0]]; the standard rotation used for the Lorentz force.
inline Vec2 jrot(const Vec2& v) { return {v.y, -v.x}; }

// Symmetric 2x2 matrices are stored full; row-major [[xx,xy],[yx,yy]].
struct Mat2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

    double det() const { return xx * yy - xy * yx; }
    double trace() const { return xx + yy; }
    Vec2 operator*(const Vec2& v) const {
        return {xx * v.x + xy * v.y, yx * v.x + yy * v.y};
    }
    Mat2 inverse() const {
        const double d = det();
        return {yy / d, -xy / d, -yx / d, xx / d};
    }
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

inline Mat2 operator*(double s, Mat2 m) {
    m.xx *= s; m.xy *= s; m.yx *= s; m.yy *= s;
    return m;
}
inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yx + b.yx, a.yy + b.yy};
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy};
}

// quadratic form v^T M v
inline double quad(const Mat2& m, const Vec2& v) { return dot(v, m * v); }

// --- torus coordinate helpers -------------------------------------------

// Canonical representative in [0,1).
inline double wrap_unit(double v) { return v - std::floor(v); }

inline Vec2 reduce_torus(const Vec2& p) { return {wrap_unit(p.x), wrap_unit(p.y)}; }

// Reduce to [-1/2, 1/2).
inline double wrap_half(double v) { return v - std::floor(v + 0.5); }

// Minimal representative of a - b, both components in [-1/2, 1/2).
inline Vec2 torus_delta(const Vec2& a, const Vec2& b) {
    return {wrap_half(a.x - b.x), wrap_half(a.y - b.y)};
}

inline double torus_dist(const Vec2& a, const Vec2& b) { return norm(torus_delta(a, b)); }

}  // namespace magneto
