#pragma once

#include "cmcglue/types.hpp"

#include <cmath>

namespace cmcglue {

// Second-order forward-mode jet in the two parameters (t, theta).
struct Jet
{
    double v = 0.0;
    double t = 0.0;
    double h = 0.0;
    double tt = 0.0;
    double th = 0.0;
    double hh = 0.0;

    static Jet constant(double c) { return {c, 0, 0, 0, 0, 0}; }
    static Jet var_t(double x) { return {x, 1, 0, 0, 0, 0}; }
    static Jet var_theta(double x) { return {x, 0, 1, 0, 0, 0}; }

    // f(u) given f, f', f'' at u.v
    Jet apply(double f0, double f1, double f2) const
    {
        return {f0, f1 * t, f1 * h, f1 * tt + f2 * t * t, f1 * th + f2 * t * h, f1 * hh + f2 * h * h};
    }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.t + b.t, a.h + b.h, a.tt + b.tt, a.th + b.th, a.hh + b.hh}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.t - b.t, a.h - b.h, a.tt - b.tt, a.th - b.th, a.hh - b.hh}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.t, -a.h, -a.tt, -a.th, -a.hh}; }
inline Jet operator*(double c, const Jet& a) { return {c * a.v, c * a.t, c * a.h, c * a.tt, c * a.th, c * a.hh}; }
inline Jet operator*(const Jet& a, double c) { return c * a; }
inline Jet operator+(const Jet& a, double c) { return {a.v + c, a.t, a.h, a.tt, a.th, a.hh}; }
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(double c, const Jet& a) { return (-a) + c; }
inline Jet operator-(const Jet& a, double c) { return a + (-c); }

inline Jet operator*(const Jet& a, const Jet& b)
{
    return {a.v * b.v,
            a.t * b.v + a.v * b.t,
            a.h * b.v + a.v * b.h,
            a.tt * b.v + 2.0 * a.t * b.t + a.v * b.tt,
            a.th * b.v + a.t * b.h + a.h * b.t + a.v * b.th,
            a.hh * b.v + 2.0 * a.h * b.h + a.v * b.hh};
}

inline Jet operator/(const Jet& a, const Jet& b)
{
    const double inv = 1.0 / b.v;
    return a * b.apply(inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet sin(const Jet& a) { return a.apply(std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return a.apply(std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a)
{
    const double e = std::exp(a.v);
    return a.apply(e, e, e);
}
inline Jet sqrt(const Jet& a)
{
    const double s = std::sqrt(a.v);
    return a.apply(s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet tanh(const Jet& a)
{
    const double th = std::tanh(a.v);
    const double d = 1.0 - th * th;
    return a.apply(th, d, -2.0 * th * d);
}
inline Jet sech(const Jet& a)
{
    const double s = 1.0 / std::cosh(a.v);
    const double th = std::tanh(a.v);
    return a.apply(s, -s * th, s * (th * th - s * s));
}

// Vector-valued jet.
struct Jet3
{
    Jet c[3];

    static Jet3 constant(const Vec3& x) { return {{Jet::constant(x[0]), Jet::constant(x[1]), Jet::constant(x[2])}}; }
    Vec3 value() const { return {c[0].v, c[1].v, c[2].v}; }
    Vec3 d_t() const { return {c[0].t, c[1].t, c[2].t}; }
    Vec3 d_theta() const { return {c[0].h, c[1].h, c[2].h}; }
    Vec3 d_tt() const { return {c[0].tt, c[1].tt, c[2].tt}; }
    Vec3 d_ttheta() const { return {c[0].th, c[1].th, c[2].th}; }
    Vec3 d_thetatheta() const { return {c[0].hh, c[1].hh, c[2].hh}; }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) { return {{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]}}; }
inline Jet3 operator-(const Jet3& a, const Jet3& b) { return {{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]}}; }
inline Jet3 operator*(const Jet& s, const Jet3& a) { return {{s * a.c[0], s * a.c[1], s * a.c[2]}}; }
inline Jet3 operator*(double s, const Jet3& a) { return {{s * a.c[0], s * a.c[1], s * a.c[2]}}; }
inline Jet3 operator+(const Jet3& a, const Vec3& x) { return {{a.c[0] + x[0], a.c[1] + x[1], a.c[2] + x[2]}}; }
inline Jet3 apply(const Mat3& M, const Jet3& a)
{
    Jet3 out;
    for (int i = 0; i < 3; ++i)
        out.c[i] = M(i, 0) * a.c[0] + M(i, 1) * a.c[1] + M(i, 2) * a.c[2];
    return out;
}

struct SurfaceDiffGeom
{
    double H;
    double E, F, G;
    double L, M, N;
    Vec3 normal;
    double area_element;
};

// Unit normal X_theta x X_t (outward on the model sphere and Delaunay pieces); H = -(E N - 2 F M + G L) / (2 (EG - F^2)).
SurfaceDiffGeom diff_geom(const Jet3& X);

} // namespace cmcglue
