#pragma once

#include <cmath>
#include <optional>

#include "polysurf/angle.hpp"
#include "polysurf/rational.hpp"

namespace polysurf {

constexpr double kGeomEps = 1e-9;

struct Vec2 {
    double x = 0, y = 0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    Vec2 normalized() const {
        double n = norm();
        return {x / n, y / n};
    }
    Vec2 rot90() const { return {-y, x}; }
};

inline Vec2 unit_vec(const Angle& a) { return {a.cos(), a.sin()}; }

/// A coordinate that is always usable as a double and may additionally
/// carry an exact rational value.
struct Coord {
    double v = 0;
    std::optional<Rat> q;

    Coord() = default;
    Coord(double d) : v(d) {}
    Coord(Rat r) : v(r.to_double()), q(r) {}
    static Coord exact(long long n, long long d = 1) { return Coord(Rat(n, d)); }

    bool is_exact() const { return q.has_value(); }

    Coord operator+(const Coord& o) const {
        if (q && o.q) return Coord(*q + *o.q);
        return Coord(v + o.v);
    }
    Coord operator-(const Coord& o) const {
        if (q && o.q) return Coord(*q - *o.q);
        return Coord(v - o.v);
    }
    Coord operator-() const {
        if (q) return Coord(-*q);
        return Coord(-v);
    }
    Coord operator*(const Coord& o) const {
        if (q && o.q) return Coord(*q * *o.q);
        return Coord(v * o.v);
    }
    bool num_eq(const Coord& o, double tol = kGeomEps) const {
        if (q && o.q) return *q == *o.q;
        return std::abs(v - o.v) <= tol;
    }
};

struct Pt {
    Coord x, y;

    Pt() = default;
    Pt(Coord cx, Coord cy) : x(cx), y(cy) {}
    Pt(double dx, double dy) : x(dx), y(dy) {}
    static Pt exact(Rat rx, Rat ry) { return Pt(Coord(rx), Coord(ry)); }

    Vec2 d() const { return {x.v, y.v}; }
    bool is_exact() const { return x.is_exact() && y.is_exact(); }
    bool num_eq(const Pt& o, double tol = kGeomEps) const {
        return x.num_eq(o.x, tol) && y.num_eq(o.y, tol);
    }
};

/// Distance from point to segment [a,b].
inline double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = ab.norm2() > 0 ? (p - a).dot(ab) / ab.norm2() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace polysurf
