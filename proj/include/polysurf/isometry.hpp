#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "polysurf/geom.hpp"

namespace polysurf {

/// Element of O(2) stored as rotation angle plus reflection flag.
/// Action on vectors: reflect about the x-axis first (if the flag is set),
/// then rotate. A reflection about the line of angle b therefore has
/// rot = 2b, reflect = true.
struct LinearPart {
    Angle rot;            // normalized mod 2*pi on demand
    bool reflect = false;

    static LinearPart identity() { return {}; }
    static LinearPart rotation(Angle a) { return {a, false}; }
    static LinearPart reflection_about_axis(Angle axis) { return {axis.times(2), true}; }

    bool exact() const { return rot.exact(); }
    bool is_identity(double tol = 1e-12) const { return !reflect && rot.is_zero_mod2(tol); }

    Vec2 apply(Vec2 v) const {
        if (reflect) v.y = -v.y;
        double s = rot.sin(), c = rot.cos();
        return {c * v.x - s * v.y, s * v.x + c * v.y};
    }

    /// Exact coordinate action when the rotation is a multiple of pi/2.
    Pt apply(const Pt& p) const {
        if (rot.exact() && p.is_exact()) {
            Rat f = rot.pi_frac().mod(Rat(2));
            if (f.den == 1 || f.den == 2) {
                Rat px = *p.x.q, py = reflect ? -*p.y.q : *p.y.q;
                long long halves = f.den == 1 ? 2 * f.num : f.num;  // rot in units of pi/2
                switch (((halves % 4) + 4) % 4) {
                    case 0: return Pt::exact(px, py);
                    case 1: return Pt::exact(-py, px);
                    case 2: return Pt::exact(-px, -py);
                    default: return Pt::exact(py, -px);
                }
            }
        }
        Vec2 r = apply(p.d());
        return Pt(r.x, r.y);
    }

    /// Action on directions: theta -> rot + theta, or rot - theta when reflecting.
    Angle apply_dir(const Angle& a) const { return reflect ? rot - a : rot + a; }

    LinearPart compose(const LinearPart& o) const {
        // (this) after (o): R(a)M^s R(b)M^t = R(a + (-1)^s b) M^(s xor t)
        Angle b = reflect ? -o.rot : o.rot;
        return {rot + b, reflect != o.reflect};
    }
    LinearPart inverse() const {
        if (reflect) return *this;  // reflections are involutions
        return {-rot, false};
    }

    bool same(const LinearPart& o, double tol = 1e-12) const {
        return reflect == o.reflect && rot.same_mod2(o.rot, tol);
    }

    /// Hash key for exact elements: (reflect, rot mod 2 in units of pi).
    std::uint64_t exact_key() const {
        Rat f = rot.pi_frac().mod(Rat(2));
        std::uint64_t h = std::hash<long long>()(f.num) * 1000003u ^
                          std::hash<long long>()(f.den) * 99991u;
        return (h << 1) | (reflect ? 1u : 0u);
    }
};

/// Planar isometry x -> L x + t.
struct Isometry {
    LinearPart lin;
    Coord tx = Coord(Rat(0)), ty = Coord(Rat(0));

    static Isometry identity() { return {}; }
    static Isometry translation(Coord x, Coord y) { return {LinearPart::identity(), x, y}; }
    static Isometry of(LinearPart l, Coord x, Coord y) { return {l, x, y}; }

    /// Reflection about the line through p with direction angle `axis`.
    static Isometry line_reflection(const Pt& p, const Angle& axis) {
        LinearPart l = LinearPart::reflection_about_axis(axis);
        // t = p - L p
        Pt lp = l.apply(p);
        return {l, p.x - lp.x, p.y - lp.y};
    }

    Vec2 t() const { return {tx.v, ty.v}; }
    bool exact() const { return lin.exact() && tx.is_exact() && ty.is_exact(); }

    Vec2 apply(Vec2 v) const { return lin.apply(v) + t(); }
    Pt apply(const Pt& p) const {
        Pt lp = lin.apply(p);
        return Pt(lp.x + tx, lp.y + ty);
    }
    Vec2 apply_vector(Vec2 v) const { return lin.apply(v); }

    Isometry compose(const Isometry& o) const {
        // (this o o)(x) = L (L' x + t') + t
        Pt lt = lin.apply(Pt(o.tx, o.ty));
        return {lin.compose(o.lin), lt.x + tx, lt.y + ty};
    }
    Isometry inverse() const {
        LinearPart li = lin.inverse();
        Pt lt = li.apply(Pt(tx, ty));
        return {li, -lt.x, -lt.y};
    }
};

}  // namespace polysurf
