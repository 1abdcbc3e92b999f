#include <doctest.h>

#include <cmath>

#include "polysurf/angle.hpp"
#include "polysurf/isometry.hpp"
#include "polysurf/rational.hpp"
#include "polysurf/rng.hpp"

using namespace polysurf;

namespace {

// 2x2 matrix oracle for O(2) elements, independent of LinearPart's
// angle bookkeeping.
struct Mat2 {
    double a, b, c, d;  // [[a, b], [c, d]]
    static Mat2 rotation(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }
    static Mat2 flip_y() { return {1, 0, 0, -1}; }
    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
};

Mat2 mat_of(const LinearPart& g) {
    Mat2 m = Mat2::rotation(g.rot.radians());
    if (g.reflect) m = m.mul(Mat2::flip_y());
    return m;
}

bool mat_close(const Mat2& x, const Mat2& y, double tol = 1e-12) {
    return std::abs(x.a - y.a) < tol && std::abs(x.b - y.b) < tol &&
           std::abs(x.c - y.c) < tol && std::abs(x.d - y.d) < tol;
}

}  // namespace

TEST_CASE("rational arithmetic and parsing") {
    Rat a(2, 4);
    CHECK(a.num == 1);
    CHECK(a.den == 2);
    CHECK((Rat(1, 3) + Rat(1, 6)) == Rat(1, 2));
    CHECK((Rat(1, 2) * Rat(2, 3)) == Rat(1, 3));
    CHECK((Rat(-7, 3)).mod(Rat(2)) == Rat(5, 3));
    CHECK(Rat::parse("3/4").value() == Rat(3, 4));
    CHECK(Rat::parse("-5").value() == Rat(-5));
    CHECK(!Rat::parse("1/0").has_value());
    CHECK(!Rat::parse("x").has_value());
    CHECK(Rat(3, 4).str() == "3/4");
    CHECK(Rat(-2, 1).str() == "-2");
}

TEST_CASE("angle exactness and trigonometry") {
    Angle a = Angle::pi(1, 2);
    CHECK(a.exact());
    CHECK(a.cos() == 0.0);  // exact zero from sincospi folding
    CHECK(a.sin() == 1.0);
    CHECK(Angle::pi(1, 1).sin() == 0.0);
    CHECK(Angle::pi(3, 2).cos() == 0.0);
    CHECK((Angle::pi(1, 3) + Angle::pi(1, 6)).pi_frac() == Rat(1, 2));
    CHECK((Angle::pi(7, 3)).norm2().pi_frac() == Rat(1, 3));
    CHECK(!(Angle::pi(1, 3) + Angle::rad(0.5)).exact());
    CHECK(Angle::pi(1, 4).same_mod2(Angle::pi(9, 4)));
    double s45 = Angle::pi(1, 4).sin();
    CHECK(s45 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("linear part composition matches matrix oracle") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        LinearPart g{Angle::pi(static_cast<long long>(rng.below(48)), 12), rng.below(2) == 0};
        LinearPart h{Angle::pi(static_cast<long long>(rng.below(48)), 12), rng.below(2) == 0};
        LinearPart gh = g.compose(h);
        CHECK(mat_close(mat_of(gh), mat_of(g).mul(mat_of(h))));
        CHECK(gh.exact());
        LinearPart gi = g.inverse();
        CHECK(g.compose(gi).is_identity());
    }
}

TEST_CASE("reflection compositions") {
    LinearPart rx = LinearPart::reflection_about_axis(Angle::pi(0, 1));
    CHECK(rx.compose(rx).is_identity());

    for (long long n : {2, 3, 5, 8}) {
        LinearPart ra = LinearPart::reflection_about_axis(Angle::pi(1, n));
        // Product of two reflections rotates by twice the angle between
        // the axes; the order fixes the sign. Oracle: matrix product.
        LinearPart p1 = ra.compose(rx);
        CHECK(mat_close(mat_of(p1), mat_of(ra).mul(mat_of(rx))));
        CHECK(!p1.reflect);
        CHECK(p1.rot.norm2().pi_frac() == Rat(2, n));
        LinearPart p2 = rx.compose(ra);
        CHECK(mat_close(mat_of(p2), mat_of(rx).mul(mat_of(ra))));
        CHECK(p2.rot.norm2().pi_frac() == Rat(2) - Rat(2, n));
    }
}

TEST_CASE("isometry composition: rotation after translation") {
    Isometry rot = Isometry::of(LinearPart::rotation(Angle::pi(1, 3)), Coord(0.0), Coord(0.0));
    Isometry tr = Isometry::translation(Coord(Rat(1)), Coord(Rat(0)));
    Isometry c = rot.compose(tr);
    CHECK(c.lin.rot.pi_frac() == Rat(1, 3));
    CHECK(c.tx.v == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.ty.v == doctest::Approx(std::sqrt(3) / 2).epsilon(1e-15));

    Vec2 p{0.3, -0.7};
    Vec2 via_c = c.apply(p);
    Vec2 via_steps = rot.apply(tr.apply(p));
    CHECK(via_c.x == doctest::Approx(via_steps.x).epsilon(1e-14));
    CHECK(via_c.y == doctest::Approx(via_steps.y).epsilon(1e-14));

    Isometry ci = c.inverse();
    Vec2 back = ci.apply(via_c);
    CHECK(back.x == doctest::Approx(p.x).epsilon(1e-14));
    CHECK(back.y == doctest::Approx(p.y).epsilon(1e-14));
}

TEST_CASE("exact quarter-turn point action keeps rational coordinates") {
    LinearPart q = LinearPart::rotation(Angle::pi(1, 2));
    Pt p = Pt::exact(Rat(1, 3), Rat(2, 5));
    Pt r = q.apply(p);
    CHECK(r.is_exact());
    CHECK(*r.x.q == Rat(-2, 5));
    CHECK(*r.y.q == Rat(1, 3));
    LinearPart m = LinearPart::reflection_about_axis(Angle::pi(0, 1));
    Pt rm = m.apply(p);
    CHECK(rm.is_exact());
    CHECK(*rm.y.q == Rat(-2, 5));
}
