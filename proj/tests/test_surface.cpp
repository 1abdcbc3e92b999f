#include <doctest.h>

#include "polysurf/surface.hpp"

using namespace polysurf;

namespace {

Cell unit_square(const std::string& name, Rat x0 = Rat(0), Rat y0 = Rat(0),
                 Rat w = Rat(1), Rat h = Rat(1)) {
    Cell c;
    c.name = name;
    c.verts = {Pt::exact(x0, y0), Pt::exact(x0 + w, y0), Pt::exact(x0 + w, y0 + h),
               Pt::exact(x0, y0 + h)};
    return c;
}

// One square, left<->right and bottom<->top glued by translations.
// shift=+1 on the vertical gluing (crossing upward) when requested.
Surface make_torus(long vshift = 0) {
    Cell sq = unit_square("sq");
    Gluing lr;  // right edge (a) onto left edge (b)
    lr.a = {0, 1};
    lr.b = {0, 3};
    lr.map = Isometry::translation(Coord(Rat(-1)), Coord(Rat(0)));
    Gluing tb;  // top edge (a) onto bottom edge (b); a->b crossing moves up
    tb.a = {0, 2};
    tb.b = {0, 0};
    tb.map = Isometry::translation(Coord(Rat(0)), Coord(Rat(-1)));
    tb.shift = vshift;
    return build_surface({sq}, {lr, tb});
}

}  // namespace

TEST_CASE("cell geometry: angles, area, containment") {
    Cell c = unit_square("c");
    CHECK(c.area() == doctest::Approx(1.0));
    for (int i = 0; i < 4; ++i) {
        Angle a = c.interior_angle(i);
        CHECK(a.exact());
        CHECK(a.pi_frac() == Rat(1, 2));
        CHECK(c.edge_dir(i).exact());
    }
    CHECK(c.contains({0.5, 0.5}));
    CHECK(c.contains({0.0, 0.5}));  // boundary counts
    CHECK(!c.contains({1.5, 0.5}));

    // L-shape has a reflex corner of 3*pi/2.
    Cell l;
    l.name = "l";
    l.verts = {Pt::exact(Rat(0), Rat(0)), Pt::exact(Rat(2), Rat(0)), Pt::exact(Rat(2), Rat(1)),
               Pt::exact(Rat(1), Rat(1)), Pt::exact(Rat(1), Rat(2)), Pt::exact(Rat(0), Rat(2))};
    CHECK(l.interior_angle(3).pi_frac() == Rat(3, 2));
    CHECK(l.contains({0.5, 1.5}));
    CHECK(!l.contains({1.5, 1.5}));
}

TEST_CASE("torus from one square: no boundary, one regular vertex") {
    Surface t = make_torus();
    CHECK(t.boundary_edges().empty());
    const auto& vcs = t.vertex_classes();
    REQUIRE(vcs.size() == 1);
    CHECK(vcs[0].kind == VertexClass::Kind::RegularInterior);
    CHECK(vcs[0].total_angle.exact());
    CHECK(vcs[0].total_angle.pi_frac() == Rat(2));
    CHECK(vcs[0].corners.size() == 4);
    CHECK(t.euler_characteristic() == 0);
}

TEST_CASE("doubling of the unit square: 4 cone points of angle pi") {
    Cell sq = unit_square("p");
    Surface s = build_surface({sq}, {});
    CHECK(s.boundary_edges().size() == 4);
    Surface d = double_surface(s);
    CHECK(d.boundary_edges().empty());
    const auto& vcs = d.vertex_classes();
    REQUIRE(vcs.size() == 4);
    for (const auto& vc : vcs) {
        CHECK(vc.kind == VertexClass::Kind::ConePoint);
        CHECK(vc.total_angle.exact());
        CHECK(vc.total_angle.pi_frac() == Rat(1));
    }
    // chi(DS) = 2 chi(S) - chi(boundary S): square chi 1, boundary cycle chi 0.
    CHECK(d.euler_characteristic() == 2);
}

TEST_CASE("doubling keeps keep_open edges as boundary in both copies") {
    Cell sq = unit_square("p");
    Surface s = build_surface({sq}, {});
    Surface d = double_surface(s, {{EdgeRef{0, 0}}});
    CHECK(d.boundary_edges().size() == 2);
    CHECK_THROWS_AS(double_surface(s, {{EdgeRef{0, 0}, EdgeRef{0, 1}, EdgeRef{0, 2},
                                        EdgeRef{0, 3}}}),
                    BuildError);
}

TEST_CASE("build errors carry the spec'd codes") {
    SUBCASE("length mismatch") {
        Cell a = unit_square("a");
        Cell b = unit_square("b", Rat(2), Rat(0), Rat(2), Rat(2));
        Gluing g;
        g.a = {0, 1};
        g.b = {1, 3};
        g.map = Isometry::translation(Coord(Rat(1)), Coord(Rat(0)));
        try {
            build_surface({a, b}, {g});
            FAIL("expected LengthMismatch");
        } catch (const BuildError& e) {
            CHECK(e.code == BuildCode::LengthMismatch);
        }
    }
    SUBCASE("duplicate gluing") {
        Cell a = unit_square("a");
        Gluing lr;
        lr.a = {0, 1};
        lr.b = {0, 3};
        lr.map = Isometry::translation(Coord(Rat(-1)), Coord(Rat(0)));
        try {
            build_surface({a}, {lr, lr});
            FAIL("expected DuplicateGluing");
        } catch (const BuildError& e) {
            CHECK(e.code == BuildCode::DuplicateGluing);
        }
    }
    SUBCASE("orientation: map that does not flip sides") {
        Cell a = unit_square("a");
        Gluing g;  // reflect left edge onto right edge about x = 1/2
        g.a = {0, 3};
        g.b = {0, 1};
        g.map = Isometry::line_reflection(Pt::exact(Rat(1, 2), Rat(0)), Angle::pi(1, 2));
        try {
            build_surface({a}, {g});
            FAIL("expected BadOrientation");
        } catch (const BuildError& e) {
            CHECK(e.code == BuildCode::BadOrientation);
        }
    }
    SUBCASE("disconnected") {
        Cell a = unit_square("a");
        Cell b = unit_square("b", Rat(5), Rat(0));
        try {
            build_surface({a, b}, {});
            FAIL("expected Disconnected");
        } catch (const BuildError& e) {
            CHECK(e.code == BuildCode::Disconnected);
        }
    }
}

TEST_CASE("round trip across a gluing is the identity") {
    Surface t = make_torus();
    auto fwd = t.transport(0, 1);
    REQUIRE(fwd.has_value());
    auto back = t.transport(fwd->to.cell, fwd->to.edge);
    REQUIRE(back.has_value());
    Isometry round = back->map.compose(fwd->map);
    CHECK(round.lin.is_identity());
    CHECK(std::abs(round.tx.v) < 1e-15);
    CHECK(std::abs(round.ty.v) < 1e-15);
    CHECK(fwd->shift + back->shift == 0);
}

TEST_CASE("conditions report on a single unit square") {
    Cell sq = unit_square("sq");
    Surface s = build_surface({sq}, {});
    ConditionsReport rep = validate_conditions(s, BBox{-10, -10, 10, 10});
    CHECK(rep.sides_in_window == 4);
    CHECK(rep.min_side_length == doctest::Approx(1.0));
    CHECK(!rep.b_flag);
    CHECK(rep.max_multiplicity == 1);
}

TEST_CASE("split_edge keeps gluing indices consistent") {
    Cell sq = unit_square("sq");
    Surface s;
    s.add_cell(sq);
    Gluing lr;
    lr.a = {0, 1};
    lr.b = {0, 3};
    lr.map = Isometry::translation(Coord(Rat(-1)), Coord(Rat(0)));
    s.add_gluing(lr);
    s.split_edge(0, 0, Pt::exact(Rat(1, 2), Rat(0)));
    // bottom edge split: cell now has 5 vertices; the old right edge is 2.
    CHECK(s.cell(0).n() == 5);
    CHECK(s.gluings()[0].a.edge == 2);
    CHECK(s.gluings()[0].b.edge == 4);
}
