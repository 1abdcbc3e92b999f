#include <doctest.h>

#include "polysurf/holonomy.hpp"
#include "polysurf/rng.hpp"

using namespace polysurf;

namespace {

Cell unit_square(const std::string& name) {
    Cell c;
    c.name = name;
    c.verts = {Pt::exact(Rat(0), Rat(0)), Pt::exact(Rat(1), Rat(0)), Pt::exact(Rat(1), Rat(1)),
               Pt::exact(Rat(0), Rat(1))};
    return c;
}

Surface square_torus() {
    Cell sq = unit_square("sq");
    Gluing lr{{0, 1}, {0, 3}, Isometry::translation(Coord(Rat(-1)), Coord(Rat(0))), 0};
    Gluing tb{{0, 2}, {0, 0}, Isometry::translation(Coord(Rat(0)), Coord(Rat(-1))), 0};
    return build_surface({sq}, {lr, tb});
}

}  // namespace

TEST_CASE("torus has trivial rotational holonomy") {
    Surface t = square_torus();
    RotationalGroup g = rotational_holonomy(t);
    REQUIRE(g.finite());
    CHECK(g.trivial());
    CHECK(n_of_surface(t) == 1);
}

TEST_CASE("square as a polygon-with-boundary gives D_2") {
    Surface s = build_surface({unit_square("p")}, {});
    RotationalGroup g = rotational_holonomy(s);
    REQUIRE(g.finite());
    CHECK(g.order() == 4);
    CHECK(g.reflections() == 2);
    CHECK(g.dihedral_n().value() == 2);
    CHECK(n_of_surface(s) == 2);
}

TEST_CASE("doubled square holonomy is the rotation subgroup of D_2") {
    Surface d = double_surface(build_surface({unit_square("p")}, {}));
    RotationalGroup g = rotational_holonomy(d);
    REQUIRE(g.finite());
    CHECK(g.order() == 2);
    CHECK(g.reflections() == 0);
    // Hol(DP) = Hol(P) ∩ Iso_0: subgroup of the polygon's group.
    RotationalGroup base = rotational_holonomy(build_surface({unit_square("p")}, {}));
    for (const auto& e : g.elements) CHECK(base.contains(e));
}

TEST_CASE("dihedral closure from reflection generators") {
    for (long long n : {1, 2, 3, 5, 12}) {
        std::vector<LinearPart> gens = {
            LinearPart::reflection_about_axis(Angle::pi(0, 1)),
            LinearPart::reflection_about_axis(Angle::pi(1, n)),
        };
        RotationalGroup g = close_group(gens, 4096);
        REQUIRE(g.finite());
        CHECK(g.order() == 2 * n);
        CHECK(g.reflections() == n);
        CHECK(g.dihedral_n().value() == static_cast<int>(n));
    }
}

TEST_CASE("group closure properties on random exact generator sets") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LinearPart> gens;
        int k = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < k; ++i) {
            long long den = 1 + static_cast<long long>(rng.below(6));
            long long num = static_cast<long long>(rng.below(static_cast<std::uint64_t>(2 * den)));
            gens.push_back({Angle::pi(num, den), rng.below(2) == 0});
        }
        RotationalGroup g = close_group(gens, 4096);
        REQUIRE(g.finite());
        // closed under composition and inverse, identity present
        CHECK(g.contains(LinearPart::identity()));
        for (const auto& a : g.elements) {
            CHECK(g.contains(a.inverse()));
            for (const auto& b : g.elements) CHECK(g.contains(a.compose(b)));
        }
        int refl = g.reflections();
        if (refl > 0) CHECK(2 * refl == g.order());
    }
}

TEST_CASE("inexact generator angles are reported, not guessed") {
    std::vector<LinearPart> gens = {LinearPart::reflection_about_axis(Angle::rad(0.7))};
    RotationalGroup g = close_group(gens, 4096);
    CHECK(!g.finite());
    CHECK(g.reason == RotationalGroup::Reason::InexactAngles);

    Cell sq = unit_square("p");
    sq.verts[2] = Pt(1.0, 1.7);
    sq.verts[3] = Pt(0.3, 1.4);  // tilted top edge, no exact direction
    Surface s = build_surface({sq}, {});
    RotationalGroup gs = rotational_holonomy(s);
    CHECK(!gs.finite());
    CHECK_THROWS_AS(n_of_surface(s), IrrationalSurface);
}
