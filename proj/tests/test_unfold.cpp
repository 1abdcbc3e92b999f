#include <doctest.h>

#include <map>
#include <tuple>

#include "polysurf/unfold.hpp"

using namespace polysurf;

namespace {

Cell unit_square_cell(const std::string& name) {
    Cell c;
    c.name = name;
    c.verts = {Pt::exact(Rat(0), Rat(0)), Pt::exact(Rat(1), Rat(0)), Pt::exact(Rat(1), Rat(1)),
               Pt::exact(Rat(0), Rat(1))};
    return c;
}

Surface square_torus() {
    Cell sq = unit_square_cell("sq");
    Gluing lr{{0, 1}, {0, 3}, Isometry::translation(Coord(Rat(-1)), Coord(Rat(0))), 0};
    Gluing tb{{0, 2}, {0, 0}, Isometry::translation(Coord(Rat(0)), Coord(Rat(-1))), 0};
    return build_surface({sq}, {lr, tb});
}

/// Test-side analogue of the cover construction with sheets replaced by
/// cosets of a subgroup; used to witness minimality of the canonical cover.
Surface coset_quotient(const Surface& base, const RotationalGroup& grp,
                       const std::vector<int>& subgroup) {
    const auto& G = grp.elements;
    int m = static_cast<int>(G.size());
    auto key = [&](const LinearPart& g) {
        Rat f = g.rot.pi_frac().mod(Rat(2));
        return std::tuple<long long, long long, bool>{f.num, f.den, g.reflect};
    };
    std::map<std::tuple<long long, long long, bool>, int> gidx;
    for (int k = 0; k < m; ++k) gidx[key(G[k])] = k;
    // coset id of element k: minimal index in { h * g_k : h in H }
    std::vector<int> coset(m), rep(m, -1);
    for (int k = 0; k < m; ++k) {
        int c = m;
        for (int h : subgroup) c = std::min(c, gidx.at(key(G[h].compose(G[k]))));
        coset[k] = c;
        rep[c] = c;
    }
    std::vector<int> cosets;
    for (int k = 0; k < m; ++k)
        if (rep[k] == k) cosets.push_back(k);
    std::map<int, int> coset_pos;
    for (std::size_t i = 0; i < cosets.size(); ++i) coset_pos[cosets[i]] = static_cast<int>(i);

    auto as_iso = [](const LinearPart& l) { return Isometry::of(l, Coord(Rat(0)), Coord(Rat(0))); };
    Surface q;
    int nbase = base.cell_count();
    auto esheet = [&](int k, int cell, int e) {
        int n = base.cell(cell).n();
        return G[k].reflect ? n - 1 - e : e;
    };
    for (int c : cosets) {
        for (int i = 0; i < nbase; ++i) {
            const Cell& src = base.cell(i);
            int n = src.n();
            Cell cc;
            cc.name = src.name + "#" + std::to_string(c);
            cc.dirs.resize(n);
            if (!G[c].reflect)
                for (int j = 0; j < n; ++j) cc.verts.push_back(G[c].apply(src.verts[j]));
            else
                for (int j = 0; j < n; ++j) cc.verts.push_back(G[c].apply(src.verts[(n - j) % n]));
            for (int j = 0; j < n; ++j) {
                int jb = G[c].reflect ? n - 1 - j : j;
                Angle d = src.edge_dir(jb);
                if (d.exact()) {
                    Angle nd = G[c].apply_dir(d);
                    if (G[c].reflect) nd = nd + Angle::pi(1, 1);
                    cc.dirs[j] = nd.norm2();
                }
            }
            q.add_cell(std::move(cc));
        }
    }
    auto qcell = [&](int i, int c) { return coset_pos.at(c) * nbase + i; };
    auto coset_of = [&](const LinearPart& g) { return coset[gidx.at(key(g))]; };
    for (const Gluing& g : base.gluings()) {
        for (int c : cosets) {
            int c2 = coset_of(G[c].compose(g.map.lin.inverse()));
            Gluing cg;
            cg.a = {qcell(g.a.cell, c), esheet(c, g.a.cell, g.a.edge)};
            cg.b = {qcell(g.b.cell, c2), esheet(c2, g.b.cell, g.b.edge)};
            cg.map = as_iso(G[c2]).compose(g.map).compose(as_iso(G[c]).inverse());
            q.add_gluing(std::move(cg));
        }
    }
    std::set<std::pair<int, int>> done;
    for (const EdgeRef& r : base.boundary_edges()) {
        Isometry refl = Isometry::line_reflection(base.cell(r.cell).vstart(r.edge),
                                                  base.cell(r.cell).edge_dir(r.edge));
        for (int c : cosets) {
            int c2 = coset_of(G[c].compose(refl.lin));
            if (c2 == c) continue;  // reflection stays in the coset: edge remains boundary
            int qa = qcell(r.cell, c), qb = qcell(r.cell, c2);
            int ea = esheet(c, r.cell, r.edge), eb = esheet(c2, r.cell, r.edge);
            if (done.count({qa, ea}) || done.count({qb, eb})) continue;
            done.insert({qa, ea});
            done.insert({qb, eb});
            Gluing cg;
            cg.a = {qa, ea};
            cg.b = {qb, eb};
            cg.map = as_iso(G[c2]).compose(refl).compose(as_iso(G[c]).inverse());
            q.add_gluing(std::move(cg));
        }
    }
    q.validate();
    return q;
}

}  // namespace

TEST_CASE("translation surface unfolds to itself (degree 1)") {
    Surface t = square_torus();
    TranslationCover cover = canonical_translation_cover(t);
    CHECK(cover.degree == 1);
    CHECK(cover.total.cell_count() == 1);
    CHECK(rotational_holonomy(cover.total).trivial());
}

TEST_CASE("square billiard unfolds to the 2x2 torus") {
    Surface s = build_surface({unit_square_cell("p")}, {});
    TranslationCover cover = canonical_translation_cover(s);
    CHECK(cover.degree == 4);  // |D_2| = 2N with N = 2
    CHECK(cover.total.cell_count() == 4);
    CHECK(cover.total.boundary_edges().empty());
    CHECK(rotational_holonomy(cover.total).trivial());

    auto res = is_square_tiled(cover.total);
    REQUIRE(std::holds_alternative<SquareTiling>(res));
    const auto& tiling = std::get<SquareTiling>(res);
    CHECK(tiling.squares.size() == 4);
    CHECK(tiling.scale_x == Rat(1));
    CHECK(tiling.scale_y == Rat(1));
    // permutations are bijections without boundary flags
    std::set<int> rimg(tiling.right.begin(), tiling.right.end());
    std::set<int> uimg(tiling.up.begin(), tiling.up.end());
    CHECK(rimg.size() == 4);
    CHECK(uimg.size() == 4);
    CHECK(!rimg.count(-1));
}

TEST_CASE("doubled square unfolds with degree 2") {
    Surface d = double_surface(build_surface({unit_square_cell("p")}, {}));
    TranslationCover cover = canonical_translation_cover(d);
    CHECK(cover.degree == 2);
    CHECK(rotational_holonomy(cover.total).trivial());
    // Interior cone angles of the cover are integer multiples of 2*pi.
    for (const auto& vc : cover.total.vertex_classes()) {
        CHECK(!vc.on_boundary);
        double k = vc.total_angle.radians() / (2 * M_PI);
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
}

TEST_CASE("minimality witness: coset quotients regain holonomy (N = 2)") {
    Surface s = build_surface({unit_square_cell("p")}, {});
    RotationalGroup grp = rotational_holonomy(s);
    REQUIRE(grp.order() == 4);
    // Every nontrivial subgroup of D_2, including the full group.
    std::vector<std::vector<int>> subgroups;
    for (int a = 1; a < 4; ++a) subgroups.push_back({0, a});
    subgroups.push_back({0, 1, 2, 3});
    for (const auto& H : subgroups) {
        std::vector<int> closed = H;  // subgroups of an exponent-2 group
        Surface q = coset_quotient(s, grp, closed);
        RotationalGroup hq = rotational_holonomy(q);
        REQUIRE(hq.finite());
        CHECK(!hq.trivial());
    }
    // The trivial subgroup reproduces the translation cover.
    Surface full = coset_quotient(s, grp, {0});
    CHECK(rotational_holonomy(full).trivial());
}

TEST_CASE("origami: single square is the standard torus") {
    Surface t = origami_from_squares({{0, 0}});
    CHECK(t.cell_count() == 1);
    CHECK(t.boundary_edges().empty());
    CHECK(rotational_holonomy(t).trivial());
    CHECK(t.euler_characteristic() == 0);
}

TEST_CASE("origami: 2x1 domino is a torus with two squares") {
    Surface t = origami_from_squares({{0, 0}, {1, 0}});
    CHECK(t.cell_count() == 2);
    CHECK(t.euler_characteristic() == 0);
    auto res = is_square_tiled(t);
    REQUIRE(std::holds_alternative<SquareTiling>(res));
    const auto& tiling = std::get<SquareTiling>(res);
    REQUIRE(tiling.squares.size() == 2);
    // one row of two squares, each its own column
    int i = 0;
    CHECK(tiling.right[i] != i);
    CHECK(tiling.right[tiling.right[i]] == i);
    CHECK(tiling.up[i] == i);
}

TEST_CASE("origami staircase window: rows and columns of length <= 3") {
    Surface s = origami_from_squares(staircase_squares(10));
    CHECK(s.cell_count() == 30);
    CHECK(s.boundary_edges().empty());
    CHECK(rotational_holonomy(s).trivial());
    // interior angle sums are multiples of 2*pi
    for (const auto& vc : s.vertex_classes()) {
        double k = vc.total_angle.radians() / (2 * M_PI);
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
}

TEST_CASE("periodic staircase quotient: 3 squares, centered vertical cocycle") {
    Surface s = origami_staircase_quotient();
    CHECK(s.cell_count() == 3);
    CHECK(s.boundary_edges().empty());
    CHECK(s.has_shift_labels());
    CHECK(rotational_holonomy(s).trivial());
    auto res = is_square_tiled(s);
    REQUIRE(std::holds_alternative<SquareTiling>(res));
    const auto& t = std::get<SquareTiling>(res);
    REQUIRE(t.squares.size() == 3);
    CHECK(t.periodic);
    // row of three: right-permutation is one 3-cycle with zero shifts
    int i = 0;
    CHECK(t.right[t.right[t.right[i]]] == i);
    CHECK(t.right_shift[0] + t.right_shift[1] + t.right_shift[2] == 0);
    // column of three: up-permutation cycles with shifts summing to zero
    CHECK(t.up[t.up[t.up[i]]] == i);
    CHECK(t.up_shift[0] + t.up_shift[1] + t.up_shift[2] == 0);
    long total_abs = std::abs(t.up_shift[0]) + std::abs(t.up_shift[1]) + std::abs(t.up_shift[2]);
    CHECK(total_abs == 4);  // +1, +1, -2 in some order
}

TEST_CASE("origami from a rectilinear polygon cell") {
    Cell l;
    l.name = "L";
    l.verts = {Pt::exact(Rat(0), Rat(0)), Pt::exact(Rat(2), Rat(0)), Pt::exact(Rat(2), Rat(1)),
               Pt::exact(Rat(1), Rat(1)), Pt::exact(Rat(1), Rat(2)), Pt::exact(Rat(0), Rat(2))};
    Surface s = origami_from_polygon(l);
    CHECK(s.cell_count() == 3);
    CHECK(s.boundary_edges().empty());

    Cell bad;
    bad.name = "tri";
    bad.verts = {Pt::exact(Rat(0), Rat(0)), Pt::exact(Rat(2), Rat(0)), Pt::exact(Rat(0), Rat(2))};
    CHECK_THROWS_AS(origami_from_polygon(bad), NotLatticeDrawn);
}

TEST_CASE("direction classification by the Niven table") {
    CHECK(classify_slope(Rat(1, 2)).cls == DirectionClass::Rational);
    CHECK(classify_slope(Rat(1, 2)).slope.value() == Rat(1, 2));

    DirectionVerdict v = classify_direction(Angle::pi(1, 3));
    CHECK(v.cls == DirectionClass::Irrational);  // tan(pi/3) = sqrt(3)
    CHECK(!v.inexact_warning);

    DirectionVerdict vert = classify_direction(Angle::pi(1, 2));
    CHECK(vert.cls == DirectionClass::Rational);
    CHECK(vert.vertical);

    CHECK(classify_direction(Angle::pi(1, 4)).slope.value() == Rat(1));
    CHECK(classify_direction(Angle::pi(0, 1)).slope.value() == Rat(0));

    DirectionVerdict f = classify_direction(Angle::rad(0.5));
    CHECK(f.cls == DirectionClass::Irrational);
    CHECK(f.inexact_warning);
}

TEST_CASE("square tiling scale detection uses the denominator lcm") {
    // one 1 x 1/2 rectangle as a torus: needs y-scale 2
    Cell r;
    r.name = "r";
    r.verts = {Pt::exact(Rat(0), Rat(0)), Pt::exact(Rat(1), Rat(0)),
               Pt::exact(Rat(1), Rat(1, 2)), Pt::exact(Rat(0), Rat(1, 2))};
    Gluing lr{{0, 1}, {0, 3}, Isometry::translation(Coord(Rat(-1)), Coord(Rat(0))), 0};
    Gluing tb{{0, 2}, {0, 0}, Isometry::translation(Coord(Rat(0)), Coord(Rat(-1, 2))), 0};
    Surface s = build_surface({r}, {lr, tb});
    auto res = is_square_tiled(s);
    REQUIRE(std::holds_alternative<SquareTiling>(res));
    const auto& t = std::get<SquareTiling>(res);
    CHECK(t.scale_x == Rat(1));
    CHECK(t.scale_y == Rat(2));
    CHECK(t.squares.size() == 1);  // affine normalization makes it one unit square

    auto bounded = is_square_tiled(s, 1);
    CHECK(std::holds_alternative<NotSquareTiled>(bounded));

    // an irrational edge length cannot be square tiled
    Cell q;
    q.name = "q";
    double b = std::sqrt(2.0) / 2;
    q.verts = {Pt(0.0, 0.0), Pt(1.0, 0.0), Pt(1.0, b), Pt(0.0, b)};
    q.dirs = {Angle::pi(0, 1), Angle::pi(1, 2), Angle::pi(1, 1), Angle::pi(3, 2)};
    Gluing lr2{{0, 1}, {0, 3}, Isometry::translation(Coord(-1.0), Coord(0.0)), 0};
    Gluing tb2{{0, 2}, {0, 0}, Isometry::translation(Coord(0.0), Coord(-b)), 0};
    Surface si = build_surface({q}, {lr2, tb2});
    auto res2 = is_square_tiled(si);
    REQUIRE(std::holds_alternative<NotSquareTiled>(res2));
    CHECK(std::get<NotSquareTiled>(res2).inexact_warning);
}
