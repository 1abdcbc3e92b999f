#include "polysurf/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <climits>

namespace polysurf {

namespace {

Isometry as_isometry(const LinearPart& l) {
    return Isometry::of(l, Coord(Rat(0)), Coord(Rat(0)));
}

/// Full reflection isometry about the line containing edge e of cell c.
Isometry edge_reflection(const Cell& c, int e) {
    return Isometry::line_reflection(c.vstart(e), c.edge_dir(e));
}

}  // namespace

TranslationCover canonical_translation_cover(const Surface& base, int cap) {
    RotationalGroup grp = rotational_holonomy(base, cap);
    if (!grp.finite())
        throw IrrationalSurface("canonical_translation_cover: surface is not rational");
    const auto& G = grp.elements;
    int m = static_cast<int>(G.size());
    std::map<std::tuple<long long, long long, bool>, int> gidx;
    for (int k = 0; k < m; ++k) {
        Rat f = G[k].rot.pi_frac().mod(Rat(2));
        gidx[{f.num, f.den, G[k].reflect}] = k;
    }
    auto index_of = [&](const LinearPart& g) {
        Rat f = g.rot.pi_frac().mod(Rat(2));
        auto it = gidx.find({f.num, f.den, g.reflect});
        if (it == gidx.end())
            throw std::logic_error("cover: holonomy element missing from closed group");
        return it->second;
    };

    TranslationCover cover;
    cover.degree = m;
    cover.group = grp;

    int nbase = base.cell_count();
    // Cover cell (i, k): geometry of base cell i transformed by G[k].
    // Orientation-reversing sheets get their vertex order reversed to
    // stay counterclockwise; edge e of the base appears as edge
    // esheet(k, e) of the sheet copy.
    auto esheet = [&](int k, int cell, int e) {
        int n = base.cell(cell).n();
        return G[k].reflect ? n - 1 - e : e;
    };
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < nbase; ++i) {
            const Cell& src = base.cell(i);
            int n = src.n();
            Cell c;
            c.name = src.name + "@" + std::to_string(k);
            c.block = src.block;
            c.dirs.resize(n);
            if (!G[k].reflect) {
                for (int j = 0; j < n; ++j) c.verts.push_back(G[k].apply(src.verts[j]));
                for (int j = 0; j < n; ++j) {
                    Angle d = src.edge_dir(j);
                    if (d.exact() && G[k].exact()) c.dirs[j] = G[k].apply_dir(d).norm2();
                }
            } else {
                for (int j = 0; j < n; ++j) c.verts.push_back(G[k].apply(src.verts[(n - j) % n]));
                for (int j = 0; j < n; ++j) {
                    Angle d = src.edge_dir(n - 1 - j);
                    if (d.exact() && G[k].exact())
                        c.dirs[j] = (G[k].apply_dir(d) + Angle::pi(1, 1)).norm2();
                }
            }
            cover.total.add_cell(std::move(c));
            cover.sheet_map.push_back({i, k});
        }
    }
    auto cover_cell = [&](int i, int k) { return k * nbase + i; };

    // Interior gluings: crossing a gluing with linear part lambda moves
    // sheet g to g * lambda^-1.
    for (const Gluing& g : base.gluings()) {
        LinearPart lam = g.map.lin;
        for (int k = 0; k < m; ++k) {
            int k2 = index_of(G[k].compose(lam.inverse()));
            Gluing cg;
            cg.a = {cover_cell(g.a.cell, k), esheet(k, g.a.cell, g.a.edge)};
            cg.b = {cover_cell(g.b.cell, k2), esheet(k2, g.b.cell, g.b.edge)};
            cg.map = as_isometry(G[k2]).compose(g.map).compose(as_isometry(G[k]).inverse());
            cg.shift = g.shift;
            cover.total.add_gluing(std::move(cg));
        }
    }
    // Boundary edges unfold into gluings between sheet g and g * r_e.
    for (const EdgeRef& r : base.boundary_edges()) {
        Isometry refl = edge_reflection(base.cell(r.cell), r.edge);
        LinearPart rho = refl.lin;
        for (int k = 0; k < m; ++k) {
            int k2 = index_of(G[k].compose(rho));
            if (k2 < k) continue;  // each pair once
            if (k2 == k) throw std::logic_error("cover: reflection fixes a sheet");
            Gluing cg;
            cg.a = {cover_cell(r.cell, k), esheet(k, r.cell, r.edge)};
            cg.b = {cover_cell(r.cell, k2), esheet(k2, r.cell, r.edge)};
            cg.map = as_isometry(G[k2]).compose(refl).compose(as_isometry(G[k]).inverse());
            cg.shift = 0;
            cover.total.add_gluing(std::move(cg));
        }
    }
    cover.total.validate();

    // Branched-cover angle relation: every cover vertex angle is an
    // integer multiple of the base vertex angle underneath it.
    const auto& bvc = base.vertex_classes();
    const auto& cvc = cover.total.vertex_classes();
    for (int cc = 0; cc < cover.total.cell_count(); ++cc) {
        auto [bi, k] = cover.sheet_map[cc];
        int n = base.cell(bi).n();
        for (int j = 0; j < cover.total.cell(cc).n(); ++j) {
            int jb = G[k].reflect ? (n - j) % n : j;
            double a = cvc[cover.total.vertex_class_of(cc, j)].total_angle.radians();
            double b = bvc[base.vertex_class_of(bi, jb)].total_angle.radians();
            double ratio = a / b;
            if (std::abs(ratio - std::round(ratio)) > 1e-6)
                throw std::logic_error("cover: vertex angle is not a multiple of base angle");
        }
    }
    return cover;
}

// --- square tiling -------------------------------------------------------

int SquareTiling::find(long x, long y) const {
    for (std::size_t i = 0; i < squares.size(); ++i)
        if (squares[i].x == x && squares[i].y == y) return static_cast<int>(i);
    return -1;
}

std::variant<SquareTiling, NotSquareTiled> is_square_tiled(const Surface& s, long scale_bound) {
    RotationalGroup grp = rotational_holonomy(s);
    if (!grp.finite() || !grp.trivial())
        throw NontrivialHolonomy("is_square_tiled: input must be a translation surface");

    for (int c = 0; c < s.cell_count(); ++c)
        if (!s.cell(c).has_exact_coords())
            return NotSquareTiled{"inexact vertex coordinates; lattice membership undecidable",
                                  true};
    for (int c = 0; c < s.cell_count(); ++c) {
        const Cell& cell = s.cell(c);
        for (int e = 0; e < cell.n(); ++e) {
            Angle d = cell.edge_dir(e);
            if (!d.exact()) return NotSquareTiled{"edge with undeclared direction", true};
            Rat f = d.pi_frac().mod(Rat(1));
            if (!(f == Rat(0) || f == Rat(1, 2)))
                return NotSquareTiled{"non-axis-parallel edge"};
        }
    }

    long long sx = 1, sy = 1;
    for (int c = 0; c < s.cell_count(); ++c)
        for (const Pt& p : s.cell(c).verts) {
            sx = lcm_checked(sx, p.x.q->den);
            sy = lcm_checked(sy, p.y.q->den);
        }
    if (sx > scale_bound || sy > scale_bound)
        return NotSquareTiled{"denominator lcm exceeds the scale search bound"};
    Rat rsx(sx), rsy(sy);
    for (const Gluing& g : s.gluings()) {
        if (!g.map.tx.is_exact() || !g.map.ty.is_exact())
            return NotSquareTiled{"inexact gluing translation", true};
        if (!(*g.map.tx.q * rsx).is_integer() || !(*g.map.ty.q * rsy).is_integer())
            return NotSquareTiled{"gluing translation off the lattice"};
    }

    SquareTiling tiling;
    tiling.scale_x = rsx;
    tiling.scale_y = rsy;
    tiling.periodic = s.has_shift_labels();

    // Enumerate unit squares of each scaled cell.
    for (int c = 0; c < s.cell_count(); ++c) {
        const Cell& cell = s.cell(c);
        Cell scaled = cell;
        for (Pt& p : scaled.verts) p = Pt::exact(*p.x.q * rsx, *p.y.q * rsy);
        long long xmin = LLONG_MAX, xmax = LLONG_MIN, ymin = LLONG_MAX, ymax = LLONG_MIN;
        for (const Pt& p : scaled.verts) {
            xmin = std::min(xmin, p.x.q->num);
            xmax = std::max(xmax, p.x.q->num);
            ymin = std::min(ymin, p.y.q->num);
            ymax = std::max(ymax, p.y.q->num);
        }
        if ((xmax - xmin) * (ymax - ymin) > 2'000'000)
            return NotSquareTiled{"tiling too large"};
        for (long long x = xmin; x < xmax; ++x)
            for (long long y = ymin; y < ymax; ++y)
                if (scaled.contains({x + 0.5, y + 0.5}, 0.0))
                    tiling.squares.push_back({x, y, c});
    }

    // Neighbor permutations by transporting edge midpoints.
    int nsq = static_cast<int>(tiling.squares.size());
    tiling.right.assign(nsq, -1);
    tiling.up.assign(nsq, -1);
    tiling.right_shift.assign(nsq, 0);
    tiling.up_shift.assign(nsq, 0);
    std::map<std::pair<int, std::pair<long, long>>, int> sq_index;
    for (int i = 0; i < nsq; ++i)
        sq_index[{tiling.squares[i].cell, {tiling.squares[i].x, tiling.squares[i].y}}] = i;

    double isx = 1.0 / rsx.to_double(), isy = 1.0 / rsy.to_double();
    auto locate = [&](int cell, double x, double y, Vec2 dir) -> int {
        // (x, y) is a point on the entered square's edge; step inside.
        double cx = x + 0.45 * dir.x, cy = y + 0.45 * dir.y;
        long qx = static_cast<long>(std::floor(cx)), qy = static_cast<long>(std::floor(cy));
        auto it = sq_index.find({cell, {qx, qy}});
        return it == sq_index.end() ? -1 : it->second;
    };
    auto hop = [&](int i, Vec2 dir, std::vector<int>& perm, std::vector<long>& shifts) {
        const auto& sq = tiling.squares[i];
        double mx = sq.x + 0.5 + 0.5 * dir.x, my = sq.y + 0.5 + 0.5 * dir.y;  // edge midpoint
        int same = locate(sq.cell, mx, my, dir);
        if (same >= 0) {
            perm[i] = same;
            return;
        }
        // The midpoint lies on a cell edge; find it and transport.
        const Cell& cell = s.cell(sq.cell);
        Vec2 p{mx * isx, my * isy};
        for (int e = 0; e < cell.n(); ++e) {
            if (point_segment_dist(p, cell.vstart(e).d(), cell.vend(e).d()) > 1e-9 * isx) continue;
            auto t = s.transport(sq.cell, e);
            if (!t) return;  // boundary: stays -1
            Vec2 q = t->map.apply(p);
            int j = locate(t->to.cell, q.x * rsx.to_double(), q.y * rsy.to_double(), dir);
            if (j >= 0) {
                perm[i] = j;
                shifts[i] = t->shift;
            }
            return;
        }
    };
    for (int i = 0; i < nsq; ++i) {
        hop(i, {1, 0}, tiling.right, tiling.right_shift);
        hop(i, {0, 1}, tiling.up, tiling.up_shift);
    }
    for (int i = 0; i < nsq; ++i) {
        if (tiling.right[i] < 0 && s.boundary_edges().empty())
            throw std::logic_error("tiling: missing right neighbor on a closed surface");
        if (tiling.up[i] < 0 && s.boundary_edges().empty())
            throw std::logic_error("tiling: missing up neighbor on a closed surface");
    }
    return tiling;
}

// --- origami --------------------------------------------------------------

Surface origami_from_squares(const std::vector<std::pair<long, long>>& squares) {
    if (squares.empty()) throw NotLatticeDrawn("origami: empty square set");
    std::set<std::pair<long, long>> sqset(squares.begin(), squares.end());
    Surface s;
    std::map<std::pair<long, long>, int> idx;
    for (const auto& [x, y] : sqset) {
        Cell c;
        c.name = "sq_" + std::to_string(x) + "_" + std::to_string(y);
        c.verts = {Pt::exact(Rat(x), Rat(y)), Pt::exact(Rat(x + 1), Rat(y)),
                   Pt::exact(Rat(x + 1), Rat(y + 1)), Pt::exact(Rat(x), Rat(y + 1))};
        idx[{x, y}] = s.add_cell(std::move(c));
    }
    const long NONE = LLONG_MIN;
    auto run_start = [&](long x, long y, long dx, long dy) {
        while (sqset.count({x - dx, y - dy})) {
            x -= dx;
            y -= dy;
        }
        return std::pair<long, long>{x, y};
    };
    for (const auto& [x, y] : sqset) {
        // interior right neighbor: coincident edges, identity map
        if (sqset.count({x + 1, y})) {
            Gluing g;
            g.a = {idx[{x, y}], 1};
            g.b = {idx[{x + 1, y}], 3};
            g.map = Isometry::identity();
            s.add_gluing(std::move(g));
        } else {
            // row wraparound: right side of the row onto its left side
            auto [x0, y0] = run_start(x, y, 1, 0);
            Gluing g;
            g.a = {idx[{x, y}], 1};
            g.b = {idx[{x0, y0}], 3};
            g.map = Isometry::translation(Coord(Rat(x0 - x - 1)), Coord(Rat(0)));
            s.add_gluing(std::move(g));
        }
        if (sqset.count({x, y + 1})) {
            Gluing g;
            g.a = {idx[{x, y}], 2};
            g.b = {idx[{x, y + 1}], 0};
            g.map = Isometry::identity();
            s.add_gluing(std::move(g));
        } else {
            // column wraparound: top of the column onto its bottom
            auto [x0, y0] = run_start(x, y, 0, 1);
            Gluing g;
            g.a = {idx[{x, y}], 2};
            g.b = {idx[{x0, y0}], 0};
            g.map = Isometry::translation(Coord(Rat(0)), Coord(Rat(y0 - y - 1)));
            s.add_gluing(std::move(g));
        }
    }
    (void)NONE;
    s.validate();
    return s;
}

Surface origami_from_polygon(const Cell& poly) {
    for (const Pt& p : poly.verts)
        if (!p.is_exact() || !p.x.q->is_integer() || !p.y.q->is_integer())
            throw NotLatticeDrawn("origami: polygon vertices must be integer lattice points");
    for (int e = 0; e < poly.n(); ++e) {
        Angle d = poly.edge_dir(e);
        if (!d.exact()) throw NotLatticeDrawn("origami: polygon edges must be axis-parallel");
        Rat f = d.pi_frac().mod(Rat(1));
        if (!(f == Rat(0) || f == Rat(1, 2)))
            throw NotLatticeDrawn("origami: polygon edges must be axis-parallel");
    }
    long long xmin = LLONG_MAX, xmax = LLONG_MIN, ymin = LLONG_MAX, ymax = LLONG_MIN;
    for (const Pt& p : poly.verts) {
        xmin = std::min(xmin, p.x.q->num);
        xmax = std::max(xmax, p.x.q->num);
        ymin = std::min(ymin, p.y.q->num);
        ymax = std::max(ymax, p.y.q->num);
    }
    std::vector<std::pair<long, long>> squares;
    for (long long x = xmin; x < xmax; ++x)
        for (long long y = ymin; y < ymax; ++y)
            if (poly.contains({x + 0.5, y + 0.5}, 0.0)) squares.push_back({x, y});
    if (squares.empty()) throw NotLatticeDrawn("origami: polygon contains no unit square");
    return origami_from_squares(squares);
}

std::vector<std::pair<long, long>> staircase_squares(int rows) {
    std::vector<std::pair<long, long>> sq;
    for (long n = 0; n < rows; ++n)
        for (long m = n - 1; m <= n + 1; ++m) sq.push_back({m, n});
    return sq;
}

Surface origami_staircase_quotient() {
    Surface s;
    std::map<long, int> idx;
    for (long c = -1; c <= 1; ++c) {
        Cell cell;
        cell.name = "sq_" + std::to_string(c);
        cell.verts = {Pt::exact(Rat(c), Rat(0)), Pt::exact(Rat(c + 1), Rat(0)),
                      Pt::exact(Rat(c + 1), Rat(1)), Pt::exact(Rat(c), Rat(1))};
        idx[c] = s.add_cell(std::move(cell));
    }
    // Horizontal: rows of three squares, wrapping -1 -> 0 -> 1 -> -1.
    for (long c = -1; c <= 0; ++c)
        s.add_gluing({{idx[c], 1}, {idx[c + 1], 3}, Isometry::identity(), 0});
    s.add_gluing(
        {{idx[1], 1}, {idx[-1], 3}, Isometry::translation(Coord(Rat(-3)), Coord(Rat(0))), 0});
    // Vertical: moving up decreases the diagonal class and advances one
    // period (+1); the column wraparound from class -1 back to +1 undoes
    // two periods.
    for (long c = 0; c <= 1; ++c)
        s.add_gluing({{idx[c], 2},
                      {idx[c - 1], 0},
                      Isometry::translation(Coord(Rat(-1)), Coord(Rat(-1))),
                      +1});
    s.add_gluing(
        {{idx[-1], 2}, {idx[1], 0}, Isometry::translation(Coord(Rat(2)), Coord(Rat(-1))), -2});
    s.validate();
    return s;
}

// --- direction classification ---------------------------------------------

namespace {

DirectionVerdict scale_slope(DirectionVerdict v, const SquareTiling* tiling) {
    if (tiling && v.cls == DirectionClass::Rational && v.slope)
        v.slope = *v.slope * (tiling->scale_y / tiling->scale_x);
    return v;
}

}  // namespace

DirectionVerdict classify_direction(const Angle& theta, const SquareTiling* tiling) {
    if (!theta.exact()) {
        // A float cannot certify rationality of its tangent.
        return {DirectionClass::Irrational, std::nullopt, false, true};
    }
    Rat f = theta.pi_frac().mod(Rat(1));
    if (f == Rat(0)) return scale_slope({DirectionClass::Rational, Rat(0), false, false}, tiling);
    if (f == Rat(1, 2)) return {DirectionClass::Rational, std::nullopt, true, false};
    if (f == Rat(1, 4)) return scale_slope({DirectionClass::Rational, Rat(1), false, false}, tiling);
    if (f == Rat(3, 4))
        return scale_slope({DirectionClass::Rational, Rat(-1), false, false}, tiling);
    // Niven: tan of a rational multiple of pi is irrational otherwise.
    return {DirectionClass::Irrational, std::nullopt, false, false};
}

DirectionVerdict classify_slope(const Rat& slope, const SquareTiling* tiling) {
    return scale_slope({DirectionClass::Rational, slope, false, false}, tiling);
}

DirectionVerdict classify_vertical(const SquareTiling*) {
    return {DirectionClass::Rational, std::nullopt, true, false};
}

}  // namespace polysurf
