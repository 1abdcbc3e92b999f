#include "polysurf/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "polysurf/unfold.hpp"

namespace polysurf {

namespace {

constexpr double kTol = 1e-9;

/// An oriented line: point + direction, with a normal form for side tests.
struct LineSpec {
    Pt p;
    Angle dir;
    Vec2 dvec, n;
    double c;

    static LineSpec through(const Pt& p, const Angle& dir) {
        LineSpec l;
        l.p = p;
        l.dir = dir;
        l.dvec = unit_vec(dir);
        l.n = l.dvec.rot90();
        l.c = l.n.dot(p.d());
        return l;
    }
    static LineSpec vertical(const Rat& x) {
        return through(Pt::exact(x, Rat(0)), Angle::pi(1, 2));
    }
    static LineSpec horizontal(const Rat& y) {
        return through(Pt::exact(Rat(0), y), Angle::pi(0, 1));
    }
    double side(Vec2 q) const { return n.dot(q) - c; }
    bool contains(Vec2 q, double tol = kTol) const { return std::abs(side(q)) <= tol; }
    double param(Vec2 q) const { return dvec.dot(q - p.d()); }
    bool is_vertical() const { return dir.exact() && dir.pi_frac().mod(Rat(1)) == Rat(1, 2); }
    bool is_horizontal() const { return dir.exact() && dir.pi_frac().mod(Rat(1)) == Rat(0); }
};

/// Crossing of edge e with the line, exact per coordinate when possible.
Pt edge_line_crossing(const Cell& cell, int e, const LineSpec& ln) {
    const Pt& a = cell.vstart(e);
    const Pt& b = cell.vend(e);
    // exact path for axis-aligned lines against exact endpoints
    if (a.is_exact() && b.is_exact() && ln.p.is_exact()) {
        if (ln.is_vertical() && !(*b.x.q - *a.x.q).is_zero()) {
            Rat t = (*ln.p.x.q - *a.x.q) / (*b.x.q - *a.x.q);
            return Pt::exact(*ln.p.x.q, *a.y.q + t * (*b.y.q - *a.y.q));
        }
        if (ln.is_horizontal() && !(*b.y.q - *a.y.q).is_zero()) {
            Rat t = (*ln.p.y.q - *a.y.q) / (*b.y.q - *a.y.q);
            return Pt::exact(*a.x.q + t * (*b.x.q - *a.x.q), *ln.p.y.q);
        }
    }
    Vec2 av = a.d(), bv = b.d();
    double denom = ln.n.dot(bv - av);
    double t = (ln.c - ln.n.dot(av)) / denom;
    Vec2 q = av + (bv - av) * t;
    Pt out(q.x, q.y);
    // keep shared exact coordinates of axis-parallel edges
    if (a.is_exact() && b.is_exact()) {
        if (*a.x.q == *b.x.q) out.x = Coord(*a.x.q);
        if (*a.y.q == *b.y.q) out.y = Coord(*a.y.q);
    }
    return out;
}

struct Slit {
    Vec2 a, b;
    bool covers(Vec2 p, Vec2 q, double tol = kTol) const {
        return point_segment_dist(p, a, b) <= tol && point_segment_dist(q, a, b) <= tol;
    }
    bool contains_point_strictly(Vec2 p, double tol = kTol) const {
        if (point_segment_dist(p, a, b) > tol) return false;
        return (p - a).norm() > tol && (p - b).norm() > tol;
    }
};

struct Seam {
    LineSpec src;
    Isometry map;
    long shift;
};

/// Builds a cell complex from convex base cells by cutting along lines,
/// removing obstacle interiors, marking barrier slits, and gluing
/// coincident edges and translated seams.
class Kit {
public:
    void add_base(Cell c) { cells_.push_back(std::move(c)); }

    void cut(const LineSpec& ln, const std::function<bool(Vec2)>& only = {}) {
        std::vector<Cell> out;
        for (Cell& cell : cells_) {
            if (only && !only(centroid(cell))) {
                out.push_back(std::move(cell));
                continue;
            }
            split_cell(cell, ln, out);
        }
        cells_ = std::move(out);
    }

    void slit(const Pt& a, const Pt& b, const Angle& dir) {
        LineSpec ln = LineSpec::through(a, dir);
        cut(ln);
        slits_.push_back({a.d(), b.d()});
    }

    void remove_inside(const std::function<bool(Vec2)>& pred) {
        std::vector<Cell> out;
        for (Cell& c : cells_)
            if (!pred(centroid(c))) out.push_back(std::move(c));
        cells_ = std::move(out);
    }

    void interface(const LineSpec& ln) { interfaces_.push_back(ln); }
    void seam(const LineSpec& src, const Isometry& map, long shift) {
        seams_.push_back({src, map, shift});
    }

    Surface finish() {
        split_at_slit_endpoints();
        for (const LineSpec& ln : interfaces_) reconcile_line(ln);
        for (const Seam& s : seams_) reconcile_seam(s);

        Surface surf;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (cells_[i].name.empty()) cells_[i].name = "c" + std::to_string(i);
            surf.add_cell(cells_[i]);
        }
        glue_coincident(surf);
        for (const Seam& s : seams_) glue_seam(surf, s);
        surf.validate();
        return surf;
    }

private:
    static Vec2 centroid(const Cell& c) {
        Vec2 s{0, 0};
        for (const Pt& p : c.verts) s = s + p.d();
        return s * (1.0 / c.n());
    }

    void split_cell(Cell& cell, const LineSpec& ln, std::vector<Cell>& out) {
        int n = cell.n();
        std::vector<double> side(n);
        bool pos = false, neg = false;
        for (int i = 0; i < n; ++i) {
            side[i] = ln.side(cell.verts[i].d());
            if (side[i] > kTol) pos = true;
            if (side[i] < -kTol) neg = true;
        }
        if (!pos || !neg) {
            out.push_back(std::move(cell));
            return;
        }
        struct Node {
            Pt p;
            int src_edge;  // edge of the original cell this point lies on
            bool on_line;
        };
        std::vector<Node> ring;
        for (int i = 0; i < n; ++i) {
            ring.push_back({cell.verts[i], i, std::abs(side[i]) <= kTol});
            double si = side[i], sj = side[(i + 1) % n];
            if ((si > kTol && sj < -kTol) || (si < -kTol && sj > kTol)) {
                Pt x = edge_line_crossing(cell, i, ln);
                ring.push_back({x, i, true});
            }
        }
        Cell loops[2];
        for (int which = 0; which < 2; ++which) {
            double sgn = which == 0 ? 1.0 : -1.0;
            std::vector<Node> keep;
            for (const Node& nd : ring) {
                double s = ln.side(nd.p.d());
                if (nd.on_line || sgn * s > -kTol) keep.push_back(nd);
            }
            Cell& c = loops[which];
            c.name = cell.name;
            c.block = cell.block;
            int m = static_cast<int>(keep.size());
            for (int i = 0; i < m; ++i) {
                const Node& cur = keep[i];
                const Node& nxt = keep[(i + 1) % m];
                c.verts.push_back(cur.p);
                if (cur.on_line && nxt.on_line) {
                    // chord edge along the cut line
                    double d = ln.dvec.dot(nxt.p.d() - cur.p.d());
                    c.dirs.push_back(d >= 0 ? ln.dir.norm2()
                                            : (ln.dir + Angle::pi(1, 1)).norm2());
                } else {
                    Angle ed = cell.edge_dir(cur.src_edge);
                    c.dirs.push_back(ed.exact() ? std::optional<Angle>(ed) : std::nullopt);
                }
            }
        }
        for (Cell& c : loops) {
            drop_duplicate_vertices(c);
            if (c.n() >= 3) out.push_back(std::move(c));
        }
    }

    static void drop_duplicate_vertices(Cell& c) {
        std::vector<Pt> verts;
        std::vector<std::optional<Angle>> dirs;
        int n = c.n();
        for (int i = 0; i < n; ++i) {
            const Pt& cur = c.verts[i];
            const Pt& nxt = c.verts[(i + 1) % n];
            if ((nxt.d() - cur.d()).norm() <= kTol) continue;
            verts.push_back(cur);
            dirs.push_back(c.dirs[i]);
        }
        c.verts = std::move(verts);
        c.dirs = std::move(dirs);
    }

    bool in_slit(Vec2 a, Vec2 b) const {
        for (const Slit& s : slits_)
            if (s.covers(a, b)) return true;
        return false;
    }

    void split_at_slit_endpoints() {
        for (const Slit& s : slits_)
            for (Vec2 end : {s.a, s.b}) split_all_edges_at(end);
    }

    void split_all_edges_at(Vec2 q) {
        for (Cell& c : cells_) {
            for (int e = 0; e < c.n(); ++e) {
                Vec2 a = c.vstart(e).d(), b = c.vend(e).d();
                if ((q - a).norm() <= kTol || (q - b).norm() <= kTol) continue;
                if (point_segment_dist(q, a, b) > kTol) continue;
                insert_vertex(c, e, snap_point(c, e, q));
                break;  // an edge can contain q at most once
            }
        }
    }

    /// Preserve exact coordinates shared along an axis-parallel edge.
    static Pt snap_point(const Cell& c, int e, Vec2 q) {
        Pt out(q.x, q.y);
        const Pt& a = c.vstart(e);
        const Pt& b = c.vend(e);
        if (a.x.is_exact() && b.x.is_exact() && *a.x.q == *b.x.q) out.x = Coord(*a.x.q);
        if (a.y.is_exact() && b.y.is_exact() && *a.y.q == *b.y.q) out.y = Coord(*a.y.q);
        return out;
    }

    static void insert_vertex(Cell& c, int e, const Pt& p) {
        c.verts.insert(c.verts.begin() + e + 1, p);
        c.dirs.insert(c.dirs.begin() + e + 1, c.dirs[e]);
    }

    std::vector<std::pair<int, int>> edges_on_line(const LineSpec& ln) {
        std::vector<std::pair<int, int>> out;
        for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
            const Cell& c = cells_[ci];
            for (int e = 0; e < c.n(); ++e)
                if (ln.contains(c.vstart(e).d()) && ln.contains(c.vend(e).d()))
                    out.push_back({static_cast<int>(ci), e});
        }
        return out;
    }

    /// Split every edge lying on the line at the union of all endpoint
    /// parameters from both sides, so gluings match full side to full side.
    void refine_on_line(const LineSpec& ln, const std::vector<double>& params,
                        const std::function<Pt(double)>& point_at) {
        for (Cell& c : cells_) {
            bool again = true;
            while (again) {
                again = false;
                for (int e = 0; e < c.n() && !again; ++e) {
                    if (!ln.contains(c.vstart(e).d()) || !ln.contains(c.vend(e).d())) continue;
                    double t0 = ln.param(c.vstart(e).d());
                    double t1 = ln.param(c.vend(e).d());
                    double lo = std::min(t0, t1), hi = std::max(t0, t1);
                    for (double t : params) {
                        if (t > lo + kTol && t < hi - kTol) {
                            insert_vertex(c, e, snap_point(c, e, point_at(t).d()));
                            again = true;
                            break;
                        }
                    }
                }
            }
        }
    }

    void reconcile_line(const LineSpec& ln) {
        std::vector<double> params;
        for (auto [ci, e] : edges_on_line(ln)) {
            params.push_back(ln.param(cells_[ci].vstart(e).d()));
            params.push_back(ln.param(cells_[ci].vend(e).d()));
        }
        auto point_at = [&](double t) {
            Vec2 q = ln.p.d() + ln.dvec * t;
            return Pt(q.x, q.y);
        };
        refine_on_line(ln, params, point_at);
    }

    void reconcile_seam(const Seam& s) {
        LineSpec dst = LineSpec::through(s.map.apply(s.src.p), s.src.dir);
        Isometry inv = s.map.inverse();
        std::vector<double> params;
        for (auto [ci, e] : edges_on_line(s.src)) {
            params.push_back(s.src.param(cells_[ci].vstart(e).d()));
            params.push_back(s.src.param(cells_[ci].vend(e).d()));
        }
        for (auto [ci, e] : edges_on_line(dst)) {
            params.push_back(s.src.param(inv.apply(cells_[ci].vstart(e).d())));
            params.push_back(s.src.param(inv.apply(cells_[ci].vend(e).d())));
        }
        auto src_at = [&](double t) {
            Vec2 q = s.src.p.d() + s.src.dvec * t;
            return Pt(q.x, q.y);
        };
        refine_on_line(s.src, params, src_at);
        std::vector<double> dparams;
        for (double t : params) {
            Vec2 q = s.map.apply(s.src.p.d() + s.src.dvec * t);
            dparams.push_back(dst.param(q));
        }
        auto dst_at = [&](double t) {
            Vec2 q = dst.p.d() + dst.dvec * t;
            return Pt(q.x, q.y);
        };
        refine_on_line(dst, dparams, dst_at);
    }

    void glue_coincident(Surface& surf) {
        struct ERec {
            int cell, edge;
            Vec2 a, b;
        };
        std::vector<ERec> open;
        std::set<std::pair<int, int>> used;
        for (int c = 0; c < surf.cell_count(); ++c)
            for (int e = 0; e < surf.cell(c).n(); ++e)
                open.push_back({c, e, surf.cell(c).vstart(e).d(), surf.cell(c).vend(e).d()});
        for (std::size_t i = 0; i < open.size(); ++i) {
            if (used.count({open[i].cell, open[i].edge})) continue;
            if (in_slit(open[i].a, open[i].b)) continue;
            for (std::size_t j = i + 1; j < open.size(); ++j) {
                if (used.count({open[j].cell, open[j].edge})) continue;
                if ((open[i].a - open[j].b).norm() > kTol) continue;
                if ((open[i].b - open[j].a).norm() > kTol) continue;
                Gluing g;
                g.a = {open[i].cell, open[i].edge};
                g.b = {open[j].cell, open[j].edge};
                g.map = Isometry::identity();
                surf.add_gluing(std::move(g));
                used.insert({open[i].cell, open[i].edge});
                used.insert({open[j].cell, open[j].edge});
                break;
            }
        }
    }

    void glue_seam(Surface& surf, const Seam& s) {
        LineSpec dst = LineSpec::through(s.map.apply(s.src.p), s.src.dir);
        struct ERec {
            int cell, edge;
            Vec2 a, b;
        };
        std::vector<ERec> srcs, dsts;
        for (int c = 0; c < surf.cell_count(); ++c)
            for (int e = 0; e < surf.cell(c).n(); ++e) {
                if (surf.gluing_at(c, e) >= 0) continue;
                Vec2 a = surf.cell(c).vstart(e).d(), b = surf.cell(c).vend(e).d();
                if (s.src.contains(a) && s.src.contains(b)) srcs.push_back({c, e, a, b});
                else if (dst.contains(a) && dst.contains(b)) dsts.push_back({c, e, a, b});
            }
        for (const ERec& se : srcs) {
            if (in_slit(se.a, se.b)) continue;
            Vec2 ia = s.map.apply(se.a), ib = s.map.apply(se.b);
            for (const ERec& de : dsts) {
                if (surf.gluing_at(de.cell, de.edge) >= 0) continue;
                if ((ia - de.b).norm() > kTol || (ib - de.a).norm() > kTol) continue;
                Gluing g;
                g.a = {se.cell, se.edge};
                g.b = {de.cell, de.edge};
                g.map = s.map;
                g.shift = s.shift;
                surf.add_gluing(std::move(g));
                break;
            }
        }
    }

    std::vector<Cell> cells_;
    std::vector<Slit> slits_;
    std::vector<LineSpec> interfaces_;
    std::vector<Seam> seams_;
};

Cell rect_cell(const std::string& name, Rat x0, Rat y0, Rat x1, Rat y1) {
    Cell c;
    c.name = name;
    c.verts = {Pt::exact(x0, y0), Pt::exact(x1, y0), Pt::exact(x1, y1), Pt::exact(x0, y1)};
    return c;
}

void require(bool ok, const std::string& msg,
             ParamError::Code code = ParamError::Code::OutOfRange) {
    if (!ok) throw ParamError(code, msg);
}

/// Convex containment for an obstacle given by its CCW corner list.
std::function<bool(Vec2)> inside_convex(const std::vector<Vec2>& poly) {
    return [poly](Vec2 q) {
        int n = static_cast<int>(poly.size());
        for (int i = 0; i < n; ++i) {
            Vec2 a = poly[i], b = poly[(i + 1) % n];
            if ((b - a).cross(q - a) < kTol) return false;
        }
        return true;
    };
}

/// Cuts for a convex obstacle: one line per side; removes the interior.
void cut_out_obstacle(Kit& kit, const std::vector<Pt>& corners,
                      const std::vector<Angle>& dirs) {
    int n = static_cast<int>(corners.size());
    for (int i = 0; i < n; ++i) kit.cut(LineSpec::through(corners[i], dirs[i]));
    std::vector<Vec2> poly;
    for (const Pt& p : corners) poly.push_back(p.d());
    kit.remove_inside(inside_convex(poly));
}

/// Standard cylinder seam: crossing the right side rightward accrues +shift.
void add_cylinder_seam(Kit& kit, const Rat& width, long shift) {
    kit.seam(LineSpec::vertical(width),
             Isometry::translation(Coord(-width), Coord(Rat(0))), shift);
}

}  // namespace

// --- FamilySpec parsing ----------------------------------------------------

Rat FamilySpec::rat(const std::string& key, const Rat& dflt) const {
    auto it = params.find(key);
    if (it == params.end()) return dflt;
    auto r = Rat::parse(it->second);
    require(r.has_value(), "parameter " + key + ": expected rational p/q, got '" + it->second + "'",
            ParamError::Code::BadValue);
    return *r;
}

Rat FamilySpec::rat_required(const std::string& key) const {
    require(params.count(key) > 0, "missing required parameter " + key,
            ParamError::Code::BadValue);
    return rat(key, Rat(0));
}

Angle FamilySpec::angle(const std::string& key, const Angle& dflt) const {
    auto it = params.find(key);
    if (it == params.end()) return dflt;
    const std::string& v = it->second;
    if (v.rfind("rad:", 0) == 0) {
        try {
            return Angle::rad(std::stod(v.substr(4)));
        } catch (const std::exception&) {
            throw ParamError(ParamError::Code::BadValue, "parameter " + key + ": bad radian value");
        }
    }
    auto r = Rat::parse(v);
    require(r.has_value(),
            "parameter " + key + ": expected p/q (units of pi) or rad:FLOAT, got '" + v + "'",
            ParamError::Code::BadValue);
    return Angle::pi(*r);
}

long FamilySpec::integer(const std::string& key, long dflt) const {
    auto it = params.find(key);
    if (it == params.end()) return dflt;
    auto r = Rat::parse(it->second);
    require(r.has_value() && r->is_integer(), "parameter " + key + ": expected integer",
            ParamError::Code::BadValue);
    return static_cast<long>(r->num);
}

// --- families ---------------------------------------------------------------

Surface make_torus(long vshift) {
    Cell sq = rect_cell("sq", Rat(0), Rat(0), Rat(1), Rat(1));
    Gluing lr{{0, 1}, {0, 3}, Isometry::translation(Coord(Rat(-1)), Coord(Rat(0))), 0};
    Gluing tb{{0, 2}, {0, 0}, Isometry::translation(Coord(Rat(0)), Coord(Rat(-1))), vshift};
    return build_surface({sq}, {lr, tb});
}

Surface make_torus_barrier(const Rat& l, const Angle& eta) {
    require(l > Rat(0), "torus_barrier: need l > 0");
    double lc = l.to_double() * eta.cos(), ls = l.to_double() * eta.sin();
    require(lc < 1.0 - 1e-12 && ls < 1.0 - 1e-12 && lc >= 0 && ls >= 0,
            "torus_barrier: barrier must fit in the unit square (l < 1/cos eta)");
    require(lc > 1e-12 || ls > 1e-12, "torus_barrier: endpoints coincide",
            ParamError::Code::BarrierCollision);

    Kit kit;
    kit.add_base(rect_cell("sq", Rat(0), Rat(0), Rat(1), Rat(1)));
    Pt a = Pt::exact(Rat(0), Rat(0));
    Pt b(lc, ls);
    if (eta.exact()) {
        Rat f = eta.pi_frac().mod(Rat(2));
        if (f == Rat(0)) b = Pt::exact(l, Rat(0));
        if (f == Rat(1, 2)) b = Pt::exact(Rat(0), l);
    }
    kit.slit(a, b, eta);
    kit.seam(LineSpec::vertical(Rat(1)), Isometry::translation(Coord(Rat(-1)), Coord(Rat(0))), 0);
    kit.seam(LineSpec::horizontal(Rat(1)), Isometry::translation(Coord(Rat(0)), Coord(Rat(-1))), 0);
    return kit.finish();
}

Surface make_band_rect_obstacles(const Rat& a, const Rat& b, const Rat& xi, const Rat& eta) {
    require(a > Rat(0) && b > Rat(0), "band_rect_obstacles: need a, b > 0");
    require(xi > Rat(0) && eta > Rat(0) && xi + a < Rat(1) && eta + b < Rat(1),
            "band_rect_obstacles: obstacle must lie strictly inside the unit cell");
    Kit kit;
    kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(1), Rat(1)));
    kit.cut(LineSpec::vertical(xi));
    kit.cut(LineSpec::vertical(xi + a));
    kit.cut(LineSpec::horizontal(eta));
    kit.cut(LineSpec::horizontal(eta + b));
    double x0 = xi.to_double(), x1 = (xi + a).to_double();
    double y0 = eta.to_double(), y1 = (eta + b).to_double();
    kit.remove_inside([=](Vec2 q) {
        return q.x > x0 + kTol && q.x < x1 - kTol && q.y > y0 + kTol && q.y < y1 - kTol;
    });
    add_cylinder_seam(kit, Rat(1), +1);
    return kit.finish();
}

Surface make_band_horizontal_barriers(const Rat& l, const Rat& height, const Rat& x0) {
    require(l > Rat(0) && l < Rat(1), "band_horizontal_barriers: need 0 < l < 1");
    require(height > Rat(0) && height < Rat(1), "band_horizontal_barriers: need 0 < height < 1");
    require(x0 >= Rat(0) && x0 + l <= Rat(1), "band_horizontal_barriers: barrier must fit in one period");
    Kit kit;
    kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(1), Rat(1)));
    kit.slit(Pt::exact(x0, height), Pt::exact(x0 + l, height), Angle::pi(0, 1));
    add_cylinder_seam(kit, Rat(1), +1);
    return kit.finish();
}

Surface make_band_barriers(const Rat& a, const Rat& b, const Rat& l, const Angle& theta) {
    require(l > Rat(0), "band_barriers: need l > 0");
    double ex = a.to_double() + l.to_double() * theta.cos();
    double ey = b.to_double() + l.to_double() * theta.sin();
    require(a >= Rat(0) && a <= Rat(1) && b >= Rat(0) && b <= Rat(1),
            "band_barriers: barrier start must lie in the unit cell");
    require(ex >= -1e-12 && ex <= 1 + 1e-12 && ey >= -1e-12 && ey <= 1 + 1e-12,
            "band_barriers: barrier end must lie in the unit cell");
    Kit kit;
    kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(1), Rat(1)));
    Pt p0 = Pt::exact(a, b);
    Pt p1(ex, ey);
    if (theta.exact()) {
        Rat f = theta.pi_frac().mod(Rat(2));
        if (f == Rat(0)) p1 = Pt::exact(a + l, b);
        if (f == Rat(1)) p1 = Pt::exact(a - l, b);
        if (f == Rat(1, 2)) p1 = Pt::exact(a, b + l);
        if (f == Rat(3, 2)) p1 = Pt::exact(a, b - l);
    }
    kit.slit(p0, p1, theta);
    add_cylinder_seam(kit, Rat(1), +1);
    return kit.finish();
}

Surface make_cylinder_two_barriers(const BarrierParams& r1, const BarrierParams& r2) {
    Kit kit;
    kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(1), Rat(1)));
    for (const BarrierParams& r : {r1, r2}) {
        require(r.l > Rat(0), "cylinder_two_barriers: need l > 0",
                ParamError::Code::BarrierCollision);
        double ex = r.a.to_double() + r.l.to_double() * r.theta.cos();
        double ey = r.b.to_double() + r.l.to_double() * r.theta.sin();
        require(ex >= -1e-12 && ex <= 1 + 1e-12 && ey >= -1e-12 && ey <= 1 + 1e-12,
                "cylinder_two_barriers: barrier must lie in the unit cell");
        Pt p0 = Pt::exact(r.a, r.b);
        Pt p1(ex, ey);
        if (r.theta.exact()) {
            Rat f = r.theta.pi_frac().mod(Rat(2));
            if (f == Rat(0)) p1 = Pt::exact(r.a + r.l, r.b);
            if (f == Rat(1)) p1 = Pt::exact(r.a - r.l, r.b);
            if (f == Rat(1, 2)) p1 = Pt::exact(r.a, r.b + r.l);
            if (f == Rat(3, 2)) p1 = Pt::exact(r.a, r.b - r.l);
        }
        kit.slit(p0, p1, r.theta);
    }
    add_cylinder_seam(kit, Rat(1), +1);
    kit.seam(LineSpec::horizontal(Rat(1)), Isometry::translation(Coord(Rat(0)), Coord(Rat(-1))), 0);
    return kit.finish();
}

namespace {

/// Rotated rectangle corners and edge directions about an exact center.
void rotated_rect(const Rat& a, const Rat& b, const Rat& cx, const Rat& cy, const Angle& theta,
                  std::vector<Pt>& corners, std::vector<Angle>& dirs) {
    LinearPart rot = LinearPart::rotation(theta);
    std::vector<Pt> local = {Pt::exact(-(a / Rat(2)), -(b / Rat(2))),
                             Pt::exact(a / Rat(2), -(b / Rat(2))),
                             Pt::exact(a / Rat(2), b / Rat(2)),
                             Pt::exact(-(a / Rat(2)), b / Rat(2))};
    corners.clear();
    dirs.clear();
    for (int i = 0; i < 4; ++i) {
        Pt r = rot.apply(local[i]);
        corners.push_back(Pt(r.x + Coord(cx), r.y + Coord(cy)));
        dirs.push_back((theta + Angle::pi(i, 2)).norm2());
    }
}

}  // namespace

Surface make_band_tilted_rect(const Rat& a, const Rat& b, const Angle& theta, const Rat& cx,
                              const Rat& cy) {
    double rad = 0.5 * std::hypot(a.to_double(), b.to_double());
    double margin = std::min({cx.to_double(), 1 - cx.to_double(), cy.to_double(),
                              1 - cy.to_double()});
    require(rad < margin - 1e-12,
            "band_tilted_rect: rotated rectangle must stay inside the cell for every angle");
    Kit kit;
    kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(1), Rat(1)));
    std::vector<Pt> corners;
    std::vector<Angle> dirs;
    rotated_rect(a, b, cx, cy, theta, corners, dirs);
    cut_out_obstacle(kit, corners, dirs);
    add_cylinder_seam(kit, Rat(1), +1);
    return kit.finish();
}

Surface make_band_rotated_obstacles(const Rat& a, const Rat& b, const Angle& alpha, const Rat& cx,
                                    const Rat& cy) {
    double rad = 0.5 * std::hypot(a.to_double(), b.to_double());
    double margin = std::min({cx.to_double(), 1 - cx.to_double(), cy.to_double(),
                              1 - cy.to_double()});
    require(rad < margin - 1e-12,
            "band_rotated_obstacles: rotated obstacle must stay inside its cell for every angle");

    if (alpha.exact()) {
        // Period T: smallest T with T*alpha = 0 mod 2*pi.
        Rat f = alpha.pi_frac().mod(Rat(2));
        long long T = f.is_zero() ? 1 : (2 * f.den) / std::gcd(f.num < 0 ? -f.num : f.num,
                                                               2 * f.den);
        require(T <= 12, "band_rotated_obstacles: period too large (max 12 cells)");
        Kit kit;
        kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(T), Rat(1)));
        for (long long k = 0; k < T; ++k) {
            std::vector<Pt> corners;
            std::vector<Angle> dirs;
            rotated_rect(a, b, cx + Rat(k), cy, alpha.times(k), corners, dirs);
            cut_out_obstacle(kit, corners, dirs);
        }
        add_cylinder_seam(kit, Rat(T), +1);
        return kit.finish();
    }

    // Quasi-periodic: lazily materialized tiles, no shift structure.
    double av = a.to_double(), bv = b.to_double();
    double cxv = cx.to_double(), cyv = cy.to_double(), al = alpha.radians();
    BlockProvider prov;
    prov.emit = [=](long k, Surface& s) {
        Kit kit;
        Cell base = rect_cell("tile" + std::to_string(k), Rat(k), Rat(0), Rat(k + 1), Rat(1));
        kit.add_base(base);
        LinearPart rot = LinearPart::rotation(Angle::rad(al * k));
        std::vector<Pt> corners;
        std::vector<Angle> dirs;
        for (int i = 0; i < 4; ++i) {
            double lx = (i == 1 || i == 2) ? av / 2 : -av / 2;
            double ly = (i >= 2) ? bv / 2 : -bv / 2;
            Vec2 r = rot.apply(Vec2{lx, ly});
            corners.push_back(Pt(r.x + cxv + k, r.y + cyv));
            dirs.push_back(Angle::rad(al * k + M_PI_2 * i));
        }
        cut_out_obstacle(kit, corners, dirs);
        Surface tile = kit.finish();
        // splice the tile's cells and gluings into s, reconciling the
        // shared vertical interfaces with already-present neighbours
        int base_idx = s.cell_count();
        for (int c = 0; c < tile.cell_count(); ++c) {
            Cell cc = tile.cell(c);
            cc.name = "t" + std::to_string(k) + "_" + std::to_string(c);
            cc.block = k;
            s.add_cell(std::move(cc));
        }
        for (Gluing g : tile.gluings()) {
            g.a.cell += base_idx;
            g.b.cell += base_idx;
            s.add_gluing(std::move(g));
        }
        for (long nb : {k - 1, k + 1}) {
            double x = nb < k ? k : k + 1;
            // collect unglued edges on the interface from both blocks
            s.invalidate_derived();
            std::vector<EdgeRef> left, right;
            for (int c = 0; c < s.cell_count(); ++c) {
                long blk = s.cell(c).block;
                if (blk != k && blk != nb) continue;
                for (int e = 0; e < s.cell(c).n(); ++e) {
                    if (s.gluing_at(c, e) >= 0) continue;
                    Vec2 va = s.cell(c).vstart(e).d(), vb = s.cell(c).vend(e).d();
                    if (std::abs(va.x - x) > kTol || std::abs(vb.x - x) > kTol) continue;
                    (va.y > vb.y ? right : left).push_back({c, e});
                }
            }
            if (left.empty() || right.empty()) continue;
            // refine both sides by the union of the partition points
            std::vector<double> ys;
            for (const auto& r : left) {
                ys.push_back(s.cell(r.cell).vstart(r.edge).d().y);
                ys.push_back(s.cell(r.cell).vend(r.edge).d().y);
            }
            for (const auto& r : right) {
                ys.push_back(s.cell(r.cell).vstart(r.edge).d().y);
                ys.push_back(s.cell(r.cell).vend(r.edge).d().y);
            }
            auto refine = [&](std::vector<EdgeRef>& refs) {
                for (auto& r : refs) {
                    bool again = true;
                    while (again) {
                        again = false;
                        double y0 = s.cell(r.cell).vstart(r.edge).d().y;
                        double y1 = s.cell(r.cell).vend(r.edge).d().y;
                        for (double y : ys) {
                            if (y > std::min(y0, y1) + kTol && y < std::max(y0, y1) - kTol) {
                                s.split_edge(r.cell, r.edge, Pt(x, y));
                                again = true;
                                break;
                            }
                        }
                    }
                }
                // re-collect: splits may have shifted indices
                std::vector<EdgeRef> fresh;
                s.invalidate_derived();
                for (int c = 0; c < s.cell_count(); ++c) {
                    long blk = s.cell(c).block;
                    if (blk != k && blk != nb) continue;
                    for (int e = 0; e < s.cell(c).n(); ++e) {
                        if (s.gluing_at(c, e) >= 0) continue;
                        Vec2 va = s.cell(c).vstart(e).d(), vb = s.cell(c).vend(e).d();
                        if (std::abs(va.x - x) > kTol || std::abs(vb.x - x) > kTol) continue;
                        bool down = va.y > vb.y;
                        if ((&refs == &right) == down) fresh.push_back({c, e});
                    }
                }
                refs = fresh;
            };
            refine(left);
            refine(right);
            for (const auto& le : left)
                for (const auto& re : right) {
                    Vec2 la = s.cell(le.cell).vstart(le.edge).d();
                    Vec2 lb = s.cell(le.cell).vend(le.edge).d();
                    Vec2 ra = s.cell(re.cell).vstart(re.edge).d();
                    Vec2 rb = s.cell(re.cell).vend(re.edge).d();
                    if ((la - rb).norm() <= kTol && (lb - ra).norm() <= kTol) {
                        Gluing g;
                        g.a = le;
                        g.b = re;
                        g.map = Isometry::identity();
                        s.add_gluing(std::move(g));
                        break;
                    }
                }
            s.invalidate_derived();
        }
    };
    Surface s;
    prov.emit(0, s);
    s.set_provider(std::move(prov), 1);  // block 0 already present
    return s;
}

Surface make_stairway(std::vector<Rat> heights, bool repeat_last) {
    require(!heights.empty(), "stairway: need at least one height");
    for (const Rat& h : heights) require(h > Rat(0), "stairway: heights must be positive");
    auto height_of = [heights, repeat_last](long k) -> Rat {
        if (k < static_cast<long>(heights.size())) return heights[k];
        require(repeat_last, "stairway: height sequence exhausted");
        return heights.back();
    };
    BlockProvider prov;
    prov.min_block = 0;
    prov.max_block = 1 << 20;
    prov.emit = [height_of](long k, Surface& s) {
        Rat h = height_of(k);
        Cell step = rect_cell("step" + std::to_string(k), Rat(k), Rat(0), Rat(k + 1), h);
        step.block = k;
        int idx = s.add_cell(std::move(step));
        if (k == 0) return;
        int prev = s.find_cell("step" + std::to_string(k - 1));
        Rat hp = height_of(k - 1);
        // share the vertical segment x = k up to min(h, hp)
        if (hp == h) {
            s.add_gluing({{prev, 1}, {idx, 3}, Isometry::identity(), 0});
        } else if (hp > h) {
            s.split_edge(prev, 1, Pt::exact(Rat(k), h));
            s.add_gluing({{prev, 1}, {idx, 3}, Isometry::identity(), 0});
        } else {
            s.split_edge(idx, 3, Pt::exact(Rat(k), hp));
            s.add_gluing({{prev, 1}, {idx, 4}, Isometry::identity(), 0});
        }
        s.invalidate_derived();
    };
    Surface s;
    prov.emit(0, s);
    Surface out;
    out = s;
    out.set_provider(std::move(prov), 1);
    return out;
}

Surface make_stairway_geometric(const Rat& h0, const Rat& ratio, long max_block) {
    require(h0 > Rat(0) && ratio > Rat(0), "stairway: need positive h0 and ratio");
    std::vector<Rat> heights;
    Rat h = h0;
    for (long k = 0; k <= max_block; ++k) {
        heights.push_back(h);
        if (k < max_block) {
            try {
                h = h * ratio;
            } catch (const std::overflow_error&) {
                break;
            }
        }
    }
    Surface s = make_stairway(heights, false);
    return s;
}

Surface make_windtree(const Rat& a, const Rat& b, const Rat& xi, const Rat& eta, long window) {
    require(a > Rat(0) && b > Rat(0), "windtree: need a, b > 0");
    require(xi > Rat(0) && eta > Rat(0) && xi + a < Rat(1) && eta + b < Rat(1),
            "windtree: obstacle must lie strictly inside its lattice cell");
    require(window >= 1 && window <= 12, "windtree: window must be in [1, 12]");
    Kit kit;
    kit.add_base(rect_cell("", Rat(0), Rat(0), Rat(window), Rat(window)));
    for (long m = 0; m < window; ++m) {
        kit.cut(LineSpec::vertical(xi + Rat(m)));
        kit.cut(LineSpec::vertical(xi + a + Rat(m)));
        kit.cut(LineSpec::horizontal(eta + Rat(m)));
        kit.cut(LineSpec::horizontal(eta + b + Rat(m)));
    }
    double x0 = xi.to_double(), x1 = (xi + a).to_double();
    double y0 = eta.to_double(), y1 = (eta + b).to_double();
    kit.remove_inside([=](Vec2 q) {
        double fx = q.x - std::floor(q.x), fy = q.y - std::floor(q.y);
        return fx > x0 + kTol && fx < x1 - kTol && fy > y0 + kTol && fy < y1 - kTol;
    });
    return kit.finish();
}

Surface make_plane_obstacles(const Rat& half_width, const std::vector<ConvexObstacle>& obstacles) {
    require(half_width > Rat(0), "plane_obstacles: need positive window");
    require(!obstacles.empty(), "plane_obstacles: need at least one obstacle");
    Kit kit;
    kit.add_base(rect_cell("", -half_width, -half_width, half_width, half_width));
    for (const ConvexObstacle& ob : obstacles) {
        require(ob.verts.size() >= 3, "plane_obstacles: obstacle needs >= 3 vertices");
        std::vector<Pt> corners = ob.verts;
        std::vector<Angle> dirs;
        for (std::size_t i = 0; i < corners.size(); ++i) {
            if (i < ob.dirs.size() && ob.dirs[i]) {
                dirs.push_back(*ob.dirs[i]);
            } else {
                Cell tmp;
                tmp.verts = corners;
                dirs.push_back(tmp.edge_dir(static_cast<int>(i)));
            }
        }
        cut_out_obstacle(kit, corners, dirs);
    }
    return kit.finish();
}

Surface make_tower(const Rat& a, const Rat& b, const Rat& xi, const Rat& eta) {
    Surface band = make_band_rect_obstacles(a, b, xi, eta);
    // keep the obstacle sides (the "windows") open; glue the band walls
    std::set<EdgeRef> keep_open;
    for (const EdgeRef& r : band.boundary_edges()) {
        double y0 = band.cell(r.cell).vstart(r.edge).d().y;
        double y1 = band.cell(r.cell).vend(r.edge).d().y;
        bool on_wall = (std::abs(y0) < kTol && std::abs(y1) < kTol) ||
                       (std::abs(y0 - 1) < kTol && std::abs(y1 - 1) < kTol);
        if (!on_wall) keep_open.insert(r);
    }
    return double_surface(band, keep_open);
}

Cell convex_polygon_with_angles(const std::vector<Angle>& interior, const std::string& name) {
    int n = static_cast<int>(interior.size());
    require(n >= 3, "polygon: need at least 3 angles");
    Rat sum(0);
    for (const Angle& a : interior) {
        require(a.exact(), "polygon: interior angles must be exact", ParamError::Code::BadValue);
        require(a.pi_frac() > Rat(0) && a.pi_frac() < Rat(1),
                "polygon: interior angles must be in (0, pi) for a convex polygon");
        sum = sum + a.pi_frac();
    }
    require(sum == Rat(n - 2), "polygon: interior angles must sum to (n-2)*pi");

    std::vector<Angle> dirs(n);
    dirs[0] = Angle::pi(0, 1);
    for (int i = 1; i < n; ++i)
        dirs[i] = (dirs[i - 1] + Angle::pi(1, 1) - interior[i]).norm2();
    // close up: lengths 1 for edges 0..n-3; solve the last two
    Vec2 acc{0, 0};
    for (int i = 0; i + 2 < n; ++i) acc = acc + unit_vec(dirs[i]);
    Vec2 u = unit_vec(dirs[n - 2]), v = unit_vec(dirs[n - 1]);
    double det = u.cross(v);
    require(std::abs(det) > 1e-12, "polygon: degenerate closing directions");
    // solve s*u + t*v = -acc
    double s = (-acc).cross(v) / det;
    double t = u.cross(-acc) / det;
    require(s > 1e-9 && t > 1e-9, "polygon: angles do not close with positive lengths");

    Cell c;
    c.name = name;
    Vec2 cur{0, 0};
    for (int i = 0; i < n; ++i) {
        c.verts.push_back(Pt(cur.x, cur.y));
        double len = i < n - 2 ? 1.0 : (i == n - 2 ? s : t);
        cur = cur + unit_vec(dirs[i]) * len;
        c.dirs.push_back(dirs[i]);
    }
    c.verts[0] = Pt::exact(Rat(0), Rat(0));
    return c;
}

// --- dispatch ---------------------------------------------------------------

std::vector<std::string> catalog_families() {
    return {"torus",
            "torus_barrier",
            "band_rect_obstacles",
            "band_rotated_obstacles",
            "band_horizontal_barriers",
            "band_barriers",
            "cylinder_two_barriers",
            "band_tilted_rect",
            "stairway",
            "origami_staircase",
            "windtree",
            "plane_obstacles",
            "tower"};
}

Surface make_family(const FamilySpec& spec) {
    const std::string& f = spec.family;
    if (f == "torus") return make_torus(spec.integer("vshift", 1));
    if (f == "torus_barrier")
        return make_torus_barrier(spec.rat("l", Rat(1, 2)), spec.angle("eta", Angle::pi(0, 1)));
    if (f == "band_rect_obstacles")
        return make_band_rect_obstacles(spec.rat("a", Rat(1, 2)), spec.rat("b", Rat(1, 4)),
                                        spec.rat("xi", Rat(1, 4)), spec.rat("eta", Rat(1, 4)));
    if (f == "band_rotated_obstacles")
        return make_band_rotated_obstacles(spec.rat("a", Rat(1, 4)), spec.rat("b", Rat(1, 6)),
                                           spec.angle("alpha", Angle::pi(1, 2)),
                                           spec.rat("cx", Rat(1, 2)), spec.rat("cy", Rat(1, 2)));
    if (f == "band_horizontal_barriers") {
        Rat l = spec.rat("l", Rat(1, 2));
        Rat x0 = spec.rat("x0", (Rat(1) - l) / Rat(2));
        return make_band_horizontal_barriers(l, spec.rat("height", Rat(1, 2)), x0);
    }
    if (f == "band_barriers")
        return make_band_barriers(spec.rat("a", Rat(2, 5)), spec.rat("b", Rat(1, 5)),
                                  spec.rat("l", Rat(1, 2)),
                                  spec.angle("theta", Angle::pi(1, 2)));
    if (f == "cylinder_two_barriers") {
        BarrierParams r1{spec.rat("a1", Rat(1, 4)), spec.rat("b1", Rat(1, 4)),
                         spec.rat("l1", Rat(1, 3)), spec.angle("theta1", Angle::pi(1, 2))};
        BarrierParams r2{spec.rat("a2", Rat(3, 4)), spec.rat("b2", Rat(1, 4)),
                         spec.rat("l2", Rat(1, 3)), spec.angle("theta2", Angle::pi(1, 6))};
        return make_cylinder_two_barriers(r1, r2);
    }
    if (f == "band_tilted_rect")
        return make_band_tilted_rect(spec.rat("a", Rat(1, 4)), spec.rat("b", Rat(1, 6)),
                                     spec.angle("theta", Angle::pi(1, 4)),
                                     spec.rat("cx", Rat(1, 2)), spec.rat("cy", Rat(1, 2)));
    if (f == "stairway") {
        if (spec.has("ratio"))
            return make_stairway_geometric(spec.rat("h0", Rat(1)), spec.rat("ratio", Rat(1, 2)),
                                           spec.integer("max_steps", 48));
        if (spec.has("updown")) {
            Rat h0 = spec.rat("h0", Rat(1));
            Rat h1 = spec.rat("h1", Rat(2));
            Surface s = make_stairway({h0, h1, h0, h1}, true);
            return s;
        }
        return make_stairway({spec.rat("h0", Rat(1))}, true);
    }
    if (f == "origami_staircase") {
        if (spec.has("rows"))
            return origami_from_squares(
                staircase_squares(static_cast<int>(spec.integer("rows", 10))));
        return origami_staircase_quotient();
    }
    if (f == "windtree")
        return make_windtree(spec.rat("a", Rat(1, 4)), spec.rat("b", Rat(1, 4)),
                             spec.rat("xi", Rat(3, 8)), spec.rat("eta", Rat(3, 8)),
                             spec.integer("window", 3));
    if (f == "plane_obstacles") {
        // obstacle: one axis-aligned rectangle per spec, or a regular k-gon
        long k = spec.integer("ngon", 0);
        std::vector<ConvexObstacle> obs;
        if (k >= 3) {
            ConvexObstacle ob;
            double r = spec.rat("radius", Rat(1, 2)).to_double();
            for (long i = 0; i < k; ++i) {
                Angle t = Angle::pi(2 * i, k);
                ob.verts.push_back(Pt(r * t.cos(), r * t.sin()));
                ob.dirs.push_back((Angle::pi(2 * i + 1, k) + Angle::pi(1, 2)).norm2());
            }
            obs.push_back(std::move(ob));
        } else {
            ConvexObstacle ob;
            Rat a = spec.rat("a", Rat(1, 2)), b = spec.rat("b", Rat(1, 2));
            ob.verts = {Pt::exact(-(a / Rat(2)), -(b / Rat(2))),
                        Pt::exact(a / Rat(2), -(b / Rat(2))), Pt::exact(a / Rat(2), b / Rat(2)),
                        Pt::exact(-(a / Rat(2)), b / Rat(2))};
            obs.push_back(std::move(ob));
        }
        return make_plane_obstacles(spec.rat("window", Rat(3)), obs);
    }
    if (f == "tower")
        return make_tower(spec.rat("a", Rat(1, 2)), spec.rat("b", Rat(1, 4)),
                          spec.rat("xi", Rat(1, 4)), spec.rat("eta", Rat(1, 4)));
    throw ParamError(ParamError::Code::UnknownFamily, "unknown family: " + f);
}

Surface quotient_of(const Surface& s) {
    if (!s.has_shift_labels())
        throw BuildError(BuildCode::NotPeriodic, "quotient_of: surface carries no shift labels");
    Surface q = s;
    q.strip_shifts();
    q.invalidate_derived();
    return q;
}

}  // namespace polysurf
