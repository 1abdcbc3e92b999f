#include "polysurf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polysurf {

namespace {

bool seg_seg_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    auto orient = [&](Vec2 p, Vec2 q, Vec2 r) {
        double v = (q - p).cross(r - p);
        if (v > tol) return 1;
        if (v < -tol) return -1;
        return 0;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    auto on_seg = [&](Vec2 p, Vec2 q, Vec2 r) {
        return orient(p, q, r) == 0 && r.x >= std::min(p.x, q.x) - tol &&
               r.x <= std::max(p.x, q.x) + tol && r.y >= std::min(p.y, q.y) - tol &&
               r.y <= std::max(p.y, q.y) + tol;
    };
    if (o1 == 0 && on_seg(a, b, c)) return true;
    if (o2 == 0 && on_seg(a, b, d)) return true;
    if (o3 == 0 && on_seg(c, d, a)) return true;
    if (o4 == 0 && on_seg(c, d, b)) return true;
    return false;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

// --- Cell -------------------------------------------------------------

Angle Cell::edge_dir(int e) const {
    if (e < static_cast<int>(dirs.size()) && dirs[e]) return *dirs[e];
    const Pt& a = vstart(e);
    const Pt& b = vend(e);
    if (a.is_exact() && b.is_exact()) {
        Rat dx = *b.x.q - *a.x.q;
        Rat dy = *b.y.q - *a.y.q;
        if (dy.is_zero()) return Angle::pi(dx > Rat(0) ? 0 : 1, 1);
        if (dx.is_zero()) return Angle::pi(dy > Rat(0) ? 1 : 3, 2);
        if (dx == dy) return Angle::pi(dx > Rat(0) ? 1 : 5, 4);
        if (dx == -dy) return Angle::pi(dx > Rat(0) ? 7 : 3, 4);
    }
    Vec2 v = edge_vec(e);
    return Angle::rad(std::atan2(v.y, v.x));
}

Angle Cell::interior_angle(int i) const {
    int prev = (i + n() - 1) % n();
    Angle rev_in = edge_dir(prev) + Angle::pi(1, 1);
    return (rev_in - edge_dir(i)).norm2();
}

double Cell::area() const {
    double s = 0;
    for (int i = 0; i < n(); ++i) s += vstart(i).d().cross(vend(i).d());
    return 0.5 * s;
}

bool Cell::contains(Vec2 p, double tol) const {
    for (int i = 0; i < n(); ++i)
        if (point_segment_dist(p, vstart(i).d(), vend(i).d()) <= tol) return true;
    bool in = false;
    for (int i = 0; i < n(); ++i) {
        Vec2 a = vstart(i).d(), b = vend(i).d();
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xi) in = !in;
        }
    }
    return in;
}

bool Cell::has_exact_coords() const {
    for (const Pt& p : verts)
        if (!p.is_exact()) return false;
    return true;
}

// --- Surface basics ---------------------------------------------------

int Surface::find_cell(const std::string& name) const {
    auto it = name_index_.find(name);
    return it == name_index_.end() ? -1 : it->second;
}

int Surface::add_cell(Cell c) {
    if (c.dirs.size() != c.verts.size()) c.dirs.resize(c.verts.size());
    int idx = static_cast<int>(cells_.size());
    if (!c.name.empty()) {
        if (name_index_.count(c.name))
            throw BuildError(BuildCode::BadCell, "duplicate cell name: " + c.name);
        name_index_[c.name] = idx;
    }
    cells_.push_back(std::move(c));
    derived_ok_ = false;
    return idx;
}

void Surface::add_gluing(Gluing g) {
    gluings_.push_back(std::move(g));
    derived_ok_ = false;
}

void Surface::set_provider(BlockProvider p, long first_block) {
    provider_ = std::move(p);
    blk_lo_ = first_block;
    blk_hi_ = first_block;
}

void Surface::split_edge(int cell, int edge, const Pt& p) {
    Cell& c = cells_[cell];
    if (gluing_at(cell, edge) >= 0)
        throw std::logic_error("split_edge: edge is already glued");
    c.verts.insert(c.verts.begin() + edge + 1, p);
    c.dirs.insert(c.dirs.begin() + edge + 1, c.dirs[edge]);
    for (Gluing& g : gluings_) {
        if (g.a.cell == cell && g.a.edge > edge) g.a.edge++;
        if (g.b.cell == cell && g.b.edge > edge) g.b.edge++;
    }
    derived_ok_ = false;
}

void Surface::strip_shifts() {
    for (Gluing& g : gluings_) g.shift = 0;
}

bool Surface::has_shift_labels() const {
    for (const Gluing& g : gluings_)
        if (g.shift != 0) return true;
    return false;
}

// --- derived structures -----------------------------------------------

void Surface::ensure_derived() const {
    if (derived_ok_) return;
    std::lock_guard<std::mutex> lock(mu_);
    if (derived_ok_) return;

    glue_of_.assign(cells_.size(), {});
    for (std::size_t i = 0; i < cells_.size(); ++i)
        glue_of_[i].assign(cells_[i].n(), -1);
    for (std::size_t gi = 0; gi < gluings_.size(); ++gi) {
        const Gluing& g = gluings_[gi];
        glue_of_[g.a.cell][g.a.edge] = static_cast<int>(gi);
        glue_of_[g.b.cell][g.b.edge] = static_cast<int>(gi);
    }
    boundary_.clear();
    for (int c = 0; c < static_cast<int>(cells_.size()); ++c)
        for (int e = 0; e < cells_[c].n(); ++e)
            if (glue_of_[c][e] < 0) boundary_.push_back({c, e});

    // Vertex classes: corners identified across gluings by union-find.
    std::vector<int> offset(cells_.size() + 1, 0);
    for (std::size_t i = 0; i < cells_.size(); ++i)
        offset[i + 1] = offset[i] + cells_[i].n();
    UnionFind uf(offset.back());
    auto cid = [&](int cell, int v) { return offset[cell] + v % cells_[cell].n(); };
    for (const Gluing& g : gluings_) {
        int na = cells_[g.a.cell].n(), nb = cells_[g.b.cell].n();
        if (g.map.lin.reflect) {
            uf.unite(cid(g.a.cell, g.a.edge), cid(g.b.cell, g.b.edge));
            uf.unite(cid(g.a.cell, (g.a.edge + 1) % na), cid(g.b.cell, (g.b.edge + 1) % nb));
        } else {
            uf.unite(cid(g.a.cell, g.a.edge), cid(g.b.cell, (g.b.edge + 1) % nb));
            uf.unite(cid(g.a.cell, (g.a.edge + 1) % na), cid(g.b.cell, g.b.edge));
        }
    }

    vclasses_.clear();
    vclass_of_.assign(cells_.size(), {});
    std::map<int, int> root_to_class;
    for (int c = 0; c < static_cast<int>(cells_.size()); ++c) {
        vclass_of_[c].assign(cells_[c].n(), -1);
        for (int v = 0; v < cells_[c].n(); ++v) {
            int root = uf.find(cid(c, v));
            auto it = root_to_class.find(root);
            int k;
            if (it == root_to_class.end()) {
                k = static_cast<int>(vclasses_.size());
                root_to_class[root] = k;
                VertexClass vc;
                vc.total_angle = Angle::pi(0, 1);
                vclasses_.push_back(vc);
            } else {
                k = it->second;
            }
            vclass_of_[c][v] = k;
            VertexClass& vc = vclasses_[k];
            vc.corners.push_back({c, v});
            vc.total_angle = vc.total_angle + cells_[c].interior_angle(v);
            int prev = (v + cells_[c].n() - 1) % cells_[c].n();
            if (glue_of_[c][v] < 0 || glue_of_[c][prev] < 0) vc.on_boundary = true;
        }
    }
    for (VertexClass& vc : vclasses_) {
        const Angle& t = vc.total_angle;
        bool flat;
        if (vc.on_boundary)
            flat = t.exact() ? t.pi_frac() == Rat(1) : std::abs(t.radians() - M_PI) < 1e-9;
        else
            flat = t.exact() ? t.pi_frac() == Rat(2) : std::abs(t.radians() - 2 * M_PI) < 1e-9;
        vc.kind = vc.on_boundary
                      ? (flat ? VertexClass::Kind::RegularBoundary : VertexClass::Kind::WedgePoint)
                      : (flat ? VertexClass::Kind::RegularInterior : VertexClass::Kind::ConePoint);
    }
    derived_ok_ = true;
}

int Surface::gluing_at(int cell, int edge) const {
    ensure_derived();
    return glue_of_[cell][edge];
}

const std::vector<EdgeRef>& Surface::boundary_edges() const {
    ensure_derived();
    return boundary_;
}

const std::vector<VertexClass>& Surface::vertex_classes() const {
    ensure_derived();
    return vclasses_;
}

int Surface::vertex_class_of(int cell, int corner) const {
    ensure_derived();
    return vclass_of_[cell][corner % cells_[cell].n()];
}

std::optional<Surface::Transport> Surface::transport(int cell, int edge) const {
    int gi = gluing_at(cell, edge);
    if (gi < 0) return std::nullopt;
    const Gluing& g = gluings_[gi];
    Transport t;
    t.gluing = gi;
    if (g.a.cell == cell && g.a.edge == edge) {
        t.to = g.b;
        t.map = g.map;
        t.shift = g.shift;
        t.forward = true;
    } else {
        t.to = g.a;
        t.map = g.map.inverse();
        t.shift = -g.shift;
        t.forward = false;
    }
    return t;
}

bool Surface::ensure_block(long k) {
    if (!provider_) return false;
    std::lock_guard<std::mutex> lock(mu_);
    if (k >= blk_lo_ && k < blk_hi_) return false;
    if (provider_->min_block && k < *provider_->min_block) return false;
    if (provider_->max_block && k > *provider_->max_block) return false;
    bool grew = false;
    while (blk_hi_ <= k) {
        provider_->emit(blk_hi_, *this);
        ++blk_hi_;
        grew = true;
    }
    while (blk_lo_ > k) {
        --blk_lo_;
        provider_->emit(blk_lo_, *this);
        grew = true;
    }
    if (grew) derived_ok_ = false;
    return grew;
}

bool Surface::expand_around(int cell) {
    if (!provider_) return false;
    long b = cells_[cell].block;
    bool grew = ensure_block(b - 1);
    grew = ensure_block(b + 1) || grew;
    return grew;
}

int Surface::euler_edges() const {
    ensure_derived();
    return static_cast<int>(gluings_.size() + boundary_.size());
}

int Surface::euler_characteristic() const {
    return euler_vertices() - euler_edges() + cell_count();
}

// --- validation ---------------------------------------------------------

void Surface::check_cells() const {
    for (const Cell& c : cells_) {
        if (c.n() < 3) throw BuildError(BuildCode::BadCell, "cell " + c.name + ": fewer than 3 vertices");
        for (int i = 0; i < c.n(); ++i)
            if (c.edge_len(i) < kGeomEps)
                throw BuildError(BuildCode::BadCell, "cell " + c.name + ": zero-length edge");
        if (c.area() < kGeomEps)
            throw BuildError(BuildCode::BadCell,
                             "cell " + c.name + ": not counterclockwise or degenerate");
        for (int i = 0; i < c.n(); ++i) {
            double ang = c.interior_angle(i).radians();
            if (ang < 1e-12 || ang > 2 * M_PI - 1e-12)
                throw BuildError(BuildCode::BadCell, "cell " + c.name + ": degenerate corner");
        }
        for (int i = 0; i < c.n(); ++i)
            for (int j = i + 1; j < c.n(); ++j) {
                if (j == i + 1 || (i == 0 && j == c.n() - 1)) continue;
                if (seg_seg_intersect(c.vstart(i).d(), c.vend(i).d(), c.vstart(j).d(),
                                      c.vend(j).d(), 1e-12))
                    throw BuildError(BuildCode::BadCell, "cell " + c.name + ": self-intersection");
            }
    }
}

void Surface::check_gluing(const Gluing& g) const {
    auto check_ref = [&](const EdgeRef& r) {
        if (r.cell < 0 || r.cell >= cell_count())
            throw BuildError(BuildCode::UnknownCell, "gluing references unknown cell");
        if (r.edge < 0 || r.edge >= cells_[r.cell].n())
            throw BuildError(BuildCode::UnknownCell, "gluing references unknown edge");
    };
    check_ref(g.a);
    check_ref(g.b);
    const Cell& ca = cells_[g.a.cell];
    const Cell& cb = cells_[g.b.cell];
    double la = ca.edge_len(g.a.edge), lb = cb.edge_len(g.b.edge);
    if (std::abs(la - lb) > kGeomEps * std::max(1.0, std::max(la, lb)))
        throw BuildError(BuildCode::LengthMismatch,
                         "glued edges of unequal length: " + std::to_string(la) + " vs " +
                             std::to_string(lb));
    Pt ia = g.map.apply(ca.vstart(g.a.edge));
    Pt ib = g.map.apply(ca.vend(g.a.edge));
    double tol = kGeomEps * (1.0 + la);
    const Pt& bs = cb.vstart(g.b.edge);
    const Pt& be = cb.vend(g.b.edge);
    bool fwd = ia.num_eq(bs, tol) && ib.num_eq(be, tol);   // start -> start
    bool rev = ia.num_eq(be, tol) && ib.num_eq(bs, tol);   // start -> end
    if (!fwd && !rev)
        throw BuildError(BuildCode::BadOrientation,
                         "gluing map does not carry side_a onto side_b");
    // Rotations must reverse the induced edge orientation; reflections
    // must preserve it. Either way the two interiors end up on opposite
    // sides of the identified edge.
    bool ok = g.map.lin.reflect ? fwd : rev;
    if (!ok)
        throw BuildError(BuildCode::BadOrientation,
                         "gluing map does not flip sides (interiors overlap)");
}

void Surface::check_connected() const {
    if (cells_.empty()) throw BuildError(BuildCode::BadCell, "no cells");
    std::vector<char> seen(cells_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        for (int e = 0; e < cells_[c].n(); ++e) {
            int gi = glue_of_[c][e];
            if (gi < 0) continue;
            const Gluing& g = gluings_[gi];
            int other = g.a.cell == c && g.a.edge == e ? g.b.cell : g.a.cell;
            if (!seen[other]) {
                seen[other] = 1;
                ++count;
                stack.push_back(other);
            }
        }
    }
    if (count != static_cast<int>(cells_.size()))
        throw BuildError(BuildCode::Disconnected, "gluing graph is disconnected");
}

void Surface::validate() {
    check_cells();
    std::set<std::pair<int, int>> used;
    for (const Gluing& g : gluings_) {
        check_gluing(g);
        for (const EdgeRef& r : {g.a, g.b})
            if (!used.insert({r.cell, r.edge}).second)
                throw BuildError(BuildCode::DuplicateGluing,
                                 "edge glued twice: cell " + cells_[r.cell].name + " edge " +
                                     std::to_string(r.edge));
    }
    derived_ok_ = false;
    ensure_derived();
    check_connected();
}

Surface build_surface(std::vector<Cell> cells, std::vector<Gluing> gluings) {
    Surface s;
    for (Cell& c : cells) s.add_cell(std::move(c));
    for (Gluing& g : gluings) s.add_gluing(std::move(g));
    s.validate();
    return s;
}

// --- doubling -----------------------------------------------------------

Surface double_surface(const Surface& s, const std::set<EdgeRef>& keep_open) {
    const auto& bdry = s.boundary_edges();
    if (bdry.empty())
        throw BuildError(BuildCode::EmptyGlueSet, "double_surface: surface has no boundary");
    for (const EdgeRef& r : keep_open)
        if (s.gluing_at(r.cell, r.edge) >= 0)
            throw BuildError(BuildCode::BadCell, "keep_open edge is not a boundary edge");
    bool any_glued = false;
    for (const EdgeRef& r : bdry)
        if (!keep_open.count(r)) any_glued = true;
    if (!any_glued)
        throw BuildError(BuildCode::EmptyGlueSet, "keep_open covers the whole boundary");

    const Isometry mirror = Isometry::of(LinearPart::reflection_about_axis(Angle::pi(0, 1)),
                                         Coord(Rat(0)), Coord(Rat(0)));
    Surface d;
    int ncells = s.cell_count();
    for (int c = 0; c < ncells; ++c) d.add_cell(s.cell(c));
    for (int c = 0; c < ncells; ++c) {
        const Cell& src = s.cell(c);
        Cell m;
        m.name = src.name + "_m";
        m.block = src.block;
        int n = src.n();
        for (int j = 0; j < n; ++j) m.verts.push_back(mirror.apply(src.verts[(n - j) % n]));
        m.dirs.resize(n);
        for (int j = 0; j < n; ++j) {
            Angle dir = src.edge_dir(n - 1 - j);
            if (dir.exact()) m.dirs[j] = (Angle::pi(1, 1) - dir).norm2();
        }
        d.add_cell(std::move(m));
    }
    auto mirror_edge = [&](int cell, int e) { return s.cell(cell).n() - 1 - e; };

    for (const Gluing& g : s.gluings()) {
        d.add_gluing(g);
        Gluing gm;
        gm.a = {g.a.cell + ncells, mirror_edge(g.a.cell, g.a.edge)};
        gm.b = {g.b.cell + ncells, mirror_edge(g.b.cell, g.b.edge)};
        gm.map = mirror.compose(g.map).compose(mirror);
        gm.shift = g.shift;
        d.add_gluing(std::move(gm));
    }
    for (const EdgeRef& r : bdry) {
        if (keep_open.count(r)) continue;
        const Cell& c = s.cell(r.cell);
        Isometry refl = Isometry::line_reflection(c.vstart(r.edge), c.edge_dir(r.edge));
        Gluing g;
        g.a = r;
        g.b = {r.cell + ncells, mirror_edge(r.cell, r.edge)};
        g.map = mirror.compose(refl);
        g.shift = 0;
        d.add_gluing(std::move(g));
    }
    d.validate();
    return d;
}

// --- conditions ---------------------------------------------------------

bool BBox::intersects_segment(Vec2 a, Vec2 b) const {
    auto inside = [&](Vec2 p) {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    };
    if (inside(a) || inside(b)) return true;
    Vec2 c0{xmin, ymin}, c1{xmax, ymin}, c2{xmax, ymax}, c3{xmin, ymax};
    return seg_seg_intersect(a, b, c0, c1, 0) || seg_seg_intersect(a, b, c1, c2, 0) ||
           seg_seg_intersect(a, b, c2, c3, 0) || seg_seg_intersect(a, b, c3, c0, 0);
}

ConditionsReport validate_conditions(Surface& s, const BBox& window, double b_threshold) {
    if (s.has_provider()) {
        // March blocks outward until they stop meeting the window.
        auto block_hits = [&](long first_new_cell) {
            for (int c = static_cast<int>(first_new_cell); c < s.cell_count(); ++c)
                for (int e = 0; e < s.cell(c).n(); ++e)
                    if (window.intersects_segment(s.cell(c).vstart(e).d(), s.cell(c).vend(e).d()))
                        return true;
            return false;
        };
        for (int misses = 0; misses < 2;) {
            long prev = s.cell_count();
            if (!s.ensure_block(s.materialized_blocks().second)) break;
            misses = block_hits(prev) ? 0 : misses + 1;
        }
        for (int misses = 0; misses < 2;) {
            long prev = s.cell_count();
            if (!s.ensure_block(s.materialized_blocks().first - 1)) break;
            misses = block_hits(prev) ? 0 : misses + 1;
        }
    }

    ConditionsReport rep;
    rep.b_threshold = b_threshold;
    rep.min_side_length = std::numeric_limits<double>::infinity();
    auto consider = [&](int cell, int edge) {
        const Cell& c = s.cell(cell);
        if (!window.intersects_segment(c.vstart(edge).d(), c.vend(edge).d())) return;
        rep.sides_in_window++;
        rep.min_side_length = std::min(rep.min_side_length, c.edge_len(edge));
    };
    for (const Gluing& g : s.gluings()) consider(g.a.cell, g.a.edge);
    for (const EdgeRef& r : s.boundary_edges()) consider(r.cell, r.edge);
    if (!std::isfinite(rep.min_side_length)) rep.min_side_length = 0;
    rep.b_flag = rep.min_side_length < b_threshold;

    rep.max_multiplicity = 1;
    if (!s.gluings().empty()) rep.max_multiplicity = 2;
    for (const VertexClass& vc : s.vertex_classes())
        rep.max_multiplicity =
            std::max(rep.max_multiplicity, static_cast<int>(vc.corners.size()));
    return rep;
}

std::vector<VertexClass> vertex_angles(const Surface& s) { return s.vertex_classes(); }

}  // namespace polysurf
