#include "polysurf/holonomy.hpp"

#include <deque>
#include <map>
#include <tuple>

namespace polysurf {

namespace {

using Key = std::tuple<long long, long long, bool>;

Key exact_key(const LinearPart& g) {
    Rat f = g.rot.pi_frac().mod(Rat(2));
    return {f.num, f.den, g.reflect};
}

}  // namespace

bool RotationalGroup::contains(const LinearPart& g, double tol) const {
    for (const auto& e : elements)
        if (e.same(g, tol)) return true;
    return false;
}

std::vector<LinearPart> holonomy_generators(const Surface& s) {
    int n = s.cell_count();
    // Developing linear parts along a BFS spanning tree of the gluing graph.
    std::vector<LinearPart> dev(n);
    std::vector<char> seen(n, 0);
    std::vector<char> tree_gluing(s.gluings().size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        for (int e = 0; e < s.cell(c).n(); ++e) {
            auto t = s.transport(c, e);
            if (!t) continue;
            if (!seen[t->to.cell]) {
                seen[t->to.cell] = 1;
                dev[t->to.cell] = dev[c].compose(t->map.lin.inverse());
                tree_gluing[t->gluing] = 1;
                queue.push_back(t->to.cell);
            }
        }
    }

    std::vector<LinearPart> gens;
    for (std::size_t gi = 0; gi < s.gluings().size(); ++gi) {
        if (tree_gluing[gi]) continue;
        const Gluing& g = s.gluings()[gi];
        LinearPart h = dev[g.a.cell].compose(g.map.lin.inverse()).compose(dev[g.b.cell].inverse());
        if (!h.is_identity()) gens.push_back(h);
    }
    for (const EdgeRef& r : s.boundary_edges()) {
        LinearPart refl = LinearPart::reflection_about_axis(s.cell(r.cell).edge_dir(r.edge));
        gens.push_back(dev[r.cell].compose(refl).compose(dev[r.cell].inverse()));
    }
    return gens;
}

RotationalGroup close_group(const std::vector<LinearPart>& gens, int cap) {
    RotationalGroup grp;
    grp.cap = cap;
    for (const auto& g : gens) {
        if (!g.exact()) {
            grp.status = RotationalGroup::Status::ExceedsCap;
            grp.reason = RotationalGroup::Reason::InexactAngles;
            return grp;
        }
    }
    // Exact pi-rational generators always close inside D_L where L is the
    // lcm of the angle denominators; widen the cap accordingly so a cap
    // hit can only mean an internal inconsistency.
    long long lcm = 1;
    for (const auto& g : gens) lcm = lcm_checked(lcm, g.rot.pi_frac().den);
    long long needed = 4 * lcm + 8;
    if (needed > cap) cap = static_cast<int>(std::min<long long>(needed, 1 << 24));

    std::map<Key, int> index;
    std::vector<LinearPart> elems;
    auto push = [&](const LinearPart& g) {
        auto [it, fresh] = index.insert({exact_key(g), static_cast<int>(elems.size())});
        if (fresh) elems.push_back(g);
        return fresh;
    };
    push(LinearPart::identity());
    std::vector<LinearPart> closed_gens;
    for (const auto& g : gens) {
        closed_gens.push_back(g);
        closed_gens.push_back(g.inverse());
        push(g);
        push(g.inverse());
    }
    std::size_t head = 0;
    while (head < elems.size()) {
        if (static_cast<int>(elems.size()) > cap)
            throw std::logic_error(
                "holonomy closure exceeded cap with exact angles (internal inconsistency)");
        LinearPart cur = elems[head++];
        for (const auto& g : closed_gens) push(cur.compose(g));
    }
    grp.status = RotationalGroup::Status::Finite;
    grp.reason = RotationalGroup::Reason::Closed;
    grp.elements = std::move(elems);
    return grp;
}

RotationalGroup rotational_holonomy(const Surface& s, int cap) {
    return close_group(holonomy_generators(s), cap);
}

int n_of_surface(const Surface& s) {
    RotationalGroup g = rotational_holonomy(s);
    if (!g.finite())
        throw IrrationalSurface("surface is not rational (holonomy closure failed)");
    if (auto n = g.dihedral_n()) return *n;
    return g.order();
}

}  // namespace polysurf
