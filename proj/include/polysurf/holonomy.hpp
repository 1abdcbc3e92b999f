#pragma once

#include <stdexcept>
#include <vector>

#include "polysurf/surface.hpp"

namespace polysurf {

class IrrationalSurface : public std::runtime_error {
public:
    explicit IrrationalSurface(const std::string& m) : std::runtime_error(m) {}
};

/// Group of linear parts of the holonomy. Finite only when closure under
/// composition completed with exact pi-rational angles; inexact generator
/// angles make finiteness undecidable, reported as ExceedsCap.
struct RotationalGroup {
    enum class Status { Finite, ExceedsCap };
    enum class Reason { Closed, CapHit, InexactAngles };

    Status status = Status::Finite;
    Reason reason = Reason::Closed;
    std::vector<LinearPart> elements;  // closed set when Finite
    int cap = 0;

    bool finite() const { return status == Status::Finite; }
    int order() const { return static_cast<int>(elements.size()); }
    int reflections() const {
        int k = 0;
        for (const auto& e : elements) k += e.reflect ? 1 : 0;
        return k;
    }
    bool trivial() const { return finite() && order() == 1; }
    /// N with group = D_N, defined when the group contains a reflection.
    std::optional<int> dihedral_n() const {
        if (!finite() || reflections() == 0) return std::nullopt;
        return order() / 2;
    }
    bool contains(const LinearPart& g, double tol = 1e-12) const;
};

/// Rotational generators: linear parts of loop holonomies of the gluing
/// graph plus, for each boundary edge, the developed reflection about its
/// line.
std::vector<LinearPart> holonomy_generators(const Surface& s);

/// Closure of a generator set under composition, capped.
RotationalGroup close_group(const std::vector<LinearPart>& gens, int cap);

RotationalGroup rotational_holonomy(const Surface& s, int cap = 4096);

/// N(S) with Hol_r(S) = D_N. For the reflection-free case returns the
/// order of the (cyclic) rotation group. Throws IrrationalSurface.
int n_of_surface(const Surface& s);

}  // namespace polysurf
