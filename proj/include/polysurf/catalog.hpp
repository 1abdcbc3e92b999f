#pragma once

#include <map>
#include <string>
#include <vector>

#include "polysurf/surface.hpp"

namespace polysurf {

class ParamError : public std::runtime_error {
public:
    enum class Code { OutOfRange, BarrierCollision, UnknownFamily, BadValue };
    ParamError(Code c, const std::string& m) : std::runtime_error(m), code(c) {}
    Code code;
};

/// Family identifier plus name -> value parameter map. Rationals are
/// written "p/q"; angles are "p/q" in units of pi, or "rad:FLOAT".
struct FamilySpec {
    std::string family;
    std::map<std::string, std::string> params;

    Rat rat(const std::string& key, const Rat& dflt) const;
    Rat rat_required(const std::string& key) const;
    Angle angle(const std::string& key, const Angle& dflt) const;
    long integer(const std::string& key, long dflt) const;
    bool has(const std::string& key) const { return params.count(key) > 0; }
};

std::vector<std::string> catalog_families();

/// Construct a validated surface for any catalog family. Z-periodic
/// families return the compact quotient with shift-labeled period
/// gluings; the windtree/plane families return a finite window.
Surface make_family(const FamilySpec& spec);

/// Forget the shift labels: the compact quotient P of the Z-periodic
/// surface encoded by the labels. Throws when no labels are present.
Surface quotient_of(const Surface& s);

// Direct constructors behind make_family.
Surface make_torus(long vshift = 1);
Surface make_torus_barrier(const Rat& l, const Angle& eta);
Surface make_band_rect_obstacles(const Rat& a, const Rat& b, const Rat& xi, const Rat& eta);
Surface make_band_horizontal_barriers(const Rat& l, const Rat& height, const Rat& x0);
Surface make_band_barriers(const Rat& a, const Rat& b, const Rat& l, const Angle& theta);
struct BarrierParams {
    Rat a, b, l;
    Angle theta;
};
Surface make_cylinder_two_barriers(const BarrierParams& r1, const BarrierParams& r2);
Surface make_band_tilted_rect(const Rat& a, const Rat& b, const Angle& theta, const Rat& cx,
                              const Rat& cy);
Surface make_band_rotated_obstacles(const Rat& a, const Rat& b, const Angle& alpha, const Rat& cx,
                                    const Rat& cy);
Surface make_stairway(std::vector<Rat> heights, bool repeat_last = true);
Surface make_stairway_geometric(const Rat& h0, const Rat& ratio, long max_block = 48);
Surface make_windtree(const Rat& a, const Rat& b, const Rat& xi, const Rat& eta, long window);
struct ConvexObstacle {
    std::vector<Pt> verts;                     // counterclockwise
    std::vector<std::optional<Angle>> dirs;    // optional exact edge directions
};
Surface make_plane_obstacles(const Rat& half_width, const std::vector<ConvexObstacle>& obstacles);
Surface make_tower(const Rat& a, const Rat& b, const Rat& xi, const Rat& eta);

/// Closed convex polygon realizing the given exact interior angles; the
/// last two side lengths are solved so the polygon closes. Throws
/// ParamError when the angle data cannot close with positive lengths.
Cell convex_polygon_with_angles(const std::vector<Angle>& interior, const std::string& name);

}  // namespace polysurf
