#pragma once

#include <variant>
#include <vector>

#include "polysurf/holonomy.hpp"

namespace polysurf {

class NontrivialHolonomy : public std::runtime_error {
public:
    explicit NontrivialHolonomy(const std::string& m) : std::runtime_error(m) {}
};
class NotLatticeDrawn : public std::runtime_error {
public:
    explicit NotLatticeDrawn(const std::string& m) : std::runtime_error(m) {}
};

/// Canonical translation cover: one sheet per element of Hol_r(base),
/// each cell transformed by its sheet element. Interior gluings connect
/// sheet g to g * lambda^-1; boundary edges become gluings between sheet
/// g and g * r_e. All cover gluing maps are translations.
struct TranslationCover {
    Surface total;
    int degree = 0;
    RotationalGroup group;                      // Hol_r(base)
    std::vector<std::pair<int, int>> sheet_map;  // cover cell -> (base cell, group index)
};

TranslationCover canonical_translation_cover(const Surface& base, int cap = 4096);

/// Square tiling in normalized (axis-scaled) coordinates.
struct SquareTiling {
    Rat scale_x{1}, scale_y{1};
    struct Square {
        long x, y;  // lower-left lattice corner, scaled coordinates
        int cell;   // owning cell in the source surface
    };
    std::vector<Square> squares;
    std::vector<int> right, up;              // neighbor permutations; -1 at boundary
    std::vector<long> right_shift, up_shift;  // displacement accrued crossing
    bool periodic = false;

    int find(long x, long y) const;
};

struct NotSquareTiled {
    std::string why;
    bool inexact_warning = false;
};

/// Partial arithmeticity test: axis scalings plus exact rational lattice
/// detection only; no general GL+(2,R) search.
std::variant<SquareTiling, NotSquareTiled> is_square_tiled(const Surface& s,
                                                           long scale_bound = 4096);

/// Origami translation surface of a lattice-drawn polygon given as its
/// set of unit squares: rows and columns wrap around.
Surface origami_from_squares(const std::vector<std::pair<long, long>>& squares);

/// Same, but takes the polygon as a single rectilinear cell.
Surface origami_from_polygon(const Cell& poly);

/// Squares of the staircase {|m - n| <= 1, 0 <= n < rows}.
std::vector<std::pair<long, long>> staircase_squares(int rows);

/// Z-quotient of the infinite (1,1)-periodic staircase origami: three unit
/// squares per period, vertical crossings carry the displacement labels.
Surface origami_staircase_quotient();

enum class DirectionClass { Rational, Irrational };
struct DirectionVerdict {
    DirectionClass cls;
    std::optional<Rat> slope;  // set when rational and finite
    bool vertical = false;     // slope = infinity
    bool inexact_warning = false;
};

/// Rationality of a direction in the tiling's normalized coordinates:
/// rational iff tan(theta) is in Q union {infinity}. For exact pi-rational
/// angles this is decided by the Niven table (tan in Q only at multiples
/// of pi/4); inexact angles cannot be certified and report Irrational
/// with a warning flag.
DirectionVerdict classify_direction(const Angle& theta, const SquareTiling* tiling = nullptr);
DirectionVerdict classify_slope(const Rat& slope, const SquareTiling* tiling = nullptr);
DirectionVerdict classify_vertical(const SquareTiling* tiling = nullptr);

}  // namespace polysurf
