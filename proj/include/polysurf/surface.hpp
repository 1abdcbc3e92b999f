#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polysurf/isometry.hpp"

namespace polysurf {

enum class BuildCode {
    BadCell,
    UnknownCell,
    LengthMismatch,
    DuplicateGluing,
    Disconnected,
    BadOrientation,
    EmptyGlueSet,
    NotPeriodic,
};

class BuildError : public std::runtime_error {
public:
    BuildError(BuildCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
    BuildCode code;
};

/// Planar polygon cell. Vertices are counterclockwise; edge i runs from
/// vertex i to vertex i+1 (mod n). Collinear consecutive vertices are
/// allowed (interior angle pi); they arise when a side must be split so
/// gluings match full side to full side.
struct Cell {
    std::string name;
    std::vector<Pt> verts;
    /// Exact direction of edge i when known (axis-aligned edges are
    /// inferred automatically; constructors may annotate tilted ones).
    std::vector<std::optional<Angle>> dirs;
    long block = 0;  // block index for lazily generated surfaces

    int n() const { return static_cast<int>(verts.size()); }
    const Pt& vstart(int e) const { return verts[e]; }
    const Pt& vend(int e) const { return verts[(e + 1) % n()]; }
    Vec2 edge_vec(int e) const { return vend(e).d() - vstart(e).d(); }
    double edge_len(int e) const { return edge_vec(e).norm(); }

    /// Direction angle of edge e; exact when annotated or inferable.
    Angle edge_dir(int e) const;
    /// Interior angle at vertex i (between edges i-1 and i), in (0, 2*pi).
    Angle interior_angle(int i) const;

    double area() const;
    bool contains(Vec2 p, double tol = kGeomEps) const;
    bool has_exact_coords() const;
};

struct EdgeRef {
    int cell = -1;
    int edge = -1;
    bool operator==(const EdgeRef& o) const { return cell == o.cell && edge == o.edge; }
    bool operator<(const EdgeRef& o) const {
        return cell != o.cell ? cell < o.cell : edge < o.edge;
    }
};

/// Identification of two cell sides by an isometry from the a-side chart
/// to the b-side chart. `shift` is the Z-cocycle label: crossing a -> b
/// adds +shift to the displacement, b -> a adds -shift.
struct Gluing {
    EdgeRef a, b;
    Isometry map;
    long shift = 0;
};

struct VertexClass {
    enum class Kind { RegularInterior, RegularBoundary, ConePoint, WedgePoint };
    Kind kind;
    Angle total_angle;
    bool on_boundary = false;
    std::vector<std::pair<int, int>> corners;  // (cell, vertex index)
};

class Surface;

/// Generates cells/gluings for integer-indexed blocks of a locally finite
/// infinite surface. emit() must be a pure function of the block index.
struct BlockProvider {
    std::function<void(long block, Surface&)> emit;
    std::optional<long> min_block, max_block;
};

class Surface {
public:
    Surface() = default;
    Surface(const Surface& o) { assign(o); }
    Surface(Surface&& o) noexcept { assign(o); }
    Surface& operator=(const Surface& o) {
        if (this != &o) assign(o);
        return *this;
    }
    Surface& operator=(Surface&& o) noexcept {
        if (this != &o) assign(o);
        return *this;
    }

    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Gluing>& gluings() const { return gluings_; }
    int cell_count() const { return static_cast<int>(cells_.size()); }

    int find_cell(const std::string& name) const;
    const Cell& cell(int i) const { return cells_[i]; }

    /// Index of the gluing at (cell, edge), or -1 when unglued.
    int gluing_at(int cell, int edge) const;
    bool is_boundary(int cell, int edge) const { return gluing_at(cell, edge) < 0; }
    const std::vector<EdgeRef>& boundary_edges() const;

    struct Transport {
        int gluing = -1;
        EdgeRef to;       // landing side
        Isometry map;     // chart map applied to points/directions
        long shift = 0;   // displacement accrued by this crossing
        bool forward = true;  // crossed a -> b
    };
    /// Transport across (cell, edge); nullopt when the edge is boundary.
    std::optional<Transport> transport(int cell, int edge) const;

    const std::vector<VertexClass>& vertex_classes() const;
    int vertex_class_of(int cell, int corner) const;

    bool has_shift_labels() const;
    bool has_provider() const { return provider_.has_value(); }
    std::pair<long, long> materialized_blocks() const { return {blk_lo_, blk_hi_}; }

    /// Materialize block k (no-op when already present or out of bounds).
    /// Returns true if the surface grew.
    bool ensure_block(long k);
    /// Materialize the neighbors of the given cell's block.
    bool expand_around(int cell);

    int euler_vertices() const { return static_cast<int>(vertex_classes().size()); }
    int euler_edges() const;
    int euler_characteristic() const;

    // --- construction interface (used by build_surface, catalog, unfold) ---
    int add_cell(Cell c);
    void add_gluing(Gluing g);
    void set_provider(BlockProvider p, long first_block);
    /// Split edge e of a cell at point p on it, inserting a collinear
    /// vertex. Only valid for unglued edges. Edge indices above e shift up.
    void split_edge(int cell, int edge, const Pt& p);
    void validate();           // throws BuildError
    void strip_shifts();
    void invalidate_derived() { derived_ok_ = false; }

private:
    void assign(const Surface& o) {
        cells_ = o.cells_;
        gluings_ = o.gluings_;
        name_index_ = o.name_index_;
        provider_ = o.provider_;
        blk_lo_ = o.blk_lo_;
        blk_hi_ = o.blk_hi_;
        derived_ok_ = false;
    }
    void ensure_derived() const;
    void check_cells() const;
    void check_gluing(const Gluing& g) const;
    void check_connected() const;

    std::vector<Cell> cells_;
    std::vector<Gluing> gluings_;
    std::map<std::string, int> name_index_;
    std::optional<BlockProvider> provider_;
    long blk_lo_ = 0, blk_hi_ = 0;

    // derived caches
    mutable bool derived_ok_ = false;
    mutable std::vector<std::vector<int>> glue_of_;
    mutable std::vector<EdgeRef> boundary_;
    mutable std::vector<VertexClass> vclasses_;
    mutable std::vector<std::vector<int>> vclass_of_;
    mutable std::mutex mu_;
};

/// Validates and returns the surface assembled from cells and gluings.
Surface build_surface(std::vector<Cell> cells, std::vector<Gluing> gluings);

/// Doubling along the glued part of the boundary; edges in keep_open stay
/// boundary in both copies. The second copy is mirrored so both stay
/// counterclockwise; cross gluings restrict to the identity on each edge.
Surface double_surface(const Surface& s, const std::set<EdgeRef>& keep_open = {});

struct BBox {
    double xmin, ymin, xmax, ymax;
    bool intersects_segment(Vec2 a, Vec2 b) const;
};

struct ConditionsReport {
    long sides_in_window = 0;     // condition A: finite count over the window
    double min_side_length = 0;   // condition B
    bool b_flag = false;          // min side below threshold
    double b_threshold = 0;
    int max_multiplicity = 0;     // condition C: max |f^-1(c)|
};

ConditionsReport validate_conditions(Surface& s, const BBox& window,
                                     double b_threshold = 1e-2);

/// Map from vertex-class index to its classification.
std::vector<VertexClass> vertex_angles(const Surface& s);

}  // namespace polysurf
