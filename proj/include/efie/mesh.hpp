#pragma once

#include "efie/common.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace efie {

using Triangle = std::array<int, 3>;

/// One of the two triangles incident to an edge. `local` is the local index
/// of the vertex opposite to the edge, so the edge runs from vertex
/// (local+1)%3 to (local+2)%3 in the triangle's counterclockwise order.
struct EdgeSide {
    int triangle = -1;
    int local = -1;
    Vec3 nu = Vec3::Zero();  ///< in-plane outward unit normal of `triangle` at this edge
};

struct Edge {
    std::array<int, 2> v{};  ///< vertex indices, v[0] < v[1]
    std::array<EdgeSide, 2> side{};
    int plus = 0;       ///< index into `side` of the triangle traversing v[0] -> v[1]
    int reference = 0;  ///< index into `side` of the fixed element T_e (lower triangle index)
    double length = 0.0;

    const EdgeSide& plus_side() const { return side[plus]; }
    const EdgeSide& minus_side() const { return side[1 - plus]; }
    const EdgeSide& reference_side() const { return side[reference]; }
};

/// A pair of triangles produced by bisecting `parent` = (a, b, c) from a to
/// the midpoint of bc. Kept so that later refinement restores the parent
/// before splitting it regularly.
struct GreenGroup {
    Triangle parent{};
    int midpoint = -1;
    int face = -1;
    int level = 0;
};

/// Raw mesh description consumed by SurfaceMesh::build.
struct MeshData {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<int> face_id;      ///< optional; computed from coplanarity when empty
    std::vector<int> level;        ///< optional; zeros when empty
    std::vector<int> green;        ///< optional; per-triangle index into green_groups or -1
    std::vector<GreenGroup> green_groups;
};

struct MeshOptions {
    double rho_max = 20.0;  ///< bound on h_T^2 / |T|
};

/// Closed, oriented, genus-0 triangulation of a polyhedral surface.
///
/// Immutable after construction. Every instance returned by `build` satisfies:
/// every edge has two incident triangles with opposite induced orientation,
/// V - E + F = 2, positive areas, h_T^2/|T| <= rho_max, outward orientation,
/// and each triangle lies in exactly one flat polyhedron face.
class SurfaceMesh {
public:
    static SurfaceMesh build(MeshData data, const MeshOptions& opts = {});

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return num_faces_; }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Edge>& edges() const { return edges_; }

    const Vec3& vertex(int i) const { return vertices_[i]; }
    const Triangle& triangle(int t) const { return triangles_[t]; }
    const Edge& edge(int e) const { return edges_[e]; }
    const Vec3& corner(int t, int a) const { return vertices_[triangles_[t][a]]; }

    /// Global edge index of local edge `a` (opposite local vertex `a`) of triangle t.
    int triangle_edge(int t, int a) const { return tri_edges_[t][a]; }
    const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }

    int face_id(int t) const { return face_id_[t]; }
    int level(int t) const { return level_[t]; }
    double h(int t) const { return h_[t]; }
    double area(int t) const { return area_[t]; }
    const Vec3& normal(int t) const { return normal_[t]; }
    Vec3 centroid(int t) const;
    /// Shape-regularity ratio h_T^2 / |T|.
    double shape_ratio(int t) const { return h_[t] * h_[t] / area_[t]; }

    int green(int t) const { return green_[t]; }
    const std::vector<GreenGroup>& green_groups() const { return green_groups_; }
    const std::vector<int>& face_ids() const { return face_id_; }
    const std::vector<int>& levels() const { return level_; }
    const std::vector<int>& green_flags() const { return green_; }

    double h_max() const;
    double total_area() const;
    double max_shape_ratio() const;
    double rho_max() const { return rho_max_; }

    /// Point with barycentric coordinates (l0, l1, l2) in triangle t.
    Vec3 point(int t, double l0, double l1, double l2) const;

    /// Edge index by its vertex pair, -1 when absent.
    int find_edge(int a, int b) const;

    /// Triangles sharing at least one edge with t, t itself included (the patch Delta_T).
    std::vector<int> edge_patch(int t) const;

    /// Triangles incident to each vertex (the vertex stars).
    std::vector<std::vector<int>> vertex_stars() const;

    MeshData data() const;

private:
    SurfaceMesh() = default;

    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<int> face_id_;
    std::vector<int> level_;
    std::vector<int> green_;
    std::vector<GreenGroup> green_groups_;
    std::vector<double> h_, area_;
    std::vector<Vec3> normal_;
    int num_faces_ = 0;
    double rho_max_ = 20.0;
};

using MeshPtr = std::shared_ptr<const SurfaceMesh>;

inline MeshPtr share(SurfaceMesh m) { return std::make_shared<const SurfaceMesh>(std::move(m)); }

// ---------------------------------------------------------------------------
// canonical geometries

enum class Shape { cube, l_bracket, tetrahedron };

Shape parse_shape(const std::string& name);
std::string to_string(Shape s);

SurfaceMesh build_canonical(Shape shape, double scale = 1.0, const MeshOptions& opts = {});

// ---------------------------------------------------------------------------
// refinement

/// Genealogy of one refinement group: the input triangles that were replaced
/// and the output triangles covering them. `parents` has two entries when a
/// green pair was merged back into its parent before regular refinement.
struct RefinementRecord {
    std::vector<int> parents;
    std::vector<int> children;
    int level = 0;
};

struct RefinementResult {
    SurfaceMesh mesh;
    std::vector<RefinementRecord> records;
    /// For each output triangle, the unique input triangle containing it, or -1
    /// when it straddles a merged green pair.
    std::vector<int> source;
};

/// Regular (red) refinement of every triangle into four similar children.
/// Children of input triangle i are output triangles 4i..4i+3.
RefinementResult refine_uniform(const SurfaceMesh& mesh);

/// Red refinement of `marked` with red-green closure. Green children are merged
/// back into their parent before the parent is refined again.
RefinementResult refine_marked(const SurfaceMesh& mesh, std::span<const int> marked);

// ---------------------------------------------------------------------------
// file I/O

enum class MeshFormat { off, gmsh, vtk };

SurfaceMesh load_mesh(const std::string& path, MeshFormat format, const MeshOptions& opts = {});
SurfaceMesh load_mesh(const std::string& path, const MeshOptions& opts = {});  ///< format from extension
SurfaceMesh read_off(std::istream& in, const MeshOptions& opts = {});
SurfaceMesh read_gmsh(std::istream& in, const MeshOptions& opts = {});

struct CellArray {
    std::string name;
    std::vector<double> values;
};

void save_mesh(const SurfaceMesh& mesh, const std::string& path, MeshFormat format,
               std::span<const CellArray> cell_data = {});
void write_off(const SurfaceMesh& mesh, std::ostream& out);
void write_vtk(const SurfaceMesh& mesh, std::ostream& out, std::span<const CellArray> cell_data = {});

}  // namespace efie
