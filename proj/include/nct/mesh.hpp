#ifndef NCT_MESH_HPP
#define NCT_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nct/error.hpp"
#include "nct/geometry.hpp"

namespace nct {

using Index = std::int32_t;
constexpr Index kNoTriangle = -1;

struct Triangle {
  std::array<Index, 3> v{};      // vertex ids, counterclockwise
  std::array<Index, 3> e{};      // edge ids; e[j] is opposite v[j]
  std::array<double, 3> sign{};  // +1 if this triangle is K of e[j], else -1
  Vec2 circumcenter;
  Vec2 centroid;
  double area = 0.0;
  double h = 0.0;  // diameter of the circumscribed circle
};

struct Edge {
  std::array<Index, 2> v{};
  Index K = kNoTriangle;  // first incident triangle (lower id)
  Index L = kNoTriangle;  // second incident triangle, kNoTriangle on the boundary
  Vec2 midpoint;
  Vec2 normal;  // unit, oriented K -> L (outward for boundary edges)
  double length = 0.0;
  double d_sigma = 0.0;    // distance between circumcenters (or center to midpoint)
  double tau_sigma = 0.0;  // length / d_sigma

  bool interior() const { return L != kNoTriangle; }
};

/// Regularity constants of the mesh; the admissibility report.
struct MeshQuality {
  double min_tau = 0.0;           // over all edges
  double min_tau_interior = 0.0;  // 0 when there are no interior edges
  double max_angle = 0.0;         // radians
  double min_dsigma_over_len = 0.0;
  double min_len_over_h = 0.0;
  std::size_t n_interior = 0;
  std::size_t n_boundary = 0;
  bool strictly_acute = false;
};

struct MeshBuildOptions {
  /// Admit right angles (the scheme formulas only need d_sigma > 0); zero
  /// transmissibility distance remains a hard error.
  bool allow_right_angles = false;
};

class Mesh {
 public:
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  std::vector<Index> interior_edges;
  std::vector<Index> boundary_edges;
  double h = 0.0;  // max over triangles of the circumscribed diameter
  MeshQuality quality;

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_triangles() const { return triangles.size(); }
  std::size_t n_edges() const { return edges.size(); }

  double total_area() const;

  /// Area of the polygon traced by the boundary edges.
  double boundary_polygon_area() const;

  /// Outward unit normal of edge tri.e[j] as seen from the triangle.
  Vec2 outward_normal(const Triangle& tri, int j) const {
    return tri.sign[j] * edges[tri.e[j]].normal;
  }
};

/// Circumcenter of three non-collinear points; equidistant from all three.
Vec2 circumcenter(const Vec2& p0, const Vec2& p1, const Vec2& p2);

Mesh build_mesh(std::vector<Vec2> vertices,
                const std::vector<std::array<Index, 3>>& triangle_vertex_ids,
                const MeshBuildOptions& options = {});

/// Rhombus domain tiled by congruent equilateral triangles with the given
/// side; strictly admissible with quality constants independent of size.
Mesh generate_equilateral_mesh(int n_rows, int n_cols, double side,
                               const MeshBuildOptions& options = {});

/// Split every triangle into four via edge midpoints. Preserves the angle
/// set, halves h exactly.
Mesh uniform_refine(const Mesh& mesh, const MeshBuildOptions& options = {});

MeshQuality admissibility_report(const Mesh& mesh);

/// Text format: `NV NT`, then NV lines `x y`, then NT lines `i0 i1 i2`
/// (0-based, counterclockwise). `#` starts a comment. Derived data is always
/// recomputed on load.
Mesh load_mesh(const std::string& path, const MeshBuildOptions& options = {});
void save_mesh(const Mesh& mesh, const std::string& path);

}  // namespace nct

#endif
