#include "nct/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nct {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorKind::InadmissibleAngle: return "InadmissibleAngle";
    case ErrorKind::ZeroTransmissibilityDistance: return "ZeroTransmissibilityDistance";
    case ErrorKind::CollinearPoints: return "CollinearPoints";
    case ErrorKind::PointOutsideTriangle: return "PointOutsideTriangle";
    case ErrorKind::NonZeroMean: return "NonZeroMean";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonPositiveTimeStep: return "NonPositiveTimeStep";
    case ErrorKind::MobilityBelowFloor: return "MobilityBelowFloor";
    case ErrorKind::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorKind::DuplicateDecayRates: return "DuplicateDecayRates";
    case ErrorKind::BoundaryFluxViolation: return "BoundaryFluxViolation";
    case ErrorKind::UnknownCase: return "UnknownCase";
    case ErrorKind::NonPositiveError: return "NonPositiveError";
    case ErrorKind::InadmissibleData: return "InadmissibleData";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::MeshLoad: return "MeshLoad";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

Vec2 circumcenter(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  // Perpendicular-bisector system, translated to p0 for conditioning:
  //   2 b . y = |b|^2,  2 c . y = |c|^2,  center = p0 + y.
  const Vec2 b = p1 - p0;
  const Vec2 c = p2 - p0;
  const double det = 2.0 * cross(b, c);
  const double scale = std::max({std::abs(b.x), std::abs(b.y), std::abs(c.x),
                                 std::abs(c.y)});
  if (std::abs(cross(b, c)) < 1e-14 * scale * scale) {
    throw Error(ErrorKind::CollinearPoints, "circumcenter of collinear points");
  }
  const double rb = dot(b, b);
  const double rc = dot(c, c);
  // Partial pivoting on the 2x2 system [2bx 2by; 2cx 2cy] y = [rb; rc].
  double a11 = 2.0 * b.x, a12 = 2.0 * b.y, r1 = rb;
  double a21 = 2.0 * c.x, a22 = 2.0 * c.y, r2 = rc;
  if (std::abs(a21) > std::abs(a11)) {
    std::swap(a11, a21);
    std::swap(a12, a22);
    std::swap(r1, r2);
  }
  const double m = a21 / a11;
  const double y2 = (r2 - m * r1) / (a22 - m * a12);
  const double y1 = (r1 - a12 * y2) / a11;
  (void)det;
  return p0 + Vec2{y1, y2};
}

namespace {

double triangle_max_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle_at = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p;
    const Vec2 v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  return std::max({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
}

}  // namespace

Mesh build_mesh(std::vector<Vec2> vertices,
                const std::vector<std::array<Index, 3>>& triangle_vertex_ids,
                const MeshBuildOptions& options) {
  if (vertices.size() < 3) {
    throw Error(ErrorKind::DegenerateTriangle, "mesh needs at least 3 vertices");
  }
  for (const auto& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw Error(ErrorKind::MeshLoad, "non-finite vertex coordinate");
    }
  }

  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles.resize(triangle_vertex_ids.size());

  const Index nv = static_cast<Index>(mesh.vertices.size());
  double coord_scale = 0.0;
  for (const auto& v : mesh.vertices) {
    coord_scale = std::max({coord_scale, std::abs(v.x), std::abs(v.y)});
  }

  for (std::size_t t = 0; t < triangle_vertex_ids.size(); ++t) {
    auto ids = triangle_vertex_ids[t];
    for (Index i : ids) {
      if (i < 0 || i >= nv) {
        throw Error(ErrorKind::MeshLoad,
                    "triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(i) + " out of range");
      }
    }
    const Vec2& a = mesh.vertices[ids[0]];
    const Vec2& b = mesh.vertices[ids[1]];
    const Vec2& c = mesh.vertices[ids[2]];
    double area2 = signed_area2(a, b, c);
    if (area2 < 0.0) {  // normalize orientation to counterclockwise
      std::swap(ids[1], ids[2]);
      area2 = -area2;
    }
    if (area2 < 1e-14 * std::max(coord_scale * coord_scale, 1e-300)) {
      throw Error(ErrorKind::DegenerateTriangle,
                  "triangle " + std::to_string(t) + " has zero area");
    }
    Triangle& tri = mesh.triangles[t];
    tri.v = ids;
    tri.area = 0.5 * area2;
    const Vec2& v0 = mesh.vertices[ids[0]];
    const Vec2& v1 = mesh.vertices[ids[1]];
    const Vec2& v2 = mesh.vertices[ids[2]];
    tri.centroid = (v0 + v1 + v2) / 3.0;
    tri.circumcenter = circumcenter(v0, v1, v2);
    tri.h = 2.0 * dist(tri.circumcenter, v0);

    // Strict admissibility: every interior angle < pi/2, i.e. every pair of
    // edge vectors from a vertex has positive dot product.
    for (int i = 0; i < 3; ++i) {
      const Vec2& p = mesh.vertices[ids[i]];
      const Vec2& q = mesh.vertices[ids[(i + 1) % 3]];
      const Vec2& r = mesh.vertices[ids[(i + 2) % 3]];
      const double d = dot(q - p, r - p);
      const bool inadmissible = options.allow_right_angles ? d < 0.0 : d <= 0.0;
      if (inadmissible) {
        throw Error(ErrorKind::InadmissibleAngle,
                    "triangle " + std::to_string(t) + " has an interior angle " +
                        (options.allow_right_angles ? "> pi/2" : ">= pi/2"));
      }
    }
  }

  // Edge table; an edge gets its id at first encounter, so K is always the
  // lower-numbered incident triangle.
  std::map<std::pair<Index, Index>, Index> edge_ids;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Triangle& tri = mesh.triangles[t];
    for (int j = 0; j < 3; ++j) {
      const Index a = tri.v[(j + 1) % 3];
      const Index b = tri.v[(j + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        Edge edge;
        edge.v = {a, b};
        edge.K = static_cast<Index>(t);
        edge.midpoint = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        edge.length = dist(mesh.vertices[a], mesh.vertices[b]);
        const Index id = static_cast<Index>(mesh.edges.size());
        mesh.edges.push_back(edge);
        edge_ids.emplace(key, id);
        tri.e[j] = id;
      } else {
        Edge& edge = mesh.edges[it->second];
        if (edge.L != kNoTriangle) {
          throw Error(ErrorKind::NonManifoldEdge,
                      "edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) +
                          ") incident to more than two triangles");
        }
        edge.L = static_cast<Index>(t);
        tri.e[j] = it->second;
      }
    }
  }

  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    Edge& edge = mesh.edges[e];
    const Triangle& K = mesh.triangles[edge.K];
    const Vec2 tangent = mesh.vertices[edge.v[1]] - mesh.vertices[edge.v[0]];
    Vec2 n = rot_cw(tangent) / edge.length;
    if (dot(n, edge.midpoint - K.centroid) < 0.0) n = -1.0 * n;
    edge.normal = n;
    if (edge.interior()) {
      const Triangle& L = mesh.triangles[edge.L];
      edge.d_sigma = dist(K.circumcenter, L.circumcenter);
      mesh.interior_edges.push_back(static_cast<Index>(e));
    } else {
      edge.d_sigma = dist(K.circumcenter, edge.midpoint);
      mesh.boundary_edges.push_back(static_cast<Index>(e));
    }
    if (edge.d_sigma <= 1e-12 * edge.length) {
      throw Error(ErrorKind::ZeroTransmissibilityDistance,
                  "edge " + std::to_string(e) +
                      " has coincident transmissibility points");
    }
    edge.tau_sigma = edge.length / edge.d_sigma;
  }

  for (Triangle& tri : mesh.triangles) {
    for (int j = 0; j < 3; ++j) {
      tri.sign[j] = (mesh.edges[tri.e[j]].K ==
                     static_cast<Index>(&tri - mesh.triangles.data()))
                        ? 1.0
                        : -1.0;
    }
  }

  if (2 * mesh.interior_edges.size() + mesh.boundary_edges.size() !=
      3 * mesh.triangles.size()) {
    throw Error(ErrorKind::NonManifoldEdge, "edge/triangle count mismatch");
  }

  mesh.h = 0.0;
  for (const Triangle& tri : mesh.triangles) mesh.h = std::max(mesh.h, tri.h);
  mesh.quality = admissibility_report(mesh);
  return mesh;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (const Triangle& tri : triangles) a += tri.area;
  return a;
}

double Mesh::boundary_polygon_area() const {
  // Boundary edges traversed in triangle orientation keep the domain on the
  // left, so the shoelace sum gives the enclosed area.
  double acc = 0.0;
  for (Index e : boundary_edges) {
    const Edge& edge = edges[e];
    const Triangle& K = triangles[edge.K];
    Index a = edge.v[0], b = edge.v[1];
    // Recover the traversal order used by triangle K.
    for (int j = 0; j < 3; ++j) {
      if (K.e[j] == e) {
        a = K.v[(j + 1) % 3];
        b = K.v[(j + 2) % 3];
        break;
      }
    }
    acc += cross(vertices[a], vertices[b]);
  }
  return 0.5 * acc;
}

MeshQuality admissibility_report(const Mesh& mesh) {
  MeshQuality q;
  q.n_interior = mesh.interior_edges.size();
  q.n_boundary = mesh.boundary_edges.size();
  q.min_tau = std::numeric_limits<double>::infinity();
  q.min_tau_interior = q.n_interior == 0
                           ? 0.0
                           : std::numeric_limits<double>::infinity();
  q.min_dsigma_over_len = std::numeric_limits<double>::infinity();
  q.min_len_over_h = std::numeric_limits<double>::infinity();
  for (const Edge& edge : mesh.edges) {
    q.min_tau = std::min(q.min_tau, edge.tau_sigma);
    if (edge.interior()) q.min_tau_interior = std::min(q.min_tau_interior, edge.tau_sigma);
    q.min_dsigma_over_len = std::min(q.min_dsigma_over_len, edge.d_sigma / edge.length);
    q.min_len_over_h = std::min(q.min_len_over_h, edge.length / mesh.h);
  }
  q.max_angle = 0.0;
  for (const Triangle& tri : mesh.triangles) {
    q.max_angle = std::max(
        q.max_angle, triangle_max_angle(mesh.vertices[tri.v[0]],
                                        mesh.vertices[tri.v[1]],
                                        mesh.vertices[tri.v[2]]));
  }
  q.strictly_acute = q.max_angle < 0.5 * 3.14159265358979323846 - 1e-12;
  return q;
}

Mesh generate_equilateral_mesh(int n_rows, int n_cols, double side,
                               const MeshBuildOptions& options) {
  if (n_rows < 1 || n_cols < 1 || !(side > 0.0)) {
    throw Error(ErrorKind::MeshLoad, "equilateral generator needs rows,cols >= 1 and side > 0");
  }
  const double hy = side * std::sqrt(3.0) / 2.0;
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n_rows + 1) * (n_cols + 1));
  auto vid = [&](int i, int j) { return j * (n_cols + 1) + i; };
  for (int j = 0; j <= n_rows; ++j) {
    for (int i = 0; i <= n_cols; ++i) {
      vertices.push_back({(i + 0.5 * j) * side, j * hy});
    }
  }
  std::vector<std::array<Index, 3>> tris;
  tris.reserve(static_cast<std::size_t>(n_rows) * n_cols * 2);
  for (int j = 0; j < n_rows; ++j) {
    for (int i = 0; i < n_cols; ++i) {
      const Index a = vid(i, j);
      const Index b = vid(i + 1, j);
      const Index c = vid(i + 1, j + 1);
      const Index d = vid(i, j + 1);
      // The short diagonal (b,d) splits the rhombus cell into two
      // equilateral triangles.
      tris.push_back({a, b, d});
      tris.push_back({b, c, d});
    }
  }
  return build_mesh(std::move(vertices), tris, options);
}

Mesh uniform_refine(const Mesh& mesh, const MeshBuildOptions& options) {
  std::vector<Vec2> vertices = mesh.vertices;
  std::vector<Index> edge_midpoint_id(mesh.edges.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    edge_midpoint_id[e] = static_cast<Index>(vertices.size());
    vertices.push_back(mesh.edges[e].midpoint);
  }
  std::vector<std::array<Index, 3>> tris;
  tris.reserve(mesh.triangles.size() * 4);
  for (const Triangle& tri : mesh.triangles) {
    const Index m0 = edge_midpoint_id[tri.e[0]];  // opposite v0: midpoint(v1,v2)
    const Index m1 = edge_midpoint_id[tri.e[1]];
    const Index m2 = edge_midpoint_id[tri.e[2]];
    tris.push_back({tri.v[0], m2, m1});
    tris.push_back({m2, tri.v[1], m0});
    tris.push_back({m1, m0, tri.v[2]});
    tris.push_back({m0, m1, m2});
  }
  return build_mesh(std::move(vertices), tris, options);
}

Mesh load_mesh(const std::string& path, const MeshBuildOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MeshLoad, "cannot open mesh file " + path);
  auto next_data_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  std::string line;
  if (!next_data_line(line)) throw Error(ErrorKind::MeshLoad, path + ": missing header");
  std::size_t nv = 0, nt = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nt)) throw Error(ErrorKind::MeshLoad, path + ": bad header");
  }
  std::vector<Vec2> vertices(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_data_line(line)) throw Error(ErrorKind::MeshLoad, path + ": truncated vertex list");
    std::istringstream ss(line);
    if (!(ss >> vertices[i].x >> vertices[i].y)) {
      throw Error(ErrorKind::MeshLoad, path + ": bad vertex line");
    }
  }
  std::vector<std::array<Index, 3>> tris(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!next_data_line(line)) throw Error(ErrorKind::MeshLoad, path + ": truncated triangle list");
    std::istringstream ss(line);
    if (!(ss >> tris[t][0] >> tris[t][1] >> tris[t][2])) {
      throw Error(ErrorKind::MeshLoad, path + ": bad triangle line");
    }
  }
  return build_mesh(std::move(vertices), tris, options);
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write mesh file " + path);
  out << mesh.n_vertices() << " " << mesh.n_triangles() << "\n";
  char buf[64];
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x, v.y);
    out << buf;
  }
  for (const Triangle& tri : mesh.triangles) {
    out << tri.v[0] << " " << tri.v[1] << " " << tri.v[2] << "\n";
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing mesh file " + path);
}

}  // namespace nct
