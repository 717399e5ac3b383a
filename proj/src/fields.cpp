#include "nct/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nct/quadrature.hpp"

namespace nct {

FieldP0 make_p0(const Mesh& mesh, double value) {
  return {std::vector<double>(mesh.n_triangles(), value)};
}

VectorFieldP0 make_vec_p0(const Mesh& mesh, Vec2 value) {
  return {std::vector<Vec2>(mesh.n_triangles(), value)};
}

FieldP1NC make_p1nc(const Mesh& mesh, double value) {
  return {std::vector<double>(mesh.n_edges(), value)};
}

FieldRT0 make_rt0(const Mesh& mesh) {
  return {std::vector<double>(mesh.n_edges(), 0.0)};
}

FieldP0 project_p0_mean(const Mesh& mesh, const ScalarFn& f) {
  FieldP0 out = make_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    out.values[t] = integrate_triangle(tri_quad_deg4(), mesh.vertices[tri.v[0]],
                                       mesh.vertices[tri.v[1]],
                                       mesh.vertices[tri.v[2]], f) /
                    tri.area;
  }
  return out;
}

VectorFieldP0 project_p0_mean(const Mesh& mesh, const VectorFn& f) {
  VectorFieldP0 out = make_vec_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri.v[0]];
    const Vec2& p1 = mesh.vertices[tri.v[1]];
    const Vec2& p2 = mesh.vertices[tri.v[2]];
    const double x = integrate_triangle(tri_quad_deg4(), p0, p1, p2,
                                        [&](const Vec2& p) { return f(p).x; });
    const double y = integrate_triangle(tri_quad_deg4(), p0, p1, p2,
                                        [&](const Vec2& p) { return f(p).y; });
    out.values[t] = Vec2{x, y} / tri.area;
  }
  return out;
}

FieldP0 project_p0_point(const Mesh& mesh, const ScalarFn& f) {
  FieldP0 out = make_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    out.values[t] = f(mesh.triangles[t].circumcenter);
  }
  return out;
}

FieldP1NC interp_p1nc(const Mesh& mesh, const ScalarFn& q) {
  FieldP1NC out = make_p1nc(mesh);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    out.dofs[e] = edge_average(edge_quad_2pt(), mesh.vertices[edge.v[0]],
                               mesh.vertices[edge.v[1]], q);
  }
  return out;
}

namespace {

// int_K phi_sigma for the CR basis is |K|/3 regardless of the edge.
double cr_basis_at(const std::array<double, 3>& bary, int local_edge) {
  return 1.0 - 2.0 * bary[local_edge];
}

}  // namespace

FieldP1NC l2_project_p1nc(const Mesh& mesh, const ScalarFn& p) {
  std::vector<double> numer(mesh.n_edges(), 0.0);
  std::vector<double> denom(mesh.n_edges(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri.v[0]];
    const Vec2& p1 = mesh.vertices[tri.v[1]];
    const Vec2& p2 = mesh.vertices[tri.v[2]];
    for (int j = 0; j < 3; ++j) {
      const double integral = integrate_triangle(
          tri_quad_deg4(), p0, p1, p2, [&](const Vec2& x) {
            const auto bary = barycentric(mesh, static_cast<Index>(t), x);
            return p(x) * cr_basis_at(bary, j);
          });
      numer[tri.e[j]] += integral;
      denom[tri.e[j]] += tri.area / 3.0;
    }
  }
  FieldP1NC out = make_p1nc(mesh);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) out.dofs[e] = numer[e] / denom[e];
  return out;
}

FieldP1NC l2_project_p1nc(const Mesh& mesh, const FieldP0& p) {
  std::vector<double> numer(mesh.n_edges(), 0.0);
  std::vector<double> denom(mesh.n_edges(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int j = 0; j < 3; ++j) {
      numer[tri.e[j]] += p.values[t] * tri.area / 3.0;
      denom[tri.e[j]] += tri.area / 3.0;
    }
  }
  FieldP1NC out = make_p1nc(mesh);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) out.dofs[e] = numer[e] / denom[e];
  return out;
}

FieldP1NC l2_project_p1nc(const Mesh& mesh, const FieldP1NC& p) {
  // The CR element mass matrix is diagonal under the 3-midpoint rule, so the
  // projection of a CR function returns its own dofs.
  std::vector<double> numer(mesh.n_edges(), 0.0);
  std::vector<double> denom(mesh.n_edges(), 0.0);
  for (const Triangle& tri : mesh.triangles) {
    for (int j = 0; j < 3; ++j) {
      numer[tri.e[j]] += p.dofs[tri.e[j]] * tri.area / 3.0;
      denom[tri.e[j]] += tri.area / 3.0;
    }
  }
  FieldP1NC out = make_p1nc(mesh);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) out.dofs[e] = numer[e] / denom[e];
  return out;
}

FieldRT0 interp_rt0(const Mesh& mesh, const VectorFn& v,
                    double* boundary_violation) {
  FieldRT0 out = make_rt0(mesh);
  double interior_scale = 0.0;
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    out.fluxes[e] = edge_average(
        edge_quad_2pt(), mesh.vertices[edge.v[0]], mesh.vertices[edge.v[1]],
        [&](const Vec2& x) { return dot(v(x), edge.normal); });
    interior_scale = std::max(interior_scale, std::abs(out.fluxes[e]));
  }
  double worst = 0.0;
  for (Index e : mesh.boundary_edges) {
    const Edge& edge = mesh.edges[e];
    const double trace = edge_average(
        edge_quad_2pt(), mesh.vertices[edge.v[0]], mesh.vertices[edge.v[1]],
        [&](const Vec2& x) { return dot(v(x), edge.normal); });
    worst = std::max(worst, std::abs(trace));
  }
  if (boundary_violation != nullptr) {
    *boundary_violation = worst;
  } else if (worst > 1e-8 * (1.0 + interior_scale)) {
    throw Error(ErrorKind::BoundaryFluxViolation,
                "input field has nonzero boundary normal trace");
  }
  return out;
}

namespace {

// Local RT0 basis for edge j of triangle t: w_j(x) = |s_j|/(2|K|) (x - P_j),
// with P_j the opposite vertex; w_j . n_out,i = delta_ij on edge i.
Vec2 rt0_local_basis(const Mesh& mesh, const Triangle& tri, int j, const Vec2& x) {
  const Edge& edge = mesh.edges[tri.e[j]];
  const Vec2& opposite = mesh.vertices[tri.v[j]];
  return (edge.length / (2.0 * tri.area)) * (x - opposite);
}

// Exact local mass integrals (w_i, w_j)_K via the 3-midpoint rule (degree-2
// products of affine functions).
std::array<std::array<double, 3>, 3> rt0_local_mass(const Mesh& mesh,
                                                    const Triangle& tri) {
  std::array<Vec2, 3> mids;
  for (int j = 0; j < 3; ++j) mids[j] = mesh.edges[tri.e[j]].midpoint;
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double acc = 0.0;
      for (int q = 0; q < 3; ++q) {
        acc += dot(rt0_local_basis(mesh, tri, i, mids[q]),
                   rt0_local_basis(mesh, tri, j, mids[q]));
      }
      m[i][j] = m[j][i] = acc * tri.area / 3.0;
    }
  }
  return m;
}

FieldRT0 l2_project_rt0_impl(const Mesh& mesh,
                             const std::vector<double>& rhs_full,
                             const SolverConfig& config) {
  // Interior-edge dofs only; boundary fluxes are zero by the space.
  std::vector<Index> dof_of_edge(mesh.n_edges(), -1);
  for (std::size_t i = 0; i < mesh.interior_edges.size(); ++i) {
    dof_of_edge[mesh.interior_edges[i]] = static_cast<Index>(i);
  }
  const std::size_t n = mesh.interior_edges.size();
  SparseBuilder builder(n, n);
  for (const Triangle& tri : mesh.triangles) {
    const auto local = rt0_local_mass(mesh, tri);
    for (int i = 0; i < 3; ++i) {
      const Index di = dof_of_edge[tri.e[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const Index dj = dof_of_edge[tri.e[j]];
        if (dj < 0) continue;
        builder.add(di, dj, tri.sign[i] * tri.sign[j] * local[i][j]);
      }
    }
  }
  const SparseOperator M = std::move(builder).compress(true);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i] = rhs_full[mesh.interior_edges[i]];
  std::vector<double> x;
  SolverConfig cfg = config;
  cfg.method = SolverMethod::SymmetricIterative;
  const SolveReport report = solve_spd(M, b, x, cfg);
  if (!report.converged) {
    throw Error(ErrorKind::SolverFailure, "RT0 mass system did not converge");
  }
  FieldRT0 out = make_rt0(mesh);
  for (std::size_t i = 0; i < n; ++i) out.fluxes[mesh.interior_edges[i]] = x[i];
  return out;
}

}  // namespace

FieldRT0 l2_project_rt0(const Mesh& mesh, const VectorFn& w,
                        const SolverConfig& config) {
  std::vector<double> rhs(mesh.n_edges(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri.v[0]];
    const Vec2& p1 = mesh.vertices[tri.v[1]];
    const Vec2& p2 = mesh.vertices[tri.v[2]];
    for (int j = 0; j < 3; ++j) {
      const double integral = integrate_triangle(
          tri_quad_deg4(), p0, p1, p2, [&](const Vec2& x) {
            return dot(w(x), rt0_local_basis(mesh, tri, j, x));
          });
      rhs[tri.e[j]] += tri.sign[j] * integral;
    }
  }
  return l2_project_rt0_impl(mesh, rhs, config);
}

FieldRT0 l2_project_rt0(const Mesh& mesh, const VectorFieldP0& w,
                        const SolverConfig& config) {
  std::vector<double> rhs(mesh.n_edges(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    // int_K w_j = (|s_j|/2) (centroid - P_j), so the constant-field case is
    // closed form.
    for (int j = 0; j < 3; ++j) {
      const Edge& edge = mesh.edges[tri.e[j]];
      const Vec2 moment = (edge.length / 2.0) * (tri.centroid - mesh.vertices[tri.v[j]]);
      rhs[tri.e[j]] += tri.sign[j] * dot(w.values[t], moment);
    }
  }
  return l2_project_rt0_impl(mesh, rhs, config);
}

FieldRT0 l2_project_rt0(const Mesh& mesh, const FieldRT0& w,
                        const SolverConfig& config) {
  std::vector<double> rhs(mesh.n_edges(), 0.0);
  for (const Triangle& tri : mesh.triangles) {
    const auto local = rt0_local_mass(mesh, tri);
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 3; ++i) {
        acc += tri.sign[i] * w.fluxes[tri.e[i]] * local[i][j];
      }
      rhs[tri.e[j]] += tri.sign[j] * acc;
    }
  }
  return l2_project_rt0_impl(mesh, rhs, config);
}

double l2_inner(const Mesh& mesh, const FieldP0& p, const FieldP0& q) {
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    acc += mesh.triangles[t].area * p.values[t] * q.values[t];
  }
  return acc;
}

double l2_norm(const Mesh& mesh, const FieldP0& q) {
  return std::sqrt(l2_inner(mesh, q, q));
}

double l2_inner(const Mesh& mesh, const VectorFieldP0& p, const VectorFieldP0& q) {
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    acc += mesh.triangles[t].area * dot(p.values[t], q.values[t]);
  }
  return acc;
}

double l2_norm(const Mesh& mesh, const VectorFieldP0& q) {
  return std::sqrt(l2_inner(mesh, q, q));
}

double l2_inner(const Mesh& mesh, const FieldP1NC& p, const FieldP1NC& q) {
  double acc = 0.0;
  for (const Triangle& tri : mesh.triangles) {
    double local = 0.0;
    for (int j = 0; j < 3; ++j) local += p.dofs[tri.e[j]] * q.dofs[tri.e[j]];
    acc += tri.area / 3.0 * local;
  }
  return acc;
}

double l2_norm(const Mesh& mesh, const FieldP1NC& q) {
  return std::sqrt(l2_inner(mesh, q, q));
}

double l2_inner(const Mesh& mesh, const FieldRT0& u, const FieldRT0& v) {
  double acc = 0.0;
  for (const Triangle& tri : mesh.triangles) {
    const auto local = rt0_local_mass(mesh, tri);
    for (int i = 0; i < 3; ++i) {
      const double gi = tri.sign[i] * u.fluxes[tri.e[i]];
      for (int j = 0; j < 3; ++j) {
        const double gj = tri.sign[j] * v.fluxes[tri.e[j]];
        acc += gi * gj * local[i][j];
      }
    }
  }
  return acc;
}

double l2_norm(const Mesh& mesh, const FieldRT0& v) {
  return std::sqrt(std::max(0.0, l2_inner(mesh, v, v)));
}

double mean_value(const Mesh& mesh, const FieldP0& q) {
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    acc += mesh.triangles[t].area * q.values[t];
  }
  return acc / mesh.total_area();
}

double mean_value(const Mesh& mesh, const FieldP1NC& q) {
  double acc = 0.0;
  for (const Triangle& tri : mesh.triangles) {
    for (int j = 0; j < 3; ++j) acc += tri.area / 3.0 * q.dofs[tri.e[j]];
  }
  return acc / mesh.total_area();
}

double h_inner(const Mesh& mesh, const FieldP0& p, const FieldP0& q) {
  double acc = 0.0;
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    acc += edge.tau_sigma * (p.values[edge.L] - p.values[edge.K]) *
           (q.values[edge.L] - q.values[edge.K]);
  }
  return acc;
}

double h_norm(const Mesh& mesh, const FieldP0& q) {
  return std::sqrt(std::max(0.0, h_inner(mesh, q, q)));
}

std::vector<std::pair<Index, double>> h_seminorm_pairs(const Mesh& mesh,
                                                       const FieldP0& q) {
  std::vector<std::pair<Index, double>> out;
  out.reserve(mesh.interior_edges.size());
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    out.emplace_back(e, q.values[edge.L] - q.values[edge.K]);
  }
  return out;
}

double dual_norm_minus1h(const Mesh& mesh, const FieldP0& q,
                         const SolverConfig& config) {
  const double nq = l2_norm(mesh, q);
  const double mean_integral = mean_value(mesh, q) * mesh.total_area();
  if (std::abs(mean_integral) > 1e-10 * std::sqrt(mesh.total_area()) * nq) {
    throw Error(ErrorKind::NonZeroMean,
                "dual norm needs a zero-mean argument");
  }
  if (nq == 0.0) return 0.0;
  // Riesz representative: tau-weighted graph Laplacian applied to z equals
  // |K| q_K per row; then the norm is |z|_h.
  const std::size_t n = mesh.n_triangles();
  SparseBuilder builder(n, n);
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    builder.add(edge.K, edge.K, edge.tau_sigma);
    builder.add(edge.L, edge.L, edge.tau_sigma);
    builder.add(edge.K, edge.L, -edge.tau_sigma);
    builder.add(edge.L, edge.K, -edge.tau_sigma);
  }
  const SparseOperator L = std::move(builder).compress(true);
  std::vector<double> b(n);
  for (std::size_t t = 0; t < n; ++t) b[t] = mesh.triangles[t].area * q.values[t];
  SolverConfig cfg = config;
  cfg.method = SolverMethod::SymmetricIterative;
  cfg.deflate_constants = true;
  std::vector<double> z;
  const SolveReport report = solve_spd(L, b, z, cfg);
  if (!report.converged) {
    throw Error(ErrorKind::SolverFailure, "dual norm Riesz solve did not converge");
  }
  FieldP0 zf{std::move(z)};
  return h_norm(mesh, zf);
}

double broken_h1_norm(const Mesh& mesh, const FieldP1NC& q) {
  const double l2 = l2_norm(mesh, q);
  double grad2 = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Vec2 g = p1nc_gradient(mesh, q, static_cast<Index>(t));
    grad2 += mesh.triangles[t].area * dot(g, g);
  }
  return std::sqrt(l2 * l2 + grad2);
}

std::array<double, 3> barycentric(const Mesh& mesh, Index K, const Vec2& x) {
  const Triangle& tri = mesh.triangles[K];
  const Vec2& p0 = mesh.vertices[tri.v[0]];
  const Vec2& p1 = mesh.vertices[tri.v[1]];
  const Vec2& p2 = mesh.vertices[tri.v[2]];
  const double area2 = 2.0 * tri.area;
  return {signed_area2(x, p1, p2) / area2, signed_area2(p0, x, p2) / area2,
          signed_area2(p0, p1, x) / area2};
}

double p1nc_evaluate(const Mesh& mesh, const FieldP1NC& q, Index K, const Vec2& x) {
  const auto bary = barycentric(mesh, K, x);
  for (double l : bary) {
    if (l < -1e-12) {
      throw Error(ErrorKind::PointOutsideTriangle, "p1nc_evaluate point outside K");
    }
  }
  const Triangle& tri = mesh.triangles[K];
  double acc = 0.0;
  for (int j = 0; j < 3; ++j) acc += q.dofs[tri.e[j]] * cr_basis_at(bary, j);
  return acc;
}

Vec2 p1nc_gradient(const Mesh& mesh, const FieldP1NC& q, Index K) {
  const Triangle& tri = mesh.triangles[K];
  Vec2 g{};
  for (int j = 0; j < 3; ++j) {
    const Edge& edge = mesh.edges[tri.e[j]];
    g += q.dofs[tri.e[j]] * (edge.length / tri.area) * mesh.outward_normal(tri, j);
  }
  return g;
}

Vec2 rt0_evaluate(const Mesh& mesh, const FieldRT0& v, Index K, const Vec2& x) {
  const auto bary = barycentric(mesh, K, x);
  for (double l : bary) {
    if (l < -1e-12) {
      throw Error(ErrorKind::PointOutsideTriangle, "rt0_evaluate point outside K");
    }
  }
  const Triangle& tri = mesh.triangles[K];
  Vec2 acc{};
  for (int j = 0; j < 3; ++j) {
    acc += tri.sign[j] * v.fluxes[tri.e[j]] * rt0_local_basis(mesh, tri, j, x);
  }
  return acc;
}

FieldP0 rt0_divergence(const Mesh& mesh, const FieldRT0& v) {
  FieldP0 out = make_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      acc += mesh.edges[tri.e[j]].length * tri.sign[j] * v.fluxes[tri.e[j]];
    }
    out.values[t] = acc / tri.area;
  }
  return out;
}

void save_values_csv(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, values[i]);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

std::vector<double> load_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::size_t id = 0;
    char comma = 0;
    double value = 0.0;
    if (!(ss >> id >> comma >> value) || comma != ',') {
      throw Error(ErrorKind::IoError, path + ": bad csv line: " + line);
    }
    if (id != values.size()) {
      throw Error(ErrorKind::IoError, path + ": ids must be consecutive from 0");
    }
    values.push_back(value);
  }
  return values;
}

}  // namespace nct
