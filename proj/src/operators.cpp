#include "nct/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nct {

VectorFieldP0 grad_h(const Mesh& mesh, const FieldP1NC& q) {
  VectorFieldP0 out = make_vec_p0(mesh);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    out.values[t] = p1nc_gradient(mesh, q, static_cast<Index>(t));
  }
  return out;
}

FieldP1NC div_h(const Mesh& mesh, const VectorFieldP0& v) {
  FieldP1NC out = make_p1nc(mesh);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.interior()) {
      const double wk = mesh.triangles[edge.K].area;
      const double wl = mesh.triangles[edge.L].area;
      out.dofs[e] = 3.0 * edge.length / (wk + wl) *
                    dot(v.values[edge.L] - v.values[edge.K], edge.normal);
    } else {
      const double wk = mesh.triangles[edge.K].area;
      out.dofs[e] = -3.0 * edge.length / wk * dot(v.values[edge.K], edge.normal);
    }
  }
  return out;
}

FieldP0 lap_h_apply(const Mesh& mesh, const FieldP0& q) {
  FieldP0 out = make_p0(mesh);
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    const double flux = edge.tau_sigma * (q.values[edge.L] - q.values[edge.K]);
    out.values[edge.K] += flux / mesh.triangles[edge.K].area;
    out.values[edge.L] -= flux / mesh.triangles[edge.L].area;
  }
  return out;
}

SparseOperator lap_h_matrix(const Mesh& mesh) {
  const std::size_t n = mesh.n_triangles();
  SparseBuilder builder(n, n);
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    const double ak = mesh.triangles[edge.K].area;
    const double al = mesh.triangles[edge.L].area;
    builder.add(edge.K, edge.K, -edge.tau_sigma / ak);
    builder.add(edge.K, edge.L, edge.tau_sigma / ak);
    builder.add(edge.L, edge.L, -edge.tau_sigma / al);
    builder.add(edge.L, edge.K, edge.tau_sigma / al);
  }
  return std::move(builder).compress(false);
}

FieldP0 upwind_apply(const Mesh& mesh, const FieldRT0& v, const FieldP0& q) {
  FieldP0 out = make_p0(mesh);
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    const double flux = v.fluxes[e];  // v . n in the K->L orientation
    const double upstream = flux >= 0.0 ? q.values[edge.K] : q.values[edge.L];
    const double transported = edge.length * flux * upstream;
    out.values[edge.K] += transported / mesh.triangles[edge.K].area;
    out.values[edge.L] -= transported / mesh.triangles[edge.L].area;
  }
  return out;
}

double b_h(const Mesh& mesh, const FieldRT0& v, const FieldP0& p, const FieldP0& q) {
  double acc = 0.0;
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    const double flux = v.fluxes[e];
    const double upstream = flux >= 0.0 ? p.values[edge.K] : p.values[edge.L];
    acc += edge.length * flux * upstream * (q.values[edge.K] - q.values[edge.L]);
  }
  return acc;
}

SparseOperator assemble_transport_matrix(const Mesh& mesh, const FieldRT0& u,
                                         double diffusion,
                                         const FieldP0& reaction, double k) {
  if (!(k > 0.0)) {
    throw Error(ErrorKind::NonPositiveTimeStep,
                "time step must be positive, got " + std::to_string(k));
  }
  const std::size_t n = mesh.n_triangles();
  SparseBuilder builder(n, n);
  for (std::size_t t = 0; t < n; ++t) {
    builder.add(t, t, 1.0 / k + reaction.values[t]);
  }
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    const double ak = mesh.triangles[edge.K].area;
    const double al = mesh.triangles[edge.L].area;
    const double flux = edge.length * u.fluxes[e];
    const double fplus = std::max(flux, 0.0);
    const double fminus = std::min(flux, 0.0);
    // Diffusion: two-point flux; convection: implicit upwind, the K->L flux
    // enters row K with the upstream unknown.
    builder.add(edge.K, edge.K, (diffusion * edge.tau_sigma + fplus) / ak);
    builder.add(edge.K, edge.L, -(diffusion * edge.tau_sigma - fminus) / ak);
    builder.add(edge.L, edge.L, (diffusion * edge.tau_sigma - fminus) / al);
    builder.add(edge.L, edge.K, -(diffusion * edge.tau_sigma + fplus) / al);
  }
  return std::move(builder).compress(false);
}

SparseOperator assemble_pressure_matrix(const Mesh& mesh, const FieldP0& kappa,
                                        double kappa_inf) {
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    if (kappa.values[t] < kappa_inf) {
      throw Error(ErrorKind::MobilityBelowFloor,
                  "kappa below floor on triangle " + std::to_string(t));
    }
  }
  const std::size_t n = mesh.n_edges();
  SparseBuilder builder(n, n);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double kap = kappa.values[t];
    // grad phi_j = (|s_j|/|K|) n_out,j for the CR basis of edge j.
    std::array<Vec2, 3> grads;
    for (int j = 0; j < 3; ++j) {
      grads[j] = (mesh.edges[tri.e[j]].length / tri.area) *
                 mesh.outward_normal(tri, j);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        builder.add(tri.e[i], tri.e[j], kap * tri.area * dot(grads[i], grads[j]));
      }
    }
  }
  return std::move(builder).compress(true);
}

std::vector<double> pressure_rhs(const Mesh& mesh, const VectorFieldP0& f,
                                 const FieldP0& s) {
  std::vector<double> rhs(mesh.n_edges(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int j = 0; j < 3; ++j) {
      const Edge& edge = mesh.edges[tri.e[j]];
      // (f, grad phi_j)_K + (s, phi_j)_K with int_K phi_j = |K|/3.
      rhs[tri.e[j]] += edge.length * dot(f.values[t], mesh.outward_normal(tri, j)) +
                       s.values[t] * tri.area / 3.0;
    }
  }
  return rhs;
}

}  // namespace nct
