#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nct/operators.hpp"
#include "nct/rng.hpp"
#include "nct/verification.hpp"

using namespace nct;

namespace {

Mesh rhombus(int n) { return generate_equilateral_mesh(n, n, 1.0 / n); }

FieldRT0 random_rt0(const Mesh& mesh, Rng& rng) {
  FieldRT0 v = make_rt0(mesh);
  for (Index e : mesh.interior_edges) v.fluxes[e] = rng.symmetric();
  return v;
}

}  // namespace

TEST_CASE("CR gradient is exact on affine functions and zero on constants") {
  const Mesh mesh = rhombus(2);
  const auto affine = [](const Vec2& x) { return 1.25 * x.x - 0.5 * x.y + 3.0; };
  const VectorFieldP0 g = grad_h(mesh, interp_p1nc(mesh, affine));
  for (const Vec2& v : g.values) {
    CHECK(v.x == doctest::Approx(1.25).epsilon(1e-13));
    CHECK(v.y == doctest::Approx(-0.5).epsilon(1e-13));
  }
  const VectorFieldP0 gz = grad_h(mesh, make_p1nc(mesh, 9.0));
  for (const Vec2& v : gz.values) CHECK(norm(v) <= 1e-13);
}

TEST_CASE("CR gradient matches a direct affine interpolation solve") {
  const Mesh mesh = generate_equilateral_mesh(1, 1, 1.0);
  Rng rng(2);
  const FieldP1NC q = random_p1nc(mesh, rng);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    // Solve for the affine function through the three midpoint values.
    const Vec2 m0 = mesh.edges[tri.e[0]].midpoint;
    const Vec2 m1 = mesh.edges[tri.e[1]].midpoint;
    const Vec2 m2 = mesh.edges[tri.e[2]].midpoint;
    const double q0 = q.dofs[tri.e[0]];
    const double q1 = q.dofs[tri.e[1]];
    const double q2 = q.dofs[tri.e[2]];
    const double det = (m1.x - m0.x) * (m2.y - m0.y) - (m2.x - m0.x) * (m1.y - m0.y);
    const double gx = ((q1 - q0) * (m2.y - m0.y) - (q2 - q0) * (m1.y - m0.y)) / det;
    const double gy = ((q2 - q0) * (m1.x - m0.x) - (q1 - q0) * (m2.x - m0.x)) / det;
    const Vec2 g = p1nc_gradient(mesh, q, static_cast<Index>(t));
    CHECK(g.x == doctest::Approx(gx).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(gy).epsilon(1e-12));
  }
}

TEST_CASE("discrete divergence of constant fields") {
  const Mesh mesh = rhombus(2);
  const Vec2 w{0.6, -0.2};
  const FieldP1NC d = div_h(mesh, make_vec_p0(mesh, w));
  for (Index e : mesh.interior_edges) CHECK(std::abs(d.dofs[e]) <= 1e-13);
  for (Index e : mesh.boundary_edges) {
    const Edge& edge = mesh.edges[e];
    const double expected = -3.0 * edge.length /
                            mesh.triangles[edge.K].area * dot(w, edge.normal);
    CHECK(d.dofs[e] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("gradient and divergence are adjoint") {
  Rng rng(11);
  for (int n : {1, 2, 4}) {
    const Mesh mesh = generate_equilateral_mesh(n, n, 1.0 / n);
    for (int trial = 0; trial < 50; ++trial) {
      const VectorFieldP0 v = random_vec_p0(mesh, rng);
      const FieldP1NC q = random_p1nc(mesh, rng);
      const double lhs = l2_inner(mesh, v, grad_h(mesh, q));
      const double rhs = -l2_inner(mesh, q, div_h(mesh, v));
      const double scale = l2_norm(mesh, v) * broken_h1_norm(mesh, q) + 1e-30;
      CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("adjointness spot check against the edge-sum formula") {
  const Mesh mesh = generate_equilateral_mesh(1, 1, 1.0);
  Rng rng(13);
  const VectorFieldP0 v = random_vec_p0(mesh, rng);
  const FieldP1NC q = random_p1nc(mesh, rng);
  // Independent evaluation: (v, grad q) resolved edgewise,
  // interior |s| q_s (v_K - v_L).n + boundary |s| q_s v_K.n.
  double oracle = 0.0;
  for (Index e : mesh.interior_edges) {
    const Edge& edge = mesh.edges[e];
    oracle += edge.length * q.dofs[e] *
              dot(v.values[edge.K] - v.values[edge.L], edge.normal);
  }
  for (Index e : mesh.boundary_edges) {
    const Edge& edge = mesh.edges[e];
    oracle += edge.length * q.dofs[e] * dot(v.values[edge.K], edge.normal);
  }
  CHECK(l2_inner(mesh, v, grad_h(mesh, q)) ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK(-l2_inner(mesh, q, div_h(mesh, v)) ==
        doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("discrete Laplacian identities") {
  const Mesh mesh = rhombus(3);
  SUBCASE("constants are in the kernel") {
    const FieldP0 z = lap_h_apply(mesh, make_p0(mesh, 5.5));
    for (double v : z.values) CHECK(std::abs(v) <= 1e-13);
  }
  SUBCASE("symmetry and coercivity") {
    Rng rng(19);
    for (int trial = 0; trial < 25; ++trial) {
      const FieldP0 p = random_p0(mesh, rng);
      const FieldP0 q = random_p0(mesh, rng);
      const double sym = l2_inner(mesh, lap_h_apply(mesh, p), q) -
                         l2_inner(mesh, p, lap_h_apply(mesh, q));
      CHECK(std::abs(sym) <= 1e-12 * (h_norm(mesh, p) * h_norm(mesh, q) + 1e-30));
      const double hn = h_norm(mesh, p);
      CHECK(-l2_inner(mesh, lap_h_apply(mesh, p), p) ==
            doctest::Approx(hn * hn).epsilon(1e-12));
    }
  }
  SUBCASE("matrix form agrees with the operator") {
    const SparseOperator L = lap_h_matrix(mesh);
    Rng rng(23);
    const FieldP0 p = random_p0(mesh, rng);
    const std::vector<double> Lp = L.apply(p.values);
    const FieldP0 direct = lap_h_apply(mesh, p);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      CHECK(Lp[t] == doctest::Approx(direct.values[t]).epsilon(1e-13));
    }
  }
}

TEST_CASE("upwind divergence uses the upstream value") {
  const Mesh mesh = generate_equilateral_mesh(1, 1, 1.0);
  const Index e = mesh.interior_edges[0];
  const Edge& edge = mesh.edges[e];
  FieldP0 q = make_p0(mesh);
  q.values[edge.K] = 2.0;
  q.values[edge.L] = -3.0;

  FieldRT0 v = make_rt0(mesh);
  SUBCASE("positive flux carries the K value") {
    v.fluxes[e] = 0.5;
    const FieldP0 out = upwind_apply(mesh, v, q);
    const double carried = edge.length * 0.5 * 2.0;
    CHECK(out.values[edge.K] ==
          doctest::Approx(carried / mesh.triangles[edge.K].area).epsilon(1e-13));
    CHECK(out.values[edge.L] ==
          doctest::Approx(-carried / mesh.triangles[edge.L].area).epsilon(1e-13));
  }
  SUBCASE("negative flux carries the L value") {
    v.fluxes[e] = -0.5;
    const FieldP0 out = upwind_apply(mesh, v, q);
    const double carried = edge.length * (-0.5) * (-3.0);
    CHECK(out.values[edge.K] ==
          doctest::Approx(carried / mesh.triangles[edge.K].area).epsilon(1e-13));
    CHECK(out.values[edge.L] ==
          doctest::Approx(-carried / mesh.triangles[edge.L].area).epsilon(1e-13));
  }
}

TEST_CASE("upwind of constants under divergence-free velocity vanishes") {
  const Mesh mesh = rhombus(3);
  Rng rng(29);
  const FieldRT0 v = random_divfree_rt0(mesh, rng);
  const FieldP0 q = make_p0(mesh, 0.8);
  const FieldP0 out = upwind_apply(mesh, v, q);
  for (double val : out.values) CHECK(std::abs(val) <= 1e-12);
}

TEST_CASE("trilinear convection form") {
  const Mesh mesh = rhombus(3);
  Rng rng(31);
  SUBCASE("nonnegative on the diagonal for divergence-free fields") {
    for (int trial = 0; trial < 50; ++trial) {
      const FieldRT0 v = random_divfree_rt0(mesh, rng);
      const FieldP0 q = random_p0(mesh, rng);
      const double norm_scale =
          l2_norm(mesh, v) * (h_norm(mesh, q) * h_norm(mesh, q) + 1.0);
      CHECK(b_h(mesh, v, q, q) >= -1e-12 * (norm_scale + 1e-30));
    }
  }
  SUBCASE("cell recomposition matches the edge-based evaluation") {
    for (int trial = 0; trial < 25; ++trial) {
      const FieldRT0 v = random_rt0(mesh, rng);
      const FieldP0 p = random_p0(mesh, rng);
      const FieldP0 q = random_p0(mesh, rng);
      const double direct = b_h(mesh, v, p, q);
      const FieldP0 up = upwind_apply(mesh, v, p);
      double recomposed = 0.0;
      double scale = 1e-30;
      for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const double term = mesh.triangles[t].area * q.values[t] * up.values[t];
        recomposed += term;
        scale += std::abs(term);
      }
      CHECK(std::abs(direct - recomposed) <= 1e-13 * scale);
    }
  }
  SUBCASE("constant transported field and divergence-free velocity give zero") {
    const FieldRT0 v = random_divfree_rt0(mesh, rng);
    const FieldP0 p = make_p0(mesh, 1.7);
    const FieldP0 q = random_p0(mesh, rng);
    const double scale = l2_norm(mesh, v) * h_norm(mesh, q) + 1e-30;
    CHECK(std::abs(b_h(mesh, v, p, q)) <= 1e-12 * scale);
  }
}

TEST_CASE("transport matrix structure") {
  const Mesh mesh = rhombus(3);
  Rng rng(37);
  const double k = 0.05;
  SUBCASE("no velocity, no diffusion, no reaction gives I/k") {
    const SparseOperator A = assemble_transport_matrix(
        mesh, make_rt0(mesh), 0.0, make_p0(mesh, 0.0), k);
    std::vector<double> ones(mesh.n_triangles(), 1.0);
    const std::vector<double> out = A.apply(ones);
    for (double v : out) CHECK(v == doctest::Approx(1.0 / k).epsilon(1e-14));
    for (std::size_t r = 0; r < A.rows(); ++r) {
      for (std::size_t i = A.row_ptr()[r]; i < A.row_ptr()[r + 1]; ++i) {
        if (A.col_idx()[i] != r) CHECK(A.values()[i] == 0.0);
      }
    }
  }
  SUBCASE("off-diagonals are nonpositive for any velocity") {
    const FieldRT0 u = random_rt0(mesh, rng);
    const SparseOperator A =
        assemble_transport_matrix(mesh, u, 0.3, make_p0(mesh, 0.1), k);
    for (std::size_t r = 0; r < A.rows(); ++r) {
      for (std::size_t i = A.row_ptr()[r]; i < A.row_ptr()[r + 1]; ++i) {
        if (A.col_idx()[i] != r) CHECK(A.values()[i] <= 0.0);
      }
    }
  }
  SUBCASE("row sums carry the flux-divergence identity") {
    const FieldRT0 u = random_rt0(mesh, rng);
    FieldP0 reaction = random_p0(mesh, rng, 0.0, 1.0);
    const SparseOperator A = assemble_transport_matrix(mesh, u, 0.4, reaction, k);
    std::vector<double> ones(mesh.n_triangles(), 1.0);
    const std::vector<double> row_sum = A.apply(ones);
    const FieldP0 div = rt0_divergence(mesh, u);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      const double expected = 1.0 / k + reaction.values[t] + div.values[t];
      CHECK(row_sum[t] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("matrix equals the operator composition") {
    const FieldRT0 u = random_rt0(mesh, rng);
    FieldP0 reaction = random_p0(mesh, rng, 0.0, 1.0);
    const double D = 0.25;
    const SparseOperator A = assemble_transport_matrix(mesh, u, D, reaction, k);
    const FieldP0 c = random_p0(mesh, rng);
    const std::vector<double> Ac = A.apply(c.values);
    const FieldP0 lap = lap_h_apply(mesh, c);
    const FieldP0 upw = upwind_apply(mesh, u, c);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      const double expected = (1.0 / k + reaction.values[t]) * c.values[t] -
                              D * lap.values[t] + upw.values[t];
      CHECK(Ac[t] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("nonpositive time step is rejected") {
    try {
      assemble_transport_matrix(mesh, make_rt0(mesh), 0.1, make_p0(mesh), 0.0);
      FAIL("expected NonPositiveTimeStep");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::NonPositiveTimeStep);
    }
  }
}

TEST_CASE("pressure stiffness matrix") {
  const Mesh mesh = rhombus(3);
  const FieldP0 kappa = make_p0(mesh, 1.0);
  const SparseOperator S = assemble_pressure_matrix(mesh, kappa, 1e-8);
  SUBCASE("constants span the kernel") {
    std::vector<double> ones(mesh.n_edges(), 1.0);
    const std::vector<double> out = S.apply(ones);
    double scale = 0.0;
    for (double v : S.values()) scale = std::max(scale, std::abs(v));
    for (double v : out) CHECK(std::abs(v) <= 1e-12 * scale);
  }
  SUBCASE("matrix is symmetric") {
    double max_entry = 0.0;
    for (double v : S.values()) max_entry = std::max(max_entry, std::abs(v));
    for (std::size_t r = 0; r < S.rows(); ++r) {
      for (std::size_t i = S.row_ptr()[r]; i < S.row_ptr()[r + 1]; ++i) {
        const std::size_t c = S.col_idx()[i];
        double transposed = 0.0;
        for (std::size_t j = S.row_ptr()[c]; j < S.row_ptr()[c + 1]; ++j) {
          if (S.col_idx()[j] == r) transposed = S.values()[j];
        }
        CHECK(std::abs(S.values()[i] - transposed) <= 1e-13 * max_entry);
      }
    }
  }
  SUBCASE("mobility under the floor is rejected") {
    try {
      assemble_pressure_matrix(mesh, make_p0(mesh, 1e-12), 1e-8);
      FAIL("expected MobilityBelowFloor");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::MobilityBelowFloor);
    }
  }
  SUBCASE("load vector is compatible exactly when the source has zero mean") {
    Rng rng(41);
    const VectorFieldP0 f = random_vec_p0(mesh, rng);
    const FieldP0 s = random_p0(mesh, rng);
    const std::vector<double> rhs = pressure_rhs(mesh, f, s);
    double total = 0.0;
    for (double v : rhs) total += v;
    double s_integral = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      s_integral += mesh.triangles[t].area * s.values[t];
    }
    CHECK(total == doctest::Approx(s_integral).epsilon(1e-12));
  }
}

TEST_CASE("sparse export writes coordinate text") {
  namespace fs = std::filesystem;
  const Mesh mesh = generate_equilateral_mesh(1, 1, 1.0);
  const SparseOperator L = lap_h_matrix(mesh);
  const fs::path dir = fs::temp_directory_path() / "nct_sparse";
  fs::create_directories(dir);
  const std::string path = (dir / "matrix.txt").string();
  L.export_coordinate(path);
  std::ifstream in(path);
  std::size_t r, c;
  double v;
  std::size_t count = 0;
  double diag_sum = 0.0;
  while (in >> r >> c >> v) {
    ++count;
    if (r == c) diag_sum += v;
  }
  CHECK(count == L.values().size());
  // Two triangles, one interior edge: each diagonal entry is -tau/|K|.
  const Edge& edge = mesh.edges[mesh.interior_edges[0]];
  const double expected = -2.0 * edge.tau_sigma / mesh.triangles[0].area;
  CHECK(diag_sum == doctest::Approx(expected).epsilon(1e-12));
}
