#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nct/fields.hpp"
#include "nct/operators.hpp"
#include "nct/quadrature.hpp"
#include "nct/rng.hpp"
#include "nct/verification.hpp"

using namespace nct;

namespace {

const double kSqrt3 = std::sqrt(3.0);

Mesh rhombus(int n) { return generate_equilateral_mesh(n, n, 1.0 / n); }

/// Quadrature inner product of an analytic function against a CR field,
/// consistent with the rule used by the projections.
double inner_fn_p1nc(const Mesh& mesh, const ScalarFn& f, const FieldP1NC& q) {
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    acc += integrate_triangle(
        tri_quad_deg4(), mesh.vertices[tri.v[0]], mesh.vertices[tri.v[1]],
        mesh.vertices[tri.v[2]], [&](const Vec2& x) {
          return f(x) * p1nc_evaluate(mesh, q, static_cast<Index>(t), x);
        });
  }
  return acc;
}

double inner_fn_rt0(const Mesh& mesh, const VectorFn& w, const FieldRT0& v) {
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    acc += integrate_triangle(
        tri_quad_deg4(), mesh.vertices[tri.v[0]], mesh.vertices[tri.v[1]],
        mesh.vertices[tri.v[2]], [&](const Vec2& x) {
          return dot(w(x), rt0_evaluate(mesh, v, static_cast<Index>(t), x));
        });
  }
  return acc;
}

}  // namespace

TEST_CASE("cell-average projection reproduces constants and affine functions") {
  const Mesh mesh = rhombus(2);
  const FieldP0 ones = project_p0_mean(mesh, [](const Vec2&) { return 1.0; });
  for (double v : ones.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  const FieldP0 affine =
      project_p0_mean(mesh, [](const Vec2& x) { return 2.0 * x.x - 3.0 * x.y + 0.25; });
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Vec2 c = mesh.triangles[t].centroid;
    CHECK(affine.values[t] ==
          doctest::Approx(2.0 * c.x - 3.0 * c.y + 0.25).epsilon(1e-13));
  }
}

TEST_CASE("cell averages agree with an independent 7-point rule") {
  const Mesh mesh = generate_equilateral_mesh(1, 1, 1.0);
  const auto f = [](const Vec2& x) { return x.x * x.x; };
  const FieldP0 avg = project_p0_mean(mesh, f);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double oracle =
        integrate_triangle(tri_quad_deg5(), mesh.vertices[tri.v[0]],
                           mesh.vertices[tri.v[1]], mesh.vertices[tri.v[2]], f) /
        tri.area;
    CHECK(avg.values[t] == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("point projection evaluates at circumcenters") {
  const Mesh mesh = rhombus(2);
  const FieldP0 c7 = project_p0_point(mesh, [](const Vec2&) { return 7.0; });
  for (double v : c7.values) CHECK(v == 7.0);

  const auto affine = [](const Vec2& x) { return 1.5 * x.x + 0.5 * x.y - 2.0; };
  const FieldP0 pt = project_p0_point(mesh, affine);
  const FieldP0 mean = project_p0_mean(mesh, affine);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    CHECK(pt.values[t] == doctest::Approx(affine(tri.circumcenter)).epsilon(1e-13));
    const double gap = affine(tri.circumcenter) - affine(tri.centroid);
    CHECK(pt.values[t] - mean.values[t] == doctest::Approx(gap).epsilon(1e-12));
  }
}

TEST_CASE("edge-mean interpolation is exact for affine functions") {
  const Mesh mesh = rhombus(2);
  const auto affine = [](const Vec2& x) { return -0.75 * x.x + 2.0 * x.y + 1.0; };
  const FieldP1NC q = interp_p1nc(mesh, affine);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    CHECK(q.dofs[e] == doctest::Approx(affine(mesh.edges[e].midpoint)).epsilon(1e-13));
  }
  const FieldP1NC ones = interp_p1nc(mesh, [](const Vec2&) { return 1.0; });
  for (double v : ones.dofs) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("CR L2 projection preserves constants and is idempotent") {
  const Mesh mesh = rhombus(3);
  const FieldP1NC ones = l2_project_p1nc(mesh, [](const Vec2&) { return 1.0; });
  for (double v : ones.dofs) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));

  Rng rng(5);
  const FieldP1NC w = random_p1nc(mesh, rng);
  const FieldP1NC ww = l2_project_p1nc(mesh, w);
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    CHECK(ww.dofs[e] == doctest::Approx(w.dofs[e]).epsilon(1e-12));
  }
}

TEST_CASE("CR L2 projection is orthogonal in the assembly inner product") {
  const Mesh mesh = rhombus(3);
  const auto p = [](const Vec2& x) { return std::sin(2.0 * x.x) * std::cos(x.y); };
  const FieldP1NC proj = l2_project_p1nc(mesh, ScalarFn(p));
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldP1NC psi = random_p1nc(mesh, rng);
    const double lhs = inner_fn_p1nc(mesh, p, psi);
    const double rhs = l2_inner(mesh, proj, psi);
    const double scale =
        (std::abs(lhs) + std::abs(rhs) + l2_norm(mesh, psi)) + 1e-30;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
  }
}

TEST_CASE("RT0 interpolation takes edge-mean normal fluxes") {
  const Mesh mesh = rhombus(2);
  SUBCASE("constant fields give exact normal components") {
    const Vec2 w{0.3, -0.8};
    double violation = 0.0;
    const FieldRT0 v = interp_rt0(mesh, [w](const Vec2&) { return w; }, &violation);
    for (Index e : mesh.interior_edges) {
      CHECK(v.fluxes[e] ==
            doctest::Approx(dot(w, mesh.edges[e].normal)).epsilon(1e-13));
    }
    for (Index e : mesh.boundary_edges) CHECK(v.fluxes[e] == 0.0);
    CHECK(violation > 0.0);  // a constant field crosses the boundary
  }
  SUBCASE("nonzero boundary trace throws without an out-parameter") {
    try {
      interp_rt0(mesh, [](const Vec2&) { return Vec2{1.0, 0.0}; });
      FAIL("expected BoundaryFluxViolation");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::BoundaryFluxViolation);
    }
  }
  SUBCASE("divergence-free polynomial fields have zero flux sums") {
    // Stream function vanishing on the rhombus boundary: product of the four
    // side line functions. Cubic velocity, so the edge rule is exact.
    const auto v_fn = [](const Vec2& p) {
      const double A = p.y;
      const double B = std::sqrt(3.0) / 2.0 - p.y;
      const double C = std::sqrt(3.0) * p.x - p.y;
      const double D = p.y - std::sqrt(3.0) * p.x + std::sqrt(3.0);
      const double psi_x = A * B * std::sqrt(3.0) * (D - C);
      const double psi_y = B * C * D - A * C * D - A * B * D + A * B * C;
      return Vec2{5.0 * psi_y, -5.0 * psi_x};
    };
    double violation = 0.0;
    const FieldRT0 v = interp_rt0(mesh, v_fn, &violation);
    CHECK(violation <= 1e-13);  // the stream function pins the boundary
    const FieldP0 div = rt0_divergence(mesh, v);
    for (double d : div.values) CHECK(std::abs(d) <= 1e-12);
  }
}

TEST_CASE("RT0 L2 projection is a projector") {
  const Mesh mesh = rhombus(2);
  Rng rng(23);
  const FieldRT0 g = random_divfree_rt0(mesh, rng);
  const FieldRT0 gg = l2_project_rt0(mesh, g);
  double scale = 0.0;
  for (double f : g.fluxes) scale = std::max(scale, std::abs(f));
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    CHECK(std::abs(gg.fluxes[e] - g.fluxes[e]) <= 1e-9 * scale);
  }
}

TEST_CASE("RT0 L2 projection is orthogonal and stable") {
  const Mesh mesh = rhombus(3);
  // Quadratic components keep every integral within the rules' exactness.
  const auto w = [](const Vec2& x) {
    return Vec2{0.2 + x.x * x.y, -0.4 * x.x * x.x + x.y};
  };
  const FieldRT0 proj = l2_project_rt0(mesh, VectorFn(w));
  for (Index e : mesh.boundary_edges) CHECK(proj.fluxes[e] == 0.0);

  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldRT0 vh = random_divfree_rt0(mesh, rng);
    const double lhs = inner_fn_rt0(mesh, w, vh);
    const double rhs = l2_inner(mesh, proj, vh);
    const double scale = std::abs(lhs) + std::abs(rhs) + l2_norm(mesh, vh) + 1e-30;
    CHECK(std::abs(lhs - rhs) <= 1e-9 * scale);
  }

  double w_norm2 = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    w_norm2 += integrate_triangle(tri_quad_deg5(), mesh.vertices[tri.v[0]],
                                  mesh.vertices[tri.v[1]], mesh.vertices[tri.v[2]],
                                  [&](const Vec2& x) { return dot(w(x), w(x)); });
  }
  CHECK(l2_norm(mesh, proj) <= std::sqrt(w_norm2) * (1.0 + 1e-10));
}

TEST_CASE("discrete H1 norm on the two-triangle mesh") {
  const Mesh mesh = generate_equilateral_mesh(1, 1, 1.0);
  FieldP0 q = make_p0(mesh);
  q.values = {0.0, 1.0};
  // One interior edge with tau = sqrt(3) and jump 1.
  CHECK(h_norm(mesh, q) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-13));

  const FieldP0 c = make_p0(mesh, 4.2);
  CHECK(h_norm(mesh, c) == 0.0);

  const auto pairs = h_seminorm_pairs(mesh, q);
  REQUIRE(pairs.size() == 1);
  CHECK(std::abs(pairs[0].second) == doctest::Approx(1.0));
}

TEST_CASE("inner products square to norms") {
  const Mesh mesh = rhombus(2);
  Rng rng(3);
  const FieldP0 q = random_p0(mesh, rng);
  CHECK(l2_inner(mesh, q, q) ==
        doctest::Approx(l2_norm(mesh, q) * l2_norm(mesh, q)).epsilon(1e-14));
  const FieldP1NC w = random_p1nc(mesh, rng);
  CHECK(l2_inner(mesh, w, w) ==
        doctest::Approx(l2_norm(mesh, w) * l2_norm(mesh, w)).epsilon(1e-14));
}

TEST_CASE("dual norm behaves like the supremum it defines") {
  const Mesh mesh = rhombus(3);
  SUBCASE("zero field has zero dual norm") {
    CHECK(dual_norm_minus1h(mesh, make_p0(mesh)) == 0.0);
  }
  SUBCASE("nonzero mean is rejected") {
    try {
      dual_norm_minus1h(mesh, make_p0(mesh, 1.0));
      FAIL("expected NonZeroMean");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::NonZeroMean);
    }
  }
  SUBCASE("no test field beats the supremum") {
    Rng rng(41);
    const FieldP0 q = random_zero_mean_p0(mesh, rng);
    const double dual = dual_norm_minus1h(mesh, q);
    for (int trial = 0; trial < 50; ++trial) {
      const FieldP0 psi = random_zero_mean_p0(mesh, rng);
      const double ratio = l2_inner(mesh, q, psi) / h_norm(mesh, psi);
      CHECK(ratio <= dual * (1.0 + 1e-8));
    }
  }
  SUBCASE("Riesz identity: the norm of -lap w recovers |w|_h") {
    Rng rng(43);
    const FieldP0 w = random_zero_mean_p0(mesh, rng);
    FieldP0 q = lap_h_apply(mesh, w);
    for (double& v : q.values) v = -v;
    CHECK(dual_norm_minus1h(mesh, q) ==
          doctest::Approx(h_norm(mesh, w)).epsilon(1e-8));
  }
}

TEST_CASE("broken H1 norm of constants reduces to the L2 norm") {
  const Mesh mesh = rhombus(2);
  const FieldP1NC c = make_p1nc(mesh, 3.0);
  CHECK(broken_h1_norm(mesh, c) ==
        doctest::Approx(3.0 * std::sqrt(mesh.total_area())).epsilon(1e-13));
}

TEST_CASE("pointwise evaluators match hand-assembled bases") {
  const Mesh mesh =
      build_mesh({{0, 0}, {1, 0}, {0.5, kSqrt3 / 2}}, {{0, 1, 2}});
  SUBCASE("RT0 with equal fluxes vanishes at the centroid of an equilateral") {
    FieldRT0 v = make_rt0(mesh);
    for (double& f : v.fluxes) f = 0.7;
    const Triangle& tri = mesh.triangles[0];
    // Hand assembly: sum_j sign_j flux |s_j|/(2|K|) (x - P_j).
    Vec2 oracle{};
    for (int j = 0; j < 3; ++j) {
      const Edge& edge = mesh.edges[tri.e[j]];
      oracle += tri.sign[j] * 0.7 * (edge.length / (2.0 * tri.area)) *
                (tri.centroid - mesh.vertices[tri.v[j]]);
    }
    const Vec2 val = rt0_evaluate(mesh, v, 0, tri.centroid);
    CHECK(val.x == doctest::Approx(oracle.x).epsilon(1e-13));
    CHECK(val.y == doctest::Approx(oracle.y).epsilon(1e-13));
    CHECK(norm(oracle) <= 1e-13);  // symmetry cancels the sum exactly
  }
  SUBCASE("CR evaluation reproduces affine functions") {
    const auto affine = [](const Vec2& x) { return 0.3 * x.x - 1.1 * x.y + 2.0; };
    const FieldP1NC q = interp_p1nc(mesh, affine);
    const Vec2 probe{0.45, 0.2};
    CHECK(p1nc_evaluate(mesh, q, 0, probe) ==
          doctest::Approx(affine(probe)).epsilon(1e-13));
  }
  SUBCASE("points outside the triangle are rejected") {
    const FieldP1NC q = make_p1nc(mesh, 1.0);
    try {
      p1nc_evaluate(mesh, q, 0, {5.0, 5.0});
      FAIL("expected PointOutsideTriangle");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::PointOutsideTriangle);
    }
  }
}

TEST_CASE("value CSV round-trips exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nct_csv";
  fs::create_directories(dir);
  const std::string path = (dir / "field.csv").string();
  const std::vector<double> values{1.0, -0.25, 3.5e-17, 12345.6789,
                                   0.1 + 0.2};
  save_values_csv(path, values);
  const std::vector<double> loaded = load_values_csv(path);
  REQUIRE(loaded.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(loaded[i] == values[i]);
}
