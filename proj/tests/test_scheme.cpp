#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nct/mms.hpp"
#include "nct/operators.hpp"
#include "nct/rng.hpp"
#include "nct/scheme.hpp"
#include "nct/verification.hpp"

using namespace nct;

namespace {

Mesh rhombus(int n) { return generate_equilateral_mesh(n, n, 1.0 / n); }

PhysicalData quiet_data() {
  PhysicalData data;
  data.D_c = 0.1;
  data.D_theta = 0.1;
  data.lambda = 0.0;
  data.theta_minus = 0.5;
  data.theta_plus = 2.0;
  data.kappa_inf = 1e-10;
  data.viscosity.theta_star = 1.0;
  data.c0 = [](const Vec2&) { return 0.5; };
  data.theta0 = [](const Vec2&) { return 1.0; };
  return data;
}

}  // namespace

TEST_CASE("initial state projects data and solves the initial flow") {
  const Mesh mesh = rhombus(3);
  SchemeConfig config;
  config.k = 0.1;
  config.N = 1;

  SUBCASE("constant initial concentration is reproduced exactly") {
    PhysicalData data = quiet_data();
    const SchemeState state = init_state(mesh, data, config);
    for (double v : state.c.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
    for (double v : state.theta.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("zero data yields zero pressure and velocity") {
    PhysicalData data = quiet_data();
    const SchemeState state = init_state(mesh, data, config);
    for (double v : state.p.dofs) CHECK(std::abs(v) <= 1e-12);
    for (double v : state.u.fluxes) CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("constant body force is balanced hydrostatically") {
    // With kappa constant the exact discrete solution is the affine pressure
    // kappa grad p = f, which leaves no flow.
    PhysicalData data = quiet_data();
    const Vec2 force{0.4, -0.2};
    data.f = [force](const Vec2&, double) { return force; };
    const SchemeState state = init_state(mesh, data, config);
    const double kappa =
        data.viscosity.permeability /
        viscosity_mu(data.viscosity, 0.5, 1.0);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      const Vec2 grad = p1nc_gradient(mesh, state.p, static_cast<Index>(t));
      CHECK(std::abs(kappa * grad.x - force.x) <= 1e-9);
      CHECK(std::abs(kappa * grad.y - force.y) <= 1e-9);
    }
    CHECK(l2_norm(mesh, state.u) <= 1e-9);
    CHECK(std::abs(mean_value(mesh, state.p)) <= 1e-12);
  }
}

TEST_CASE("a diagonal step divides by one plus k lambda") {
  const Mesh mesh = rhombus(2);
  PhysicalData data = quiet_data();
  data.lambda = 0.8;
  SchemeConfig config;
  config.k = 0.25;
  config.N = 1;
  const SchemeState s0 = init_state(mesh, data, config);
  const SchemeState s1 = step(s0, mesh, data, config);
  const double expected = 0.5 / (1.0 + config.k * data.lambda);
  for (double v : s1.c.values) CHECK(v == doctest::Approx(expected).epsilon(1e-11));
  for (double v : s1.theta.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("divergence residual vanishes for zero data and tracks sources") {
  const Mesh mesh = rhombus(4);
  SUBCASE("zero everything") {
    const FieldP0 r = div_residual(mesh, make_rt0(mesh), make_p0(mesh));
    for (double v : r.values) CHECK(v == 0.0);
  }
  SUBCASE("interpolated divergence-free fields") {
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
    const FieldP0 r = div_residual(mesh, v, make_p0(mesh));
    for (double val : r.values) CHECK(std::abs(val) <= 1e-11);
  }
}

TEST_CASE("balanced injection and production wells satisfy the divergence identity") {
  // Two opposite bumps placed symmetrically about the rhombus center give a
  // source with exactly zero mean on the centrally symmetric mesh.
  const Mesh mesh = rhombus(4);
  PhysicalData data = quiet_data();
  const mms::BumpSpec inj{0.6, 0.3, 0.2};
  const mms::BumpSpec prod{2.0 * 0.75 - 0.6, 2.0 * (std::sqrt(3.0) / 4.0) - 0.3, 0.2};
  data.s = [inj, prod](const Vec2& x) {
    return 2.0 * (mms::bump(inj, x) - mms::bump(prod, x));
  };
  data.s_c = [&data](const Vec2& x) { return std::max(0.0, data.s(x)); };
  data.lambda = 3.0;  // keeps s_c <= 2s + lambda where s < 0 is moderate
  data.f = [](const Vec2&, double) { return Vec2{0.3, 0.1}; };

  SchemeConfig config;
  config.k = 0.05;
  config.N = 3;
  const RunResult result = run(mesh, data, config);
  const FieldP0 s_h = project_p0_mean(mesh, data.s);
  CHECK(std::abs(mean_value(mesh, s_h)) <= 1e-13);
  const FieldP0 resid = div_residual(mesh, result.state.u, s_h);
  const double scale = div_residual_scale(mesh, result.state.u, s_h);
  for (double v : resid.values) {
    CHECK(std::abs(v) <= 10.0 * config.pressure_solver.rel_tolerance * scale);
  }
  // The run produced genuine flow.
  CHECK(l2_norm(mesh, result.state.u) > 1e-3);
}

TEST_CASE("runs expose bounded monitors and decay exactly with zero sources") {
  const Mesh mesh = rhombus(3);
  PhysicalData data = quiet_data();
  data.lambda = 0.6;
  SchemeConfig config;
  config.k = 0.1;
  config.N = 8;
  const RunResult result = run(mesh, data, config);
  REQUIRE(result.monitors.size() == static_cast<std::size_t>(config.N) + 1);
  double expected = 0.5;
  for (int n = 1; n <= config.N; ++n) {
    expected /= 1.0 + config.k * data.lambda;
    const MonitorRow& row = result.monitors[n];
    CHECK(row.c_min == doctest::Approx(expected).epsilon(1e-9));
    CHECK(row.c_max == doctest::Approx(expected).epsilon(1e-9));
    CHECK(row.div_residual_max <= 1e-12);
    CHECK(std::abs(row.p_mean) <= 1e-12);
    if (n > 1) {
      CHECK(row.energy_c >= result.monitors[n - 1].energy_c);
    }
  }
}

TEST_CASE("one giant implicit step completes without blowup") {
  const Mesh mesh = rhombus(3);
  Rng rng(77);
  const PhysicalData data = random_admissible_data(rng);
  SchemeConfig config;
  config.k = 50.0;  // no stability restriction on the step size
  config.N = 1;
  const RunResult result = run(mesh, data, config);
  for (double v : result.state.c.values) {
    CHECK(v >= -1e-9);
    CHECK(v <= 1.0 + 1e-9);
  }
  for (double v : result.state.theta.values) {
    CHECK(v >= data.theta_minus - 1e-9);
    CHECK(v <= data.theta_plus + 1e-9);
  }
}

TEST_CASE("steps preserve the input state on solver failure and name the step") {
  const Mesh mesh = rhombus(3);
  Rng rng(5);
  const PhysicalData data = random_admissible_data(rng);
  SchemeConfig config;
  config.k = 0.05;
  config.N = 3;
  config.transport_solver.max_iterations = 1;
  config.transport_solver.rel_tolerance = 1e-14;
  try {
    run(mesh, data, config);
    FAIL("expected SolverFailure");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::SolverFailure);
    CHECK(std::string(err.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("incompatible sources are rejected up front") {
  const Mesh mesh = rhombus(2);
  PhysicalData data = quiet_data();
  data.s = [](const Vec2&) { return 1.0; };  // nonzero mean
  SchemeConfig config;
  config.k = 0.1;
  config.N = 1;
  try {
    init_state(mesh, data, config);
    FAIL("expected InadmissibleData");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::InadmissibleData);
  }
}

TEST_CASE("runs are deterministic and checkpoints round-trip bit-exactly") {
  namespace fs = std::filesystem;
  const Mesh mesh = rhombus(3);
  Rng rng(101);
  const PhysicalData data = random_admissible_data(rng);
  SchemeConfig config;
  config.k = 0.05;
  config.N = 4;

  const RunResult a = run(mesh, data, config);
  const RunResult b = run(mesh, data, config);
  REQUIRE(a.monitors.size() == b.monitors.size());
  for (std::size_t i = 0; i < a.monitors.size(); ++i) {
    CHECK(a.monitors[i].c_l2 == b.monitors[i].c_l2);
    CHECK(a.monitors[i].u_l2 == b.monitors[i].u_l2);
    CHECK(a.monitors[i].div_residual_max == b.monitors[i].div_residual_max);
  }

  const fs::path dir = fs::temp_directory_path() / "nct_checkpoint";
  fs::remove_all(dir);
  write_checkpoint(dir.string(), a.state, "generator", "deadbeef");
  const SchemeState restored = read_checkpoint(dir.string(), mesh);
  CHECK(restored.step == a.state.step);
  CHECK(restored.time == a.state.time);
  for (std::size_t i = 0; i < a.state.c.values.size(); ++i) {
    CHECK(restored.c.values[i] == a.state.c.values[i]);
  }
  for (std::size_t i = 0; i < a.state.p.dofs.size(); ++i) {
    CHECK(restored.p.dofs[i] == a.state.p.dofs[i]);
  }
  for (std::size_t i = 0; i < a.state.u.fluxes.size(); ++i) {
    CHECK(restored.u.fluxes[i] == a.state.u.fluxes[i]);
  }
}

TEST_CASE("extra species ride along and stay decoupled") {
  const Mesh mesh = rhombus(3);
  PhysicalData data = quiet_data();
  data.lambda = 1.0;
  SchemeConfig config;
  config.k = 0.1;
  config.N = 3;
  SpeciesSpec spec;
  spec.lambda = 2.0;
  spec.c0 = [](const Vec2&) { return 0.25; };
  config.extra_species.push_back(spec);

  const RunResult result = run(mesh, data, config);
  REQUIRE(result.state.extra_species.size() == 1);
  double expected = 0.25;
  for (int n = 0; n < config.N; ++n) expected /= 1.0 + config.k * 2.0;
  for (double v : result.state.extra_species[0].values) {
    CHECK(v == doctest::Approx(expected).epsilon(1e-10));
  }
}
