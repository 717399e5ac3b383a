#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nct/rng.hpp"
#include "nct/verification.hpp"

using namespace nct;

TEST_CASE("observed orders from exact ratios") {
  SUBCASE("halving errors with halving h gives order one") {
    const OrderEstimate est = observed_order({4.0, 2.0, 1.0}, {4.0, 2.0, 1.0});
    REQUIRE(est.pairwise.size() == 2);
    CHECK(est.pairwise[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(est.pairwise[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(est.least_squares == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("quartering errors gives order two") {
    const OrderEstimate est = observed_order({16.0, 4.0, 1.0}, {4.0, 2.0, 1.0});
    CHECK(est.least_squares == doctest::Approx(2.0).epsilon(1e-13));
  }
  SUBCASE("round-off floors are marked saturated") {
    const OrderEstimate est =
        observed_order({1e-3, 1e-6, 1e-15}, {4.0, 2.0, 1.0});
    REQUIRE(est.pair_saturated.size() == 2);
    CHECK_FALSE(est.pair_saturated[0]);
    CHECK(est.pair_saturated[1]);
  }
  SUBCASE("nonpositive errors are rejected") {
    try {
      observed_order({1.0, 0.0}, {2.0, 1.0});
      FAIL("expected NonPositiveError");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::NonPositiveError);
    }
  }
}

TEST_CASE("random divergence-free fields have vanishing flux sums") {
  const Mesh mesh = generate_equilateral_mesh(4, 4, 0.25);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const FieldRT0 v = random_divfree_rt0(mesh, rng);
    const FieldP0 div = rt0_divergence(mesh, v);
    for (double d : div.values) CHECK(std::abs(d) <= 1e-12);
    for (Index e : mesh.boundary_edges) CHECK(v.fluxes[e] == 0.0);
  }
}

TEST_CASE("randomized admissible data passes its own validator") {
  const Mesh mesh = generate_equilateral_mesh(4, 4, 0.25);
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const PhysicalData data = random_admissible_data(rng);
    const ValidationReport report = validate_source_conditions(data, mesh);
    CHECK(report.max_principle_guaranteed());
  }
}

TEST_CASE("constant manufactured case is reproduced to round-off") {
  const MMSCase mc = build_mms_case("constant");
  const ConvergenceReport report = run_convergence(mc, 2);
  REQUIRE(report.levels.size() == 2);
  for (const ConvergenceLevel& lvl : report.levels) {
    CHECK(lvl.combined <= 1e-7);
    CHECK(lvl.grad_combined <= 1e-9);
  }
}

TEST_CASE("convergence report renders a table and a csv") {
  const MMSCase mc = build_mms_case("constant");
  const ConvergenceReport report = run_convergence(mc, 2);
  const std::string table = report.render_table();
  CHECK(table.find("level") != std::string::npos);
  CHECK(table.find("constant") != std::string::npos);

  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "nct_convergence";
  fs::create_directories(dir);
  report.write_csv((dir / "report.csv").string());
  std::ifstream in(dir / "report.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("e_grad_p") != std::string::npos);
}

TEST_CASE("invariant suite passes and is deterministic") {
  const SuiteReport a = invariant_suite(2024);
  CHECK(a.all_passed());
  const SuiteReport b = invariant_suite(2024);
  REQUIRE(a.results.size() == b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].measured == b.results[i].measured);
    CHECK(a.results[i].pass == b.results[i].pass);
  }
  const std::string text = a.render_text();
  CHECK(text.find("adjointness") != std::string::npos);
  CHECK(text == b.render_text());
}
