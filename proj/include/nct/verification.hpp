#ifndef NCT_VERIFICATION_HPP
#define NCT_VERIFICATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nct/mms.hpp"
#include "nct/scheme.hpp"

namespace nct {

/// Observed convergence orders from per-level errors.
struct OrderEstimate {
  std::vector<double> pairwise;  // log(e_l/e_{l+1}) / log(h_l/h_{l+1})
  std::vector<bool> pair_saturated;
  double least_squares = 0.0;  // slope of log e against log h, saturated levels excluded
  /// Smallest pairwise order among non-saturated pairs (infinity when none).
  double worst_pair() const;
};

/// Throws NonPositiveError when an error is not positive. Errors at the
/// round-off floor are marked saturated and excluded from the fit.
OrderEstimate observed_order(const std::vector<double>& errors,
                             const std::vector<double>& hs);

struct ConvergenceLevel {
  int level = 0;
  double h = 0.0;
  double k = 0.0;
  std::size_t n_triangles = 0;
  int n_steps = 0;
  double e_c = 0.0;
  double e_theta = 0.0;
  double energy_c = 0.0;      // k * sum_n |proj e_c(t_n)|_h^2
  double energy_theta = 0.0;
  double combined = 0.0;      // sqrt(e_c^2 + e_theta^2 + energies)
  double e_grad_p = 0.0;
  double e_u = 0.0;
  double grad_combined = 0.0; // e_grad_p + e_u
};

struct ConvergenceReport {
  std::string case_name;
  std::vector<ConvergenceLevel> levels;
  OrderEstimate order_combined;
  OrderEstimate order_grad;

  std::string render_table() const;
  void write_csv(const std::string& path,
                 const std::string& header_comment = "") const;
};

/// Refine the case's base mesh `levels` times with k halved alongside h and
/// measure the errors of the full coupled scheme against the exact fields.
ConvergenceReport run_convergence(const MMSCase& mms_case, int levels,
                                  const SchemeConfig& config_template = {});

struct PropertyResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  bool larger_is_better = false;  // orders: measured >= threshold
  std::string detail;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<PropertyResult> results;
  bool all_passed() const;
  std::string render_text() const;
  void write_csv(const std::string& path) const;
};

/// Randomized checks of the discrete-operator identities, the upwind
/// positivity, measured Poincare constants, consistency orders of the
/// discrete Laplacian and upwind operators, interpolation orders, the
/// divergence identity and the maximum principle.
SuiteReport invariant_suite(std::uint64_t seed);

// Randomized field builders shared by the suite and the tests.
FieldP0 random_p0(const Mesh& mesh, class Rng& rng, double lo = -1.0, double hi = 1.0);
FieldP0 random_zero_mean_p0(const Mesh& mesh, class Rng& rng);
FieldP1NC random_p1nc(const Mesh& mesh, class Rng& rng);
VectorFieldP0 random_vec_p0(const Mesh& mesh, class Rng& rng);
/// Divergence-free member of the RT0 space from a random vertex stream
/// function vanishing on the boundary.
FieldRT0 random_divfree_rt0(const Mesh& mesh, class Rng& rng);

/// Randomized data satisfying the maximum-principle inequalities by
/// construction (zero-mean compatibility forces s = 0 and s_theta = 0; the
/// concentration source lies in [0, lambda]).
PhysicalData random_admissible_data(class Rng& rng);

}  // namespace nct

#endif
