#ifndef NCT_PHYSICS_HPP
#define NCT_PHYSICS_HPP

#include <cstddef>
#include <vector>

#include "nct/fields.hpp"
#include "nct/mesh.hpp"

namespace nct {

/// Serial first-order decay chain. The lower-triangular change of variables
/// built from it decouples the chain into independent scalar equations.
struct DecayChain {
  std::vector<double> lambdas;     // decay rates, pairwise distinct
  std::vector<double> branching;   // y_i, with y_1 = 0
  std::vector<double> retardation; // kept for documentation; fixed to 1

  std::size_t n_species() const { return lambdas.size(); }
  void validate() const;
};

/// Koval mixture viscosity with Arrhenius-type temperature factor.
struct ViscosityModel {
  double mu0 = 1.0;            // viscosity of the pure resident fluid
  double mobility_ratio = 1.0; // M = mu(0)/mu(1)
  double theta_star = 1.0;     // reference temperature
  double permeability = 1.0;   // isotropic K
};

struct PhysicalData {
  double D_c = 1.0;
  double D_theta = 1.0;
  double lambda = 0.0;
  double theta_minus = 0.5;
  double theta_plus = 2.0;
  double kappa_inf = 1e-8;
  ViscosityModel viscosity;

  ScalarFn s = [](const Vec2&) { return 0.0; };
  ScalarFn s_c = [](const Vec2&) { return 0.0; };
  ScalarFn s_theta = [](const Vec2&) { return 0.0; };
  /// Body force; time enters only through the scheme's per-step evaluation.
  std::function<Vec2(const Vec2&, double)> f =
      [](const Vec2&, double) { return Vec2{}; };
  ScalarFn c0 = [](const Vec2&) { return 0.0; };
  ScalarFn theta0 = [](const Vec2&) { return 1.0; };
};

/// Lower-triangular unit-diagonal transform matrix (dense, row-major).
std::vector<std::vector<double>> bateman_matrix(const DecayChain& chain);

/// Transformed concentrations c = T a. The same map sends physical sources
/// s_i to the decoupled sources.
std::vector<double> bateman_forward(const DecayChain& chain,
                                    const std::vector<double>& a);

/// Physical concentrations a = T^{-1} c by forward substitution.
std::vector<double> bateman_inverse(const DecayChain& chain,
                                    const std::vector<double>& c);

/// Reaction matrix of the coupled chain (decay + filiation), row-major:
/// M[i][i] = -lambda_i, M[i][i-1] = y_i lambda_{i-1}.
std::vector<std::vector<double>> chain_reaction_matrix(const DecayChain& chain);

double viscosity_mu(const ViscosityModel& model, double a, double theta);

struct KappaResult {
  FieldP0 kappa;
  std::size_t clamped_concentration = 0;
  std::size_t clamped_temperature = 0;
  std::size_t floored = 0;
};

/// Per-triangle mobility kappa = K / mu(c, theta). Concentration is clamped
/// to [0,1] and temperature to [theta_-/2, 2 theta_+] before evaluating mu
/// (manufactured-solution runs may leave the physical box); the result is
/// floored at kappa_inf.
KappaResult kappa_eval(const ViscosityModel& model, const PhysicalData& data,
                       const FieldP0& c, const FieldP0& theta);

struct ValidationReport {
  std::size_t n_triangles = 0;
  std::size_t violations_s_c_nonnegative = 0;
  std::size_t violations_s_c_upper = 0;      // s_c <= 2 s + lambda
  std::size_t violations_theta_lower = 0;    // 2 (theta_- - theta_*) s + s_theta <= 0
  std::size_t violations_theta_upper = 0;    // 2 (theta_+ - theta_*) s + s_theta >= 0
  std::size_t violations_initial_c = 0;      // cell averages of c0 in [0,1]
  std::size_t violations_initial_theta = 0;  // cell averages of theta0 in [th-,th+]
  bool max_principle_guaranteed() const {
    return violations_s_c_nonnegative == 0 && violations_s_c_upper == 0 &&
           violations_theta_lower == 0 && violations_theta_upper == 0 &&
           violations_initial_c == 0 && violations_initial_theta == 0;
  }
};

/// Checks the data inequalities behind the discrete maximum principle,
/// per triangle on the cell-averaged sources. Reporting only; callers decide
/// whether to proceed.
ValidationReport validate_source_conditions(const PhysicalData& data,
                                            const Mesh& mesh);

}  // namespace nct

#endif
