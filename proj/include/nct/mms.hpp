#ifndef NCT_MMS_HPP
#define NCT_MMS_HPP

#include <functional>
#include <string>

#include "nct/geometry.hpp"
#include "nct/mms_forms.hpp"
#include "nct/physics.hpp"

namespace nct {

/// A manufactured-solution problem: smooth exact fields compatible with the
/// no-flux boundary of the rhombus domain, and the sources that make them
/// satisfy the model equations exactly.
struct MMSCase {
  std::string name;
  PhysicalData data;  // closures filled from the exact fields at t = 0
  double horizon = 1.0;
  int base_rows = 4;
  int base_cols = 4;
  double domain_side = 1.0;  // rhombus of this side length, tiled per level

  std::function<double(const Vec2&, double)> c_exact;
  std::function<double(const Vec2&, double)> theta_exact;
  std::function<double(const Vec2&, double)> p_exact;
  std::function<Vec2(const Vec2&, double)> grad_c;
  std::function<Vec2(const Vec2&, double)> grad_theta;
  std::function<Vec2(const Vec2&, double)> grad_p;
  std::function<Vec2(const Vec2&)> u_exact;  // steady, divergence-free
  std::function<double(const Vec2&)> s;      // = div u
  std::function<double(const Vec2&, double)> s_c;
  std::function<double(const Vec2&, double)> s_theta;
  std::function<Vec2(const Vec2&, double)> f;

  // Profile parameters, exposed so tests can differentiate the same forms.
  mms::BumpSpec bump_c, bump_theta, bump_p, bump_psi;
  double amp_c = 0.0, amp_theta = 0.0, amp_p = 0.0, amp_psi = 0.0;
  double base_c = 0.0, base_theta = 0.0;
};

/// Known cases: "bump" (the default convergence case) and "constant"
/// (spatially constant fields; the scheme must reproduce it to round-off).
MMSCase build_mms_case(const std::string& name);
MMSCase build_mms_case(const std::string& name, const PhysicalData& data_template);

namespace mms {
/// Hand-derived closed forms of the profile and its derivatives; the value
/// agrees with bump_profile<double> and the derivatives are cross-checked
/// against automatic differentiation in the tests.
double bump(const BumpSpec& spec, const Vec2& x);
Vec2 bump_gradient(const BumpSpec& spec, const Vec2& x);
double bump_laplace(const BumpSpec& spec, const Vec2& x);
}  // namespace mms

}  // namespace nct

#endif
