#ifndef NCT_MMS_FORMS_HPP
#define NCT_MMS_FORMS_HPP

namespace nct {
namespace mms {

inline double value_of(double x) { return x; }

/// Compactly supported radial profile (1 - r^2/R^2)^4, zero outside the
/// disk. C^3 across the support boundary, so all fields built from it meet
/// the regularity the error analysis asks for while keeping every normal
/// derivative on the domain boundary exactly zero.
///
/// Type-generic form shared between production and tests: the production
/// closures instantiate it with double, and the test oracle differentiates
/// the same expressions with a Taylor-arithmetic scalar. Hand-derived
/// gradient/Laplacian closures live in mms.cpp and are cross-checked
/// against that automatic differentiation.
struct BumpSpec {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 1.0;
};

template <typename S>
S bump_profile(const BumpSpec& spec, const S& x, const S& y) {
  const S dx = x - spec.cx;
  const S dy = y - spec.cy;
  const S rho2 = (dx * dx + dy * dy) / (spec.radius * spec.radius);
  if (value_of(rho2) >= 1.0) return S(0.0);
  const S q = S(1.0) - rho2;
  const S q2 = q * q;
  return q2 * q2;
}

/// Linear-in-time modulation (1 + t/T)/2.
template <typename S>
S ramp_in_time(const S& t, double horizon) {
  return (S(1.0) + t / horizon) * 0.5;
}

}  // namespace mms
}  // namespace nct

#endif
