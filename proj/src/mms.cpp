#include "nct/mms.hpp"

#include <cmath>

namespace nct {

namespace mms {

double bump(const BumpSpec& spec, const Vec2& x) {
  return bump_profile<double>(spec, x.x, x.y);
}

Vec2 bump_gradient(const BumpSpec& b, const Vec2& x) {
  const double R2 = b.radius * b.radius;
  const Vec2 d{x.x - b.cx, x.y - b.cy};
  const double rho2 = dot(d, d) / R2;
  if (rho2 >= 1.0) return {};
  const double q = 1.0 - rho2;
  return (-8.0 * q * q * q / R2) * d;
}

double bump_laplace(const BumpSpec& b, const Vec2& x) {
  const double R2 = b.radius * b.radius;
  const Vec2 d{x.x - b.cx, x.y - b.cy};
  const double r2 = dot(d, d);
  const double rho2 = r2 / R2;
  if (rho2 >= 1.0) return 0.0;
  const double q = 1.0 - rho2;
  return -16.0 * q * q * q / R2 + 48.0 * r2 * q * q / (R2 * R2);
}

}  // namespace mms

namespace {

using mms::BumpSpec;

double bump_value(const BumpSpec& b, const Vec2& x) { return mms::bump(b, x); }
Vec2 bump_grad(const BumpSpec& b, const Vec2& x) { return mms::bump_gradient(b, x); }
double bump_laplacian(const BumpSpec& b, const Vec2& x) { return mms::bump_laplace(b, x); }

double ramp(double t, double horizon) { return mms::ramp_in_time<double>(t, horizon); }

double ramp_dt(double horizon) { return 0.5 / horizon; }

MMSCase build_bump_case(PhysicalData data) {
  MMSCase mc;
  mc.name = "bump";
  mc.horizon = 0.5;
  mc.base_rows = 4;
  mc.base_cols = 4;
  mc.domain_side = 1.0;

  // Rhombus (0,0)-(1,0)-(1.5,sqrt3/2)-(0.5,sqrt3/2); center (0.75, sqrt3/4),
  // inradius sqrt3/4 ~ 0.433. All supports stay strictly inside, so the
  // no-flux conditions hold identically on the boundary.
  const double cx = 0.75;
  const double cy = std::sqrt(3.0) / 4.0;
  const BumpSpec bc{cx + 0.02, cy + 0.01, 0.38};
  const BumpSpec bth{cx - 0.02, cy + 0.015, 0.38};
  const BumpSpec bp{cx, cy - 0.01, 0.38};
  const BumpSpec bpsi{cx + 0.01, cy - 0.015, 0.38};
  const double Ac = 0.2, Ath = 0.3, Ap = 1.0, Apsi = 0.1;
  const double c_base = 0.5;
  const double th_base = data.viscosity.theta_star;
  const double T = mc.horizon;

  mc.bump_c = bc;
  mc.bump_theta = bth;
  mc.bump_p = bp;
  mc.bump_psi = bpsi;
  mc.amp_c = Ac;
  mc.amp_theta = Ath;
  mc.amp_p = Ap;
  mc.amp_psi = Apsi;
  mc.base_c = c_base;
  mc.base_theta = th_base;

  auto velocity = [bpsi, Apsi](const Vec2& x) {
    const Vec2 g = Apsi * bump_grad(bpsi, x);
    return Vec2{g.y, -g.x};  // u = (d_y psi, -d_x psi)
  };

  mc.c_exact = [bc, Ac, c_base, T](const Vec2& x, double t) {
    return c_base + Ac * bump_value(bc, x) * ramp(t, T);
  };
  mc.theta_exact = [bth, Ath, th_base, T](const Vec2& x, double t) {
    return th_base + Ath * bump_value(bth, x) * ramp(t, T);
  };
  mc.p_exact = [bp, Ap, T](const Vec2& x, double t) {
    return Ap * bump_value(bp, x) * ramp(t, T);
  };
  mc.grad_c = [bc, Ac, T](const Vec2& x, double t) {
    return (Ac * ramp(t, T)) * bump_grad(bc, x);
  };
  mc.grad_theta = [bth, Ath, T](const Vec2& x, double t) {
    return (Ath * ramp(t, T)) * bump_grad(bth, x);
  };
  mc.grad_p = [bp, Ap, T](const Vec2& x, double t) {
    return (Ap * ramp(t, T)) * bump_grad(bp, x);
  };
  mc.u_exact = velocity;
  mc.s = [](const Vec2&) { return 0.0; };

  const double D_c = data.D_c;
  const double D_theta = data.D_theta;
  const double lambda = data.lambda;
  const ViscosityModel visc = data.viscosity;

  // u is divergence-free and s = 0, so div(c u) = u . grad c in both
  // transport equations.
  mc.s_c = [bc, Ac, c_base, T, D_c, lambda, velocity](const Vec2& x, double t) {
    const double g = ramp(t, T);
    const double B = bump_value(bc, x);
    const double dt_c = Ac * B * ramp_dt(T);
    const Vec2 grad = (Ac * g) * bump_grad(bc, x);
    const double lap = Ac * g * bump_laplacian(bc, x);
    const double value = c_base + Ac * B * g;
    return dt_c + dot(velocity(x), grad) - D_c * lap + lambda * value;
  };
  mc.s_theta = [bth, Ath, T, D_theta, velocity](const Vec2& x, double t) {
    const double g = ramp(t, T);
    const double dt_theta = Ath * bump_value(bth, x) * ramp_dt(T);
    const Vec2 grad = (Ath * g) * bump_grad(bth, x);
    const double lap = Ath * g * bump_laplacian(bth, x);
    return -(dt_theta + dot(velocity(x), grad) - D_theta * lap);
  };
  mc.f = [bc, bth, bp, Ac, Ath, Ap, c_base, th_base, T, visc,
          velocity](const Vec2& x, double t) {
    const double g = ramp(t, T);
    const double cval = c_base + Ac * bump_value(bc, x) * g;
    const double thval = th_base + Ath * bump_value(bth, x) * g;
    const double kappa = visc.permeability / viscosity_mu(visc, cval, thval);
    const Vec2 gp = (Ap * g) * bump_grad(bp, x);
    return velocity(x) + kappa * gp;
  };

  data.c0 = [fn = mc.c_exact](const Vec2& x) { return fn(x, 0.0); };
  data.theta0 = [fn = mc.theta_exact](const Vec2& x) { return fn(x, 0.0); };
  data.f = mc.f;
  data.s = mc.s;
  data.s_c = [fn = mc.s_c](const Vec2& x) { return fn(x, 0.0); };
  data.s_theta = [fn = mc.s_theta](const Vec2& x) { return fn(x, 0.0); };
  mc.data = std::move(data);
  return mc;
}

MMSCase build_constant_case(PhysicalData data) {
  MMSCase mc;
  mc.name = "constant";
  mc.horizon = 0.5;
  const double c0 = 0.5;
  const double theta0 = data.viscosity.theta_star;
  const double lambda = data.lambda;
  mc.c_exact = [c0](const Vec2&, double) { return c0; };
  mc.theta_exact = [theta0](const Vec2&, double) { return theta0; };
  mc.p_exact = [](const Vec2&, double) { return 0.0; };
  mc.grad_c = [](const Vec2&, double) { return Vec2{}; };
  mc.grad_theta = [](const Vec2&, double) { return Vec2{}; };
  mc.grad_p = [](const Vec2&, double) { return Vec2{}; };
  mc.u_exact = [](const Vec2&) { return Vec2{}; };
  mc.s = [](const Vec2&) { return 0.0; };
  mc.s_c = [c0, lambda](const Vec2&, double) { return lambda * c0; };
  mc.s_theta = [](const Vec2&, double) { return 0.0; };
  mc.f = [](const Vec2&, double) { return Vec2{}; };
  mc.base_c = c0;
  mc.base_theta = theta0;

  data.c0 = [c0](const Vec2&) { return c0; };
  data.theta0 = [theta0](const Vec2&) { return theta0; };
  data.f = mc.f;
  data.s = mc.s;
  data.s_c = [fn = mc.s_c](const Vec2& x) { return fn(x, 0.0); };
  data.s_theta = [](const Vec2&) { return 0.0; };
  mc.data = std::move(data);
  return mc;
}

PhysicalData default_mms_data() {
  PhysicalData data;
  data.D_c = 0.1;
  data.D_theta = 0.1;
  data.lambda = 0.3;
  data.theta_minus = 0.5;
  data.theta_plus = 2.0;
  data.kappa_inf = 1e-8;
  data.viscosity.mu0 = 1.0;
  data.viscosity.mobility_ratio = 2.0;
  data.viscosity.theta_star = 1.0;
  data.viscosity.permeability = 1.0;
  return data;
}

}  // namespace

MMSCase build_mms_case(const std::string& name, const PhysicalData& data_template) {
  if (name == "bump") return build_bump_case(data_template);
  if (name == "constant") return build_constant_case(data_template);
  throw Error(ErrorKind::UnknownCase, "no manufactured case named '" + name + "'");
}

MMSCase build_mms_case(const std::string& name) {
  return build_mms_case(name, default_mms_data());
}

}  // namespace nct
