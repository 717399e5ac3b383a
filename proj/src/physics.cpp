#include "nct/physics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nct {

void DecayChain::validate() const {
  const std::size_t n = lambdas.size();
  if (branching.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "chain lambdas/branching sizes differ");
  }
  if (!retardation.empty()) {
    if (retardation.size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "chain retardation size");
    }
    for (double r : retardation) {
      if (r != 1.0) {
        throw Error(ErrorKind::InadmissibleData,
                    "retardation factors are fixed to 1 in this model");
      }
    }
  }
  if (n == 0) return;
  if (branching[0] != 0.0) {
    throw Error(ErrorKind::InadmissibleData, "first branching ratio must be 0");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0)) {
      throw Error(ErrorKind::InadmissibleData, "decay rates must be positive");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max(lambdas[i], lambdas[j]);
      if (std::abs(lambdas[i] - lambdas[j]) <= 1e-12 * scale) {
        throw Error(ErrorKind::DuplicateDecayRates,
                    "decay rates " + std::to_string(i) + " and " +
                        std::to_string(j) + " coincide");
      }
    }
  }
}

std::vector<std::vector<double>> bateman_matrix(const DecayChain& chain) {
  chain.validate();
  const std::size_t n = chain.n_species();
  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    T[i][i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      double prod = 1.0;
      for (std::size_t l = j; l < i; ++l) {
        prod *= chain.branching[l + 1] * chain.lambdas[l] /
                (chain.lambdas[l] - chain.lambdas[i]);
      }
      T[i][j] = prod;
    }
  }
  return T;
}

std::vector<double> bateman_forward(const DecayChain& chain,
                                    const std::vector<double>& a) {
  const auto T = bateman_matrix(chain);
  const std::size_t n = chain.n_species();
  if (a.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "bateman_forward input size");
  }
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += T[i][j] * a[j];
    c[i] = acc;
  }
  return c;
}

std::vector<double> bateman_inverse(const DecayChain& chain,
                                    const std::vector<double>& c) {
  const auto T = bateman_matrix(chain);
  const std::size_t n = chain.n_species();
  if (c.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "bateman_inverse input size");
  }
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = c[i];
    for (std::size_t j = 0; j < i; ++j) acc -= T[i][j] * a[j];
    a[i] = acc;  // unit diagonal
  }
  return a;
}

std::vector<std::vector<double>> chain_reaction_matrix(const DecayChain& chain) {
  const std::size_t n = chain.n_species();
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    M[i][i] = -chain.lambdas[i];
    if (i > 0) M[i][i - 1] = chain.branching[i] * chain.lambdas[i - 1];
  }
  return M;
}

double viscosity_mu(const ViscosityModel& model, double a, double theta) {
  if (!(theta > 0.0)) {
    throw Error(ErrorKind::NonPositiveTemperature,
                "viscosity needs theta > 0, got " + std::to_string(theta));
  }
  const double root = std::pow(model.mobility_ratio, 0.25);
  const double mixture = model.mu0 * std::pow(1.0 + (root - 1.0) * a, -4.0);
  return mixture * std::exp(1.0 / theta - 1.0 / model.theta_star);
}

KappaResult kappa_eval(const ViscosityModel& model, const PhysicalData& data,
                       const FieldP0& c, const FieldP0& theta) {
  KappaResult result;
  result.kappa.values.resize(c.values.size());
  const double theta_lo = 0.5 * data.theta_minus;
  const double theta_hi = 2.0 * data.theta_plus;
  for (std::size_t t = 0; t < c.values.size(); ++t) {
    double a = c.values[t];
    if (a < 0.0 || a > 1.0) {
      a = std::clamp(a, 0.0, 1.0);
      ++result.clamped_concentration;
    }
    double th = theta.values[t];
    if (th < theta_lo || th > theta_hi) {
      th = std::clamp(th, theta_lo, theta_hi);
      ++result.clamped_temperature;
    }
    double kappa = model.permeability / viscosity_mu(model, a, th);
    if (kappa < data.kappa_inf) {
      kappa = data.kappa_inf;
      ++result.floored;
    }
    result.kappa.values[t] = kappa;
  }
  return result;
}

ValidationReport validate_source_conditions(const PhysicalData& data,
                                            const Mesh& mesh) {
  const FieldP0 s = project_p0_mean(mesh, data.s);
  const FieldP0 s_c = project_p0_mean(mesh, data.s_c);
  const FieldP0 s_theta = project_p0_mean(mesh, data.s_theta);
  const FieldP0 c0 = project_p0_mean(mesh, data.c0);
  const FieldP0 theta0 = project_p0_mean(mesh, data.theta0);
  ValidationReport report;
  report.n_triangles = mesh.n_triangles();
  const double tol = 1e-12;
  const double theta_star = data.viscosity.theta_star;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    if (s_c.values[t] < -tol) ++report.violations_s_c_nonnegative;
    if (s_c.values[t] > 2.0 * s.values[t] + data.lambda + tol) {
      ++report.violations_s_c_upper;
    }
    if (2.0 * (data.theta_minus - theta_star) * s.values[t] + s_theta.values[t] >
        tol) {
      ++report.violations_theta_lower;
    }
    if (2.0 * (data.theta_plus - theta_star) * s.values[t] + s_theta.values[t] <
        -tol) {
      ++report.violations_theta_upper;
    }
    if (c0.values[t] < -tol || c0.values[t] > 1.0 + tol) {
      ++report.violations_initial_c;
    }
    if (theta0.values[t] < data.theta_minus - tol ||
        theta0.values[t] > data.theta_plus + tol) {
      ++report.violations_initial_theta;
    }
  }
  return report;
}

}  // namespace nct
