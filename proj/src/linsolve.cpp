#include "nct/linsolve.hpp"

#include <algorithm>
#include <cmath>

#include "nct/error.hpp"

namespace nct {

namespace {

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_vec(const std::vector<double>& a) { return std::sqrt(dot_vec(a, a)); }

void remove_constant_component(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

std::size_t iteration_cap(const SolverConfig& config, std::size_t n) {
  return config.max_iterations != 0 ? config.max_iterations : 10 * n;
}

std::vector<double> jacobi_inverse(const SparseOperator& A) {
  std::vector<double> inv(A.rows(), 1.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double d = A.diagonal(i);
    inv[i] = std::abs(d) > 0.0 ? 1.0 / d : 1.0;
  }
  return inv;
}

SolveReport finish(const SparseOperator& A, const std::vector<double>& b,
                   const std::vector<double>& x, std::size_t iterations,
                   double rel_tol, double abs_tol, bool breakdown) {
  std::vector<double> r = A.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm_vec(b);
  const double nr = norm_vec(r);
  SolveReport report;
  report.iterations = iterations;
  report.relative_residual = nb > 0.0 ? nr / nb : nr;
  // A right-hand side at round-off level is converged in the absolute sense.
  report.converged =
      !breakdown && (report.relative_residual <= rel_tol || nr <= abs_tol);
  report.breakdown = breakdown;
  return report;
}

}  // namespace

SolveReport solve_spd(const SparseOperator& A, const std::vector<double>& b,
                      std::vector<double>& x, const SolverConfig& config) {
  const std::size_t n = A.rows();
  if (b.size() != n || A.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "solve_spd dimensions");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw Error(ErrorKind::SolverFailure, "non-finite rhs");
  }
  if (config.method == SolverMethod::Direct) {
    x = dense_solve(A, b);  // regular systems only; the small-size oracle
    return finish(A, b, x, 1, config.rel_tolerance, config.abs_tolerance, false);
  }
  x.assign(n, 0.0);
  std::vector<double> r = b;
  if (config.deflate_constants) remove_constant_component(r);

  const double nb = std::max(norm_vec(r), config.abs_tolerance);
  const std::vector<double> minv = jacobi_inverse(A);
  std::vector<double> z(n), p(n), Ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = minv[i] * r[i];
  if (config.deflate_constants) remove_constant_component(z);
  p = z;
  double rz = dot_vec(r, z);
  std::size_t it = 0;
  const std::size_t cap = iteration_cap(config, n);
  bool breakdown = false;
  while (it < cap && norm_vec(r) > config.rel_tolerance * nb &&
         norm_vec(r) > config.abs_tolerance) {
    A.apply(p, Ap);
    if (config.deflate_constants) remove_constant_component(Ap);
    const double pAp = dot_vec(p, Ap);
    if (!(std::abs(pAp) > 0.0)) {
      breakdown = true;
      break;
    }
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = minv[i] * r[i];
    if (config.deflate_constants) remove_constant_component(z);
    const double rz_next = dot_vec(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
  }
  if (config.deflate_constants) remove_constant_component(x);
  std::vector<double> rhs = b;
  if (config.deflate_constants) remove_constant_component(rhs);
  return finish(A, rhs, x, it, config.rel_tolerance, config.abs_tolerance, breakdown);
}

SolveReport solve_nonsymmetric(const SparseOperator& A,
                               const std::vector<double>& b,
                               std::vector<double>& x,
                               const SolverConfig& config) {
  const std::size_t n = A.rows();
  if (b.size() != n || A.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "solve_nonsymmetric dimensions");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw Error(ErrorKind::SolverFailure, "non-finite rhs");
  }
  if (config.method == SolverMethod::Direct) {
    x = dense_solve(A, b);
    return finish(A, b, x, 1, config.rel_tolerance, config.abs_tolerance, false);
  }
  x.assign(n, 0.0);
  std::vector<double> r = b;
  const double nb = std::max(norm_vec(b), config.abs_tolerance);
  const std::vector<double> minv = jacobi_inverse(A);
  const std::vector<double> r0 = r;
  std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  std::size_t it = 0;
  const std::size_t cap = iteration_cap(config, n);
  bool breakdown = false;
  while (it < cap && norm_vec(r) > config.rel_tolerance * nb &&
         norm_vec(r) > config.abs_tolerance) {
    const double rho_next = dot_vec(r0, r);
    if (!(std::abs(rho_next) > 0.0)) {
      breakdown = true;
      break;
    }
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_next / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) phat[i] = minv[i] * p[i];
    A.apply(phat, v);
    const double r0v = dot_vec(r0, v);
    if (!(std::abs(r0v) > 0.0)) {
      breakdown = true;
      break;
    }
    alpha = rho / r0v;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm_vec(s) <= config.abs_tolerance) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      r = s;
      ++it;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) shat[i] = minv[i] * s[i];
    A.apply(shat, t);
    const double tt = dot_vec(t, t);
    if (!(tt > 0.0)) {
      breakdown = true;
      break;
    }
    omega = dot_vec(t, s) / tt;
    if (!(std::abs(omega) > 0.0)) {
      breakdown = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    ++it;
  }
  return finish(A, b, x, it, config.rel_tolerance, config.abs_tolerance, breakdown);
}

std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                std::vector<double> b) {
  const std::size_t n = b.size();
  if (A.size() != n) throw Error(ErrorKind::DimensionMismatch, "dense_solve dimensions");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(A[i][k]) > std::abs(A[pivot][k])) pivot = i;
    }
    if (std::abs(A[pivot][k]) == 0.0) {
      throw Error(ErrorKind::SolverFailure, "dense_solve: singular matrix");
    }
    std::swap(A[k], A[pivot]);
    std::swap(b[k], b[pivot]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = A[i][k] / A[k][k];
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= A[ii][j] * x[j];
    x[ii] = acc / A[ii][ii];
  }
  return x;
}

std::vector<double> dense_solve(const SparseOperator& A,
                                const std::vector<double>& b) {
  const std::size_t n = A.rows();
  if (n > 512) {
    throw Error(ErrorKind::SolverFailure, "dense_solve oracle limited to n <= 512");
  }
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k) {
      dense[r][A.col_idx()[k]] = A.values()[k];
    }
  }
  return dense_solve(std::move(dense), b);
}

}  // namespace nct
