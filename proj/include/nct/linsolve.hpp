#ifndef NCT_LINSOLVE_HPP
#define NCT_LINSOLVE_HPP

#include <cstddef>
#include <vector>

#include "nct/sparse.hpp"

namespace nct {

enum class SolverMethod { SymmetricIterative, NonsymmetricIterative, Direct };

struct SolverConfig {
  double rel_tolerance = 1e-10;
  double abs_tolerance = 1e-14;
  std::size_t max_iterations = 0;  // 0 means 10 * n
  SolverMethod method = SolverMethod::SymmetricIterative;
  /// Orthogonalize right-hand side and iterates against the constant vector
  /// (singular Neumann-type systems whose kernel is the constants).
  bool deflate_constants = false;
};

struct SolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // recomputed as |Ax-b|/|b|, never the iterate estimate
  bool converged = false;
  bool breakdown = false;
};

/// Preconditioned conjugate gradients (Jacobi). With deflate_constants the
/// solve runs on the orthogonal complement of the constant vector and the
/// returned iterate has zero component along it.
SolveReport solve_spd(const SparseOperator& A, const std::vector<double>& b,
                      std::vector<double>& x, const SolverConfig& config = {});

/// BiCGStab with Jacobi preconditioning.
SolveReport solve_nonsymmetric(const SparseOperator& A,
                               const std::vector<double>& b,
                               std::vector<double>& x,
                               const SolverConfig& config = {});

/// Dense LU with partial pivoting; the small-system oracle (n <= 512).
std::vector<double> dense_solve(const SparseOperator& A,
                                const std::vector<double>& b);
std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                std::vector<double> b);

}  // namespace nct

#endif
