#ifndef NCT_FIELDS_HPP
#define NCT_FIELDS_HPP

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nct/linsolve.hpp"
#include "nct/mesh.hpp"

namespace nct {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

/// One value per triangle.
struct FieldP0 {
  std::vector<double> values;
};

/// One 2-vector per triangle.
struct VectorFieldP0 {
  std::vector<Vec2> values;
};

/// Crouzeix-Raviart: one degree of freedom per edge, the value at the edge
/// midpoint.
struct FieldP1NC {
  std::vector<double> dofs;
};

/// Lowest-order Raviart-Thomas: one normal flux per edge, stored in the
/// edge's fixed K->L orientation. Boundary fluxes are identically zero.
struct FieldRT0 {
  std::vector<double> fluxes;
};

FieldP0 make_p0(const Mesh& mesh, double value = 0.0);
VectorFieldP0 make_vec_p0(const Mesh& mesh, Vec2 value = {});
FieldP1NC make_p1nc(const Mesh& mesh, double value = 0.0);
FieldRT0 make_rt0(const Mesh& mesh);

// -- projections and interpolations ----------------------------------------

/// Cell averages; quadrature exact for degree <= 4.
FieldP0 project_p0_mean(const Mesh& mesh, const ScalarFn& f);
VectorFieldP0 project_p0_mean(const Mesh& mesh, const VectorFn& f);

/// Circumcenter values.
FieldP0 project_p0_point(const Mesh& mesh, const ScalarFn& f);

/// Edge-mean interpolation: dof = (1/|s|) int_s q.
FieldP1NC interp_p1nc(const Mesh& mesh, const ScalarFn& q);

/// L2 projection onto the Crouzeix-Raviart space. The element mass matrix is
/// diagonal under the 3-midpoint rule, which is exact for these products.
FieldP1NC l2_project_p1nc(const Mesh& mesh, const ScalarFn& p);
FieldP1NC l2_project_p1nc(const Mesh& mesh, const FieldP0& p);
FieldP1NC l2_project_p1nc(const Mesh& mesh, const FieldP1NC& p);

/// Edge-mean normal fluxes; boundary fluxes forced to zero. When
/// boundary_violation is null and the input has a non-negligible boundary
/// normal trace, throws BoundaryFluxViolation; otherwise the largest
/// boundary |mean normal trace| is reported through the pointer.
FieldRT0 interp_rt0(const Mesh& mesh, const VectorFn& v,
                    double* boundary_violation = nullptr);

/// L2 projection onto RT0 (mass system solved by conjugate gradients).
FieldRT0 l2_project_rt0(const Mesh& mesh, const VectorFn& w,
                        const SolverConfig& config = {});
FieldRT0 l2_project_rt0(const Mesh& mesh, const VectorFieldP0& w,
                        const SolverConfig& config = {});
FieldRT0 l2_project_rt0(const Mesh& mesh, const FieldRT0& w,
                        const SolverConfig& config = {});

// -- norms and inner products ----------------------------------------------

double l2_inner(const Mesh& mesh, const FieldP0& p, const FieldP0& q);
double l2_norm(const Mesh& mesh, const FieldP0& q);
double l2_inner(const Mesh& mesh, const VectorFieldP0& p, const VectorFieldP0& q);
double l2_norm(const Mesh& mesh, const VectorFieldP0& q);
double l2_inner(const Mesh& mesh, const FieldP1NC& p, const FieldP1NC& q);
double l2_norm(const Mesh& mesh, const FieldP1NC& q);
double l2_inner(const Mesh& mesh, const FieldRT0& u, const FieldRT0& v);
double l2_norm(const Mesh& mesh, const FieldRT0& v);

double mean_value(const Mesh& mesh, const FieldP0& q);
double mean_value(const Mesh& mesh, const FieldP1NC& q);

/// Discrete H1 norm on P0: sqrt(sum over interior edges of tau * jump^2).
double h_norm(const Mesh& mesh, const FieldP0& q);
double h_inner(const Mesh& mesh, const FieldP0& p, const FieldP0& q);

/// Interior-edge jumps (edge id, q_L - q_K).
std::vector<std::pair<Index, double>> h_seminorm_pairs(const Mesh& mesh,
                                                       const FieldP0& q);

/// Discrete H^-1 norm: sup over P0 of (q,psi)/|psi|_h, attained by the Riesz
/// representative. Requires (q,1) = 0 up to 1e-10 * |Omega|^(1/2) * |q|.
double dual_norm_minus1h(const Mesh& mesh, const FieldP0& q,
                         const SolverConfig& config = {});

/// Broken H1 norm on the Crouzeix-Raviart space.
double broken_h1_norm(const Mesh& mesh, const FieldP1NC& q);

// -- pointwise evaluation ---------------------------------------------------

std::array<double, 3> barycentric(const Mesh& mesh, Index K, const Vec2& x);

double p1nc_evaluate(const Mesh& mesh, const FieldP1NC& q, Index K, const Vec2& x);
Vec2 p1nc_gradient(const Mesh& mesh, const FieldP1NC& q, Index K);
Vec2 rt0_evaluate(const Mesh& mesh, const FieldRT0& v, Index K, const Vec2& x);

/// Piecewise-constant divergence of an RT0 field.
FieldP0 rt0_divergence(const Mesh& mesh, const FieldRT0& v);

// -- serialization -----------------------------------------------------------

/// One `id,value` line per entity.
void save_values_csv(const std::string& path, const std::vector<double>& values);
std::vector<double> load_values_csv(const std::string& path);

}  // namespace nct

#endif
