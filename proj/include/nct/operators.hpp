#ifndef NCT_OPERATORS_HPP
#define NCT_OPERATORS_HPP

#include "nct/fields.hpp"
#include "nct/mesh.hpp"
#include "nct/sparse.hpp"

namespace nct {

/// Per-triangle gradient of a Crouzeix-Raviart function.
VectorFieldP0 grad_h(const Mesh& mesh, const FieldP1NC& q);

/// Discrete divergence, adjoint of grad_h: interior edges use the
/// two-triangle difference formula, boundary edges the one-triangle formula
/// with a negative sign.
FieldP1NC div_h(const Mesh& mesh, const VectorFieldP0& v);

/// Two-point-flux Laplacian over interior edges (homogeneous Neumann).
FieldP0 lap_h_apply(const Mesh& mesh, const FieldP0& q);
SparseOperator lap_h_matrix(const Mesh& mesh);

/// Upwind divergence of q v per triangle, interior edges only: the
/// transported value is taken from the triangle the flow leaves.
FieldP0 upwind_apply(const Mesh& mesh, const FieldRT0& v, const FieldP0& q);

/// Trilinear convection form; equals sum_K |K| q_K upwind_apply(v,p)|_K.
double b_h(const Mesh& mesh, const FieldRT0& v, const FieldP0& p, const FieldP0& q);

/// Implicit transport system for one backward-Euler step:
///   row K:
///     diag   1/k + reaction_K + (diffusion * sum tau + sum |s|(u.n)+)/|K|
///     off(L) -(diffusion * tau - |s|(u.n)-)/|K|
/// Off-diagonals are nonpositive for every u; rows are weakly diagonally
/// dominant when reaction >= 0 and div u >= 0.
SparseOperator assemble_transport_matrix(const Mesh& mesh, const FieldRT0& u,
                                         double diffusion,
                                         const FieldP0& reaction, double k);

/// Crouzeix-Raviart stiffness matrix with mobility kappa:
///   S_ab = sum_K kappa_K |K| grad phi_a . grad phi_b,
/// symmetric positive semidefinite with kernel = constants.
SparseOperator assemble_pressure_matrix(const Mesh& mesh, const FieldP0& kappa,
                                        double kappa_inf);

/// Load vector (f, grad phi_a) + (s, phi_a) for the pressure problem.
std::vector<double> pressure_rhs(const Mesh& mesh, const VectorFieldP0& f,
                                 const FieldP0& s);

}  // namespace nct

#endif
