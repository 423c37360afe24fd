#pragma once

#include <span>
#include <vector>

#include "shapehom/integrand.hpp"
#include "shapehom/mesh.hpp"
#include "shapehom/quadrature.hpp"
#include "shapehom/sparse.hpp"

namespace shapehom {

// Weighted integrand w_target*f_target + w_start*f_start. A convex
// homotopy evaluates with weights (t, 1-t); its t-derivative with (1, -1).
struct ObjectiveBlend {
  const Integrand* f_target = nullptr;
  const Integrand* f_start = nullptr;
  double w_target = 1.0;
  double w_start = 0.0;

  Jet2 eval(Vec2 p, int order) const {
    Jet2 j = f_target->eval(p, order) * w_target;
    if (f_start != nullptr && w_start != 0.0)
      j += f_start->eval(p, order) * w_start;
    return j;
  }
};

enum class BtauVariant { kLumped, kConsistent };

// J(Omega) = int_Omega f dx by element quadrature.
double objective_value(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                       const TriangleQuadrature& quad);

// First-derivative vector over the boundary vector basis (length 2*N_bdy):
// entry for (vertex k, component c) is int grad f . Phi + f div Phi dx with
// Phi the volume hat field of that boundary vertex component.
VecX assemble_gradient(const TriangleMesh& mesh, std::span<const int> bmap,
                       const ObjectiveBlend& blend,
                       const TriangleQuadrature& quad);

// Same linear form over all vertex dofs (length 2*N).
VecX assemble_gradient_full(const TriangleMesh& mesh,
                            const ObjectiveBlend& blend,
                            const TriangleQuadrature& quad);

// Symmetric second-derivative matrix over the boundary basis, assembled
// from the five-term volume form; exactly symmetric by construction.
SparseMatrix assemble_hessian(const TriangleMesh& mesh,
                              std::span<const int> bmap,
                              const ObjectiveBlend& blend,
                              const TriangleQuadrature& quad);

// k-th derivative of J under the joint perturbation id + sum_i s_i V_i,
// evaluated at s = 0. Exact closed form in 2D: the volume element
// det(I + sum s_i dV_i) is quadratic in s, so only cofactors of order
// <= 2 appear:
//   d^k J = int sum_{S, |S^c|<=2} grad^{|S|} f[(V_i)_{i in S}] c(S^c) dx,
//   c({}) = 1, c({i}) = div V_i, c({i,j}) = D2(dV_i, dV_j),
//   D2(A,B) = a11 b22 + a22 b11 - a12 b21 - a21 b12.
double shape_derivative_k(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                          std::span<const VolumeVectorField* const> fields,
                          const TriangleQuadrature& quad);

// One weighted summand of a derivative right-hand side: coeff times the
// (|fields|+1)-th derivative with the given fields fixed and the test
// function in the last slot.
struct RhsTerm {
  double coeff = 1.0;
  ObjectiveBlend blend;
  std::vector<const VolumeVectorField*> fields;
};

// Assembles sum of terms into a vector over the boundary basis; the test
// slot runs over boundary hat fields, so only elements touching the
// boundary contribute. All terms share one sweep over those elements.
VecX assemble_rhs_terms(const TriangleMesh& mesh, std::span<const int> bmap,
                        std::span<const RhsTerm> terms,
                        const TriangleQuadrature& quad);

VecX assemble_kth_rhs(const TriangleMesh& mesh, std::span<const int> bmap,
                      const ObjectiveBlend& blend,
                      std::span<const VolumeVectorField* const> fixed_fields,
                      const TriangleQuadrature& quad);

// Tangential-constraint matrix B of size (2*N_bdy) x N_bdy.
// Lumped: (B^T V)_k = omega_k V(x_k).tau_k with omega_k half the summed
// adjacent edge lengths, so B^T V = 0 is the pointwise condition
// V(x_k).tau(x_k) = 0. Consistent: edge-wise Gauss quadrature of
// int (Phi_i . tau) phi_k dS with tau interpolated between vertex frames.
SparseMatrix assemble_btau(const TriangleMesh& mesh, const BoundaryFrame& fr,
                           BtauVariant variant);

// P1 stiffness matrix of 2 mu eps(U):grad(W) + lambda div U div W over all
// vertex dofs (2N x 2N); piecewise-constant strains integrate exactly.
SparseMatrix assemble_elasticity(const TriangleMesh& mesh, double mu,
                                 double lambda);

// Boundary-basis matrix of delta_grad dU:dW + delta_mass U.W over the
// boundary element layer.
SparseMatrix assemble_h1_regularizer(const TriangleMesh& mesh,
                                     std::span<const int> bmap,
                                     double delta_grad, double delta_mass);

// Boundary-basis matrix of int_dOmega (U.tau)(W.tau) dS.
SparseMatrix assemble_tangential_mass(const TriangleMesh& mesh,
                                      std::span<const int> bmap,
                                      const BoundaryFrame& fr);

// Per-boundary-vertex normal component of an assembled gradient:
// r_k = g_{2k} n_1(x_k) + g_{2k+1} n_2(x_k).
VecX normal_residual_vector(const BoundaryFrame& fr, const VecX& gradient);

// Time derivatives d^m B / dt^m, m = 0..n_max, of the constraint matrix
// along the polynomial boundary path
//   x_k(t) = x_k + sum_i t^i / i! path[i-1](k).
// Entry functions (edge lengths, averaged tangents) are evaluated in
// univariate Taylor arithmetic; result[0] equals assemble_btau.
std::vector<Eigen::SparseMatrix<double>> btau_time_derivatives(
    const TriangleMesh& mesh,
    std::span<const BoundaryVectorField* const> path, BtauVariant variant,
    int n_max);

// State derivative of the constraint force: C = d(B(X) xi)/dX over the
// boundary displacement dofs, size (2 N_bdy)^2.
SparseMatrix assemble_btau_state_derivative(const TriangleMesh& mesh,
                                            BtauVariant variant,
                                            const VecX& xi);

// Entrywise sum of two finalized sparse matrices of equal shape.
SparseMatrix sparse_sum(const SparseMatrix& a, const SparseMatrix& b);

// Dirichlet extension of a boundary field into the mesh interior through
// the elasticity system; boundary values are matched exactly by row
// elimination. The factorization is reusable for one mesh.
class ElasticityExtension {
 public:
  ElasticityExtension(const TriangleMesh& mesh, double mu, double lambda);
  VolumeVectorField extend(const BoundaryVectorField& bf) const;

 private:
  const TriangleMesh& mesh_;
  std::vector<int> bmap_;
  std::vector<int> interior_index_;  // global dof -> compact interior index
  int n_interior_;
  Eigen::SparseMatrix<double> A_ib_;  // interior rows x boundary dofs (loop order)
  std::unique_ptr<SpdFactorization> chol_;
};

}  // namespace shapehom
