#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shapehom/assembly.hpp"
#include "shapehom/mesh.hpp"

namespace shapehom {

enum class NewtonMethod {
  kUnregularized,
  kH1Regularized,
  kTangentialRegularized,
  kGradientDescent,
};

struct NewtonConfig {
  double tol = 1e-10;  // L2(boundary) threshold on the update field
  int iter_max = 10;
  double divergence_factor = 10.0;
  NewtonMethod method = NewtonMethod::kUnregularized;
  double delta1a = 0.5;  // H1 regularization, gradient part
  double delta1b = 0.5;  // H1 regularization, mass part
  double delta2 = 250.0;  // tangential regularization weight
  double mu = 1.0;
  double lambda = 0.0;
  BtauVariant btau = BtauVariant::kLumped;
  int quad_degree = 6;
  // Gradient descent line search.
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double max_step_fraction = 0.1;  // initial step: max displacement <= frac*h
};

enum class NewtonFailure {
  kNone,
  kIterMax,
  kDivergence,
  kMeshTangled,
  kSolver,
  kDomain,
};

struct NewtonReport {
  int iterations = 0;
  bool success = false;
  NewtonFailure failure = NewtonFailure::kNone;
  std::string message;
  std::vector<double> update_norms;      // ||V||_{L2(boundary)} per iteration
  std::vector<double> normal_residuals;  // ||dJ(n)||_{l2} per iteration
  std::vector<double> objective_values;  // gradient descent only
};

// Stationary-point solve for the blended objective. Each iteration
// assembles the derivative system for the configured method, solves for
// the boundary update V, extends it through the elasticity system,
// deforms the mesh, and stops once ||V||_{L2(boundary)} < tol (the update
// is applied before the check). A non-finite update, an update norm
// exceeding divergence_factor times the first one, a tangled mesh, a
// solver breakdown, or an integrand domain violation abort with the
// corresponding failure code and the last valid mesh.
std::pair<TriangleMesh, NewtonReport> newton_solve(const TriangleMesh& mesh,
                                                   const ObjectiveBlend& blend,
                                                   const NewtonConfig& cfg);

// l2 norm of the gradient's normal components at boundary vertices.
double normal_residual(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                       int quad_degree = 6);

}  // namespace shapehom
