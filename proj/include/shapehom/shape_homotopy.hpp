#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "shapehom/assembly.hpp"
#include "shapehom/homotopy.hpp"
#include "shapehom/mesh.hpp"
#include "shapehom/newton.hpp"

namespace shapehom {

// Problem setup for the convex shape homotopy
//   H(Omega, t) = t J_target(Omega) + (1-t) J_start(Omega),
// where J_start is built from a level-set integrand of the initial mesh.
struct ShapeHomotopySpec {
  std::shared_ptr<const Integrand> f_target;
  std::shared_ptr<const Integrand> f_start;
  TriangleMesh initial_mesh;
  double mu = 1.0;
  double lambda = 0.0;
  NewtonConfig newton;  // template; tol is overridden by the engine's ramp
  int quad_degree = 6;
};

// Checks max_k |f_start(x_k)| <= 2 h max_k |grad f_start(x_k)| over the
// boundary vertices; returns the two sides of the inequality.
std::pair<double, double> start_levelset_mismatch(const TriangleMesh& mesh,
                                                  const Integrand& f_start);

// Continuation problem over meshes. Path derivatives are boundary vector
// fields solving the corrector's saddle system with right-hand sides from
// the set-partition rule; the chain-rule blocks enter as elasticity
// extensions of the lower-order derivatives. The predictor extends the
// weighted sum once and deforms.
class ShapeHomotopyProblem {
 public:
  struct State {
    TriangleMesh mesh;
  };
  struct Derivative {
    BoundaryVectorField bdy;
    VolumeVectorField vol;  // empty when not extended (highest order)
    double l2norm = 0.0;
    bool extended = false;
  };

  explicit ShapeHomotopyProblem(ShapeHomotopySpec spec)
      : spec_(std::move(spec)) {}

  const ShapeHomotopySpec& spec() const { return spec_; }

  ObjectiveBlend blend_at(double t) const {
    return {spec_.f_target.get(), spec_.f_start.get(), t, 1.0 - t};
  }
  ObjectiveBlend blend_rate() const {
    return {spec_.f_target.get(), spec_.f_start.get(), 1.0, -1.0};
  }

  CorrectorOutcome<State> corrector(const State& s, double t,
                                    double tol) const;

  std::vector<Derivative> path_derivatives(const State& s, double t, int n_max,
                                           int n_extend) const;

  // Hand-coded right-hand sides of the order 1/2/3 systems, for
  // cross-checking the partition enumerator.
  VecX rhs_low_order(const State& s, double t, int n,
                     std::span<const Derivative> lower) const;

  PredictOutcome<State> apply_predictor(
      const State& s,
      const std::vector<std::pair<const Derivative*, double>>& weighted) const;

  double derivative_norm(const Derivative& d) const { return d.l2norm; }
  double distance(const State& a, const State& b) const;

 private:
  ShapeHomotopySpec spec_;
};

// One extra corrector-style solve at (mesh, blend): assembles the saddle
// system and returns ||V||_{L2(boundary)} of its solution. Used to
// re-verify stationarity of emitted designs.
double stationarity_residual(const TriangleMesh& mesh,
                             const ObjectiveBlend& blend,
                             BtauVariant btau = BtauVariant::kLumped,
                             int quad_degree = 6);

}  // namespace shapehom
