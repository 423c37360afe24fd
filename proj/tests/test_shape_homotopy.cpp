#include <cmath>
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "shapehom/integrand.hpp"
#include "shapehom/partitions.hpp"
#include "shapehom/shape_homotopy.hpp"

using namespace shapehom;

namespace {

ShapeHomotopySpec quartic_spec(double h) {
  ShapeHomotopySpec spec;
  spec.f_target = std::make_shared<PEllipseIntegrand>(4, 2.0, 0.5, 4.0);
  spec.f_start = std::make_shared<DiskIntegrand>(1.0);
  spec.initial_mesh = generate_disk(1.0, h);
  spec.newton.iter_max = 10;
  return spec;
}

using State = ShapeHomotopyProblem::State;

// Tightly corrected state at parameter t_end, walked up by classical
// continuation with step halving on failure (the path leaves the start
// very fast, so a fixed stride cannot follow it).
State settled_state(const ShapeHomotopyProblem& prob, double t_end,
                    double tol) {
  State s{prob.spec().initial_mesh};
  auto c0 = prob.corrector(s, 0.0, tol);
  REQUIRE(c0.success);
  s = c0.state;
  double t = 0.0, dt = 0.01;
  while (t < t_end) {
    double step = std::min(dt, t_end - t);
    auto c = prob.corrector(s, t + step, tol);
    if (c.success) {
      s = c.state;
      t += step;
      dt *= 1.5;
    } else {
      dt *= 0.5;
      REQUIRE(dt > 1e-10);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("start level set gate accepts the matching disk and rejects others") {
  TriangleMesh m = generate_disk(1.0, 0.2);
  DiskIntegrand good(1.0), bad(1.7);
  auto [v1, b1] = start_levelset_mismatch(m, good);
  CHECK(v1 <= b1);
  auto [v2, b2] = start_levelset_mismatch(m, bad);
  CHECK(v2 > b2);
}

TEST_CASE("blend endpoints evaluate to the pure objectives exactly") {
  ShapeHomotopyProblem prob(quartic_spec(0.3));
  const TriangleMesh& m = prob.spec().initial_mesh;
  TriangleQuadrature quad = TriangleQuadrature::make(6);
  ObjectiveBlend start_only{prob.spec().f_start.get(), nullptr, 1.0, 0.0};
  ObjectiveBlend target_only{prob.spec().f_target.get(), nullptr, 1.0, 0.0};
  CHECK(objective_value(m, prob.blend_at(0.0), quad) ==
        objective_value(m, start_only, quad));
  CHECK(objective_value(m, prob.blend_at(1.0), quad) ==
        objective_value(m, target_only, quad));
}

TEST_CASE("degenerate homotopy has identically zero path derivatives") {
  ShapeHomotopySpec spec;
  auto f = std::make_shared<DiskIntegrand>(1.0);
  spec.f_target = f;
  spec.f_start = f;
  spec.initial_mesh = generate_disk(1.0, 0.25);
  ShapeHomotopyProblem prob(spec);
  State s{spec.initial_mesh};
  auto derivs = prob.path_derivatives(s, 0.3, 3, 2);
  for (const auto& d : derivs) CHECK(d.l2norm <= 1e-12);
}

TEST_CASE("corrector at t = 0 settles the initial disk in two iterations") {
  ShapeHomotopyProblem prob(quartic_spec(0.15));
  auto c = prob.corrector(State{prob.spec().initial_mesh}, 0.0, 1e-4);
  CHECK(c.success);
  CHECK(c.iterations <= 2);
}

TEST_CASE("infinite corrector tolerance succeeds with zero iterations") {
  ShapeHomotopyProblem prob(quartic_spec(0.3));
  auto c = prob.corrector(State{prob.spec().initial_mesh}, 0.0,
                          std::numeric_limits<double>::infinity());
  CHECK(c.success);
  CHECK(c.iterations == 0);
}

TEST_CASE("partition-rule right-hand sides match the written-out systems") {
  ShapeHomotopyProblem prob(quartic_spec(0.25));
  State s = settled_state(prob, 0.4, 1e-10);
  double t = 0.4;
  auto derivs = prob.path_derivatives(s, t, 3, 3);

  TriangleQuadrature quad = TriangleQuadrature::make(6);
  auto bmap = boundary_index_map(s.mesh);
  for (int n : {1, 2, 3}) {
    // Reassemble the partition-rule right-hand side for order n.
    std::vector<RhsTerm> terms;
    for (const auto& shape : partition_shapes(n)) {
      if (shape.parts.size() == 1) continue;
      RhsTerm term;
      term.coeff = -shape.count;
      term.blend = prob.blend_at(t);
      for (int p : shape.parts) term.fields.push_back(&derivs[p - 1].vol);
      terms.push_back(term);
    }
    for (const auto& shape : partition_shapes(n - 1)) {
      RhsTerm term;
      term.coeff = -static_cast<double>(n) * shape.count;
      term.blend = prob.blend_rate();
      for (int p : shape.parts) term.fields.push_back(&derivs[p - 1].vol);
      terms.push_back(term);
    }
    VecX generic = assemble_rhs_terms(s.mesh, bmap, terms, quad);
    VecX hand = prob.rhs_low_order(s, t, n, derivs);
    double scale = hand.cwiseAbs().maxCoeff() + 1e-30;
    CHECK((generic - hand).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("first-order system matches the corrected-path difference") {
  // Correcting from a fixed state at parameters t0 +- delta moves the
  // shape by the linearized response, i.e. the constrained solve of
  // d2H[w, .] = -dD[.]; the difference quotient of the corrected shapes
  // recovers it.
  ShapeHomotopyProblem prob(quartic_spec(0.3));
  double t0 = 0.0;
  State s = settled_state(prob, t0, 1e-12);

  TriangleQuadrature quad = TriangleQuadrature::make(6);
  BoundaryFrame fr = boundary_frames(s.mesh);
  auto bmap = boundary_index_map(s.mesh);
  SparseMatrix A = assemble_hessian(s.mesh, bmap, prob.blend_at(t0), quad);
  SparseMatrix B = assemble_btau(s.mesh, fr, BtauVariant::kLumped);
  VecX rhs(3 * s.mesh.n_bdy());
  rhs << -assemble_gradient(s.mesh, bmap, prob.blend_rate(), quad),
      VecX::Zero(s.mesh.n_bdy());
  auto [w1, xi1] = solve_saddle(A, B, rhs);
  BoundaryVectorField omega1(s.mesh.n_bdy());
  for (int i = 0; i < w1.size(); ++i) omega1.coeffs[i] = w1[i];
  double omega1_norm = boundary_l2_norm(s.mesh, omega1);

  auto path_position = [&](double t) {
    auto c = prob.corrector(s, t, 1e-12);
    REQUIRE(c.success);
    return c.state;
  };
  auto err_for = [&](double delta) {
    State plus = path_position(t0 + delta);
    State minus = path_position(t0 - delta);
    BoundaryVectorField diff(s.mesh.n_bdy());
    for (int k = 0; k < s.mesh.n_bdy(); ++k) {
      int v = s.mesh.boundary_loop[k];
      Vec2 fdk = (1.0 / (2.0 * delta)) *
                 (plus.mesh.vertices[v] - minus.mesh.vertices[v]);
      diff.set(k, fdk - omega1.at(k));
    }
    return boundary_l2_norm(s.mesh, diff);
  };
  double e1 = err_for(2e-4), e2 = err_for(1e-4);
  CHECK(oracles::observed_order(e1, e2) >= 1.5);
  CHECK(e2 <= 0.05 * omega1_norm);

  // The engine's first path derivative carries an additional constraint
  // drift correction; it stays within a few percent of the linearized
  // response here.
  auto derivs = prob.path_derivatives(s, t0, 1, 1);
  BoundaryVectorField gap(s.mesh.n_bdy());
  for (int k = 0; k < s.mesh.n_bdy(); ++k)
    gap.set(k, derivs[0].bdy.at(k) - omega1.at(k));
  CHECK(boundary_l2_norm(s.mesh, gap) <= 0.05 * omega1_norm);
}

TEST_CASE("path derivatives satisfy the tangential constraint") {
  ShapeHomotopyProblem prob(quartic_spec(0.25));
  State s = settled_state(prob, 0.3, 1e-10);
  BoundaryFrame fr = boundary_frames(s.mesh);
  auto derivs = prob.path_derivatives(s, 0.3, 3, 2);
  for (const auto& d : derivs) {
    double max_v = 0.0, max_t = 0.0;
    for (int k = 0; k < s.mesh.n_bdy(); ++k) {
      max_v = std::max(max_v, norm(d.bdy.at(k)));
      max_t = std::max(max_t, std::abs(dot(d.bdy.at(k), fr.tangent[k])));
    }
    CHECK(max_t <= 1e-12 * max_v);
  }
}

TEST_CASE("derivative prefixes are bitwise identical across requested orders") {
  ShapeHomotopyProblem prob(quartic_spec(0.25));
  State s = settled_state(prob, 0.2, 1e-10);
  auto d2 = prob.path_derivatives(s, 0.2, 2, 1);
  auto d4 = prob.path_derivatives(s, 0.2, 4, 3);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(d2[i].bdy.coeffs.size() == d4[i].bdy.coeffs.size());
    for (size_t j = 0; j < d2[i].bdy.coeffs.size(); ++j)
      CHECK(d2[i].bdy.coeffs[j] == d4[i].bdy.coeffs[j]);
  }
}

TEST_CASE("predictor application: empty and zero-weight lists are identities") {
  ShapeHomotopyProblem prob(quartic_spec(0.3));
  State s{prob.spec().initial_mesh};
  auto p0 = prob.apply_predictor(s, {});
  CHECK(p0.state.mesh.vertices[3].x == s.mesh.vertices[3].x);
  auto derivs = prob.path_derivatives(s, 0.0, 1, 1);
  std::vector<std::pair<const ShapeHomotopyProblem::Derivative*, double>> w = {
      {&derivs[0], 0.0}};
  auto p1 = prob.apply_predictor(s, w);
  CHECK(p1.state.mesh.vertices[3].x == s.mesh.vertices[3].x);
  CHECK(p1.state.mesh.vertices[3].y == s.mesh.vertices[3].y);
}

TEST_CASE("shape predictor error scales at order q+1 in the step") {
  ShapeHomotopyProblem prob(quartic_spec(0.3));
  double t0 = 0.5;
  State s = settled_state(prob, t0, 1e-12);
  auto derivs = prob.path_derivatives(s, t0, 3, 3);
  for (int q : {1, 2}) {
    std::vector<double> dts = {0.02, 0.04, 0.08};
    std::vector<double> errs;
    for (double dt : dts) {
      std::vector<std::pair<const ShapeHomotopyProblem::Derivative*, double>>
          weighted;
      double w = 1.0;
      for (int i = 0; i < q; ++i) {
        w *= dt / (i + 1);
        weighted.emplace_back(&derivs[i], w);
      }
      auto pred = prob.apply_predictor(s, weighted);
      REQUIRE(pred.ok);
      auto ref = prob.corrector(pred.state, t0 + dt, 1e-13);
      REQUIRE(ref.success);
      errs.push_back(prob.distance(pred.state, ref.state));
    }
    double slope = oracles::loglog_slope(dts, errs);
    CHECK(slope >= q + 1 - 0.4);
    CHECK(slope <= q + 1 + 0.4);
  }
}

TEST_CASE("full continuation run on a coarse quartic target") {
  ShapeHomotopySpec spec = quartic_spec(0.2);
  ShapeHomotopyProblem prob(spec);
  EngineOptions opt;
  opt.order = 2;
  opt.strategy = FixedStep{1.0, 0.5, 1.75};
  opt.ramp = {1e-4, 1e-10};
  auto run = run_homotopy(prob, opt, State{spec.initial_mesh});
  REQUIRE(run.reached_end);
  CHECK(run.trace.visited() <= 200);

  // Final boundary sits on the target level set.
  const TriangleMesh& mesh = run.state.mesh;
  double h = mesh_h(mesh);
  double max_val = 0.0, max_grad = 0.0;
  for (int k : mesh.boundary_loop) {
    max_val = std::max(max_val, std::abs(spec.f_target->value(mesh.vertices[k])));
    max_grad = std::max(max_grad, norm(spec.f_target->gradient(mesh.vertices[k])));
  }
  CHECK(max_val <= 2.0 * h * max_grad);

  // A higher-order predictor reduces the corrector's burden on most steps:
  // compare first-iteration residuals against an order-0 restart.
  int better = 0, total = 0;
  double t = 0.0;
  State s{spec.initial_mesh};
  s = prob.corrector(s, 0.0, opt.ramp(0.0)).state;
  for (const auto& rec : run.trace.records) {
    if (!rec.accepted) continue;
    auto derivs = prob.path_derivatives(s, t, 2, 1);
    std::vector<std::pair<const ShapeHomotopyProblem::Derivative*, double>>
        weighted = {{&derivs[0], rec.dt}, {&derivs[1], rec.dt * rec.dt / 2.0}};
    auto pred = prob.apply_predictor(s, weighted);
    NewtonConfig one_iter = spec.newton;
    one_iter.iter_max = 1;
    one_iter.tol = 1e-30;
    one_iter.mu = spec.mu;
    one_iter.lambda = spec.lambda;
    ObjectiveBlend blend{spec.f_target.get(), spec.f_start.get(), rec.t_target,
                         1.0 - rec.t_target};
    auto [mp, rp] = newton_solve(pred.ok ? pred.state.mesh : s.mesh, blend,
                                 one_iter);
    auto [m0, r0] = newton_solve(s.mesh, blend, one_iter);
    if (!rp.update_norms.empty() && !r0.update_norms.empty()) {
      ++total;
      if (rp.update_norms.front() <= r0.update_norms.front()) ++better;
    }
    auto c = prob.corrector(pred.ok ? pred.state : s, rec.t_target,
                            opt.ramp(rec.t_target));
    REQUIRE(c.success);
    s = c.state;
    t = rec.t_target;
  }
  REQUIRE(total > 0);
  CHECK(better >= (8 * total) / 10);
}
