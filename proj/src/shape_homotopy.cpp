#include "shapehom/shape_homotopy.hpp"

#include <cmath>

#include "shapehom/errors.hpp"
#include "shapehom/partitions.hpp"

namespace shapehom {

std::pair<double, double> start_levelset_mismatch(const TriangleMesh& mesh,
                                                  const Integrand& f_start) {
  double max_val = 0.0, max_grad = 0.0;
  for (int k = 0; k < mesh.n_bdy(); ++k) {
    Vec2 x = mesh.vertices[mesh.boundary_loop[k]];
    max_val = std::max(max_val, std::abs(f_start.value(x)));
    max_grad = std::max(max_grad, norm(f_start.gradient(x)));
  }
  return {max_val, 2.0 * mesh_h(mesh) * max_grad};
}

CorrectorOutcome<ShapeHomotopyProblem::State> ShapeHomotopyProblem::corrector(
    const State& s, double t, double tol) const {
  NewtonConfig cfg = spec_.newton;
  cfg.tol = tol;
  cfg.mu = spec_.mu;
  cfg.lambda = spec_.lambda;
  cfg.quad_degree = spec_.quad_degree;
  auto [mesh, rep] = newton_solve(s.mesh, blend_at(t), cfg);
  CorrectorOutcome<State> out;
  out.state = State{std::move(mesh)};
  out.success = rep.success;
  out.iterations = rep.iterations;
  out.residual = rep.update_norms.empty() ? 0.0 : rep.update_norms.back();
  out.message = rep.message;
  return out;
}

std::vector<ShapeHomotopyProblem::Derivative>
ShapeHomotopyProblem::path_derivatives(const State& s, double t, int n_max,
                                       int n_extend) const {
  const TriangleMesh& mesh = s.mesh;
  const int nb = mesh.n_bdy();
  TriangleQuadrature quad = TriangleQuadrature::make(spec_.quad_degree);
  BoundaryFrame fr = boundary_frames(mesh);
  auto bmap = boundary_index_map(mesh);

  SparseMatrix A = assemble_hessian(mesh, bmap, blend_at(t), quad);
  SparseMatrix B = assemble_btau(mesh, fr, spec_.newton.btau);

  // Multiplier of the tangential constraint at the (stationary) state:
  // g + B xi0 = 0 up to the corrector tolerance.
  VecX xi0;
  {
    VecX g = assemble_gradient(mesh, bmap, blend_at(t), quad);
    VecX rhs0(3 * nb);
    rhs0 << -g, VecX::Zero(nb);
    auto [v0, x0] = SaddleFactorization(A, B).solve(rhs0);
    xi0 = x0;
  }

  // The solution path (x(t), xi(t)) satisfies g(x,t) + B(x) xi = 0, so its
  // derivatives see the state dependence of the constraint matrix: the
  // system matrix gains C = d(B xi0)/dx and the order-n right-hand side
  // collects the lower-order terms of d^n/dt^n [B(x(t)) xi(t)].
  SparseMatrix C = assemble_btau_state_derivative(mesh, spec_.newton.btau, xi0);
  SaddleFactorization kkt(sparse_sum(A, C), B);
  ElasticityExtension ext(mesh, spec_.mu, spec_.lambda);

  std::vector<Derivative> derivs;
  std::vector<VecX> xis = {xi0};
  std::vector<const BoundaryVectorField*> path;
  derivs.reserve(n_max);
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
  };
  for (int n = 1; n <= n_max; ++n) {
    std::vector<RhsTerm> terms;
    for (const auto& shape : partition_shapes(n)) {
      int blocks = static_cast<int>(shape.parts.size());
      if (blocks == 1) continue;  // the unknown, moved to the left-hand side
      RhsTerm term;
      term.coeff = -shape.count;
      term.blend = blend_at(t);
      for (int p : shape.parts) term.fields.push_back(&derivs[p - 1].vol);
      terms.push_back(std::move(term));
    }
    for (const auto& shape : partition_shapes(n - 1)) {
      RhsTerm term;
      term.coeff = -static_cast<double>(n) * shape.count;
      term.blend = blend_rate();
      for (int p : shape.parts) term.fields.push_back(&derivs[p - 1].vol);
      terms.push_back(std::move(term));
    }
    VecX rhs_v = assemble_rhs_terms(mesh, bmap, terms, quad);
    if (n >= 2) {
      // Leibniz terms of d^n (B xi) with known entries; the parts carrying
      // the order-n unknowns sit in the matrix blocks (C and B).
      auto dB = btau_time_derivatives(mesh, path, spec_.newton.btau, n);
      for (int m = 1; m <= n; ++m)
        rhs_v -= binom(n, m) * (dB[m] * xis[n - m]);
    }
    VecX rhs(3 * nb);
    rhs << rhs_v, VecX::Zero(nb);
    auto [V, xi] = kkt.solve(rhs);
    xis.push_back(xi);

    Derivative d;
    d.bdy = BoundaryVectorField(nb);
    for (int i = 0; i < V.size(); ++i) d.bdy.coeffs[i] = V[i];
    d.l2norm = boundary_l2_norm(mesh, d.bdy);
    if (n <= n_extend) {
      d.vol = ext.extend(d.bdy);
      d.extended = true;
    }
    derivs.push_back(std::move(d));
    path.push_back(&derivs.back().bdy);
  }

#ifndef NDEBUG
  // Self-check: the second-derivative right-hand side with a fixed field
  // from the boundary-hat span is the matrix-vector product with it.
  if (!derivs.empty()) {
    VolumeVectorField span_field = to_volume(mesh, derivs[0].bdy);
    const VolumeVectorField* f0 = &span_field;
    VecX rhs2 = assemble_kth_rhs(
        mesh, bmap, blend_at(t),
        std::span<const VolumeVectorField* const>(&f0, 1), quad);
    VecX coeffs = Eigen::Map<const VecX>(derivs[0].bdy.coeffs.data(), 2 * nb);
    VecX av = A.eigen() * coeffs;
    assert((rhs2 - av).norm() <= 1e-9 * (av.norm() + 1.0));
  }
#endif
  return derivs;
}

VecX ShapeHomotopyProblem::rhs_low_order(
    const State& s, double t, int n,
    std::span<const Derivative> lower) const {
  const TriangleMesh& mesh = s.mesh;
  TriangleQuadrature quad = TriangleQuadrature::make(spec_.quad_degree);
  auto bmap = boundary_index_map(mesh);
  ObjectiveBlend H = blend_at(t);
  ObjectiveBlend D = blend_rate();

  std::vector<RhsTerm> terms;
  if (n == 1) {
    // d2H[x', .] = -dD[.]
    terms.push_back({-1.0, D, {}});
  } else if (n == 2) {
    // d2H[x'', .] = -d3H[x',x',.] - 2 d2D[x',.]
    terms.push_back({-1.0, H, {&lower[0].vol}});
    terms.back().fields.push_back(&lower[0].vol);
    terms.push_back({-2.0, D, {&lower[0].vol}});
  } else if (n == 3) {
    // d2H[x''',.] = -d4H[x',x',x',.] - 3 d3D[x',x',.]
    //               - 3 d3H[x'',x',.] - 3 d2D[x'',.]
    terms.push_back(
        {-1.0, H, {&lower[0].vol, &lower[0].vol, &lower[0].vol}});
    terms.push_back({-3.0, D, {&lower[0].vol, &lower[0].vol}});
    terms.push_back({-3.0, H, {&lower[1].vol, &lower[0].vol}});
    terms.push_back({-3.0, D, {&lower[1].vol}});
  } else {
    throw ConfigError("rhs_low_order: only n <= 3 is written out");
  }
  return assemble_rhs_terms(mesh, bmap, terms, quad);
}

PredictOutcome<ShapeHomotopyProblem::State>
ShapeHomotopyProblem::apply_predictor(
    const State& s,
    const std::vector<std::pair<const Derivative*, double>>& weighted) const {
  if (weighted.empty()) return {s, true};
  BoundaryVectorField sum(s.mesh.n_bdy());
  for (const auto& [d, w] : weighted)
    for (size_t i = 0; i < sum.coeffs.size(); ++i)
      sum.coeffs[i] += w * d->bdy.coeffs[i];
  ElasticityExtension ext(s.mesh, spec_.mu, spec_.lambda);
  VolumeVectorField vhat = ext.extend(sum);
  TriangleMesh predicted = deform(s.mesh, vhat);
  if (is_tangled(predicted)) return {s, false};
  return {State{std::move(predicted)}, true};
}

double ShapeHomotopyProblem::distance(const State& a, const State& b) const {
  BoundaryVectorField diff(a.mesh.n_bdy());
  for (int k = 0; k < a.mesh.n_bdy(); ++k)
    diff.set(k, b.mesh.vertices[b.mesh.boundary_loop[k]] -
                    a.mesh.vertices[a.mesh.boundary_loop[k]]);
  return boundary_l2_norm(a.mesh, diff);
}

double stationarity_residual(const TriangleMesh& mesh,
                             const ObjectiveBlend& blend, BtauVariant btau,
                             int quad_degree) {
  TriangleQuadrature quad = TriangleQuadrature::make(quad_degree);
  BoundaryFrame fr = boundary_frames(mesh);
  auto bmap = boundary_index_map(mesh);
  VecX g = assemble_gradient(mesh, bmap, blend, quad);
  SparseMatrix A = assemble_hessian(mesh, bmap, blend, quad);
  SparseMatrix B = assemble_btau(mesh, fr, btau);
  VecX rhs(3 * mesh.n_bdy());
  rhs << -g, VecX::Zero(mesh.n_bdy());
  auto [V, xi] = solve_saddle(A, B, rhs);
  BoundaryVectorField v(mesh.n_bdy());
  for (int i = 0; i < V.size(); ++i) v.coeffs[i] = V[i];
  return boundary_l2_norm(mesh, v);
}

}  // namespace shapehom
