#include "shapehom/newton.hpp"

#include <cmath>
#include <limits>

#include "shapehom/errors.hpp"

namespace shapehom {

namespace {

bool field_finite(const VecX& v) { return v.allFinite(); }

BoundaryVectorField from_vecx(const VecX& v) {
  BoundaryVectorField bf(static_cast<int>(v.size()) / 2);
  for (int i = 0; i < v.size(); ++i) bf.coeffs[i] = v[i];
  return bf;
}

double max_displacement(const VolumeVectorField& f) {
  double mx = 0.0;
  for (int i = 0; i < f.n_vertices(); ++i) mx = std::max(mx, norm(f.at(i)));
  return mx;
}

std::pair<TriangleMesh, NewtonReport> gradient_descent(
    const TriangleMesh& mesh0, const ObjectiveBlend& blend,
    const NewtonConfig& cfg) {
  TriangleMesh mesh = mesh0;
  NewtonReport rep;
  TriangleQuadrature quad = TriangleQuadrature::make(cfg.quad_degree);
  const double h = mesh_h(mesh0);

  // Elasticity-type metric with a unit mass term so rigid motions are not
  // in the kernel of the descent system.
  for (int j = 0; j < cfg.iter_max; ++j) {
    rep.iterations = j + 1;
    try {
      BoundaryFrame fr = boundary_frames(mesh);
      auto bmap = boundary_index_map(mesh);
      VecX g_bdy = assemble_gradient(mesh, bmap, blend, quad);
      rep.normal_residuals.push_back(
          normal_residual_vector(fr, g_bdy).norm());

      SparseMatrix b_form = assemble_elasticity(mesh, cfg.mu, cfg.lambda);
      {
        // add P1 vector mass
        for (int e = 0; e < mesh.n_triangles(); ++e) {
          const auto& t = mesh.triangles[e];
          Vec2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]],
               p2 = mesh.vertices[t[2]];
          double area = 0.5 * cross(p1 - p0, p2 - p0);
          for (int a = 0; a < 3; ++a)
            for (int bb = 0; bb < 3; ++bb) {
              double m = (a == bb) ? area / 6.0 : area / 12.0;
              for (int c = 0; c < 2; ++c)
                b_form.add(2 * t[a] + c, 2 * t[bb] + c, m);
            }
        }
        b_form.finalize();
      }
      VecX g_full = assemble_gradient_full(mesh, blend, quad);
      VecX dir = solve_spd(b_form, -g_full);
      if (!field_finite(dir)) {
        rep.failure = NewtonFailure::kDivergence;
        rep.message = "non-finite descent direction";
        return {mesh, rep};
      }
      VolumeVectorField vdir(mesh.n_vertices());
      for (int i = 0; i < 2 * mesh.n_vertices(); ++i) vdir.coeffs[i] = dir[i];
      // The stopping test uses the solve output, not the backtracked step;
      // otherwise a collapsing line search would masquerade as convergence.
      double dir_norm = boundary_l2_norm(mesh, boundary_trace(mesh, vdir));
      rep.update_norms.push_back(dir_norm);

      double slope = g_full.dot(dir);  // negative by construction
      double j0 = objective_value(mesh, blend, quad);
      rep.objective_values.push_back(j0);
      double maxdisp = max_displacement(vdir);
      double s = (maxdisp > 0.0)
                     ? std::min(1.0, cfg.max_step_fraction * h / maxdisp)
                     : 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        VolumeVectorField step(mesh.n_vertices());
        for (int i = 0; i < 2 * mesh.n_vertices(); ++i)
          step.coeffs[i] = s * dir[i];
        TriangleMesh trial = deform(mesh, step);
        if (!is_tangled(trial)) {
          double jt;
          bool domain_ok = true;
          try {
            jt = objective_value(trial, blend, quad);
          } catch (const DomainError&) {
            domain_ok = false;
            jt = std::numeric_limits<double>::infinity();
          }
          if (domain_ok && jt <= j0 + cfg.armijo_c * s * slope) {
            mesh = trial;
            accepted = true;
            break;
          }
        }
        s *= cfg.backtrack_factor;
      }
      if (!accepted) {
        rep.failure = NewtonFailure::kDivergence;
        rep.message = "line search failed";
        return {mesh, rep};
      }
      if (dir_norm < cfg.tol) {
        rep.success = true;
        return {mesh, rep};
      }
    } catch (const DomainError& e) {
      rep.failure = NewtonFailure::kDomain;
      rep.message = e.what();
      return {mesh, rep};
    } catch (const SolverError& e) {
      rep.failure = NewtonFailure::kSolver;
      rep.message = e.what();
      return {mesh, rep};
    }
  }
  rep.failure = NewtonFailure::kIterMax;
  return {mesh, rep};
}

}  // namespace

std::pair<TriangleMesh, NewtonReport> newton_solve(const TriangleMesh& mesh0,
                                                   const ObjectiveBlend& blend,
                                                   const NewtonConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.iter_max < 1 || !(cfg.divergence_factor > 1.0))
    throw ConfigError(
        "newton_solve: need tol > 0, iter_max >= 1, divergence_factor > 1");
  NewtonReport rep;
  if (std::isinf(cfg.tol)) {
    rep.success = true;
    return {mesh0, rep};
  }
  if (cfg.method == NewtonMethod::kGradientDescent)
    return gradient_descent(mesh0, blend, cfg);

  TriangleMesh mesh = mesh0;
  TriangleQuadrature quad = TriangleQuadrature::make(cfg.quad_degree);
  double first_norm = 0.0;

  for (int j = 0; j < cfg.iter_max; ++j) {
    rep.iterations = j + 1;
    try {
      BoundaryFrame fr = boundary_frames(mesh);
      auto bmap = boundary_index_map(mesh);
      VecX g = assemble_gradient(mesh, bmap, blend, quad);
      rep.normal_residuals.push_back(normal_residual_vector(fr, g).norm());
      SparseMatrix A = assemble_hessian(mesh, bmap, blend, quad);

      VecX v_coef;
      if (cfg.method == NewtonMethod::kUnregularized) {
        SparseMatrix B = assemble_btau(mesh, fr, cfg.btau);
        VecX rhs(3 * mesh.n_bdy());
        rhs << -g, VecX::Zero(mesh.n_bdy());
        auto [V, xi] = solve_saddle(A, B, rhs);
        v_coef = V;
      } else {
        // Regularized variants drop the constraint block.
        SparseMatrix R =
            (cfg.method == NewtonMethod::kH1Regularized)
                ? assemble_h1_regularizer(mesh, bmap, cfg.delta1a, cfg.delta1b)
                : assemble_tangential_mass(mesh, bmap, fr);
        double scale = (cfg.method == NewtonMethod::kH1Regularized)
                           ? 1.0
                           : cfg.delta2;
        SparseMatrix Areg(2 * mesh.n_bdy(), 2 * mesh.n_bdy());
        const auto& Ae = A.eigen();
        for (int c = 0; c < Ae.outerSize(); ++c)
          for (Eigen::SparseMatrix<double>::InnerIterator it(Ae, c); it; ++it)
            Areg.add(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     it.value());
        const auto& Re = R.eigen();
        for (int c = 0; c < Re.outerSize(); ++c)
          for (Eigen::SparseMatrix<double>::InnerIterator it(Re, c); it; ++it)
            Areg.add(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     scale * it.value());
        Areg.finalize();
        v_coef = LuFactorization(Areg).solve(-g);
      }

      if (!field_finite(v_coef)) {
        rep.failure = NewtonFailure::kDivergence;
        rep.message = "non-finite update";
        return {mesh, rep};
      }
      BoundaryVectorField v = from_vecx(v_coef);
      double vnorm = boundary_l2_norm(mesh, v);
      rep.update_norms.push_back(vnorm);
      if (j == 0) first_norm = vnorm;
      if (!(vnorm <= cfg.divergence_factor * first_norm) ||
          !std::isfinite(vnorm)) {
        rep.failure = NewtonFailure::kDivergence;
        rep.message = "update norm exceeded divergence threshold";
        return {mesh, rep};
      }

      ElasticityExtension ext(mesh, cfg.mu, cfg.lambda);
      VolumeVectorField vhat = ext.extend(v);
      TriangleMesh next = deform(mesh, vhat);
      if (is_tangled(next)) {
        rep.failure = NewtonFailure::kMeshTangled;
        rep.message = "deformation tangled the mesh";
        return {mesh, rep};
      }
      mesh = next;
      if (vnorm < cfg.tol) {
        rep.success = true;
        return {mesh, rep};
      }
    } catch (const DomainError& e) {
      rep.failure = NewtonFailure::kDomain;
      rep.message = e.what();
      return {mesh, rep};
    } catch (const SolverError& e) {
      rep.failure = NewtonFailure::kSolver;
      rep.message = e.what();
      return {mesh, rep};
    }
  }
  rep.failure = NewtonFailure::kIterMax;
  return {mesh, rep};
}

double normal_residual(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                       int quad_degree) {
  TriangleQuadrature quad = TriangleQuadrature::make(quad_degree);
  BoundaryFrame fr = boundary_frames(mesh);
  auto bmap = boundary_index_map(mesh);
  VecX g = assemble_gradient(mesh, bmap, blend, quad);
  return normal_residual_vector(fr, g).norm();
}

}  // namespace shapehom
