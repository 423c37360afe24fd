#include "shapehom/assembly.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "shapehom/errors.hpp"
#include "shapehom/taylor1.hpp"

namespace shapehom {

namespace {

// Per-element geometry: CCW corner coordinates, area, constant hat
// gradients grad phi_k = rot90(p_{k+2} - p_{k+1}) / (2 area).
struct ElementGeom {
  std::array<int, 3> v;
  std::array<Vec2, 3> p;
  std::array<Vec2, 3> grad;
  double area;
};

ElementGeom element_geom(const TriangleMesh& mesh, int e) {
  ElementGeom g;
  g.v = mesh.triangles[e];
  for (int k = 0; k < 3; ++k) g.p[k] = mesh.vertices[g.v[k]];
  g.area = 0.5 * cross(g.p[1] - g.p[0], g.p[2] - g.p[0]);
  for (int k = 0; k < 3; ++k)
    g.grad[k] = (1.0 / (2.0 * g.area)) * rot90(g.p[(k + 2) % 3] - g.p[(k + 1) % 3]);
  return g;
}

struct Mat2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

// Polarized 2x2 determinant: d^2/ds dr det(sA + rB).
double det2_polarized(const Mat2& A, const Mat2& B) {
  return A.m[0][0] * B.m[1][1] + A.m[1][1] * B.m[0][0] -
         A.m[0][1] * B.m[1][0] - A.m[1][0] * B.m[0][1];
}

// Per-element data of a P1 vector field: constant Jacobian, divergence and
// corner values.
struct FieldOnElement {
  Mat2 jac;
  double div;
  std::array<Vec2, 3> corner;

  Vec2 value(const std::array<double, 3>& bary) const {
    return bary[0] * corner[0] + bary[1] * corner[1] + bary[2] * corner[2];
  }
};

FieldOnElement field_on_element(const ElementGeom& g,
                                const VolumeVectorField& f) {
  FieldOnElement fe;
  for (int k = 0; k < 3; ++k) fe.corner[k] = f.at(g.v[k]);
  for (int k = 0; k < 3; ++k) {
    fe.jac.m[0][0] += fe.corner[k].x * g.grad[k].x;
    fe.jac.m[0][1] += fe.corner[k].x * g.grad[k].y;
    fe.jac.m[1][0] += fe.corner[k].y * g.grad[k].x;
    fe.jac.m[1][1] += fe.corner[k].y * g.grad[k].y;
  }
  fe.div = fe.jac.m[0][0] + fe.jac.m[1][1];
  return fe;
}

Vec2 quad_point(const ElementGeom& g, const std::array<double, 3>& bary) {
  return bary[0] * g.p[0] + bary[1] * g.p[1] + bary[2] * g.p[2];
}

}  // namespace

double objective_value(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                       const TriangleQuadrature& quad) {
  double acc = 0.0;
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    ElementGeom g = element_geom(mesh, e);
    double local = 0.0;
    for (size_t q = 0; q < quad.points.size(); ++q)
      local += quad.weights[q] * blend.eval(quad_point(g, quad.points[q]), 0).value();
    acc += g.area * local;
  }
  return acc;
}

namespace {

// Shared kernel for first-derivative vectors: scatter map decides which
// vertex dofs receive contributions.
template <class DofOf>
void gradient_kernel(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                     const TriangleQuadrature& quad, const DofOf& dof_of,
                     VecX& out) {
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    ElementGeom g = element_geom(mesh, e);
    std::array<int, 3> dof{dof_of(g.v[0]), dof_of(g.v[1]), dof_of(g.v[2])};
    if (dof[0] < 0 && dof[1] < 0 && dof[2] < 0) continue;
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const auto& bary = quad.points[q];
      Jet2 jet = blend.eval(quad_point(g, bary), 1);
      double f = jet.value();
      double fx = jet.coeff(1, 0), fy = jet.coeff(0, 1);
      double wq = g.area * quad.weights[q];
      for (int k = 0; k < 3; ++k) {
        if (dof[k] < 0) continue;
        // grad f . (e_c phi) + f * d phi/d x_c
        out[2 * dof[k] + 0] += wq * (fx * bary[k] + f * g.grad[k].x);
        out[2 * dof[k] + 1] += wq * (fy * bary[k] + f * g.grad[k].y);
      }
    }
  }
}

}  // namespace

VecX assemble_gradient(const TriangleMesh& mesh, std::span<const int> bmap,
                       const ObjectiveBlend& blend,
                       const TriangleQuadrature& quad) {
  VecX out = VecX::Zero(2 * mesh.n_bdy());
  gradient_kernel(mesh, blend, quad, [&](int v) { return bmap[v]; }, out);
  return out;
}

VecX assemble_gradient_full(const TriangleMesh& mesh,
                            const ObjectiveBlend& blend,
                            const TriangleQuadrature& quad) {
  VecX out = VecX::Zero(2 * mesh.n_vertices());
  gradient_kernel(mesh, blend, quad, [](int v) { return v; }, out);
  return out;
}

SparseMatrix assemble_hessian(const TriangleMesh& mesh,
                              std::span<const int> bmap,
                              const ObjectiveBlend& blend,
                              const TriangleQuadrature& quad) {
  SparseMatrix A(2 * mesh.n_bdy(), 2 * mesh.n_bdy());
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    ElementGeom g = element_geom(mesh, e);
    std::array<int, 3> dof{bmap[g.v[0]], bmap[g.v[1]], bmap[g.v[2]]};
    if (dof[0] < 0 && dof[1] < 0 && dof[2] < 0) continue;

    double local[6][6] = {};
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const auto& bary = quad.points[q];
      Jet2 jet = blend.eval(quad_point(g, bary), 2);
      double f = jet.value();
      double fx = jet.coeff(1, 0), fy = jet.coeff(0, 1);
      double hess[2][2] = {{jet.partial(2, 0), jet.partial(1, 1)},
                           {jet.partial(1, 1), jet.partial(0, 2)}};
      double grad1[2] = {fx, fy};
      double wq = g.area * quad.weights[q];
      for (int kv = 0; kv < 3; ++kv) {
        if (dof[kv] < 0) continue;
        double gv[2] = {g.grad[kv].x, g.grad[kv].y};
        for (int kw = 0; kw < 3; ++kw) {
          if (dof[kw] < 0) continue;
          double gw[2] = {g.grad[kw].x, g.grad[kw].y};
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) {
              // grad^2 f[Phi_a, Phi_b] + grad f.Phi_a div Phi_b
              // + grad f.Phi_b div Phi_a + f (div div - dPhi_a^T : dPhi_b)
              double term = hess[c][d] * bary[kv] * bary[kw] +
                            grad1[c] * bary[kv] * gw[d] +
                            grad1[d] * bary[kw] * gv[c] +
                            f * (gv[c] * gw[d] - gv[d] * gw[c]);
              local[2 * kv + c][2 * kw + d] += wq * term;
            }
          }
        }
      }
    }
    // Scatter the symmetrized local block so A == A^T holds exactly.
    for (int a = 0; a < 6; ++a) {
      int kv = a / 2, c = a % 2;
      if (dof[kv] < 0) continue;
      for (int b = a; b < 6; ++b) {
        int kw = b / 2, d = b % 2;
        if (dof[kw] < 0) continue;
        int i = 2 * dof[kv] + c, j = 2 * dof[kw] + d;
        double sym = 0.5 * (local[a][b] + local[b][a]);
        A.add(i, j, sym);
        if (i != j) A.add(j, i, sym);
      }
    }
  }
  A.finalize();
  return A;
}

double shape_derivative_k(const TriangleMesh& mesh, const ObjectiveBlend& blend,
                          std::span<const VolumeVectorField* const> fields,
                          const TriangleQuadrature& quad) {
  const int k = static_cast<int>(fields.size());
  if (k < 1 || k > Jet2::kMaxOrder)
    throw DomainError("shape_derivative_k: order out of range");
  double acc = 0.0;
  std::vector<Vec2> vecs;
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    ElementGeom g = element_geom(mesh, e);
    std::vector<FieldOnElement> fe;
    fe.reserve(k);
    for (int i = 0; i < k; ++i) fe.push_back(field_on_element(g, *fields[i]));
    double local = 0.0;
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const auto& bary = quad.points[q];
      Jet2 jet = blend.eval(quad_point(g, bary), k);
      double sum = 0.0;
      // S = all fields.
      vecs.clear();
      for (int i = 0; i < k; ++i) vecs.push_back(fe[i].value(bary));
      sum += directional_derivative(jet, vecs);
      // |S^c| = 1.
      for (int i = 0; i < k; ++i) {
        vecs.clear();
        for (int m = 0; m < k; ++m)
          if (m != i) vecs.push_back(fe[m].value(bary));
        sum += directional_derivative(jet, vecs) * fe[i].div;
      }
      // |S^c| = 2.
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          vecs.clear();
          for (int m = 0; m < k; ++m)
            if (m != i && m != j) vecs.push_back(fe[m].value(bary));
          sum += directional_derivative(jet, vecs) *
                 det2_polarized(fe[i].jac, fe[j].jac);
        }
      }
      local += quad.weights[q] * sum;
    }
    acc += g.area * local;
  }
  return acc;
}

VecX assemble_rhs_terms(const TriangleMesh& mesh, std::span<const int> bmap,
                        std::span<const RhsTerm> terms,
                        const TriangleQuadrature& quad) {
  VecX out = VecX::Zero(2 * mesh.n_bdy());
  if (terms.empty()) return out;
  for (const RhsTerm& term : terms) {
    if (static_cast<int>(term.fields.size()) + 1 > Jet2::kMaxOrder)
      throw DomainError("assemble_rhs_terms: order exceeds the jet ceiling");
    for (const VolumeVectorField* f : term.fields)
      if (f == nullptr || f->n_vertices() != mesh.n_vertices())
        throw MeshError("assemble_rhs_terms: field length mismatch");
  }

  std::vector<Vec2> vecs;
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    std::array<int, 3> dof{bmap[mesh.triangles[e][0]],
                           bmap[mesh.triangles[e][1]],
                           bmap[mesh.triangles[e][2]]};
    if (dof[0] < 0 && dof[1] < 0 && dof[2] < 0) continue;
    ElementGeom g = element_geom(mesh, e);

    // Field data per term.
    std::vector<std::vector<FieldOnElement>> fe(terms.size());
    for (size_t ti = 0; ti < terms.size(); ++ti)
      for (const VolumeVectorField* f : terms[ti].fields)
        fe[ti].push_back(field_on_element(g, *f));

    for (size_t q = 0; q < quad.points.size(); ++q) {
      const auto& bary = quad.points[q];
      Vec2 xq = quad_point(g, bary);
      for (size_t ti = 0; ti < terms.size(); ++ti) {
        const RhsTerm& term = terms[ti];
        const int nf = static_cast<int>(term.fields.size());
        Jet2 jet = term.blend.eval(xq, nf + 1);

        // Accumulators for the linear form in the test field Phi = e_c phi_v:
        //   contrib = (gpart . e_c) phi_v + fdiv * dphi_v/dx_c
        //           + (D2 row c of each field) . grad phi_v
        double gpart[2] = {0.0, 0.0};  // sum over T: grad^{|T|+1} f[V_T, e_c] c(T^c)
        double fdiv = 0.0;             // grad^{nf} f[V_all]
        double d2x[2] = {0.0, 0.0};    // sum_j grad^{nf-1} f[V_{-j}] * D2(J_j, e_c o grad)
        double d2y[2] = {0.0, 0.0};

        auto reduced = [&](int skip1, int skip2) {
          vecs.clear();
          for (int m = 0; m < nf; ++m)
            if (m != skip1 && m != skip2) vecs.push_back(fe[ti][m].value(bary));
          Jet2 r = jet;
          for (Vec2 v : vecs) r = jet_dir_reduce(r, v);
          return r;  // order >= 1 remains
        };

        // T = all fields, c(T^c) = 1.
        {
          Jet2 r = reduced(-1, -1);
          gpart[0] += r.coeff(1, 0);
          gpart[1] += r.coeff(0, 1);
          fdiv = r.value();
        }
        // |T^c| = 1: c = div of the skipped field.
        for (int i = 0; i < nf; ++i) {
          Jet2 r = reduced(i, -1);
          gpart[0] += r.coeff(1, 0) * fe[ti][i].div;
          gpart[1] += r.coeff(0, 1) * fe[ti][i].div;
          // Same reduction feeds the D2 pairing of field i with the test
          // Jacobian e_c (x) grad phi:
          //   c=0: m11 gx - m10 gy ; c=1: m00 gy - m01 gx.
          const Mat2& M = fe[ti][i].jac;
          d2x[0] += r.value() * M.m[1][1];
          d2y[0] += r.value() * (-M.m[1][0]);
          d2x[1] += r.value() * (-M.m[0][1]);
          d2y[1] += r.value() * M.m[0][0];
        }
        // |T^c| = 2.
        for (int i = 0; i < nf; ++i) {
          for (int j = i + 1; j < nf; ++j) {
            Jet2 r = reduced(i, j);
            double d2 = det2_polarized(fe[ti][i].jac, fe[ti][j].jac);
            gpart[0] += r.coeff(1, 0) * d2;
            gpart[1] += r.coeff(0, 1) * d2;
          }
        }

        double wq = g.area * quad.weights[q] * term.coeff;
        for (int kv = 0; kv < 3; ++kv) {
          if (dof[kv] < 0) continue;
          double phi = bary[kv];
          Vec2 gp = g.grad[kv];
          out[2 * dof[kv] + 0] +=
              wq * (gpart[0] * phi + fdiv * gp.x + d2x[0] * gp.x + d2y[0] * gp.y);
          out[2 * dof[kv] + 1] +=
              wq * (gpart[1] * phi + fdiv * gp.y + d2x[1] * gp.x + d2y[1] * gp.y);
        }
      }
    }
  }
  return out;
}

VecX assemble_kth_rhs(const TriangleMesh& mesh, std::span<const int> bmap,
                      const ObjectiveBlend& blend,
                      std::span<const VolumeVectorField* const> fixed_fields,
                      const TriangleQuadrature& quad) {
  RhsTerm term;
  term.coeff = 1.0;
  term.blend = blend;
  term.fields.assign(fixed_fields.begin(), fixed_fields.end());
  return assemble_rhs_terms(mesh, bmap, std::span<const RhsTerm>(&term, 1),
                            quad);
}

SparseMatrix assemble_btau(const TriangleMesh& mesh, const BoundaryFrame& fr,
                           BtauVariant variant) {
  const int nb = mesh.n_bdy();
  SparseMatrix B(2 * nb, nb);
  if (variant == BtauVariant::kLumped) {
    for (int k = 0; k < nb; ++k) {
      double lp = norm(mesh.vertices[mesh.boundary_loop[k]] -
                       mesh.vertices[mesh.boundary_loop[(k + nb - 1) % nb]]);
      double ln = norm(mesh.vertices[mesh.boundary_loop[(k + 1) % nb]] -
                       mesh.vertices[mesh.boundary_loop[k]]);
      double omega = 0.5 * (lp + ln);
      B.add(2 * k + 0, k, omega * fr.tangent[k].x);
      B.add(2 * k + 1, k, omega * fr.tangent[k].y);
    }
  } else {
    GaussSegment gs = GaussSegment::make(2);  // cubic integrand per edge
    for (int k = 0; k < nb; ++k) {
      int kn = (k + 1) % nb;
      double L = norm(mesh.vertices[mesh.boundary_loop[kn]] -
                      mesh.vertices[mesh.boundary_loop[k]]);
      for (size_t q = 0; q < gs.nodes.size(); ++q) {
        double s = gs.nodes[q], w = L * gs.weights[q];
        double phi[2] = {1.0 - s, s};
        Vec2 tau = (1.0 - s) * fr.tangent[k] + s * fr.tangent[kn];
        int vert[2] = {k, kn};
        for (int a = 0; a < 2; ++a) {      // vector dof vertex
          for (int m = 0; m < 2; ++m) {    // multiplier vertex
            B.add(2 * vert[a] + 0, vert[m], w * phi[a] * tau.x * phi[m]);
            B.add(2 * vert[a] + 1, vert[m], w * phi[a] * tau.y * phi[m]);
          }
        }
      }
    }
  }
  B.finalize();
  return B;
}

SparseMatrix assemble_elasticity(const TriangleMesh& mesh, double mu,
                                 double lambda) {
  const int n = mesh.n_vertices();
  SparseMatrix A(2 * n, 2 * n);
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    ElementGeom g = element_geom(mesh, e);
    for (int kv = 0; kv < 3; ++kv) {
      double gv[2] = {g.grad[kv].x, g.grad[kv].y};
      for (int kw = 0; kw < 3; ++kw) {
        double gw[2] = {g.grad[kw].x, g.grad[kw].y};
        double gdot = gv[0] * gw[0] + gv[1] * gw[1];
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            double val = mu * ((c == d ? gdot : 0.0) + gv[d] * gw[c]) +
                         lambda * gv[c] * gw[d];
            A.add(2 * g.v[kv] + c, 2 * g.v[kw] + d, g.area * val);
          }
        }
      }
    }
  }
  A.finalize();
  return A;
}

SparseMatrix assemble_h1_regularizer(const TriangleMesh& mesh,
                                     std::span<const int> bmap,
                                     double delta_grad, double delta_mass) {
  const int nb = mesh.n_bdy();
  SparseMatrix R(2 * nb, 2 * nb);
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    std::array<int, 3> dof{bmap[mesh.triangles[e][0]],
                           bmap[mesh.triangles[e][1]],
                           bmap[mesh.triangles[e][2]]};
    if (dof[0] < 0 && dof[1] < 0 && dof[2] < 0) continue;
    ElementGeom g = element_geom(mesh, e);
    for (int kv = 0; kv < 3; ++kv) {
      if (dof[kv] < 0) continue;
      for (int kw = 0; kw < 3; ++kw) {
        if (dof[kw] < 0) continue;
        double gdot = dot(g.grad[kv], g.grad[kw]);
        double mass = (kv == kw) ? g.area / 6.0 : g.area / 12.0;
        double val = delta_grad * g.area * gdot + delta_mass * mass;
        for (int c = 0; c < 2; ++c)
          R.add(2 * dof[kv] + c, 2 * dof[kw] + c, val);
      }
    }
  }
  R.finalize();
  return R;
}

SparseMatrix assemble_tangential_mass(const TriangleMesh& mesh,
                                      std::span<const int> bmap,
                                      const BoundaryFrame& fr) {
  (void)bmap;
  const int nb = mesh.n_bdy();
  SparseMatrix M(2 * nb, 2 * nb);
  GaussSegment gs = GaussSegment::make(3);  // quartic integrand per edge
  for (int k = 0; k < nb; ++k) {
    int kn = (k + 1) % nb;
    double L = norm(mesh.vertices[mesh.boundary_loop[kn]] -
                    mesh.vertices[mesh.boundary_loop[k]]);
    int vert[2] = {k, kn};
    for (size_t q = 0; q < gs.nodes.size(); ++q) {
      double s = gs.nodes[q], w = L * gs.weights[q];
      double phi[2] = {1.0 - s, s};
      Vec2 tau = (1.0 - s) * fr.tangent[k] + s * fr.tangent[kn];
      double tc[2] = {tau.x, tau.y};
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
          for (int b = 0; b < 2; ++b)
            for (int d = 0; d < 2; ++d)
              M.add(2 * vert[a] + c, 2 * vert[b] + d,
                    w * phi[a] * tc[c] * phi[b] * tc[d]);
    }
  }
  M.finalize();
  return M;
}

namespace {

// Lumped and consistent constraint entries with positions given in
// univariate Taylor arithmetic; mirrors assemble_btau.
template <class Emit>
void btau_entries_taylor(std::span<const Taylor1Vec2> pos, BtauVariant variant,
                         Emit&& emit) {
  const int nb = static_cast<int>(pos.size());
  std::vector<Taylor1Vec2> tangent(nb);
  std::vector<Taylor1> edge_len(nb);  // edge k -> k+1
  for (int k = 0; k < nb; ++k) {
    Taylor1Vec2 e = pos[(k + 1) % nb] - pos[k];
    edge_len[k] = sqrt(dot(e, e));
  }
  for (int k = 0; k < nb; ++k) {
    int kp = (k + nb - 1) % nb;
    Taylor1Vec2 em = pos[k] - pos[kp];
    Taylor1Vec2 ep = pos[(k + 1) % nb] - pos[k];
    Taylor1Vec2 um{em.x / edge_len[kp], em.y / edge_len[kp]};
    Taylor1Vec2 up{ep.x / edge_len[k], ep.y / edge_len[k]};
    Taylor1Vec2 s = um + up;
    Taylor1 slen = sqrt(dot(s, s));
    tangent[k] = {s.x / slen, s.y / slen};
  }
  if (variant == BtauVariant::kLumped) {
    for (int k = 0; k < nb; ++k) {
      int kp = (k + nb - 1) % nb;
      Taylor1 omega = 0.5 * (edge_len[kp] + edge_len[k]);
      emit(2 * k + 0, k, omega * tangent[k].x);
      emit(2 * k + 1, k, omega * tangent[k].y);
    }
  } else {
    GaussSegment gs = GaussSegment::make(2);
    for (int k = 0; k < nb; ++k) {
      int kn = (k + 1) % nb;
      for (size_t q = 0; q < gs.nodes.size(); ++q) {
        double sq = gs.nodes[q];
        Taylor1 w = gs.weights[q] * edge_len[k];
        double phi[2] = {1.0 - sq, sq};
        Taylor1Vec2 tau{(1.0 - sq) * tangent[k].x + sq * tangent[kn].x,
                        (1.0 - sq) * tangent[k].y + sq * tangent[kn].y};
        int vert[2] = {k, kn};
        for (int a = 0; a < 2; ++a) {
          for (int m2 = 0; m2 < 2; ++m2) {
            emit(2 * vert[a] + 0, vert[m2], w * (phi[a] * phi[m2]) * tau.x);
            emit(2 * vert[a] + 1, vert[m2], w * (phi[a] * phi[m2]) * tau.y);
          }
        }
      }
    }
  }
}

std::vector<Taylor1Vec2> boundary_path_positions(
    const TriangleMesh& mesh, std::span<const BoundaryVectorField* const> path,
    int order) {
  const int nb = mesh.n_bdy();
  std::vector<Taylor1Vec2> pos(nb, Taylor1Vec2{Taylor1(order), Taylor1(order)});
  for (int k = 0; k < nb; ++k) {
    Vec2 x = mesh.vertices[mesh.boundary_loop[k]];
    pos[k].x.coeff(0) = x.x;
    pos[k].y.coeff(0) = x.y;
    double fac = 1.0;
    for (size_t i = 0; i < path.size(); ++i) {
      fac /= (i + 1);
      if (static_cast<int>(i) + 1 > order) break;
      Vec2 v = path[i]->at(k);
      pos[k].x.coeff(i + 1) = fac * v.x;
      pos[k].y.coeff(i + 1) = fac * v.y;
    }
  }
  return pos;
}

}  // namespace

std::vector<Eigen::SparseMatrix<double>> btau_time_derivatives(
    const TriangleMesh& mesh,
    std::span<const BoundaryVectorField* const> path, BtauVariant variant,
    int n_max) {
  const int nb = mesh.n_bdy();
  auto pos = boundary_path_positions(mesh, path, n_max);
  std::vector<std::vector<Eigen::Triplet<double>>> trips(n_max + 1);
  btau_entries_taylor(pos, variant, [&](int row, int col, const Taylor1& v) {
    for (int m = 0; m <= n_max; ++m)
      trips[m].emplace_back(row, col, v.derivative(m));
  });
  std::vector<Eigen::SparseMatrix<double>> out(n_max + 1);
  for (int m = 0; m <= n_max; ++m) {
    out[m] = Eigen::SparseMatrix<double>(2 * nb, nb);
    out[m].setFromTriplets(trips[m].begin(), trips[m].end());
  }
  return out;
}

SparseMatrix assemble_btau_state_derivative(const TriangleMesh& mesh,
                                            BtauVariant variant,
                                            const VecX& xi) {
  const int nb = mesh.n_bdy();
  SparseMatrix C(2 * nb, 2 * nb);
  BoundaryVectorField dir(nb);
  const BoundaryVectorField* dirp = &dir;
  for (int j = 0; j < 2 * nb; ++j) {
    dir.coeffs.assign(2 * nb, 0.0);
    dir.coeffs[j] = 1.0;
    auto pos = boundary_path_positions(
        mesh, std::span<const BoundaryVectorField* const>(&dirp, 1), 1);
    btau_entries_taylor(pos, variant, [&](int row, int col, const Taylor1& v) {
      double d = v.derivative(1) * xi[col];
      if (d != 0.0) C.add(row, j, d);
    });
  }
  C.finalize();
  return C;
}

SparseMatrix sparse_sum(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows(), a.cols());
  for (const auto* m : {&a, &b}) {
    const auto& e = m->eigen();
    for (int c = 0; c < e.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(e, c); it; ++it)
        out.add(static_cast<int>(it.row()), static_cast<int>(it.col()),
                it.value());
  }
  out.finalize();
  return out;
}

VecX normal_residual_vector(const BoundaryFrame& fr, const VecX& gradient) {
  const int nb = static_cast<int>(fr.normal.size());
  assert(gradient.size() == 2 * nb);
  VecX r(nb);
  for (int k = 0; k < nb; ++k)
    r[k] = gradient[2 * k] * fr.normal[k].x + gradient[2 * k + 1] * fr.normal[k].y;
  return r;
}

ElasticityExtension::ElasticityExtension(const TriangleMesh& mesh, double mu,
                                         double lambda)
    : mesh_(mesh), bmap_(boundary_index_map(mesh)) {
  const int n = mesh.n_vertices();
  const int nb = mesh.n_bdy();
  interior_index_.assign(2 * n, -1);
  n_interior_ = 0;
  for (int i = 0; i < n; ++i) {
    if (bmap_[i] >= 0) continue;
    interior_index_[2 * i] = n_interior_++;
    interior_index_[2 * i + 1] = n_interior_++;
  }

  SparseMatrix full = assemble_elasticity(mesh, mu, lambda);
  const auto& Ae = full.eigen();
  SparseMatrix Aii(n_interior_, n_interior_);
  std::vector<Eigen::Triplet<double>> ib_trips;
  for (int c = 0; c < Ae.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ae, c); it; ++it) {
      int r = static_cast<int>(it.row()), cc = static_cast<int>(it.col());
      int ir = interior_index_[r], ic = interior_index_[cc];
      if (ir >= 0 && ic >= 0) {
        Aii.add(ir, ic, it.value());
      } else if (ir >= 0 && ic < 0) {
        // column cc is a boundary dof: map to loop-ordered index
        int vtx = cc / 2, comp = cc % 2;
        ib_trips.emplace_back(ir, 2 * bmap_[vtx] + comp, it.value());
      }
    }
  }
  Aii.finalize();
  A_ib_ = Eigen::SparseMatrix<double>(n_interior_, 2 * nb);
  A_ib_.setFromTriplets(ib_trips.begin(), ib_trips.end());
  if (n_interior_ > 0) chol_ = std::make_unique<SpdFactorization>(Aii);
}

VolumeVectorField ElasticityExtension::extend(
    const BoundaryVectorField& bf) const {
  if (bf.n_bdy() != mesh_.n_bdy())
    throw MeshError("extend: boundary field length mismatch");
  VolumeVectorField out(mesh_.n_vertices());
  for (int k = 0; k < mesh_.n_bdy(); ++k)
    out.set(mesh_.boundary_loop[k], bf.at(k));
  if (n_interior_ == 0) return out;
  VecX g = Eigen::Map<const VecX>(bf.coeffs.data(), bf.coeffs.size());
  VecX xi = chol_->solve(-(A_ib_ * g));
  for (int i = 0; i < mesh_.n_vertices(); ++i) {
    if (bmap_[i] >= 0) continue;
    out.coeffs[2 * i] = xi[interior_index_[2 * i]];
    out.coeffs[2 * i + 1] = xi[interior_index_[2 * i + 1]];
  }
  return out;
}

}  // namespace shapehom
