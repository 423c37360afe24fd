#include "shapehom/quadrature.hpp"

#include <cassert>
#include <cmath>

namespace shapehom {

GaussSegment GaussSegment::make(int n) {
  assert(n >= 1);
  GaussSegment g;
  g.nodes.resize(n);
  g.weights.resize(n);
  // Legendre roots on [-1,1] by Newton iteration from the Chebyshev guess.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n and P_{n-1} by recurrence.
      double p0 = 1.0, pm = 0.0;
      for (int k = 0; k < n; ++k) {
        double pn = ((2 * k + 1) * x * p0 - k * pm) / (k + 1);
        pm = p0;
        p0 = pn;
      }
      p1 = n * (x * p0 - pm) / (x * x - 1.0);  // P_n'
      double dx = p0 / p1;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * p1 * p1);
    g.nodes[i] = 0.5 * (x + 1.0);
    g.weights[i] = 0.5 * w;
  }
  return g;
}

namespace {

void add_sym3(TriangleQuadrature& q, double l1, double l2, double l3,
              double w) {
  // All distinct cyclic/reflective permutations of (l1,l2,l3).
  std::array<std::array<double, 3>, 6> perms = {{{l1, l2, l3},
                                                 {l2, l3, l1},
                                                 {l3, l1, l2},
                                                 {l1, l3, l2},
                                                 {l3, l2, l1},
                                                 {l2, l1, l3}}};
  int count = 6;
  if (l1 == l2 && l2 == l3)
    count = 1;
  else if (l1 == l2 || l2 == l3 || l1 == l3)
    count = 3;
  for (int i = 0; i < count; ++i) {
    q.points.push_back(perms[i]);
    q.weights.push_back(w);
  }
}

TriangleQuadrature collapsed_gauss(int degree) {
  // Duffy map (u,v) -> (x,y) = (u, v(1-u)) on the unit triangle:
  //   int_T f = int_0^1 int_0^1 f(u, v(1-u)) (1-u) du dv.
  // The u-integrand gains one polynomial degree from the Jacobian.
  TriangleQuadrature q;
  q.degree = degree;
  int nu = (degree + 3) / 2;  // exact to 2nu-1 >= degree+1
  int nv = (degree + 2) / 2;  // exact to 2nv-1 >= degree
  GaussSegment gu = GaussSegment::make(nu);
  GaussSegment gv = GaussSegment::make(nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      double u = gu.nodes[i], v = gv.nodes[j];
      double x = u, y = v * (1.0 - u);
      q.points.push_back({1.0 - x - y, x, y});
      q.weights.push_back(2.0 * gu.weights[i] * gv.weights[j] * (1.0 - u));
    }
  }
  return q;
}

}  // namespace

TriangleQuadrature TriangleQuadrature::make(int degree) {
  TriangleQuadrature q;
  q.degree = degree;
  if (degree <= 1) {
    add_sym3(q, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0);
    return q;
  }
  if (degree <= 2) {
    add_sym3(q, 2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3);
    return q;
  }
  if (degree <= 4) {
    add_sym3(q, 0.816847572980459, 0.091576213509771, 0.091576213509771,
             0.109951743655322);
    add_sym3(q, 0.108103018168070, 0.445948490915965, 0.445948490915965,
             0.223381589678011);
    return q;
  }
  if (degree <= 6) {
    add_sym3(q, 0.873821971016996, 0.063089014491502, 0.063089014491502,
             0.050844906370207);
    add_sym3(q, 0.501426509658179, 0.249286745170910, 0.249286745170910,
             0.116786275726379);
    add_sym3(q, 0.636502499121399, 0.310352451033785, 0.053145049844816,
             0.082851075618374);
    return q;
  }
  return collapsed_gauss(degree);
}

}  // namespace shapehom
