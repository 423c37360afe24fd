#pragma once

#include <utility>
#include <vector>

#include "shapehom/homotopy.hpp"

namespace shapehom {

// One-dimensional convex homotopy H(x,t) = t F(x) + (1-t) G(x) with
//   F(x) = x^5 + x - e^{-x},   G(x) = x,
// solved as a root problem H(x,t) = 0 along t in [0,1]. Derivatives of
// the solution path are produced by the set-partition rule; the
// hand-coded low orders are kept for cross-checks.
class ScalarConvexHomotopy {
 public:
  using State = double;
  using Derivative = double;

  // m-th derivatives of F, G and D = F - G.
  static double F_deriv(double x, int m);
  static double G_deriv(double x, int m);
  static double D_deriv(double x, int m) {
    return F_deriv(x, m) - G_deriv(x, m);
  }
  static double H_deriv(double x, double t, int m) {
    return t * F_deriv(x, m) + (1.0 - t) * G_deriv(x, m);
  }
  static double H_value(double x, double t) {
    return t * (std::pow(x, 5) + x - std::exp(-x)) + (1.0 - t) * x;
  }

  CorrectorOutcome<double> corrector(double x, double t, double tol) const;

  // Solves H_x x^{[n]} = rhs_n sequentially for n = 1..n_max via the
  // partition sum; n_extend is unused for the scalar case.
  std::vector<double> path_derivatives(double x, double t, int n_max,
                                       int n_extend = 0) const;

  // Explicit first/second/third-order systems written out term by term;
  // must agree with the partition enumerator (tested).
  std::vector<double> path_derivatives_low_order(double x, double t,
                                                 int n_max) const;

  PredictOutcome<double> apply_predictor(
      double x,
      const std::vector<std::pair<const double*, double>>& weighted) const;

  double apply_secant(double cur, double prev, double factor) const {
    return cur + factor * (cur - prev);
  }

  double derivative_norm(double d) const { return std::abs(d); }
  double distance(double a, double b) const { return std::abs(a - b); }

  int corrector_iter_max = 50;
};

}  // namespace shapehom
