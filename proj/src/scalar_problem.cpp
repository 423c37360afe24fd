#include "shapehom/scalar_problem.hpp"

#include <cmath>

#include "shapehom/partitions.hpp"

namespace shapehom {

double ScalarConvexHomotopy::F_deriv(double x, int m) {
  // d^m/dx^m (x^5 + x) plus d^m/dx^m (-e^{-x}) = (-1)^{m+1} e^{-x}.
  double poly = 0.0;
  switch (m) {
    case 0: poly = std::pow(x, 5) + x; break;
    case 1: poly = 5.0 * std::pow(x, 4) + 1.0; break;
    case 2: poly = 20.0 * std::pow(x, 3); break;
    case 3: poly = 60.0 * x * x; break;
    case 4: poly = 120.0 * x; break;
    case 5: poly = 120.0; break;
    default: poly = 0.0; break;
  }
  double sign = (m % 2 == 0) ? -1.0 : 1.0;
  return poly + sign * std::exp(-x);
}

double ScalarConvexHomotopy::G_deriv(double x, int m) {
  if (m == 0) return x;
  if (m == 1) return 1.0;
  return 0.0;
}

CorrectorOutcome<double> ScalarConvexHomotopy::corrector(double x, double t,
                                                         double tol) const {
  CorrectorOutcome<double> out{x, false, 0, 0.0, ""};
  for (int it = 0; it < corrector_iter_max; ++it) {
    out.iterations = it + 1;
    double h = H_value(out.state, t);
    double hx = H_deriv(out.state, t, 1);
    double dx = -h / hx;
    out.state += dx;
    out.residual = std::abs(dx);
    if (!std::isfinite(out.state) || std::abs(out.state) > 1e6) {
      out.message = "diverged";
      return out;
    }
    if (out.residual < tol) {
      out.success = true;
      return out;
    }
  }
  out.message = "iteration limit";
  return out;
}

std::vector<double> ScalarConvexHomotopy::path_derivatives(double x, double t,
                                                           int n_max,
                                                           int) const {
  std::vector<double> xs;  // xs[i] = x^{[i+1]}
  double hx = H_deriv(x, t, 1);
  for (int n = 1; n <= n_max; ++n) {
    double rhs = 0.0;
    for (const auto& shape : partition_shapes(n)) {
      int blocks = static_cast<int>(shape.parts.size());
      if (blocks == 1) continue;  // moved to the left-hand side
      double prod = 1.0;
      for (int p : shape.parts) prod *= xs[p - 1];
      rhs -= shape.count * H_deriv(x, t, blocks) * prod;
    }
    for (const auto& shape : partition_shapes(n - 1)) {
      int blocks = static_cast<int>(shape.parts.size());
      double prod = 1.0;
      for (int p : shape.parts) prod *= xs[p - 1];
      rhs -= n * shape.count * D_deriv(x, blocks) * prod;
    }
    xs.push_back(rhs / hx);
  }
  return xs;
}

std::vector<double> ScalarConvexHomotopy::path_derivatives_low_order(
    double x, double t, int n_max) const {
  std::vector<double> xs;
  double hx = H_deriv(x, t, 1);
  // n = 1: H_x x' = -H_t, H_t = D.
  xs.push_back(-D_deriv(x, 0) / hx);
  if (n_max >= 2) {
    // H_x x'' = -H_xx[x',x'] - 2 H_xt[x'] - H_tt, H_xt = D', H_tt = 0.
    double x1 = xs[0];
    xs.push_back(
        (-H_deriv(x, t, 2) * x1 * x1 - 2.0 * D_deriv(x, 1) * x1) / hx);
  }
  if (n_max >= 3) {
    // H_x x''' = -(H_xxx[x',x',x'] + 3 H_xxt[x',x'] + 3 H_xx[x'',x']
    //             + 3 H_xt[x''] + 3 H_xtt[x'] + H_ttt),
    // H_xxt = D'', H_xtt = H_ttt = 0.
    double x1 = xs[0], x2 = xs[1];
    xs.push_back((-H_deriv(x, t, 3) * x1 * x1 * x1 -
                  3.0 * D_deriv(x, 2) * x1 * x1 -
                  3.0 * H_deriv(x, t, 2) * x2 * x1 - 3.0 * D_deriv(x, 1) * x2) /
                 hx);
  }
  return xs;
}

PredictOutcome<double> ScalarConvexHomotopy::apply_predictor(
    double x,
    const std::vector<std::pair<const double*, double>>& weighted) const {
  double out = x;
  for (const auto& [d, w] : weighted) out += w * (*d);
  return {out, true};
}

}  // namespace shapehom
