#pragma once

#include <array>
#include <vector>

namespace shapehom {

// Gauss-Legendre rule on [0,1]; weights sum to 1.
struct GaussSegment {
  std::vector<double> nodes;
  std::vector<double> weights;
  static GaussSegment make(int n_points);
};

// Quadrature on the reference triangle, stored in barycentric coordinates.
// Weights are normalized to sum to 1; element integrals multiply by the
// element area. Exact for polynomials up to `degree` (unit-tested).
struct TriangleQuadrature {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  // Symmetric tables for degree <= 6; a collapsed tensor Gauss rule above.
  static TriangleQuadrature make(int degree);
};

}  // namespace shapehom
