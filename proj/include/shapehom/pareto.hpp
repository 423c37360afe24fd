#pragma once

#include <array>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "shapehom/homotopy.hpp"
#include "shapehom/mesh.hpp"
#include "shapehom/shape_homotopy.hpp"

namespace shapehom {

// Three-objective front tracing. The objectives are
//   f1: ellipse (semi-axes a, 1/a, radius term R^2),
//   f2: the clover integrand,
//   f3: the axis-swapped ellipse,
// combined as J_conv[s1,s2] = s1 J1 + s2 J2 + (1-s1-s2) J3. For each
// delta, three homotopy branches connect corner weightings of the
// simplex; every accepted intermediate design is a front point.
struct ParetoSpec {
  double a = 1.3;
  double R = 2.0;
  double clover_a = 0.8;
  double clover_b = 2.0;
  double clover_eps = 0.01;
  std::vector<double> deltas = {0.0, 0.1, 0.2, 0.3};
  int order = 2;
  StepStrategy strategy = AgileStep{0.1};
  double dmax = 0.5;          // max objective-space spacing of emitted points
  double corrector_tol = 1e-10;  // constant tolerance while tracing
  ToleranceRamp bootstrap_ramp;  // ramped tolerance for the bootstrap run
  double mu = 1.0;
  double lambda = 0.0;
  NewtonConfig newton;
  int quad_degree = 6;
  TriangleMesh initial_mesh;
  double initial_radius = 2.5;  // level set radius of the initial design
  int max_threads = 1;  // distinct delta values may run concurrently
};

struct ParetoPoint {
  int branch = 12;  // 12, 23 or 31
  double delta = 0.0;
  double t = 0.0;
  double J1 = 0.0, J2 = 0.0, J3 = 0.0;
  double residual = 0.0;  // re-verified stationarity residual
  std::string mesh_file;
};

struct BranchTrace {
  int branch = 12;
  double delta = 0.0;
  HomotopyTrace trace;
};

struct ParetoResult {
  std::vector<ParetoPoint> points;
  std::vector<BranchTrace> traces;
  bool ok = false;
  std::string error;
};

// Effective weights (w1,w2,w3) on (f1,f2,f3) for a branch homotopy at
// parameter t; linear in t, nonnegative, summing to one.
std::array<double, 3> branch_weights(int branch, double delta, double t);

// Runs the bootstrap and all three branches for every delta; points carry
// re-verified residuals. An optional sink receives (point, mesh) for
// snapshot writing and returns the stored file name.
using MeshSink = std::function<std::string(const ParetoPoint&,
                                           const TriangleMesh&)>;
ParetoResult trace_front(const ParetoSpec& spec, const MeshSink& sink = {});

// CSV rows: branch,delta,t,J1,J2,J3,residual,mesh_file; delta ascending,
// branches 12/23/31, t ascending.
void export_front(const std::vector<ParetoPoint>& points, std::ostream& out);

}  // namespace shapehom
