#pragma once

#include <string>
#include <vector>

#include "shapehom/assembly.hpp"
#include "shapehom/homotopy.hpp"
#include "shapehom/newton.hpp"

namespace shapehom {

struct MeshSpec {
  enum class Kind { kDisk, kFile };
  Kind kind = Kind::kDisk;
  double radius = 1.0;
  double h = 0.05;
  std::string path;
};

// Full run configuration; round-trips losslessly through JSON. Defaults
// follow the experiment constants the CLI reproduces.
struct RunConfig {
  std::string command = "homotopy";
  std::string out_dir = "out";
  int order = 2;
  StepStrategy strategy = FixedStep{1.0, 0.5, 1.75};
  ToleranceRamp ramp{1e-4, 1e-10};
  double mu = 1.0;
  double lambda = 0.0;
  BtauVariant btau = BtauVariant::kLumped;
  int quad_degree = 6;
  MeshSpec mesh;
  std::string f_target = "p_ellipse{p=4,a=2,b=0.5,R=4}";
  std::string f_start = "disk{r=1}";
  NewtonConfig newton;
  std::string method = "unregularized";  // newton command baseline choice
  // pareto
  std::vector<double> deltas = {0.0, 0.1, 0.2, 0.3};
  double dmax = 0.5;
  double pareto_a = 1.3;
  double pareto_R = 2.0;
  // When set, timing columns in trace CSVs are written as zero so that
  // repeated runs are bitwise identical.
  bool deterministic = true;
  // Dump assembled matrices in "row col value" triplet form (newton command).
  bool emit_matrices = false;
};

std::string serialize_config(const RunConfig& cfg);
// Missing keys keep the values of `base`.
RunConfig parse_config(const std::string& json_text,
                       const RunConfig& base = RunConfig{});
RunConfig load_config_file(const std::string& path,
                           const RunConfig& base = RunConfig{});
bool config_equal(const RunConfig& a, const RunConfig& b);

NewtonMethod method_from_string(const std::string& s);
std::string method_to_string(NewtonMethod m);

}  // namespace shapehom
