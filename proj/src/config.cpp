#include "shapehom/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "shapehom/errors.hpp"

namespace shapehom {

using nlohmann::json;

namespace {

json strategy_to_json(const StepStrategy& s) {
  json j;
  if (const auto* f = std::get_if<FixedStep>(&s)) {
    j["kind"] = "fixed";
    j["dt0"] = f->dt0;
    j["gamma_down"] = f->gamma_down;
    j["gamma_up"] = f->gamma_up;
  } else if (const auto* a = std::get_if<AgileStep>(&s)) {
    j["kind"] = "agile";
    j["alpha"] = a->alpha;
  } else if (const auto* aa = std::get_if<AgileAdaptiveStep>(&s)) {
    j["kind"] = "agile-adaptive";
    j["alpha0"] = aa->alpha0;
    j["alpha_down"] = aa->alpha_down;
    j["alpha_up"] = aa->alpha_up;
  }
  return j;
}

StepStrategy strategy_from_json(const json& j) {
  std::string kind = j.value("kind", "fixed");
  if (kind == "fixed") {
    FixedStep f;
    f.dt0 = j.value("dt0", 1.0);
    f.gamma_down = j.value("gamma_down", 0.5);
    f.gamma_up = j.value("gamma_up", 1.75);
    return f;
  }
  if (kind == "agile") {
    AgileStep a;
    a.alpha = j.value("alpha", 0.02);
    return a;
  }
  if (kind == "agile-adaptive") {
    AgileAdaptiveStep a;
    a.alpha0 = j.value("alpha0", 0.02);
    a.alpha_down = j.value("alpha_down", 0.5);
    a.alpha_up = j.value("alpha_up", 1.1);
    return a;
  }
  throw ConfigError("unknown step strategy '" + kind + "'");
}

}  // namespace

NewtonMethod method_from_string(const std::string& s) {
  if (s == "unregularized") return NewtonMethod::kUnregularized;
  if (s == "h1" || s == "h1_regularized") return NewtonMethod::kH1Regularized;
  if (s == "tangential" || s == "tangential_regularized")
    return NewtonMethod::kTangentialRegularized;
  if (s == "gradient" || s == "gradient_descent")
    return NewtonMethod::kGradientDescent;
  throw ConfigError("unknown method '" + s + "'");
}

std::string method_to_string(NewtonMethod m) {
  switch (m) {
    case NewtonMethod::kUnregularized: return "unregularized";
    case NewtonMethod::kH1Regularized: return "h1";
    case NewtonMethod::kTangentialRegularized: return "tangential";
    case NewtonMethod::kGradientDescent: return "gradient";
  }
  return "unregularized";
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["out_dir"] = cfg.out_dir;
  j["order"] = cfg.order;
  j["strategy"] = strategy_to_json(cfg.strategy);
  j["tol_start"] = cfg.ramp.tol_start;
  j["tol_end"] = cfg.ramp.tol_end;
  j["mu"] = cfg.mu;
  j["lambda"] = cfg.lambda;
  j["btau"] = cfg.btau == BtauVariant::kLumped ? "lumped" : "consistent";
  j["quad_degree"] = cfg.quad_degree;
  json jm;
  jm["kind"] = cfg.mesh.kind == MeshSpec::Kind::kDisk ? "disk" : "file";
  jm["radius"] = cfg.mesh.radius;
  jm["h"] = cfg.mesh.h;
  jm["path"] = cfg.mesh.path;
  j["mesh"] = jm;
  j["f_target"] = cfg.f_target;
  j["f_start"] = cfg.f_start;
  json jn;
  jn["tol"] = cfg.newton.tol;
  jn["iter_max"] = cfg.newton.iter_max;
  jn["divergence_factor"] = cfg.newton.divergence_factor;
  jn["delta1a"] = cfg.newton.delta1a;
  jn["delta1b"] = cfg.newton.delta1b;
  jn["delta2"] = cfg.newton.delta2;
  j["newton"] = jn;
  j["method"] = cfg.method;
  j["deltas"] = cfg.deltas;
  j["dmax"] = cfg.dmax;
  j["pareto_a"] = cfg.pareto_a;
  j["pareto_R"] = cfg.pareto_R;
  j["deterministic"] = cfg.deterministic;
  j["emit_matrices"] = cfg.emit_matrices;
  return j.dump(2);
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg = base;
  cfg.command = j.value("command", cfg.command);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.order = j.value("order", cfg.order);
  if (j.contains("strategy")) cfg.strategy = strategy_from_json(j["strategy"]);
  cfg.ramp.tol_start = j.value("tol_start", cfg.ramp.tol_start);
  cfg.ramp.tol_end = j.value("tol_end", cfg.ramp.tol_end);
  cfg.mu = j.value("mu", cfg.mu);
  cfg.lambda = j.value("lambda", cfg.lambda);
  if (j.contains("btau")) {
    std::string b = j["btau"];
    if (b == "lumped")
      cfg.btau = BtauVariant::kLumped;
    else if (b == "consistent")
      cfg.btau = BtauVariant::kConsistent;
    else
      throw ConfigError("btau must be 'lumped' or 'consistent'");
  }
  cfg.quad_degree = j.value("quad_degree", cfg.quad_degree);
  if (j.contains("mesh")) {
    const json& jm = j["mesh"];
    std::string kind = jm.value("kind", "disk");
    if (kind == "disk")
      cfg.mesh.kind = MeshSpec::Kind::kDisk;
    else if (kind == "file")
      cfg.mesh.kind = MeshSpec::Kind::kFile;
    else
      throw ConfigError("mesh.kind must be 'disk' or 'file'");
    cfg.mesh.radius = jm.value("radius", cfg.mesh.radius);
    cfg.mesh.h = jm.value("h", cfg.mesh.h);
    cfg.mesh.path = jm.value("path", cfg.mesh.path);
  }
  cfg.f_target = j.value("f_target", cfg.f_target);
  cfg.f_start = j.value("f_start", cfg.f_start);
  if (j.contains("newton")) {
    const json& jn = j["newton"];
    cfg.newton.tol = jn.value("tol", cfg.newton.tol);
    cfg.newton.iter_max = jn.value("iter_max", cfg.newton.iter_max);
    cfg.newton.divergence_factor =
        jn.value("divergence_factor", cfg.newton.divergence_factor);
    cfg.newton.delta1a = jn.value("delta1a", cfg.newton.delta1a);
    cfg.newton.delta1b = jn.value("delta1b", cfg.newton.delta1b);
    cfg.newton.delta2 = jn.value("delta2", cfg.newton.delta2);
  }
  cfg.method = j.value("method", cfg.method);
  method_from_string(cfg.method);  // validate
  if (j.contains("deltas")) cfg.deltas = j["deltas"].get<std::vector<double>>();
  cfg.dmax = j.value("dmax", cfg.dmax);
  cfg.pareto_a = j.value("pareto_a", cfg.pareto_a);
  cfg.pareto_R = j.value("pareto_R", cfg.pareto_R);
  cfg.deterministic = j.value("deterministic", cfg.deterministic);
  cfg.emit_matrices = j.value("emit_matrices", cfg.emit_matrices);
  return cfg;
}

RunConfig load_config_file(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

bool config_equal(const RunConfig& a, const RunConfig& b) {
  return json::parse(serialize_config(a)) == json::parse(serialize_config(b));
}

}  // namespace shapehom
