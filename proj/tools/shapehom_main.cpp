#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "shapehom/config.hpp"
#include "shapehom/errors.hpp"
#include "shapehom/homotopy.hpp"
#include "shapehom/integrand.hpp"
#include "shapehom/mesh.hpp"
#include "shapehom/newton.hpp"
#include "shapehom/output.hpp"
#include "shapehom/pareto.hpp"
#include "shapehom/scalar_problem.hpp"
#include "shapehom/shape_homotopy.hpp"

namespace fs = std::filesystem;
using namespace shapehom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int thread_cap() {
  const char* env = std::getenv("SHAPEHOM_THREADS");
  if (env == nullptr) return std::max(1u, std::thread::hardware_concurrency());
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
}

TriangleMesh build_mesh(const MeshSpec& spec) {
  if (spec.kind == MeshSpec::Kind::kDisk)
    return generate_disk(spec.radius, spec.h);
  return read_mesh(spec.path);
}

void validate_common(const RunConfig& cfg) {
  if (cfg.order < 0 || cfg.order > 5)
    throw ConfigError("order must be between 0 and 5");
  if (cfg.ramp.tol_start <= 0 || cfg.ramp.tol_end <= 0)
    throw ConfigError("tolerances must be positive");
  if (cfg.mu <= 0 || cfg.lambda < 0)
    throw ConfigError("need mu > 0 and lambda >= 0");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  return out;
}

// ---------------------------------------------------------------- demo-scalar

double bisect_root_of_F(double lo, double hi) {
  auto F = [](double x) { return ScalarConvexHomotopy::F_deriv(x, 0); };
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (F(lo) * F(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

int cmd_demo_scalar(const RunConfig& cfg) {
  ensure_dir(cfg.out_dir);
  ScalarConvexHomotopy prob;
  struct Variant {
    std::string name;
    PredictorKind kind;
    int order;
  };
  std::vector<Variant> variants = {{"pred0", PredictorKind::kTaylor, 0},
                                   {"secant", PredictorKind::kSecant, 0},
                                   {"pred1", PredictorKind::kTaylor, 1},
                                   {"pred2", PredictorKind::kTaylor, 2}};
  bool all_ok = true;
  std::ofstream summary = open_out(cfg.out_dir + "/summary.csv");
  summary << "predictor,x_final,abs_F,visited,accepted\n";
  double root = bisect_root_of_F(0.0, 1.0);
  for (const auto& v : variants) {
    EngineOptions opt;
    opt.order = v.order;
    opt.predictor = v.kind;
    opt.strategy = cfg.strategy;
    opt.ramp = cfg.ramp;
    auto run = run_homotopy(prob, opt, 0.0);
    double absF =
        std::abs(ScalarConvexHomotopy::F_deriv(run.state, 0));
    bool ok = run.reached_end && absF <= 1e-12 &&
              std::abs(run.state - root) <= 1e-10;
    all_ok = all_ok && ok;
    std::ofstream tr = open_out(cfg.out_dir + "/trace_" + v.name + ".csv");
    write_trace_csv(run.trace, tr, cfg.deterministic);
    summary << v.name << "," << format_double(run.state) << ","
            << format_double(absF) << "," << run.trace.visited() << ","
            << run.trace.accepted_count() << "\n";
    std::printf("demo-scalar %-6s x=%.12f |F(x)|=%.3e %s\n", v.name.c_str(),
                run.state, absF, ok ? "ok" : "FAILED");
  }

  // Solution curve and the predictions made from (t, x(t)) = (0.5, .) with
  // dt = 0.5, one marker per predictor.
  std::vector<Vec2> curve;
  double x = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double t = i / 100.0;
    auto c = prob.corrector(x, t, 1e-13);
    x = c.state;
    curve.push_back({t, x});
  }
  {
    std::ofstream cc = open_out(cfg.out_dir + "/solution_curve.csv");
    cc << "t,x\n";
    for (const auto& p : curve)
      cc << format_double(p.x) << "," << format_double(p.y) << "\n";
  }
  double xm = curve[50].y;
  auto derivs = prob.path_derivatives(xm, 0.5, 2);
  SvgPlot plot(0.0, 1.05, 0.0, 0.8, 640, 480, "solution path and predictors");
  plot.axes("t", "x");
  plot.polyline(curve, "blue", 2.0);
  plot.marker({0.5, xm}, "black", 4.0);
  plot.marker({1.0, xm}, "magenta");                       // order 0
  plot.marker({1.0, xm + 0.5 * derivs[0]}, "olive");       // order 1
  plot.marker({1.0, xm + 0.5 * derivs[0] + 0.125 * derivs[1]}, "green");
  plot.marker({1.0, curve.back().y}, "blue", 3.0);
  plot.save(cfg.out_dir + "/fig_predictors.svg");

  return all_ok ? kExitOk : kExitNumerical;
}

// --------------------------------------------------------------------- newton

int cmd_newton(const RunConfig& cfg) {
  ensure_dir(cfg.out_dir);
  TriangleMesh mesh = build_mesh(cfg.mesh);
  auto f_target = parse_integrand_spec(cfg.f_target);
  ObjectiveBlend blend{f_target.get(), nullptr, 1.0, 0.0};

  NewtonConfig ncfg = cfg.newton;
  ncfg.method = method_from_string(cfg.method);
  ncfg.mu = cfg.mu;
  ncfg.lambda = cfg.lambda;
  ncfg.btau = cfg.btau;
  ncfg.quad_degree = cfg.quad_degree;

  if (cfg.emit_matrices) {
    TriangleQuadrature quad = TriangleQuadrature::make(cfg.quad_degree);
    auto bmap = boundary_index_map(mesh);
    BoundaryFrame fr = boundary_frames(mesh);
    write_triplets(cfg.out_dir + "/hessian.txt",
                   assemble_hessian(mesh, bmap, blend, quad).eigen());
    write_triplets(cfg.out_dir + "/btau.txt",
                   assemble_btau(mesh, fr, cfg.btau).eigen());
    write_triplets(cfg.out_dir + "/elasticity.txt",
                   assemble_elasticity(mesh, cfg.mu, cfg.lambda).eigen());
  }

  write_mesh(cfg.out_dir + "/before.mesh", mesh);
  auto t0 = std::chrono::steady_clock::now();
  auto [after, rep] = newton_solve(mesh, blend, ncfg);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  write_mesh(cfg.out_dir + "/after.mesh", after);

  std::ofstream res = open_out(cfg.out_dir + "/residuals.csv");
  res << "iteration,update_norm,normal_residual\n";
  for (size_t i = 0; i < rep.normal_residuals.size(); ++i) {
    double up = i < rep.update_norms.size() ? rep.update_norms[i] : 0.0;
    res << i + 1 << "," << format_double(up) << ","
        << format_double(rep.normal_residuals[i]) << "\n";
  }
  std::ofstream tim = open_out(cfg.out_dir + "/timing.csv");
  tim << "iterations,total_ms\n"
      << rep.iterations << "," << format_double(cfg.deterministic ? 0.0 : ms)
      << "\n";

  std::printf("newton method=%s iterations=%d success=%d", cfg.method.c_str(),
              rep.iterations, rep.success ? 1 : 0);
  if (!rep.normal_residuals.empty())
    std::printf(" final_normal_residual=%.3e", rep.normal_residuals.back());
  std::printf("\n");

  bool hard_failure = rep.failure == NewtonFailure::kDivergence ||
                      rep.failure == NewtonFailure::kMeshTangled ||
                      rep.failure == NewtonFailure::kSolver ||
                      rep.failure == NewtonFailure::kDomain;
  if (hard_failure) {
    std::fprintf(stderr, "newton failed: %s\n", rep.message.c_str());
    return kExitNumerical;
  }
  if (!rep.success && ncfg.method == NewtonMethod::kUnregularized)
    return kExitNumerical;
  return kExitOk;
}

// ------------------------------------------------------------------- homotopy

int cmd_homotopy(const RunConfig& cfg) {
  ensure_dir(cfg.out_dir);
  TriangleMesh mesh = build_mesh(cfg.mesh);
  ShapeHomotopySpec spec;
  spec.f_target = parse_integrand_spec(cfg.f_target);
  spec.f_start = parse_integrand_spec(cfg.f_start);
  spec.initial_mesh = mesh;
  spec.mu = cfg.mu;
  spec.lambda = cfg.lambda;
  spec.newton = cfg.newton;
  spec.newton.btau = cfg.btau;
  spec.quad_degree = cfg.quad_degree;

  auto [mismatch, bound] = start_levelset_mismatch(mesh, *spec.f_start);
  if (mismatch > bound) {
    std::fprintf(stderr,
                 "start integrand does not vanish on the mesh boundary: "
                 "max |f_start| = %g exceeds 2 h max |grad f_start| = %g\n",
                 mismatch, bound);
    return kExitConfig;
  }

  ShapeHomotopyProblem prob(spec);
  EngineOptions opt;
  opt.order = cfg.order;
  opt.strategy = cfg.strategy;
  opt.ramp = cfg.ramp;

  std::ofstream curv = open_out(cfg.out_dir + "/curvatures.csv");
  curv << "step,t,order,norm,recommended_dt\n";
  double alpha_for_reco = 0.02;
  if (const auto* a = std::get_if<AgileStep>(&cfg.strategy))
    alpha_for_reco = a->alpha;
  if (const auto* a = std::get_if<AgileAdaptiveStep>(&cfg.strategy))
    alpha_for_reco = a->alpha0;

  HomotopyEngine<ShapeHomotopyProblem> engine(prob, opt);
  int n_snapshots = 0;
  engine.set_accept_callback([&](const ShapeHomotopyProblem::State& s,
                                 double t, int k) {
    char name[96];
    std::snprintf(name, sizeof(name), "%s/step_%d_t_%g.mesh",
                  cfg.out_dir.c_str(), k, t);
    write_mesh(name, s.mesh);
    ++n_snapshots;
    // Derivative magnitudes and the step the remainder rule would take.
    if (t < 1.0) {
      auto ds = prob.path_derivatives(s, t, cfg.order + 1, cfg.order);
      for (size_t j = 0; j < ds.size(); ++j) {
        double reco = (j >= 1) ? agile_step_size(static_cast<int>(j) - 1,
                                                 alpha_for_reco, ds[j].l2norm)
                               : 0.0;
        curv << k << "," << format_double(t) << "," << j + 1 << ","
             << format_double(ds[j].l2norm) << ","
             << format_double(std::isfinite(reco) ? reco : 0.0) << "\n";
      }
    }
  });

  auto run = engine.run(ShapeHomotopyProblem::State{mesh});
  {
    std::ofstream tr = open_out(cfg.out_dir + "/trace.csv");
    write_trace_csv(run.trace, tr, cfg.deterministic);
    std::ofstream path = open_out(cfg.out_dir + "/path.csv");
    path << "attempt,t_target,accepted\n";
    for (const auto& r : run.trace.records)
      path << r.attempt << "," << format_double(r.t_target) << ","
           << (r.accepted ? 1 : 0) << "\n";
  }
  write_mesh(cfg.out_dir + "/final.mesh", run.state.mesh);

  std::printf(
      "homotopy order=%d visited=%d accepted=%d corrector_iters=%d %s\n",
      cfg.order, run.trace.visited(), run.trace.accepted_count(),
      run.trace.total_corrector_iters,
      run.reached_end ? "reached t=1" : ("FAILED: " + run.error).c_str());
  return run.reached_end ? kExitOk : kExitNumerical;
}

// --------------------------------------------------------------------- pareto

int cmd_pareto(const RunConfig& cfg) {
  ensure_dir(cfg.out_dir);
  ParetoSpec spec;
  spec.a = cfg.pareto_a;
  spec.R = cfg.pareto_R;
  spec.deltas = cfg.deltas;
  spec.order = cfg.order;
  spec.strategy = cfg.strategy;
  spec.dmax = cfg.dmax;
  spec.corrector_tol = cfg.ramp.tol_end;
  spec.bootstrap_ramp = cfg.ramp;
  spec.mu = cfg.mu;
  spec.lambda = cfg.lambda;
  spec.newton = cfg.newton;
  spec.newton.btau = cfg.btau;
  spec.quad_degree = cfg.quad_degree;
  spec.initial_mesh = build_mesh(cfg.mesh);
  spec.initial_radius = cfg.mesh.radius;
  spec.max_threads = thread_cap();

  MeshSink sink = [&](const ParetoPoint& p, const TriangleMesh& m) {
    char name[128];
    std::snprintf(name, sizeof(name), "point_d%g_b%d_t%g.mesh", p.delta,
                  p.branch, p.t);
    write_mesh(cfg.out_dir + "/" + name, m);
    return std::string(name);
  };
  ParetoResult result = trace_front(spec, sink);

  std::ofstream front = open_out(cfg.out_dir + "/pareto.csv");
  export_front(result.points, front);
  for (const auto& bt : result.traces) {
    char name[96];
    std::snprintf(name, sizeof(name), "%s/trace_d%g_b%d.csv",
                  cfg.out_dir.c_str(), bt.delta, bt.branch);
    std::ofstream tr = open_out(name);
    write_trace_csv(bt.trace, tr, cfg.deterministic, true);
  }

  // Pairwise objective projections.
  struct Proj {
    const char* name;
    int a, b;
  };
  for (const Proj& pr :
       {Proj{"pareto_J1J2.svg", 0, 1}, Proj{"pareto_J2J3.svg", 1, 2},
        Proj{"pareto_J3J1.svg", 2, 0}}) {
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    auto get = [&](const ParetoPoint& p, int i) {
      return i == 0 ? p.J1 : (i == 1 ? p.J2 : p.J3);
    };
    for (const auto& p : result.points) {
      for (int i = 0; i < 2; ++i) {
        int c = i == 0 ? pr.a : pr.b;
        lo[i] = std::min(lo[i], get(p, c));
        hi[i] = std::max(hi[i], get(p, c));
      }
    }
    if (result.points.empty()) lo[0] = lo[1] = 0, hi[0] = hi[1] = 1;
    double padx = 0.05 * (hi[0] - lo[0] + 1e-12),
           pady = 0.05 * (hi[1] - lo[1] + 1e-12);
    SvgPlot plot(lo[0] - padx, hi[0] + padx, lo[1] - pady, hi[1] + pady, 560,
                 560, pr.name);
    plot.axes(pr.a == 0 ? "J1" : (pr.a == 1 ? "J2" : "J3"),
              pr.b == 0 ? "J1" : (pr.b == 1 ? "J2" : "J3"));
    for (const auto& p : result.points) {
      const char* color =
          p.branch == 12 ? "red" : (p.branch == 23 ? "blue" : "green");
      plot.marker({get(p, pr.a), get(p, pr.b)}, color, 3.0, p.delta == 0.0);
    }
    plot.save(cfg.out_dir + "/" + pr.name);
  }

  std::printf("pareto points=%zu branches=%zu %s\n", result.points.size(),
              result.traces.size(),
              result.ok ? "ok" : ("FAILED: " + result.error).c_str());
  return result.ok ? kExitOk : kExitNumerical;
}

RunConfig defaults_for(const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  if (command == "demo-scalar") {
    cfg.out_dir = "out_demo_scalar";
  } else if (command == "newton") {
    cfg.out_dir = "out_newton";
    cfg.mesh = {MeshSpec::Kind::kDisk, 1.0, 0.04, ""};
    cfg.f_target = "ellipse{a=1.25}";
    cfg.newton.iter_max = 50;
  } else if (command == "homotopy") {
    cfg.out_dir = "out_homotopy";
    cfg.mesh = {MeshSpec::Kind::kDisk, 1.0, 0.0909, ""};
    cfg.f_target = "p_ellipse{p=4,a=2,b=0.5,R=4}";
    cfg.f_start = "disk{r=1}";
  } else if (command == "pareto") {
    cfg.out_dir = "out_pareto";
    cfg.mesh = {MeshSpec::Kind::kDisk, 2.5, 0.25, ""};
    cfg.strategy = AgileStep{0.1};
    cfg.ramp = {1e-4, 1e-10};
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape optimization by predictor-corrector continuation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, strategy_name, mesh_arg, method_name;
  std::string f_target_arg, f_start_arg;
  int order = -1;
  double dt0 = -1, gamma_up = -1, gamma_down = -1, alpha = -1, alpha_up = -1,
         alpha_down = -1, tol_start = -1, tol_end = -1, mu = -1, lambda = -1,
         dmax = -1;
  std::string btau_name;
  bool timings = false;
  bool emit_matrices = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--order", order, "predictor order (0..5)");
    sub->add_option("--strategy", strategy_name,
                    "fixed | agile | agile-adaptive");
    sub->add_option("--dt0", dt0);
    sub->add_option("--gamma-up", gamma_up);
    sub->add_option("--gamma-down", gamma_down);
    sub->add_option("--alpha", alpha);
    sub->add_option("--alpha-up", alpha_up);
    sub->add_option("--alpha-down", alpha_down);
    sub->add_option("--tol-start", tol_start);
    sub->add_option("--tol-end", tol_end);
    sub->add_option("--mu", mu);
    sub->add_option("--lambda", lambda);
    sub->add_option("--mesh", mesh_arg, "mesh file path or disk:R:H");
    sub->add_option("--btau", btau_name, "lumped | consistent");
    sub->add_option("--method", method_name,
                    "unregularized | h1 | tangential | gradient");
    sub->add_option("--dmax", dmax, "max objective-space spacing");
    sub->add_option("--f-target", f_target_arg, "target integrand spec");
    sub->add_option("--f-start", f_start_arg, "start integrand spec");
    sub->add_flag("--timings", timings, "write real timing columns");
    sub->add_flag("--emit-matrices", emit_matrices,
                  "dump assembled matrices as row/col/value triplets");
  };

  CLI::App* demo = app.add_subcommand("demo-scalar", "scalar path-following demo");
  CLI::App* newton = app.add_subcommand("newton", "stationary-shape solve");
  CLI::App* homotopy = app.add_subcommand("homotopy", "shape continuation run");
  CLI::App* pareto = app.add_subcommand("pareto", "trace a three-objective front");
  for (CLI::App* sub : {demo, newton, homotopy, pareto}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  int exit_code = kExitOk;
  try {
    RunConfig cfg = defaults_for(command);
    if (!config_path.empty()) {
      cfg = load_config_file(config_path, cfg);
      cfg.command = command;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (order >= 0) cfg.order = order;
    if (!strategy_name.empty()) {
      if (strategy_name == "fixed")
        cfg.strategy = FixedStep{};
      else if (strategy_name == "agile")
        cfg.strategy = AgileStep{};
      else if (strategy_name == "agile-adaptive")
        cfg.strategy = AgileAdaptiveStep{};
      else
        throw ConfigError("unknown strategy '" + strategy_name + "'");
    }
    if (auto* f = std::get_if<FixedStep>(&cfg.strategy)) {
      if (dt0 > 0) f->dt0 = dt0;
      if (gamma_up > 0) f->gamma_up = gamma_up;
      if (gamma_down > 0) f->gamma_down = gamma_down;
    }
    if (auto* a = std::get_if<AgileStep>(&cfg.strategy))
      if (alpha > 0) a->alpha = alpha;
    if (auto* aa = std::get_if<AgileAdaptiveStep>(&cfg.strategy)) {
      if (alpha > 0) aa->alpha0 = alpha;
      if (alpha_up > 0) aa->alpha_up = alpha_up;
      if (alpha_down > 0) aa->alpha_down = alpha_down;
    }
    if (tol_start > 0) cfg.ramp.tol_start = tol_start;
    if (tol_end > 0) cfg.ramp.tol_end = tol_end;
    if (mu > 0) cfg.mu = mu;
    if (lambda >= 0) cfg.lambda = lambda;
    if (dmax > 0) cfg.dmax = dmax;
    if (!method_name.empty()) cfg.method = method_name;
    if (!f_target_arg.empty()) cfg.f_target = f_target_arg;
    if (!f_start_arg.empty()) cfg.f_start = f_start_arg;
    if (!btau_name.empty()) {
      if (btau_name == "lumped")
        cfg.btau = BtauVariant::kLumped;
      else if (btau_name == "consistent")
        cfg.btau = BtauVariant::kConsistent;
      else
        throw ConfigError("btau must be lumped or consistent");
    }
    if (!mesh_arg.empty()) {
      if (mesh_arg.rfind("disk:", 0) == 0) {
        double r, h;
        if (std::sscanf(mesh_arg.c_str(), "disk:%lf:%lf", &r, &h) != 2)
          throw ConfigError("mesh spec must be PATH or disk:R:H");
        cfg.mesh = {MeshSpec::Kind::kDisk, r, h, ""};
      } else {
        cfg.mesh = {MeshSpec::Kind::kFile, 0, 0, mesh_arg};
      }
    }
    if (timings) cfg.deterministic = false;
    if (emit_matrices) cfg.emit_matrices = true;
    validate_common(cfg);
    method_from_string(cfg.method);

    // Echo the effective configuration next to the outputs.
    ensure_dir(cfg.out_dir);
    std::ofstream cfg_out = open_out(cfg.out_dir + "/config.json");
    cfg_out << serialize_config(cfg) << "\n";
    cfg_out.close();

    if (command == "demo-scalar")
      exit_code = cmd_demo_scalar(cfg);
    else if (command == "newton")
      exit_code = cmd_newton(cfg);
    else if (command == "homotopy")
      exit_code = cmd_homotopy(cfg);
    else if (command == "pareto")
      exit_code = cmd_pareto(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const MeshError& e) {
    std::fprintf(stderr, "mesh error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return exit_code;
}
