#include "shapehom/pareto.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "shapehom/errors.hpp"
#include "shapehom/integrand.hpp"

namespace shapehom {

namespace {

std::array<double, 3> conv_weights(double s1, double s2) {
  return {s1, s2, 1.0 - s1 - s2};
}

std::array<double, 3> lerp3(const std::array<double, 3>& a,
                            const std::array<double, 3>& b, double t) {
  return {(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1],
          (1.0 - t) * a[2] + t * b[2]};
}

}  // namespace

std::array<double, 3> branch_weights(int branch, double delta, double t) {
  if (delta < 0.0 || delta > 1.0 / 3.0 + 1e-15)
    throw ConfigError("branch_weights: delta outside [0, 1/3]");
  std::array<double, 3> corner1 = conv_weights(1.0 - 2.0 * delta, delta);
  std::array<double, 3> corner2 = conv_weights(delta, 1.0 - 2.0 * delta);
  std::array<double, 3> corner3 = conv_weights(delta, delta);
  switch (branch) {
    case 12: return lerp3(corner1, corner2, t);
    case 23: return lerp3(corner2, corner3, t);
    case 31: return lerp3(corner3, corner1, t);
    default: throw ConfigError("branch_weights: branch must be 12, 23 or 31");
  }
}

namespace {

struct Objectives {
  std::shared_ptr<const Integrand> f1, f2, f3;

  std::shared_ptr<const Integrand> combo(std::array<double, 3> w) const {
    return std::make_shared<CombinationIntegrand>(
        std::vector<CombinationIntegrand::Term>{
            {w[0], f1}, {w[1], f2}, {w[2], f3}});
  }

  std::array<double, 3> values(const TriangleMesh& mesh,
                               const TriangleQuadrature& quad) const {
    ObjectiveBlend b1{f1.get(), nullptr, 1.0, 0.0};
    ObjectiveBlend b2{f2.get(), nullptr, 1.0, 0.0};
    ObjectiveBlend b3{f3.get(), nullptr, 1.0, 0.0};
    return {objective_value(mesh, b1, quad), objective_value(mesh, b2, quad),
            objective_value(mesh, b3, quad)};
  }
};

double objective_distance(const std::array<double, 3>& a,
                          const std::array<double, 3>& b) {
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

namespace {

ParetoResult trace_single_delta(const ParetoSpec& spec, double delta,
                                const MeshSink& sink) {
  ParetoResult result;
  TriangleQuadrature quad = TriangleQuadrature::make(spec.quad_degree);
  Objectives obj{
      std::make_shared<EllipseIntegrand>(spec.a, spec.R),
      std::make_shared<CloverIntegrand>(spec.clover_a, spec.clover_b,
                                        spec.clover_eps),
      std::make_shared<RotatedEllipseIntegrand>(spec.a, spec.R)};

  NewtonConfig corrector = spec.newton;
  corrector.mu = spec.mu;
  corrector.lambda = spec.lambda;
  corrector.quad_degree = spec.quad_degree;

  {
    // Bootstrap: level-set homotopy from the initial disk to the branch-12
    // start weighting.
    TriangleMesh current;
    {
      ShapeHomotopySpec boot;
      boot.f_target = obj.combo(branch_weights(12, delta, 0.0));
      boot.f_start = std::make_shared<DiskIntegrand>(spec.initial_radius);
      boot.initial_mesh = spec.initial_mesh;
      boot.mu = spec.mu;
      boot.lambda = spec.lambda;
      boot.newton = corrector;
      boot.quad_degree = spec.quad_degree;
      ShapeHomotopyProblem prob(boot);
      EngineOptions opt;
      opt.order = spec.order;
      opt.strategy = spec.strategy;
      opt.ramp = spec.bootstrap_ramp;
      auto run = run_homotopy(prob, opt,
                              ShapeHomotopyProblem::State{spec.initial_mesh});
      if (!run.reached_end) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "bootstrap failed at delta=%g: ",
                      delta);
        result.error = buf + run.error;
        return result;
      }
      current = std::move(run.state.mesh);
    }

    for (int branch : {12, 23, 31}) {
      ShapeHomotopySpec bs;
      bs.f_start = obj.combo(branch_weights(branch, delta, 0.0));
      bs.f_target = obj.combo(branch_weights(branch, delta, 1.0));
      bs.initial_mesh = current;
      bs.mu = spec.mu;
      bs.lambda = spec.lambda;
      bs.newton = corrector;
      bs.quad_degree = spec.quad_degree;
      ShapeHomotopyProblem prob(bs);

      EngineOptions opt;
      opt.order = spec.order;
      opt.strategy = spec.strategy;
      opt.ramp = ToleranceRamp::constant(spec.corrector_tol);

      auto emit = [&](const TriangleMesh& mesh, double t) {
        ParetoPoint p;
        p.branch = branch;
        p.delta = delta;
        p.t = t;
        auto J = obj.values(mesh, quad);
        p.J1 = J[0];
        p.J2 = J[1];
        p.J3 = J[2];
        ObjectiveBlend blend{bs.f_target.get(), bs.f_start.get(), t, 1.0 - t};
        p.residual = stationarity_residual(mesh, blend, spec.newton.btau,
                                           spec.quad_degree);
        if (sink) p.mesh_file = sink(p, mesh);
        result.points.push_back(p);
      };

      HomotopyEngine<ShapeHomotopyProblem> engine(prob, opt);
      // The handed-over mesh is the branch's t = 0 front point; emitting it
      // before the run keeps branch i's endpoint and branch i+1's start
      // bitwise equal in objective space.
      std::array<double, 3> last_emitted = obj.values(current, quad);
      emit(current, 0.0);
      engine.set_accept_filter(
          [&](const ShapeHomotopyProblem::State& s, double) {
            return objective_distance(obj.values(s.mesh, quad),
                                      last_emitted) <= spec.dmax;
          });
      engine.set_accept_callback(
          [&](const ShapeHomotopyProblem::State& s, double t, int) {
            last_emitted = obj.values(s.mesh, quad);
            emit(s.mesh, t);
          });

      auto run = engine.run(ShapeHomotopyProblem::State{current});
      if (!run.reached_end) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "branch %d failed at delta=%g: ",
                      branch, delta);
        result.error = buf + run.error;
        return result;
      }
      BranchTrace bt;
      bt.branch = branch;
      bt.delta = delta;
      bt.trace = run.trace;
      result.traces.push_back(std::move(bt));
      current = std::move(run.state.mesh);
    }
  }
  result.ok = true;
  return result;
}

}  // namespace

ParetoResult trace_front(const ParetoSpec& spec, const MeshSink& sink) {
  const int n = static_cast<int>(spec.deltas.size());
  std::vector<ParetoResult> partial(n);
  int n_threads = std::max(1, std::min(spec.max_threads, n));
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i)
      partial[i] = trace_single_delta(spec, spec.deltas[i], sink);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w) {
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          partial[i] = trace_single_delta(spec, spec.deltas[i], sink);
      });
    }
    for (auto& th : pool) th.join();
  }
  ParetoResult merged;
  merged.ok = true;
  for (int i = 0; i < n; ++i) {
    if (!partial[i].ok) {
      merged.ok = false;
      if (merged.error.empty()) merged.error = partial[i].error;
    }
    for (auto& p : partial[i].points) merged.points.push_back(std::move(p));
    for (auto& t : partial[i].traces) merged.traces.push_back(std::move(t));
  }
  return merged;
}

void export_front(const std::vector<ParetoPoint>& points, std::ostream& out) {
  std::vector<const ParetoPoint*> ordered;
  ordered.reserve(points.size());
  for (const auto& p : points) ordered.push_back(&p);
  auto branch_rank = [](int b) { return b == 12 ? 0 : (b == 23 ? 1 : 2); };
  std::stable_sort(ordered.begin(), ordered.end(),
                   [&](const ParetoPoint* a, const ParetoPoint* b) {
                     if (a->delta != b->delta) return a->delta < b->delta;
                     if (a->branch != b->branch)
                       return branch_rank(a->branch) < branch_rank(b->branch);
                     return a->t < b->t;
                   });
  out << "branch,delta,t,J1,J2,J3,residual,mesh_file\n";
  char buf[256];
  for (const ParetoPoint* p : ordered) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,",
                  p->branch, p->delta, p->t, p->J1, p->J2, p->J3, p->residual);
    out << buf << p->mesh_file << "\n";
  }
}

}  // namespace shapehom
