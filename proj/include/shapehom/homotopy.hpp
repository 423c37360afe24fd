#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shapehom/errors.hpp"
#include "shapehom/jet.hpp"

namespace shapehom {

// Corrector tolerance as a function of the continuation parameter:
// tol(t) = (1-t) tol_start + t tol_end.
struct ToleranceRamp {
  double tol_start = 1e-4;
  double tol_end = 1e-10;
  double operator()(double t) const {
    return (1.0 - t) * tol_start + t * tol_end;
  }
  static ToleranceRamp constant(double tol) { return {tol, tol}; }
};

// Step-size control. Fixed: grow by gamma_up after success, shrink by
// gamma_down after failure. Agile: choose dt so the leading Taylor
// remainder of the order-q predictor equals alpha,
//   dt = ((q+1)! alpha)^{1/(q+1)} ||x^{[q+1]}||^{-1/(q+1)};
// a failed attempt halves dt. AgileAdaptive additionally scales alpha by
// alpha_up / alpha_down after success / failure.
struct FixedStep {
  double dt0 = 1.0;
  double gamma_down = 0.5;
  double gamma_up = 1.75;
};
struct AgileStep {
  double alpha = 0.02;
};
struct AgileAdaptiveStep {
  double alpha0 = 0.02;
  double alpha_down = 0.5;
  double alpha_up = 1.1;
};
using StepStrategy = std::variant<FixedStep, AgileStep, AgileAdaptiveStep>;

inline bool strategy_is_agile(const StepStrategy& s) {
  return !std::holds_alternative<FixedStep>(s);
}

inline double agile_step_size(int q, double alpha, double deriv_norm_qp1) {
  double c = std::pow(Jet2::factorial(q + 1) * alpha, 1.0 / (q + 1));
  if (deriv_norm_qp1 <= 0.0) return std::numeric_limits<double>::infinity();
  return c * std::pow(deriv_norm_qp1, -1.0 / (q + 1));
}

enum class PredictorKind { kTaylor, kSecant };

struct TraceRecord {
  int attempt = 0;
  double t_target = 0.0;
  double dt = 0.0;
  int order = 0;  // -1 for the secant predictor
  bool accepted = false;
  int newton_iters = 0;
  double residual = 0.0;
  int n_pred_solves = 0;  // derivative systems solved for this attempt
  double t_pred_ms = 0.0;
  double t_corr_ms = 0.0;
  bool spacing_rejected = false;
};

struct HomotopyTrace {
  std::vector<TraceRecord> records;
  int initial_corrector_iters = 0;
  double initial_residual = 0.0;
  int total_pred_solves = 0;
  int total_corrector_iters = 0;

  int visited() const { return static_cast<int>(records.size()); }
  int accepted_count() const {
    int n = 0;
    for (const auto& r : records) n += r.accepted ? 1 : 0;
    return n;
  }
};

struct EngineOptions {
  int order = 2;  // ignored when predictor == kSecant
  PredictorKind predictor = PredictorKind::kTaylor;
  StepStrategy strategy = FixedStep{};
  ToleranceRamp ramp;
  double dt_min = 1e-8;
  int max_attempts = 100000;
};

template <class State>
struct CorrectorOutcome {
  State state;
  bool success = false;
  int iterations = 0;
  double residual = 0.0;
  std::string message;
};

template <class State>
struct PredictOutcome {
  State state;
  bool ok = true;
};

template <class State>
struct RunOutcome {
  State state;
  HomotopyTrace trace;
  bool reached_end = false;
  std::string error;
};

// Requirements on Problem:
//   using State; using Derivative;
//   CorrectorOutcome<State> corrector(const State&, double t, double tol);
//   std::vector<Derivative> path_derivatives(const State&, double t,
//                                            int n_max, int n_extend);
//   PredictOutcome<State> apply_predictor(
//       const State&, const std::vector<std::pair<const Derivative*,
//       double>>&);
//   double derivative_norm(const Derivative&);
// and, only when the secant predictor is requested,
//   State apply_secant(const State& cur, const State& prev, double factor).
template <class Problem>
class HomotopyEngine {
 public:
  using State = typename Problem::State;
  using Derivative = typename Problem::Derivative;
  using AcceptFilter = std::function<bool(const State&, double)>;
  using AcceptCallback = std::function<void(const State&, double, int)>;

  HomotopyEngine(Problem& problem, EngineOptions options)
      : prob_(problem), opt_(std::move(options)) {}

  // Optional veto on otherwise successful corrector results; a vetoed
  // attempt is recorded with spacing_rejected and retried with a reduced
  // step. Must be side-effect free on veto.
  void set_accept_filter(AcceptFilter f) { accept_filter_ = std::move(f); }
  // Called after each accepted step with (state, t, accepted index).
  void set_accept_callback(AcceptCallback f) { accept_cb_ = std::move(f); }

  RunOutcome<State> run(const State& initial) {
    RunOutcome<State> out{initial, {}, false, ""};
    const int q = (opt_.predictor == PredictorKind::kSecant) ? 0 : opt_.order;
    const bool agile = strategy_is_agile(opt_.strategy);
    const int n_derivs =
        (opt_.predictor == PredictorKind::kSecant) ? 0 : q + (agile ? 1 : 0);
    if (opt_.predictor == PredictorKind::kSecant && agile)
      throw ConfigError("secant predictor requires the fixed step strategy");
    double alpha_cur = 0.0;
    if (auto* a = std::get_if<AgileStep>(&opt_.strategy)) alpha_cur = a->alpha;
    if (auto* a = std::get_if<AgileAdaptiveStep>(&opt_.strategy))
      alpha_cur = a->alpha0;

    // Initial solve at t = 0.
    auto first = prob_.corrector(initial, 0.0, opt_.ramp(0.0));
    out.trace.initial_corrector_iters = first.iterations;
    out.trace.initial_residual = first.residual;
    out.trace.total_corrector_iters += first.iterations;
    if (!first.success) {
      out.error = "corrector failed at t = 0: " + first.message;
      out.state = first.state;
      return out;
    }
    State state = first.state;
    double t = 0.0;
    int attempt = 0;
    int accepted = 0;

    bool have_prev = false;
    State prev_state = state;
    double prev_t = 0.0;

    double dt = 0.0;

    while (t < 1.0) {
      if (attempt >= opt_.max_attempts) {
        out.error = "attempt budget exhausted";
        out.state = state;
        return out;
      }
      // Derivatives at the accepted state (reused across retries).
      std::vector<Derivative> derivs;
      double pred_ms = 0.0;
      if (n_derivs > 0) {
        auto tic = std::chrono::steady_clock::now();
        try {
          derivs = prob_.path_derivatives(state, t, n_derivs,
                                          std::max(0, n_derivs - 1));
        } catch (const std::exception& e) {
          out.error = std::string("derivative system failed: ") + e.what();
          out.state = state;
          return out;
        }
        pred_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - tic)
                      .count();
        out.trace.total_pred_solves += n_derivs;
      }
      int fresh_solves = n_derivs;

      // Fresh step size for this state.
      if (const auto* f = std::get_if<FixedStep>(&opt_.strategy)) {
        if (accepted == 0) dt = f->dt0;
      } else {
        double nrm = prob_.derivative_norm(derivs.back());
        dt = agile_step_size(q, alpha_cur, nrm);
      }

      // Attempt loop at this state.
      while (true) {
        dt = std::min(dt, 1.0);
        bool final_step = (dt >= 1.0 - t);
        double t_next = final_step ? 1.0 : t + dt;
        double dt_eff = t_next - t;
        if (dt_eff < opt_.dt_min) {
          out.error = "step size underflow";
          out.state = state;
          return out;
        }

        TraceRecord rec;
        rec.attempt = attempt++;
        rec.t_target = t_next;
        rec.dt = dt_eff;
        rec.order = (opt_.predictor == PredictorKind::kSecant) ? -1 : q;
        rec.n_pred_solves = fresh_solves;
        rec.t_pred_ms = pred_ms;
        fresh_solves = 0;
        pred_ms = 0.0;

        // Predict.
        PredictOutcome<State> pred{state, true};
        auto tic = std::chrono::steady_clock::now();
        if (opt_.predictor == PredictorKind::kSecant) {
          if (have_prev) {
            if constexpr (requires(Problem& p, const State& s) {
                            p.apply_secant(s, s, 1.0);
                          }) {
              pred.state =
                  prob_.apply_secant(state, prev_state, dt_eff / (t - prev_t));
            } else {
              throw ConfigError("secant predictor not supported here");
            }
          }
        } else if (q > 0) {
          std::vector<std::pair<const Derivative*, double>> weighted;
          double w = 1.0;
          for (int i = 0; i < q; ++i) {
            w *= dt_eff / (i + 1);
            weighted.emplace_back(&derivs[i], w);
          }
          pred = prob_.apply_predictor(state, weighted);
        }
        rec.t_pred_ms += std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - tic)
                             .count();

        // Correct.
        bool ok = false;
        bool vetoed = false;
        CorrectorOutcome<State> corr;
        if (pred.ok) {
          auto tc = std::chrono::steady_clock::now();
          corr = prob_.corrector(pred.state, t_next, opt_.ramp(t_next));
          rec.t_corr_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - tc)
                              .count();
          rec.newton_iters = corr.iterations;
          rec.residual = corr.residual;
          out.trace.total_corrector_iters += corr.iterations;
          ok = corr.success;
          if (ok && accept_filter_ && !accept_filter_(corr.state, t_next)) {
            ok = false;
            vetoed = true;
          }
        }
        rec.accepted = ok;
        rec.spacing_rejected = vetoed;
        out.trace.records.push_back(rec);

        if (ok) {
          have_prev = true;
          prev_state = state;
          prev_t = t;
          state = corr.state;
          t = t_next;
          ++accepted;
          if (accept_cb_) accept_cb_(state, t, accepted);
          // Post-success step update (the fresh value for agile modes is
          // recomputed from the new derivatives at the top of the loop).
          if (const auto* f = std::get_if<FixedStep>(&opt_.strategy)) {
            dt = f->gamma_up * dt_eff;
          } else if (const auto* aa =
                         std::get_if<AgileAdaptiveStep>(&opt_.strategy)) {
            alpha_cur *= aa->alpha_up;
          }
          break;
        }

        // Failure (or spacing veto): shrink and retry from the same state.
        if (const auto* f = std::get_if<FixedStep>(&opt_.strategy)) {
          dt = f->gamma_down * dt_eff;
        } else if (const auto* aa =
                       std::get_if<AgileAdaptiveStep>(&opt_.strategy)) {
          alpha_cur *= aa->alpha_down;
          double nrm = prob_.derivative_norm(derivs.back());
          dt = agile_step_size(q, alpha_cur, nrm);
        } else {
          dt = 0.5 * dt_eff;
        }
      }
    }
    out.state = state;
    out.reached_end = true;
    return out;
  }

 private:
  Problem& prob_;
  EngineOptions opt_;
  AcceptFilter accept_filter_;
  AcceptCallback accept_cb_;
};

template <class Problem>
RunOutcome<typename Problem::State> run_homotopy(
    Problem& problem, const EngineOptions& options,
    const typename Problem::State& initial) {
  HomotopyEngine<Problem> engine(problem, options);
  return engine.run(initial);
}

}  // namespace shapehom
