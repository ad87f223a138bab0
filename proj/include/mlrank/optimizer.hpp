#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlrank/types.hpp"

namespace mlrank {

/// Anything that can evaluate a finite-sum objective J(W) = (1/n) sum_i J_i(W)
/// and the gradients of the full sum and of single terms.
template <typename O>
concept GradientOracle = requires(const O& o, const MatrixXd& w, Index i, MatrixXd& out) {
  { o.value(w) } -> std::convertible_to<double>;
  { o.sample_count() } -> std::convertible_to<Index>;
  o.full_gradient(w, out);
  o.sample_gradient(w, i, out);
};

struct OptimizerConfig {
  int outer_epochs = 30;
  /// Inner SVRG steps per epoch; 0 selects 2n.
  Index inner_steps = 0;
  double initial_step = 0.1;
  std::uint64_t seed = 0;
  /// Stop when the relative objective decrease over an epoch falls below this.
  double tolerance = 1e-7;
  std::optional<double> max_wall_seconds;
};

struct EpochRecord {
  int epoch;
  double objective;
  double step_size;
  double grad_norm;
  double seconds;
};

struct OptimizationTrace {
  std::vector<EpochRecord> epochs;
  /// Epochs whose snapshot was rejected because the objective went up.
  int rejected_epochs = 0;
  std::string stop_reason;

  double mean_epoch_seconds() const;
};

void write_trace_csv(std::ostream& out, const OptimizationTrace& trace);

class OptimizerError : public std::runtime_error {
 public:
  OptimizerError(const std::string& what, OptimizationTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const OptimizationTrace& trace() const { return trace_; }

 private:
  OptimizationTrace trace_;
};

struct OptimizationResult {
  MatrixXd weights;
  OptimizationTrace trace;
};

inline constexpr double kMinStep = 1e-10;
inline constexpr double kMaxStep = 1e3;

/// Barzilai-Borwein step for SVRG: |dw|^2 / (m <dw, dmu>), clamped to
/// [kMinStep, kMaxStep]. Returns nullopt when the curvature estimate
/// <dw, dmu> <= 1e-16 |dw|^2 (the caller keeps its previous step).
std::optional<double> svrg_bb_step(const MatrixXd& snapshot_delta, const MatrixXd& gradient_delta, Index inner_steps);

namespace detail {

inline double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void require_finite(double objective, const MatrixXd& grad, OptimizationTrace& trace, const char* where) {
  if (!std::isfinite(objective) || !grad.allFinite())
    throw OptimizerError(std::string("non-finite objective or gradient in ") + where, trace);
}

} // namespace detail

/// SVRG with Barzilai-Borwein step sizes.
///
/// Each epoch k takes a snapshot W~ with full gradient mu~, then runs m inner
/// steps W <- W - eta (g_i(W) - g_i(W~) + mu~) with i drawn uniformly with
/// replacement. Epoch 0 uses the initial step; later epochs use the BB step
/// from the last two accepted snapshots. A snapshot whose objective exceeds the
/// current one is rejected and the step halved, so the returned objective never
/// exceeds the objective at `init`.
template <GradientOracle Oracle>
OptimizationResult minimize_svrg_bb(const Oracle& oracle, const MatrixXd& init, const OptimizerConfig& cfg) {
  if (cfg.outer_epochs < 1) throw std::invalid_argument("outer_epochs must be >= 1");
  if (!(cfg.initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
  const Index n = oracle.sample_count();
  const Index m = cfg.inner_steps > 0 ? cfg.inner_steps : 2 * n;
  const auto start = std::chrono::steady_clock::now();

  OptimizationTrace trace;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);

  MatrixXd snapshot = init;
  MatrixXd mu(init.rows(), init.cols());
  oracle.full_gradient(snapshot, mu);
  double objective = oracle.value(snapshot);
  detail::require_finite(objective, mu, trace, "initial snapshot");

  std::optional<MatrixXd> prev_snapshot, prev_mu;
  double step = cfg.initial_step;
  MatrixXd w(init.rows(), init.cols()), gi(init.rows(), init.cols()), gs(init.rows(), init.cols());

  for (int epoch = 0; epoch < cfg.outer_epochs; ++epoch) {
    if (prev_snapshot) {
      if (const auto bb = svrg_bb_step(snapshot - *prev_snapshot, mu - *prev_mu, m)) step = *bb;
    }
    const double grad_norm = mu.norm();
    trace.epochs.push_back({epoch, objective, step, grad_norm, detail::elapsed_seconds(start)});
    if (grad_norm == 0.0) {
      trace.stop_reason = "zero gradient";
      break;
    }

    w = snapshot;
    for (Index t = 0; t < m; ++t) {
      const Index i = pick(rng);
      oracle.sample_gradient(w, i, gi);
      oracle.sample_gradient(snapshot, i, gs);
      w.noalias() -= step * (gi - gs + mu);
    }

    const double candidate = oracle.value(w);
    if (!std::isfinite(candidate) || !w.allFinite()) {
      if (step <= kMinStep) throw OptimizerError("non-finite iterate at minimum step size", trace);
    }
    if (!std::isfinite(candidate) || candidate > objective) {
      ++trace.rejected_epochs;
      step = std::max(step * 0.5, kMinStep);
      prev_snapshot.reset();
      prev_mu.reset();
      trace.epochs.back().seconds = detail::elapsed_seconds(start);
      continue;
    }

    MatrixXd new_mu(mu.rows(), mu.cols());
    oracle.full_gradient(w, new_mu);
    detail::require_finite(candidate, new_mu, trace, "epoch snapshot");
    prev_snapshot = std::move(snapshot);
    prev_mu = std::move(mu);
    snapshot = w;
    mu = std::move(new_mu);
    const double decrease = objective - candidate;
    objective = candidate;

    if (cfg.max_wall_seconds && detail::elapsed_seconds(start) > *cfg.max_wall_seconds) {
      trace.stop_reason = "wall-clock budget";
      break;
    }
    if (decrease < cfg.tolerance * std::max(std::abs(objective), 1e-300)) {
      trace.stop_reason = "tolerance";
      break;
    }
  }
  if (trace.stop_reason.empty()) trace.stop_reason = "epochs";
  trace.epochs.push_back({static_cast<int>(trace.epochs.size()), objective, step, mu.norm(),
                          detail::elapsed_seconds(start)});
  return {std::move(snapshot), std::move(trace)};
}

/// Full-batch gradient descent with Armijo backtracking (halving, constant 1e-4).
/// Each accepted iteration doubles the trial step for the next one.
template <GradientOracle Oracle>
OptimizationResult minimize_batch_gd(const Oracle& oracle, const MatrixXd& init, const OptimizerConfig& cfg) {
  if (cfg.outer_epochs < 1) throw std::invalid_argument("outer_epochs must be >= 1");
  if (!(cfg.initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
  constexpr double kArmijo = 1e-4;
  const auto start = std::chrono::steady_clock::now();

  OptimizationTrace trace;
  MatrixXd w = init;
  MatrixXd grad(init.rows(), init.cols());
  double objective = oracle.value(w);
  oracle.full_gradient(w, grad);
  detail::require_finite(objective, grad, trace, "initial point");
  double step = cfg.initial_step;

  for (int iter = 0; iter < cfg.outer_epochs; ++iter) {
    const double g2 = grad.squaredNorm();
    trace.epochs.push_back({iter, objective, step, std::sqrt(g2), detail::elapsed_seconds(start)});
    if (g2 == 0.0) {
      trace.stop_reason = "zero gradient";
      break;
    }
    MatrixXd trial;
    double trial_value = 0.0;
    bool accepted = false;
    while (step >= kMinStep * 1e-6) {
      trial = w - step * grad;
      trial_value = oracle.value(trial);
      if (std::isfinite(trial_value) && trial_value <= objective - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      trace.stop_reason = "line search failed";
      break;
    }
    const double decrease = objective - trial_value;
    w = std::move(trial);
    objective = trial_value;
    oracle.full_gradient(w, grad);
    detail::require_finite(objective, grad, trace, "iterate");
    step = std::min(step * 2.0, kMaxStep);

    if (cfg.max_wall_seconds && detail::elapsed_seconds(start) > *cfg.max_wall_seconds) {
      trace.stop_reason = "wall-clock budget";
      break;
    }
    if (decrease < cfg.tolerance * std::max(std::abs(objective), 1e-300)) {
      trace.stop_reason = "tolerance";
      break;
    }
  }
  if (trace.stop_reason.empty()) trace.stop_reason = "epochs";
  trace.epochs.push_back({static_cast<int>(trace.epochs.size()), objective, step, grad.norm(),
                          detail::elapsed_seconds(start)});
  return {std::move(w), std::move(trace)};
}

} // namespace mlrank
