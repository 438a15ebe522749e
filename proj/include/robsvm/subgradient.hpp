#pragma once

// Subgradient descent with normalized steps eta_k / sqrt(t), best-iterate tracking, optional
// suffix averaging, and restarts from the incumbent. Shared by the linear and kernel trainers.

#include "robsvm/types.hpp"

#include <cmath>
#include <concepts>
#include <cstdint>

namespace robsvm {

struct SolverConfig {
  int max_iters = 20000;
  /// Step length of the first iteration of the first epoch.
  double eta0 = 1.0;
  /// Relative objective improvement below which an epoch counts as stalled.
  double tolerance = 1e-10;
  /// Also consider the average of each epoch's second half as a candidate.
  bool averaging = true;
  /// Recorded for reproducibility; the full-batch method itself draws no random numbers.
  std::uint64_t seed = 0;
  /// Iterations per epoch; each epoch restarts from the incumbent.
  int restart_period = 400;
  /// Consecutive stalled epochs that end the run.
  int stall_epochs = 4;

  void validate() const;
};

/// A convex objective over a flat parameter vector.
template <class P>
concept SubgradientProblem = requires(const P& p, const Vector& x, Vector& g, Vector& xm) {
  { p.evaluate(x, &g) } -> std::convertible_to<double>;
  { p.step_norm(x, g) } -> std::convertible_to<double>;
  p.project(xm);
};

struct SubgradientOutcome {
  Vector point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <SubgradientProblem P>
SubgradientOutcome minimize_subgradient(const P& problem, Vector start, const SolverConfig& cfg) {
  cfg.validate();
  SubgradientOutcome out;
  Vector grad;
  out.point = std::move(start);
  out.value = problem.evaluate(out.point, &grad);
  double eta = cfg.eta0;
  int stalled = 0;

  while (out.iterations < cfg.max_iters) {
    Vector x = out.point;
    Vector g = grad;
    const double epoch_start = out.value;
    Vector avg = Vector::Zero(x.size());
    int avg_count = 0;
    int last_improvement = 0;
    const int period = cfg.restart_period;
    for (int t = 1; t <= period && out.iterations < cfg.max_iters; ++t) {
      const double gn = problem.step_norm(x, g);
      if (gn == 0.0) {
        // x is a minimizer, so the incumbent (never worse than x) is one too.
        out.converged = true;
        return out;
      }
      x -= (eta / std::sqrt(static_cast<double>(t)) / gn) * g;
      problem.project(x);
      const double fx = problem.evaluate(x, &g);
      ++out.iterations;
      if (fx < out.value) {
        out.value = fx;
        out.point = x;
        grad = g;
        last_improvement = t;
      }
      if (cfg.averaging && 2 * t > period) {
        avg += x;
        ++avg_count;
      }
    }
    if (avg_count > 0) {
      Vector a = avg / avg_count;
      problem.project(a);
      Vector ga;
      const double fa = problem.evaluate(a, &ga);
      if (fa < out.value) {
        out.value = fa;
        out.point = std::move(a);
        grad = std::move(ga);
      }
    }
    const double gained = epoch_start - out.value;
    stalled = gained <= cfg.tolerance * (1.0 + std::abs(out.value)) ? stalled + 1 : 0;
    if (stalled >= cfg.stall_epochs) {
      out.converged = true;
      break;
    }
    // Keep the step while the incumbent is still moving late in the epoch.
    if (4 * last_improvement <= 3 * period) eta *= 0.5;
    if (eta <= 1e-14 * (1.0 + out.point.norm())) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace robsvm
