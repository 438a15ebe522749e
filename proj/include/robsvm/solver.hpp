#pragma once

// Minimizes penalty(w) + sum of hinge losses by subgradient descent; separability checks and
// an exhaustive grid oracle for small instances.

#include "robsvm/reduction.hpp"
#include "robsvm/subgradient.hpp"

namespace robsvm {

struct TrainResult {
  LinearClassifier classifier;
  /// Objective of `classifier`, recomputed from the regularized problem.
  double objective = 0.0;
  int iterations_used = 0;
  bool converged = false;
  /// Whether the training set is linearly separable. The robust/regularized equivalence is
  /// exact only when this is false; otherwise the result minimizes the upper bound.
  bool separable = false;
};

/// True iff some (w,b) has y_i(<w,x_i> + b) > 0 for every sample. Exact for n <= 2, m <= 20;
/// otherwise decided by the best iterate of unregularized hinge minimization (may report
/// false for barely separable data).
bool check_separability(const Dataset& ds, const SolverConfig& cfg = {});

/// Minimizes the problem's objective starting from (w,b) = 0.
TrainResult train_problem(const RegularizedProblem& problem, const SolverConfig& cfg);

/// Minimizes c * ||w|| + sum_i max(1 - y_i(<w,x_i> + b), 0).
TrainResult train_regularized(const Dataset& ds, const NormSpec& norm, double c, const SolverConfig& cfg = {});

/// Minimizes the worst-case hinge loss over `s` through its regularized equivalent.
TrainResult train_robust(const Dataset& ds, const SublinearSet& s, const SolverConfig& cfg = {},
                         BaseRegularizer r = BaseRegularizer::none());

struct GridBounds {
  Vector lo;  // length n + 1, last coordinate is b
  Vector hi;
};

struct GridOracleResult {
  LinearClassifier point;
  double objective = 0.0;
  /// Largest grid step of the first (uniform) round.
  double spacing = 0.0;
  std::int64_t evaluations = 0;
};

/// Exhaustive minimization of c * ||w|| + hinge sum over a uniform grid with `resolution`
/// points per axis in (w,b)-space. Requires n <= 3, resolution^(n+1) <= 1e8 and bounds that
/// contain the origin. Each refinement round re-grids a box of +-2 steps around the incumbent.
GridOracleResult grid_oracle(const Dataset& ds, const NormSpec& norm, double c, const GridBounds& bounds,
                             int resolution, int refine_rounds = 0);

}  // namespace robsvm
