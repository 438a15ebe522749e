#pragma once

// Robust min-max hinge problems rewritten as regularized problems, plus the box-robust
// objective and the gap between the two.

#include "robsvm/uncertainty.hpp"

#include <optional>

namespace robsvm {

/// Optional extra regularizer r(w, b): either absent or coeff * ||w|| for a chosen norm.
class BaseRegularizer {
 public:
  static BaseRegularizer none() { return BaseRegularizer(); }
  static BaseRegularizer norm(NormSpec norm, double coeff);

  bool is_none() const { return !norm_.has_value(); }
  double value(const Vector& w) const;
  Vector subgradient(const Vector& w) const;

 private:
  std::optional<NormSpec> norm_;
  double coeff_ = 0.0;
};

/// r(w,b) + sup_{d in N0} <w,d> + sum_i max(1 - y_i(<w,x_i> + b), 0).
/// The slacks of the constrained form are eliminated: at any (w,b) the optimal slack is the hinge.
class RegularizedProblem {
 public:
  RegularizedProblem(Dataset ds, AtomicSet atomic, BaseRegularizer base);

  const Dataset& dataset() const { return ds_; }
  const AtomicSet& atomic() const { return atomic_; }
  const BaseRegularizer& base() const { return base_; }

  /// r(w,b) + support(w).
  double penalty(const Vector& w) const;
  Vector penalty_subgradient(const Vector& w) const;
  double objective(const LinearClassifier& clf) const;
  /// A subgradient of objective() with respect to (w, b), stacked as [g_w; g_b].
  Vector subgradient(const LinearClassifier& clf) const;

 private:
  Dataset ds_;
  AtomicSet atomic_;
  BaseRegularizer base_;
};

/// Rewrites the min-max problem over `s` as its regularized equivalent. The result depends
/// only on the atomic set, never on the aggregation kind. Throws if the atomic set is invalid.
RegularizedProblem robustify(const Dataset& ds, const SublinearSet& s,
                             BaseRegularizer r = BaseRegularizer::none());

double robust_objective(const LinearClassifier& clf, const RegularizedProblem& p);

/// sum_i max(1 - y_i(<w,x_i> + b) + support_i(w), 0): every sample at its own worst case.
double box_robust_objective(const LinearClassifier& clf, const Dataset& ds, const BoxSet& box);

/// box_robust_objective - robust_objective (r = 0) for a box replicating the atomic set of `s`.
double conservatism_gap(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s, const BoxSet& box);

}  // namespace robsvm
