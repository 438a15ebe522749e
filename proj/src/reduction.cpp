#include "robsvm/reduction.hpp"

namespace robsvm {

BaseRegularizer BaseRegularizer::norm(NormSpec norm, double coeff) {
  if (!(coeff >= 0.0) || !std::isfinite(coeff)) {
    throw std::invalid_argument("BaseRegularizer: coefficient must be finite and non-negative");
  }
  BaseRegularizer r;
  r.norm_ = std::move(norm);
  r.coeff_ = coeff;
  return r;
}

double BaseRegularizer::value(const Vector& w) const { return norm_ ? coeff_ * norm_->value(w) : 0.0; }

Vector BaseRegularizer::subgradient(const Vector& w) const {
  return norm_ ? Vector(coeff_ * norm_->subgradient(w)) : Vector(Vector::Zero(w.size()));
}

RegularizedProblem::RegularizedProblem(Dataset ds, AtomicSet atomic, BaseRegularizer base)
    : ds_(std::move(ds)), atomic_(std::move(atomic)), base_(std::move(base)) {
  if (atomic_.fixed_dim() != 0) require_same_dim(atomic_.fixed_dim(), ds_.dim(), "RegularizedProblem");
}

double RegularizedProblem::penalty(const Vector& w) const {
  if (base_.is_none()) return atomic_.support(w);
  return base_.value(w) + atomic_.support(w);
}

Vector RegularizedProblem::penalty_subgradient(const Vector& w) const {
  Vector g = atomic_.support_subgradient(w);
  if (!base_.is_none()) g += base_.subgradient(w);
  return g;
}

double RegularizedProblem::objective(const LinearClassifier& clf) const {
  return penalty(clf.w) + empirical_hinge(clf, ds_);
}

Vector RegularizedProblem::subgradient(const LinearClassifier& clf) const {
  require_same_dim(clf.w.size(), ds_.dim(), "RegularizedProblem::subgradient");
  const Index n = ds_.dim();
  Vector g = Vector::Zero(n + 1);
  g.head(n) = penalty_subgradient(clf.w);
  // At margin exactly 1 the zero branch of the hinge is used.
  for (const auto& s : ds_) {
    if (margin_gap(clf, s) > 0.0) {
      g.head(n) -= s.y * s.x;
      g[n] -= s.y;
    }
  }
  return g;
}

RegularizedProblem robustify(const Dataset& ds, const SublinearSet& s, BaseRegularizer r) {
  const auto report = validate_atomic(s.atomic, ds.dim(), 16, 0x726f62ULL);
  if (!report.passed) throw std::invalid_argument("robustify: invalid atomic set: " + report.failure);
  return RegularizedProblem(ds, s.atomic, std::move(r));
}

double robust_objective(const LinearClassifier& clf, const RegularizedProblem& p) { return p.objective(clf); }

double box_robust_objective(const LinearClassifier& clf, const Dataset& ds, const BoxSet& box) {
  if (box.per_sample.size() != ds.size()) {
    throw std::invalid_argument("box_robust_objective: box has " + std::to_string(box.per_sample.size()) +
                                " components for " + std::to_string(ds.size()) + " samples");
  }
  require_same_dim(clf.w.size(), ds.dim(), "box_robust_objective");
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    total += std::max(margin_gap(clf, ds[i]) + box.per_sample[i].support(clf.w), 0.0);
  }
  return total;
}

double conservatism_gap(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s, const BoxSet& box) {
  for (const auto& a : box.per_sample) {
    if (!(a == s.atomic)) throw std::invalid_argument("conservatism_gap: box does not replicate the atomic set");
  }
  return box_robust_objective(clf, ds, box) - (empirical_hinge(clf, ds) + s.atomic.support(clf.w));
}

}  // namespace robsvm
