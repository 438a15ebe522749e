#pragma once

// Samples, datasets, norms, linear classifiers and the hinge loss.

#include "robsvm/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace robsvm {

struct LabeledSample {
  Vector x;
  int y = 1;  // -1 or +1
};

/// Non-empty, dimension-consistent list of labeled samples with finite features.
class Dataset {
 public:
  explicit Dataset(std::vector<LabeledSample> samples);

  std::size_t size() const { return samples_.size(); }
  Index dim() const { return dim_; }
  const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const LabeledSample> samples() const { return samples_; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  /// Largest Euclidean norm over the samples.
  double max_l2_norm() const;

 private:
  std::vector<LabeledSample> samples_;
  Index dim_ = 0;
};

enum class NormKind { L1, L2, Linf, Ellipsoidal };

/// A norm on R^n together with its dual.
///
/// Ellipsoidal(S) is the norm whose unit ball is the ellipsoid {x : x' S^-1 x <= 1}:
///   value(x) = sqrt(x' S^-1 x),   dual(z) = sqrt(z' S z).
/// S must be symmetric positive definite; its Cholesky factor is computed once.
class NormSpec {
 public:
  static NormSpec l1();
  static NormSpec l2();
  static NormSpec linf();
  static NormSpec ellipsoidal(const Matrix& sigma);

  NormKind kind() const { return kind_; }
  /// Shape matrix of an ellipsoidal norm (throws for other kinds).
  const Matrix& sigma() const;
  /// Fixed dimension for ellipsoidal norms, 0 for the coordinate norms.
  Index fixed_dim() const;

  double value(const Vector& x) const;
  double dual(const Vector& z) const;
  NormSpec dual_spec() const;

  /// A subgradient of value() at x; the zero vector at x = 0.
  Vector subgradient(const Vector& x) const;
  /// A subgradient of dual() at z; the zero vector at z = 0.
  Vector dual_subgradient(const Vector& z) const;

  /// Smallest k with ||x||_2 <= k * value(x) in dimension n.
  double l2_ratio(Index n) const;

  std::string name() const;

  friend bool operator==(const NormSpec& a, const NormSpec& b);

 private:
  struct Ellipsoid;
  NormSpec(NormKind kind, std::shared_ptr<const Ellipsoid> ell) : kind_(kind), ell_(std::move(ell)) {}
  void check_dim(const Vector& v) const;

  NormKind kind_ = NormKind::L2;
  std::shared_ptr<const Ellipsoid> ell_;
};

double dual_norm(const NormSpec& norm, const Vector& z);

struct LinearClassifier {
  Vector w;
  double b = 0.0;

  double decision(const Vector& x) const;
};

/// +1 when <w,x> + b >= 0 (ties go to +1), -1 otherwise.
int predict(const LinearClassifier& clf, const Vector& x);

/// 1 - y(<w,x> + b); the hinge loss is max(margin_gap, 0).
double margin_gap(const LinearClassifier& clf, const LabeledSample& s);
double hinge_loss(const LinearClassifier& clf, const LabeledSample& s);
double empirical_hinge(const LinearClassifier& clf, const Dataset& ds);
double classification_error(const LinearClassifier& clf, const Dataset& ds);

/// True when some sample has y(<w,x> + b) < 0 (the classifier misclassifies strictly).
bool has_strict_violation(const LinearClassifier& clf, const Dataset& ds);

}  // namespace robsvm
