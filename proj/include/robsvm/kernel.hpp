#pragma once

// Kernels, Gram matrices, RKHS-norm regularized training in representer form, and the
// sample-space / feature-space robustness relations for smooth and radial kernels.

#include "robsvm/core.hpp"
#include "robsvm/subgradient.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace robsvm {

enum class KernelKind { Linear, Polynomial, Rbf, Indicator };

/// Linear <x,x'>; Polynomial <x,x'>^degree (homogeneous); Rbf exp(-gamma ||x-x'||^2);
/// Indicator 1 iff x == x' coordinate-wise (bitwise equality), else 0.
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  int degree = 1;
  double gamma = 1.0;

  static KernelSpec linear() { return {KernelKind::Linear, 1, 1.0}; }
  static KernelSpec polynomial(int degree);
  static KernelSpec rbf(double gamma);
  static KernelSpec indicator() { return {KernelKind::Indicator, 1, 1.0}; }

  double operator()(const Vector& x, const Vector& xp) const;
  /// The profile f with k(x,x') = f(||x - x'||_2), for radial kernels.
  std::optional<std::function<double(double)>> radial_profile() const;
  std::string name() const;
};

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& xp);
Matrix gram(const KernelSpec& spec, std::span<const Vector> points);
Matrix gram(const KernelSpec& spec, const Dataset& ds);
double min_eigenvalue(const Matrix& symmetric);

/// Gram quadratic forms in [-kGramTolerance, 0) are clipped to zero; below that they are errors.
inline constexpr double kGramTolerance = 1e-8;

/// w = sum_i alpha_i Phi(x_i) plus an offset; decision(x) = sum_i alpha_i k(x, x_i) + b.
class KernelClassifier {
 public:
  KernelClassifier(KernelSpec spec, std::vector<Vector> anchors, Vector alphas, double b);

  const KernelSpec& spec() const { return spec_; }
  const std::vector<Vector>& anchors() const { return anchors_; }
  const Vector& alphas() const { return alphas_; }
  double offset() const { return b_; }
  const Matrix& anchor_gram() const { return gram_; }

  /// <w, Phi(x)>, without the offset.
  double feature_inner(const Vector& x) const;
  double decision(const Vector& x) const { return feature_inner(x) + b_; }
  int predict(const Vector& x) const { return decision(x) >= 0.0 ? 1 : -1; }
  /// sqrt(alpha' K alpha).
  double rkhs_norm() const;

 private:
  KernelSpec spec_;
  std::vector<Vector> anchors_;
  Vector alphas_;
  double b_ = 0.0;
  Matrix gram_;
};

double kernel_hinge(const KernelClassifier& kc, const Dataset& ds);
double kernel_error(const KernelClassifier& kc, const Dataset& ds);

struct KernelTrainResult {
  KernelClassifier classifier;
  /// c ||w||_H + sum of training hinge losses.
  double objective = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

/// Minimizes c sqrt(alpha' K alpha) + sum_i max(1 - y_i((K alpha)_i + b), 0) over (alpha, b).
/// Steps follow the RKHS subgradient c w/||w|| - sum_{active} y_i Phi(x_i), expressed in
/// representer coordinates.
KernelTrainResult train_kernel_regularized(const Dataset& ds, const KernelSpec& spec, double c,
                                           const SolverConfig& cfg = {});

/// c ||w||_H + hinge sum, the regularized form.
double kernel_regularized_objective(const KernelClassifier& kc, const Dataset& ds, double c);
/// sup over the RKHS ball of radius c of <w, d>, evaluated at the maximizer d = c w/||w||.
double feature_ball_support(const KernelClassifier& kc, double c);

/// ||Phi(x) - Phi(x')||_H = sqrt(max(0, k(x,x) + k(x',x') - 2k(x,x'))).
double feature_distance(const KernelSpec& spec, const Vector& x, const Vector& xp);

struct SmoothnessReport {
  bool passed = true;
  std::size_t checked = 0;
  /// Pairs farther apart than rho; not checked.
  std::size_t skipped = 0;
  std::vector<std::size_t> violations;
  double worst_excess = 0.0;
};

/// Checks k(x,x) + k(x',x') - 2k(x,x') <= f(||x - x'||^2) + 1e-12 on every probe pair with
/// ||x - x'|| <= rho. f(0) must be 0.
SmoothnessReport verify_smoothness_condition(const KernelSpec& spec, std::span<const std::pair<Vector, Vector>> pairs,
                                             const std::function<double(double)>& f, double rho);

/// sqrt(2 f(0) - 2 f(c)) for a radial profile f; rejects f(c) > f(0).
double rbf_feature_radius(const std::function<double(double)>& f, double c);

struct SampleSpaceSup {
  /// max over the grid of <w, Phi(x - d)>, ||d||_2 <= c.
  double value = 0.0;
  Vector argmax;
  /// <w, Phi(x)> + ||w||_H sqrt(2 f(0) - 2 f(c)).
  double feature_ball_bound = 0.0;
};

/// Grid search over the Euclidean ball of radius c (n <= 2) for a radial kernel.
SampleSpaceSup sample_space_sup(const KernelClassifier& kc, const Vector& x, double c, int resolution);

}  // namespace robsvm
