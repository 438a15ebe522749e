#pragma once

// Budget calibration: Monte-Carlo quantiles of the total disturbance budget and the prior-mean
// regularizer, plus an empirical coverage check of the resulting loss bound.

#include "robsvm/core.hpp"
#include "robsvm/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace robsvm {

/// A joint distribution over per-sample disturbances (d_1, ..., d_m) in R^n. The budget of a
/// draw is sum_i budget_norm(d_i).
class DisturbanceModel {
 public:
  using Sampler = std::function<std::vector<Vector>(Rng&)>;

  DisturbanceModel(std::size_t m, Index n, NormSpec budget_norm, Sampler sampler, std::string name = "custom");

  /// d_i = 0.
  static DisturbanceModel zero(std::size_t m, Index n, NormSpec budget_norm);
  /// d_i ~ N(0, sigma^2 I) independently.
  static DisturbanceModel gaussian(std::size_t m, Index n, double sigma, NormSpec budget_norm);
  /// d_i uniform in the Euclidean ball of the given radius, independently.
  static DisturbanceModel uniform_ball(std::size_t m, Index n, double radius, NormSpec budget_norm);
  /// Deterministic: d_1 = total * e_1 / budget_norm(e_1), the rest zero.
  static DisturbanceModel point_mass(std::size_t m, Index n, double total, NormSpec budget_norm);
  /// Total budget T ~ U[0, hi] split over samples by a flat Dirichlet draw. Each d_i points
  /// along `direction` when given, otherwise along an independent uniform random direction.
  static DisturbanceModel uniform_budget(std::size_t m, Index n, double hi, NormSpec budget_norm,
                                         std::optional<Vector> direction = std::nullopt);

  std::size_t m() const { return m_; }
  Index n() const { return n_; }
  const NormSpec& budget_norm() const { return norm_; }
  const std::string& name() const { return name_; }

  /// Draw number `index` of the stream seeded by `seed`; each draw has its own derived stream.
  std::vector<Vector> draw(std::uint64_t seed, std::uint64_t index) const;
  double budget(const std::vector<Vector>& deltas) const;

 private:
  std::size_t m_;
  Index n_;
  NormSpec norm_;
  Sampler sampler_;
  std::string name_;
};

/// Budgets of n_draws joint draws, in draw order.
std::vector<double> budget_totals(const DisturbanceModel& dm, std::size_t n_draws, std::uint64_t seed);

/// Lower empirical (1 - eta)-quantile: the k-th smallest value with k = ceil((1 - eta) n).
double empirical_quantile(std::vector<double> values, double eta);

/// Smallest budget covering a (1 - eta) fraction of simulated draws. Requires n_draws >= 100.
double calibrate_chance(const DisturbanceModel& dm, double eta, std::size_t n_draws, std::uint64_t seed);

/// Prior over the budget c.
class BudgetPrior {
 public:
  enum class Kind { PointMass, Discrete, Uniform, Mixture };

  static BudgetPrior point_mass(double c0);
  /// (value, probability) atoms.
  static BudgetPrior discrete(std::vector<std::pair<double, double>> atoms);
  static BudgetPrior uniform(double lo, double hi);
  static BudgetPrior mixture(std::vector<std::pair<BudgetPrior, double>> components);

  Kind kind() const { return kind_; }
  double mean() const;
  std::string describe() const;

 private:
  BudgetPrior() = default;

  Kind kind_ = Kind::PointMass;
  std::vector<std::pair<double, double>> atoms_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<std::pair<BudgetPrior, double>> components_;
};

/// Expected budget under the prior (closed form).
double bayes_regularizer(const BudgetPrior& prior);

/// Fraction of draws where the total hinge loss on the disturbed samples x_i - d_i is at most
/// empirical_hinge + c_star * budget_norm.dual(w).
double chance_bound_check(const LinearClassifier& clf, const Dataset& ds, const DisturbanceModel& dm, double c_star,
                          std::size_t n_draws, std::uint64_t seed);

}  // namespace robsvm
