#pragma once

// Disturbance geometries (atomic, sublinear aggregated and box sets), their support
// functions, and brute-force worst-case oracles over discretized disturbance sets.

#include "robsvm/core.hpp"
#include "robsvm/rng.hpp"

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace robsvm {

/// A bounded symmetric set containing the origin: a norm ball {d : ||d|| <= c} or the unit
/// ellipsoid {d : d' S^-1 d <= 1}.
class AtomicSet {
 public:
  static AtomicSet norm_ball(NormSpec norm, double radius);
  static AtomicSet ellipsoid(const Matrix& sigma);

  bool is_ellipsoid() const { return ellipsoid_; }
  const NormSpec& norm() const { return norm_; }
  double radius() const { return radius_; }
  Index fixed_dim() const { return norm_.fixed_dim(); }

  /// sup over the set of <w, d>.
  double support(const Vector& w) const;
  /// A subgradient of support() at w (zero at w = 0).
  Vector support_subgradient(const Vector& w) const;
  /// Minkowski gauge inf{t >= 0 : d in t * set}; +inf when d != 0 and the set is {0}.
  double gauge(const Vector& d) const;
  bool contains(const Vector& d) const;
  /// The boundary point in direction u (the origin when u = 0 or the set is {0}).
  Vector boundary_point(const Vector& u) const;

  std::string describe() const;

  friend bool operator==(const AtomicSet& a, const AtomicSet& b);

 private:
  AtomicSet(NormSpec norm, double radius, bool ellipsoid)
      : norm_(std::move(norm)), radius_(radius), ellipsoid_(ellipsoid) {}

  NormSpec norm_;
  double radius_ = 0.0;
  bool ellipsoid_ = false;
};

double support_function(const AtomicSet& a, const Vector& w);

/// How per-sample disturbances are coupled. With ||.|| the atomic norm and c its radius:
///   SumBudget   : sum_i ||d_i|| <= c
///   SingleShift : at most one d_t != 0, ||d_t|| <= c
///   SqrtBudget  : sum_i sqrt(c ||d_i||) <= c
enum class Aggregation { SumBudget, SingleShift, SqrtBudget };

std::string to_string(Aggregation a);
Aggregation aggregation_from_string(const std::string& s);

struct SublinearSet {
  AtomicSet atomic;
  Aggregation aggregation = Aggregation::SumBudget;

  bool contains(std::span<const Vector> deltas) const;
};

/// Membership in the union of single-sample disturbances (the smallest admissible set).
bool in_single_sample_envelope(const AtomicSet& a, std::span<const Vector> deltas);
/// Membership in the convex-combination set {(a_1 d_1, ..., a_m d_m) : sum a_i = 1, d_i in N0}.
bool in_convex_split_envelope(const AtomicSet& a, std::span<const Vector> deltas);

/// Cartesian product of per-sample atomic sets.
struct BoxSet {
  std::vector<AtomicSet> per_sample;

  static BoxSet replicate(const AtomicSet& a, std::size_t m);
  bool contains(std::span<const Vector> deltas) const;
};

/// Exact supremum of the total hinge loss when only one sample is disturbed.
double worst_case_loss_lower(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s);

struct WorstCaseUpper {
  double value = 0.0;
  /// True when some sample is strictly misclassified, in which case value is the exact
  /// worst case over every sublinear aggregated set of the atomic set.
  bool is_exact = false;
};

/// empirical hinge + support(w): an upper bound on the worst case over the convex-split set.
WorstCaseUpper worst_case_loss_upper(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s);

/// Largest number of evaluations a brute-force search may perform.
inline constexpr std::int64_t kBruteForceCap = 10'000'000;

/// Deterministic unit directions used to discretize per-sample disturbances: a nested
/// power-of-two sphere covering (n <= 3) or a fixed pseudo-random prefix (n > 3), plus
/// +-coordinate axes, the cube corners (n <= 3) and +-w/||w||.
std::vector<Vector> direction_cover(Index n, int resolution, const Vector& w);

/// Maximum total hinge loss over a discretization of the aggregated set: budget allocations on
/// a uniform simplex grid combined with per-sample directions from direction_cover.
double brute_force_worst_case(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s,
                              int resolution);
/// Same for a box set: each sample is disturbed independently on its own grid.
double brute_force_worst_case(const LinearClassifier& clf, const Dataset& ds, const BoxSet& box,
                              int resolution);

template <class G>
concept AtomicGeometry = requires(const G& g, const Vector& v) {
  { g.contains(v) } -> std::convertible_to<bool>;
  { g.support(v) } -> std::convertible_to<double>;
};

struct AtomicReport {
  bool passed = true;
  std::string failure;
  std::optional<Vector> counterexample;
  int trials_run = 0;
};

/// Checks that 0 belongs to the set and that the support function is finite and even,
/// sup <w,d> = sup <-w,d>, along `trials` random directions.
template <AtomicGeometry G>
AtomicReport validate_atomic(const G& set, Index dim, int trials, std::uint64_t seed) {
  AtomicReport report;
  if (!set.contains(Vector::Zero(dim))) {
    report.passed = false;
    report.failure = "origin is not in the set";
    report.counterexample = Vector::Zero(dim);
    return report;
  }
  Rng rng = make_rng(seed, {0x61746f6dULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Vector w(dim);
    for (Index k = 0; k < dim; ++k) w[k] = normal(rng);
    const double up = set.support(w);
    const double down = set.support(Vector(-w));
    ++report.trials_run;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      report.passed = false;
      report.failure = "support function is not finite";
      report.counterexample = w;
      return report;
    }
    if (std::abs(up - down) > 1e-12 * std::max(1.0, std::abs(up))) {
      report.passed = false;
      report.failure = "support function is not symmetric";
      report.counterexample = w;
      return report;
    }
  }
  return report;
}

}  // namespace robsvm
