#pragma once

// Train/test sample pairing, finite-sample generalization bounds built on it, and the
// consistency and pathological-kernel experiments.

#include "robsvm/kernel.hpp"
#include "robsvm/rng.hpp"
#include "robsvm/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace robsvm {

enum class PairingMethod { Exact, Brick };

/// M disjoint same-label (train, test) pairs within distance c; gamma = 1 - M/m.
struct PairingResult {
  std::size_t m = 0;
  std::size_t pairs = 0;
  double gamma = 1.0;
  PairingMethod method = PairingMethod::Exact;
  double c = 0.0;
};

/// Euclidean distance in sample space, or feature-space distance for a kernel.
struct PairingMetric {
  std::optional<KernelSpec> kernel;

  static PairingMetric sample_l2() { return {}; }
  static PairingMetric feature(KernelSpec spec) { return {spec}; }
  double squared_distance(const Vector& x, const Vector& xp) const;
};

/// Maximum cardinality matching (Hopcroft-Karp) on the graph with an edge between train i and
/// test j iff y_i = y_j and distance <= c. Requires |train| = |test|.
PairingResult max_pairings_exact(const Dataset& train, const Dataset& test, double c,
                                 const PairingMetric& metric = PairingMetric::sample_l2());

struct DomainBox {
  Vector lo;
  Vector hi;

  /// Smallest box containing every sample of both sets.
  static DomainBox bounding(const Dataset& a, const Dataset& b);
};

/// Counts same-label, same-cell pairs on a grid of cubes with side c / sqrt(n) anchored at
/// box.lo. Cells are half-open [lo + k s, lo + (k+1) s); points on the upper face of the box
/// go to the last cell. Always <= the exact pairing count.
PairingResult brick_pairing_lower_bound(const Dataset& train, const Dataset& test, double c, const DomainBox& box);

struct BoundReport {
  double test_error = 0.0;
  double error_bound = 0.0;
  double test_avg_hinge = 0.0;
  double hinge_bound = 0.0;
  double K = 0.0;
  double gamma = 0.0;
  /// c ||w||.
  double regularization = 0.0;
  double train_avg_hinge = 0.0;
  double abs_b = 0.0;

  bool error_bound_holds(double tol = 1e-12) const { return test_error <= error_bound + tol; }
  bool hinge_bound_holds(double tol = 1e-12) const { return test_avg_hinge <= hinge_bound + tol; }
};

/// error_bound = gamma + c||w|| + train avg hinge;
/// hinge_bound = gamma (1 + K||w|| + |b|) + c||w|| + train avg hinge.
/// Requires K >= max ||x||_2 over train and test, and a pairing of the same m at the same c.
BoundReport generalization_bound(const LinearClassifier& clf, const Dataset& train, const Dataset& test, double c,
                                 const PairingResult& pairing, double K);

/// The same bounds with ||w||_H and feature-space pairing at radius c_feature. Requires
/// K_kernel >= sqrt(max k(x,x)) over train and test, the largest feature-vector norm.
BoundReport kernel_generalization_bound(const KernelClassifier& kc, const Dataset& train, const Dataset& test,
                                        double c_feature, const PairingResult& pairing, double K_kernel);

/// Draws a dataset of the given size from the stream.
using DataGenerator = std::function<Dataset(std::size_t m, Rng& rng)>;

struct ExperimentConfig {
  std::vector<std::size_t> sizes;
  std::function<double(std::size_t)> c_schedule;
  int trials = 20;
  SolverConfig solver;
  std::uint64_t seed = 0;
};

struct TrialRecord {
  std::size_t m = 0;
  int trial = 0;
  double c = 0.0;
  std::size_t pairs = 0;
  BoundReport bound;
};

struct SizeSummary {
  std::size_t m = 0;
  double c = 0.0;
  double median_gamma = 0.0;
  double median_error_bound = 0.0;
  double median_test_error = 0.0;
  int bound_violations = 0;
};

struct TrendReport {
  /// Sorted by (m, trial).
  std::vector<TrialRecord> records;
  std::vector<SizeSummary> summaries;
  bool gamma_nonincreasing = false;
  bool gamma_strictly_decreasing = false;
  bool test_error_nonincreasing = false;
  int bound_violations = 0;
};

/// For each m and trial: independent train and test draws of size m, a linear classifier
/// minimizing c(m)||w|| + (1/m) sum hinge, exact L2 pairing at c(m), and the bound report.
TrendReport run_consistency_experiment(const DataGenerator& generator, const ExperimentConfig& cfg);

struct PathologicalTrial {
  int trial = 0;
  double train_avg_hinge = 0.0;
  double train_error = 0.0;
  double test_error = 0.0;
  double offset = 0.0;
};

struct PathologicalReport {
  std::vector<PathologicalTrial> trials;
  double max_train_avg_hinge = 0.0;
  double min_test_error = 0.0;
  double max_test_error = 0.0;
};

/// Trains the indicator-kernel classifier (coefficient c on ||w||_H, summed hinge) on draws of
/// size m and evaluates it on independent draws of the same size.
PathologicalReport run_pathological_demo(const DataGenerator& generator, std::size_t m, int trials, double c,
                                         const SolverConfig& cfg, std::uint64_t seed);

double median(std::vector<double> v);

}  // namespace robsvm
