#include "robsvm/uncertainty.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace robsvm {

namespace {

constexpr double kMembershipTol = 1e-12;

int next_pow2(int v) {
  if (v > (1 << 30)) throw std::invalid_argument("resolution is too large");
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

std::int64_t cover_size(Index n, int resolution) {
  const std::int64_t p = next_pow2(std::max(resolution, 4));
  std::int64_t count = 2 * n + 2 + (n <= 3 ? (std::int64_t{1} << n) : 0);
  if (n == 2) count += p;
  if (n == 3) count += 2 + (p / 2 - 1) * p;
  if (n > 3) count += p;
  return count;
}

}  // namespace

AtomicSet AtomicSet::norm_ball(NormSpec norm, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("AtomicSet: radius must be finite and non-negative");
  }
  return AtomicSet(std::move(norm), radius, false);
}

AtomicSet AtomicSet::ellipsoid(const Matrix& sigma) {
  return AtomicSet(NormSpec::ellipsoidal(sigma), 1.0, true);
}

double AtomicSet::support(const Vector& w) const { return radius_ * norm_.dual(w); }

Vector AtomicSet::support_subgradient(const Vector& w) const {
  return radius_ * norm_.dual_subgradient(w);
}

double AtomicSet::gauge(const Vector& d) const {
  const double v = norm_.value(d);
  if (radius_ == 0.0) return v == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return v / radius_;
}

bool AtomicSet::contains(const Vector& d) const { return gauge(d) <= 1.0 + kMembershipTol; }

Vector AtomicSet::boundary_point(const Vector& u) const {
  const double v = norm_.value(u);
  if (v == 0.0 || radius_ == 0.0) return Vector::Zero(u.size());
  return u * (radius_ / v);
}

std::string AtomicSet::describe() const {
  if (ellipsoid_) return "ellipsoid";
  return norm_.name() + "-ball(" + std::to_string(radius_) + ")";
}

bool operator==(const AtomicSet& a, const AtomicSet& b) {
  return a.ellipsoid_ == b.ellipsoid_ && a.radius_ == b.radius_ && a.norm_ == b.norm_;
}

double support_function(const AtomicSet& a, const Vector& w) { return a.support(w); }

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::SumBudget: return "sum";
    case Aggregation::SingleShift: return "single";
    case Aggregation::SqrtBudget: return "sqrt";
  }
  return "?";
}

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "sum") return Aggregation::SumBudget;
  if (s == "single") return Aggregation::SingleShift;
  if (s == "sqrt") return Aggregation::SqrtBudget;
  throw std::invalid_argument("unknown aggregation '" + s + "' (expected sum|single|sqrt)");
}

bool SublinearSet::contains(std::span<const Vector> deltas) const {
  switch (aggregation) {
    case Aggregation::SumBudget: {
      double total = 0.0;
      for (const auto& d : deltas) total += atomic.gauge(d);
      return total <= 1.0 + kMembershipTol;
    }
    case Aggregation::SingleShift: return in_single_sample_envelope(atomic, deltas);
    case Aggregation::SqrtBudget: {
      double total = 0.0;
      for (const auto& d : deltas) total += std::sqrt(atomic.gauge(d));
      return total <= 1.0 + kMembershipTol;
    }
  }
  return false;
}

bool in_single_sample_envelope(const AtomicSet& a, std::span<const Vector> deltas) {
  int nonzero = 0;
  for (const auto& d : deltas) {
    if (d.isZero(0.0)) continue;
    if (++nonzero > 1 || !a.contains(d)) return false;
  }
  return true;
}

bool in_convex_split_envelope(const AtomicSet& a, std::span<const Vector> deltas) {
  // (a_1 d_1, ..., a_m d_m) with d_i in N0 exists iff the gauges sum to at most 1.
  double total = 0.0;
  for (const auto& d : deltas) total += a.gauge(d);
  return total <= 1.0 + kMembershipTol;
}

BoxSet BoxSet::replicate(const AtomicSet& a, std::size_t m) {
  return BoxSet{std::vector<AtomicSet>(m, a)};
}

bool BoxSet::contains(std::span<const Vector> deltas) const {
  if (deltas.size() != per_sample.size()) return false;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!per_sample[i].contains(deltas[i])) return false;
  }
  return true;
}

namespace {

void check_inputs(const LinearClassifier& clf, const Dataset& ds, const AtomicSet& a, const char* what) {
  require_same_dim(clf.w.size(), ds.dim(), what);
  if (a.fixed_dim() != 0) require_same_dim(a.fixed_dim(), ds.dim(), what);
}

}  // namespace

double worst_case_loss_lower(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s) {
  check_inputs(clf, ds, s.atomic, "worst_case_loss_lower");
  const double sigma = s.atomic.support(clf.w);
  std::vector<double> gaps;
  gaps.reserve(ds.size());
  double total = 0.0;
  for (const auto& sample : ds) {
    gaps.push_back(margin_gap(clf, sample));
    total += std::max(gaps.back(), 0.0);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double g : gaps) {
    best = std::max(best, total - std::max(g, 0.0) + std::max(g + sigma, 0.0));
  }
  return best;
}

WorstCaseUpper worst_case_loss_upper(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s) {
  check_inputs(clf, ds, s.atomic, "worst_case_loss_upper");
  return {empirical_hinge(clf, ds) + s.atomic.support(clf.w), has_strict_violation(clf, ds)};
}

std::vector<Vector> direction_cover(Index n, int resolution, const Vector& w) {
  if (n < 1) throw std::invalid_argument("direction_cover: dimension must be positive");
  if (resolution < 1) throw std::invalid_argument("direction_cover: resolution must be positive");
  if (cover_size(n, resolution) > kBruteForceCap) {
    throw std::invalid_argument("direction_cover: too many directions for the brute-force cap");
  }
  std::vector<Vector> dirs;
  const int p = next_pow2(std::max(resolution, 4));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (n == 2) {
    for (int k = 0; k < p; ++k) {
      const double a = two_pi * k / p;
      dirs.push_back(Vector{{std::cos(a), std::sin(a)}});
    }
  } else if (n == 3) {
    // Latitude/longitude lattice with step 2*pi/p in both angles; doubling p refines it.
    dirs.push_back(Vector{{0.0, 0.0, 1.0}});
    dirs.push_back(Vector{{0.0, 0.0, -1.0}});
    const int rings = p / 2;
    for (int i = 1; i < rings; ++i) {
      const double theta = std::numbers::pi * i / rings;
      for (int j = 0; j < p; ++j) {
        const double phi = two_pi * j / p;
        dirs.push_back(Vector{{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)}});
      }
    }
  } else if (n > 3) {
    Rng rng(0x5eed0d1cULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < p; ++k) {
      Vector u(n);
      for (Index j = 0; j < n; ++j) u[j] = normal(rng);
      dirs.push_back(u / u.norm());
    }
  }
  for (Index j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e[j] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (n <= 3) {
    // Cube corners: the extreme points of Linf balls.
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vector u(n);
      for (Index j = 0; j < n; ++j) u[j] = (mask >> j) & 1 ? 1.0 : -1.0;
      dirs.push_back(u / std::sqrt(static_cast<double>(n)));
    }
  }
  if (w.size() == n && w.norm() > 0.0) {
    dirs.push_back(w / w.norm());
    dirs.push_back(-w / w.norm());
  }
  return dirs;
}

namespace {

// Largest <w, d> over boundary points d of `a` in the covered directions. The cover is
// symmetric, so the same value bounds y * <w, d> for either label.
double covered_support(const AtomicSet& a, const std::vector<Vector>& dirs, const Vector& w) {
  double best = 0.0;
  for (const auto& u : dirs) best = std::max(best, w.dot(a.boundary_point(u)));
  return best;
}

void check_cap(std::int64_t work) {
  if (work > kBruteForceCap) {
    throw std::invalid_argument("brute_force_worst_case: search space of " + std::to_string(work) +
                                " evaluations exceeds the cap of " + std::to_string(kBruteForceCap));
  }
}

}  // namespace

double brute_force_worst_case(const LinearClassifier& clf, const Dataset& ds, const SublinearSet& s,
                              int resolution) {
  check_inputs(clf, ds, s.atomic, "brute_force_worst_case");
  if (resolution < 1) throw std::invalid_argument("brute_force_worst_case: resolution must be positive");
  const auto m = static_cast<std::int64_t>(ds.size());
  const std::int64_t units = next_pow2(resolution);
  std::int64_t work = cover_size(ds.dim(), resolution) * ds.dim();
  if (s.aggregation == Aggregation::SingleShift) {
    work += m;
  } else {
    work += m * (units + 1) * (units + 2) / 2;
  }
  check_cap(work);

  const auto dirs = direction_cover(ds.dim(), resolution, clf.w);
  const double gain = covered_support(s.atomic, dirs, clf.w);
  std::vector<double> gaps;
  for (const auto& sample : ds) gaps.push_back(margin_gap(clf, sample));

  if (s.aggregation == Aggregation::SingleShift) {
    double total = 0.0;
    for (double g : gaps) total += std::max(g, 0.0);
    double best = total;
    for (double g : gaps) best = std::max(best, total - std::max(g, 0.0) + std::max(g + gain, 0.0));
    return best;
  }

  // Sample i receives q of `units` budget shares: gauge q/units (sum budget) or (q/units)^2
  // (square-root budget). Shares are allocated by an exact dynamic program over the grid.
  const bool sqrt_budget = s.aggregation == Aggregation::SqrtBudget;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> best(units + 1, neg_inf), next(units + 1);
  best[0] = 0.0;
  std::vector<double> per_share(units + 1);
  for (double g : gaps) {
    for (int q = 0; q <= units; ++q) {
      const double frac = static_cast<double>(q) / units;
      const double scale = sqrt_budget ? frac * frac : frac;
      per_share[q] = std::max(g + scale * gain, 0.0);
    }
    std::fill(next.begin(), next.end(), neg_inf);
    for (int used = 0; used <= units; ++used) {
      if (best[used] == neg_inf) continue;
      for (int q = 0; used + q <= units; ++q) {
        next[used + q] = std::max(next[used + q], best[used] + per_share[q]);
      }
    }
    best.swap(next);
  }
  return *std::max_element(best.begin(), best.end());
}

double brute_force_worst_case(const LinearClassifier& clf, const Dataset& ds, const BoxSet& box,
                              int resolution) {
  if (box.per_sample.size() != ds.size()) {
    throw std::invalid_argument("brute_force_worst_case: box has " + std::to_string(box.per_sample.size()) +
                                " components for " + std::to_string(ds.size()) + " samples");
  }
  for (const auto& a : box.per_sample) check_inputs(clf, ds, a, "brute_force_worst_case");
  if (resolution < 1) throw std::invalid_argument("brute_force_worst_case: resolution must be positive");
  check_cap(cover_size(ds.dim(), resolution) * ds.dim() * static_cast<std::int64_t>(ds.size()));
  const auto dirs = direction_cover(ds.dim(), resolution, clf.w);
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double gain = covered_support(box.per_sample[i], dirs, clf.w);
    total += std::max(margin_gap(clf, ds[i]) + gain, 0.0);
  }
  return total;
}

}  // namespace robsvm
