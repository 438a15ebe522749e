#include "robsvm/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace robsvm {

double PairingMetric::squared_distance(const Vector& x, const Vector& xp) const {
  if (!kernel) return (x - xp).squaredNorm();
  const double d = feature_distance(*kernel, x, xp);
  return d * d;
}

namespace {

void check_pair_sizes(const Dataset& train, const Dataset& test, const char* what) {
  if (train.size() != test.size()) throw DimensionError(std::string(what) + ": train and test sizes differ");
  require_same_dim(train.dim(), test.dim(), what);
}

PairingResult make_pairing(std::size_t m, std::size_t pairs, PairingMethod method, double c) {
  return {m, pairs, 1.0 - static_cast<double>(pairs) / static_cast<double>(m), method, c};
}

class HopcroftKarp {
 public:
  explicit HopcroftKarp(std::vector<std::vector<int>> adj, int right)
      : adj_(std::move(adj)), match_l_(adj_.size(), -1), match_r_(right, -1), dist_(adj_.size()) {}

  std::size_t run() {
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < adj_.size(); ++u) {
        if (match_l_[u] == -1 && dfs(static_cast<int>(u))) ++matched;
      }
    }
    return matched;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      dist_[u] = match_l_[u] == -1 ? 0 : kInf;
      if (match_l_[u] == -1) q.push(static_cast<int>(u));
    }
    bool found = false;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        const int w = match_r_[v];
        if (w == -1) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      const int w = match_r_[v];
      if (w == -1 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_, match_r_, dist_;
};

}  // namespace

PairingResult max_pairings_exact(const Dataset& train, const Dataset& test, double c, const PairingMetric& metric) {
  check_pair_sizes(train, test, "max_pairings_exact");
  if (!(c >= 0.0)) throw std::invalid_argument("max_pairings_exact: c must be >= 0");
  const std::size_t m = train.size();
  const double c2 = c * c;
  std::vector<std::vector<int>> adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (train[i].y == test[j].y && metric.squared_distance(train[i].x, test[j].x) <= c2) {
        adj[i].push_back(static_cast<int>(j));
      }
    }
  }
  HopcroftKarp hk(std::move(adj), static_cast<int>(m));
  return make_pairing(m, hk.run(), PairingMethod::Exact, c);
}

DomainBox DomainBox::bounding(const Dataset& a, const Dataset& b) {
  require_same_dim(a.dim(), b.dim(), "DomainBox::bounding");
  DomainBox box{a[0].x, a[0].x};
  for (const auto* ds : {&a, &b}) {
    for (const auto& s : *ds) {
      box.lo = box.lo.cwiseMin(s.x);
      box.hi = box.hi.cwiseMax(s.x);
    }
  }
  return box;
}

PairingResult brick_pairing_lower_bound(const Dataset& train, const Dataset& test, double c, const DomainBox& box) {
  check_pair_sizes(train, test, "brick_pairing_lower_bound");
  const Index n = train.dim();
  require_same_dim(box.lo.size(), n, "brick_pairing_lower_bound box");
  require_same_dim(box.hi.size(), n, "brick_pairing_lower_bound box");
  if (!(c >= 0.0)) throw std::invalid_argument("brick_pairing_lower_bound: c must be >= 0");
  if ((box.hi.array() < box.lo.array()).any()) throw std::invalid_argument("brick_pairing_lower_bound: empty box");
  for (const auto* ds : {&train, &test}) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const Vector& x = (*ds)[i].x;
      if ((x.array() < box.lo.array()).any() || (x.array() > box.hi.array()).any()) {
        throw std::out_of_range("brick_pairing_lower_bound: sample " + std::to_string(i) + " lies outside the box");
      }
    }
  }
  const std::size_t m = train.size();
  if (c == 0.0) return make_pairing(m, 0, PairingMethod::Brick, c);

  const double side = c / std::sqrt(static_cast<double>(n));
  std::vector<std::int64_t> cells(n);
  for (Index k = 0; k < n; ++k) {
    cells[k] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((box.hi[k] - box.lo[k]) / side)));
  }
  auto key = [&](const LabeledSample& s) {
    std::vector<std::int64_t> idx(n + 1);
    idx[0] = s.y;
    for (Index k = 0; k < n; ++k) {
      const auto i = static_cast<std::int64_t>(std::floor((s.x[k] - box.lo[k]) / side));
      idx[k + 1] = std::clamp<std::int64_t>(i, 0, cells[k] - 1);
    }
    return idx;
  };
  std::map<std::vector<std::int64_t>, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& s : train) ++counts[key(s)].first;
  for (const auto& s : test) ++counts[key(s)].second;
  std::size_t pairs = 0;
  for (const auto& [k, v] : counts) pairs += std::min(v.first, v.second);
  return make_pairing(m, pairs, PairingMethod::Brick, c);
}

namespace {

struct ScoredSet {
  double error = 0.0;
  double avg_hinge = 0.0;
};

template <class Decision>
ScoredSet score(const Dataset& ds, Decision decision) {
  ScoredSet out;
  for (const auto& s : ds) {
    const double f = decision(s.x);
    const int pred = f >= 0.0 ? 1 : -1;
    out.error += pred != s.y;
    out.avg_hinge += std::max(1.0 - s.y * f, 0.0);
  }
  out.error /= static_cast<double>(ds.size());
  out.avg_hinge /= static_cast<double>(ds.size());
  return out;
}

BoundReport assemble(const ScoredSet& train, const ScoredSet& test, double gamma, double c, double w_norm, double b,
                     double K) {
  BoundReport r;
  r.test_error = test.error;
  r.test_avg_hinge = test.avg_hinge;
  r.train_avg_hinge = train.avg_hinge;
  r.K = K;
  r.gamma = gamma;
  r.regularization = c * w_norm;
  r.abs_b = std::abs(b);
  r.error_bound = gamma + r.regularization + r.train_avg_hinge;
  r.hinge_bound = gamma * (1.0 + K * w_norm + r.abs_b) + r.regularization + r.train_avg_hinge;
  return r;
}

void check_bound_inputs(const Dataset& train, const Dataset& test, double c, const PairingResult& pairing,
                        const char* what) {
  check_pair_sizes(train, test, what);
  if (pairing.m != train.size()) throw DimensionError(std::string(what) + ": pairing computed for a different m");
  if (!(c >= 0.0)) throw std::invalid_argument(std::string(what) + ": c must be >= 0");
}

}  // namespace

BoundReport generalization_bound(const LinearClassifier& clf, const Dataset& train, const Dataset& test, double c,
                                 const PairingResult& pairing, double K) {
  check_bound_inputs(train, test, c, pairing, "generalization_bound");
  require_same_dim(clf.w.size(), train.dim(), "generalization_bound");
  const double radius = std::max(train.max_l2_norm(), test.max_l2_norm());
  if (K < radius * (1.0 - 1e-12)) throw std::invalid_argument("generalization_bound: K is below max ||x||");
  auto f = [&](const Vector& x) { return clf.decision(x); };
  return assemble(score(train, f), score(test, f), pairing.gamma, c, clf.w.norm(), clf.b, K);
}

BoundReport kernel_generalization_bound(const KernelClassifier& kc, const Dataset& train, const Dataset& test,
                                        double c_feature, const PairingResult& pairing, double K_kernel) {
  check_bound_inputs(train, test, c_feature, pairing, "kernel_generalization_bound");
  double kmax = 0.0;
  for (const auto* ds : {&train, &test})
    for (const auto& s : *ds) kmax = std::max(kmax, kc.spec()(s.x, s.x));
  if (K_kernel < std::sqrt(kmax) * (1.0 - 1e-12)) {
    throw std::invalid_argument("kernel_generalization_bound: K is below the largest feature norm");
  }
  auto f = [&](const Vector& x) { return kc.decision(x); };
  return assemble(score(train, f), score(test, f), pairing.gamma, c_feature, kc.rkhs_norm(), kc.offset(), K_kernel);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

TrendReport run_consistency_experiment(const DataGenerator& generator, const ExperimentConfig& cfg) {
  if (cfg.sizes.empty()) throw std::invalid_argument("run_consistency_experiment: no sizes");
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end()) ||
      std::adjacent_find(cfg.sizes.begin(), cfg.sizes.end()) != cfg.sizes.end()) {
    throw std::invalid_argument("run_consistency_experiment: sizes must be strictly increasing");
  }
  if (cfg.trials < 1) throw std::invalid_argument("run_consistency_experiment: trials must be >= 1");
  if (!cfg.c_schedule) throw std::invalid_argument("run_consistency_experiment: missing c schedule");

  TrendReport report;
  for (const std::size_t m : cfg.sizes) {
    const double c = cfg.c_schedule(m);
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("run_consistency_experiment: bad c(m)");
    SizeSummary summary{m, c, 0.0, 0.0, 0.0, 0};
    std::vector<double> gammas, bounds, errors;
    for (int t = 0; t < cfg.trials; ++t) {
      Rng train_rng = make_rng(cfg.seed, {m, static_cast<std::uint64_t>(t), 0});
      Rng test_rng = make_rng(cfg.seed, {m, static_cast<std::uint64_t>(t), 1});
      const Dataset train = generator(m, train_rng);
      const Dataset test = generator(m, test_rng);
      if (train.size() != m || test.size() != m) {
        throw std::runtime_error("run_consistency_experiment: generator returned the wrong size");
      }
      // c||w|| + (1/m) sum hinge has the same minimizers as (m c)||w|| + sum hinge.
      const auto fit = train_regularized(train, NormSpec::l2(), static_cast<double>(m) * c, cfg.solver);
      const auto pairing = max_pairings_exact(train, test, c);
      const double K = std::max(train.max_l2_norm(), test.max_l2_norm());
      TrialRecord rec{m, t, c, pairing.pairs, generalization_bound(fit.classifier, train, test, c, pairing, K)};
      if (!rec.bound.error_bound_holds() || !rec.bound.hinge_bound_holds()) ++summary.bound_violations;
      gammas.push_back(rec.bound.gamma);
      bounds.push_back(rec.bound.error_bound);
      errors.push_back(rec.bound.test_error);
      report.records.push_back(rec);
    }
    summary.median_gamma = median(gammas);
    summary.median_error_bound = median(bounds);
    summary.median_test_error = median(errors);
    report.bound_violations += summary.bound_violations;
    report.summaries.push_back(summary);
  }
  report.gamma_nonincreasing = report.gamma_strictly_decreasing = report.test_error_nonincreasing = true;
  for (std::size_t i = 1; i < report.summaries.size(); ++i) {
    const auto& prev = report.summaries[i - 1];
    const auto& cur = report.summaries[i];
    report.gamma_nonincreasing &= cur.median_gamma <= prev.median_gamma;
    report.gamma_strictly_decreasing &= cur.median_gamma < prev.median_gamma;
    report.test_error_nonincreasing &= cur.median_test_error <= prev.median_test_error;
  }
  return report;
}

PathologicalReport run_pathological_demo(const DataGenerator& generator, std::size_t m, int trials, double c,
                                         const SolverConfig& cfg, std::uint64_t seed) {
  if (m == 0 || trials < 1) throw std::invalid_argument("run_pathological_demo: m and trials must be positive");
  PathologicalReport report;
  report.min_test_error = std::numeric_limits<double>::infinity();
  report.max_test_error = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Rng train_rng = make_rng(seed, {m, static_cast<std::uint64_t>(t), 0});
    Rng test_rng = make_rng(seed, {m, static_cast<std::uint64_t>(t), 1});
    const Dataset train = generator(m, train_rng);
    const Dataset test = generator(m, test_rng);
    const auto fit = train_kernel_regularized(train, KernelSpec::indicator(), c, cfg);
    PathologicalTrial rec;
    rec.trial = t;
    rec.train_avg_hinge = kernel_hinge(fit.classifier, train) / static_cast<double>(train.size());
    rec.train_error = kernel_error(fit.classifier, train);
    rec.test_error = kernel_error(fit.classifier, test);
    rec.offset = fit.classifier.offset();
    report.max_train_avg_hinge = std::max(report.max_train_avg_hinge, rec.train_avg_hinge);
    report.min_test_error = std::min(report.min_test_error, rec.test_error);
    report.max_test_error = std::max(report.max_test_error, rec.test_error);
    report.trials.push_back(rec);
  }
  return report;
}

}  // namespace robsvm
