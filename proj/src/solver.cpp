#include "robsvm/solver.hpp"

#include <algorithm>
#include <limits>

namespace robsvm {

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw std::invalid_argument("SolverConfig: eta0 must be > 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
  if (restart_period < 1) throw std::invalid_argument("SolverConfig: restart_period must be >= 1");
  if (stall_epochs < 1) throw std::invalid_argument("SolverConfig: stall_epochs must be >= 1");
}

namespace {

// Objective over p = [w; b], projected onto an L2 ball in w that contains every point no
// worse than the origin.
class LinearProblem {
 public:
  LinearProblem(const RegularizedProblem& problem, double w_radius)
      : problem_(problem), n_(problem.dataset().dim()), w_radius_(w_radius) {}

  double evaluate(const Vector& p, Vector* grad) const {
    const LinearClassifier clf{p.head(n_), p[n_]};
    if (grad) *grad = problem_.subgradient(clf);
    return problem_.objective(clf);
  }

  double step_norm(const Vector&, const Vector& g) const { return g.norm(); }

  void project(Vector& p) const {
    if (!std::isfinite(w_radius_)) return;
    const double r = p.head(n_).norm();
    if (r > w_radius_) p.head(n_) *= w_radius_ / r;
  }

 private:
  const RegularizedProblem& problem_;
  Index n_;
  double w_radius_;
};

double l2_radius_bound(const RegularizedProblem& problem, double start_value) {
  // penalty(w) >= support(w) = c * ||w||_* >= (c / k) ||w||_2, so better points satisfy
  // ||w||_2 <= k * start_value / c.
  const auto& a = problem.atomic();
  if (a.radius() <= 0.0) return std::numeric_limits<double>::infinity();
  const double k = a.norm().dual_spec().l2_ratio(problem.dataset().dim());
  return k * start_value / a.radius();
}

bool separable_1d(const Dataset& ds) {
  double pos_min = std::numeric_limits<double>::infinity(), pos_max = -pos_min;
  double neg_min = pos_min, neg_max = -pos_min;
  for (const auto& s : ds) {
    const double v = s.x[0];
    if (s.y > 0) {
      pos_min = std::min(pos_min, v);
      pos_max = std::max(pos_max, v);
    } else {
      neg_min = std::min(neg_min, v);
      neg_max = std::max(neg_max, v);
    }
  }
  return neg_max < pos_min || pos_max < neg_min;
}

// Strict separability in the plane. If a strict separator exists, translating it onto one point
// and rotating it about that point until it meets a second gives a line through two distinct
// points with every off-line point on its correct side, and whose on-line points switch label
// at most once along the line (a slight rotation then separates those too). Conversely such a
// line can be perturbed into a strict separator.
bool separable_2d(const Dataset& ds) {
  const std::size_t m = ds.size();
  double scale = 1.0;
  for (const auto& s : ds) scale = std::max(scale, s.x.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale * scale;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const Vector d = ds[j].x - ds[i].x;
      if (d.isZero(0.0)) continue;
      const Vector normal{{-d[1], d[0]}};
      for (double orient : {1.0, -1.0}) {
        bool ok = true;
        std::vector<std::pair<double, int>> on_line;
        for (std::size_t k = 0; k < m && ok; ++k) {
          const Vector r = ds[k].x - ds[i].x;
          const double side = orient * normal.dot(r);
          if (std::abs(side) <= eps) {
            on_line.emplace_back(d.dot(r), ds[k].y);
          } else if ((side > 0.0) != (ds[k].y > 0)) {
            ok = false;
          }
        }
        if (!ok) continue;
        std::sort(on_line.begin(), on_line.end());
        int changes = 0;
        for (std::size_t k = 1; k < on_line.size() && ok; ++k) {
          if (on_line[k].second == on_line[k - 1].second) continue;
          if (on_line[k].first - on_line[k - 1].first <= eps) ok = false;  // coincident, opposite labels
          ++changes;
        }
        if (ok && changes <= 1) return true;
      }
    }
  }
  // No admissible line, or a single distinct location carrying both labels.
  return false;
}

}  // namespace

bool check_separability(const Dataset& ds, const SolverConfig& cfg) {
  const int first = ds[0].y;
  if (std::all_of(ds.begin(), ds.end(), [&](const LabeledSample& s) { return s.y == first; })) return true;
  if (ds.dim() == 1) return separable_1d(ds);
  if (ds.dim() == 2 && ds.size() <= 20) return separable_2d(ds);

  const RegularizedProblem problem(ds, AtomicSet::norm_ball(NormSpec::l2(), 0.0), BaseRegularizer::none());
  const LinearProblem lp(problem, std::numeric_limits<double>::infinity());
  const auto out = minimize_subgradient(lp, Vector::Zero(ds.dim() + 1), cfg);
  const LinearClassifier clf{out.point.head(ds.dim()), out.point[ds.dim()]};
  for (const auto& s : ds) {
    if (!(s.y * clf.decision(s.x) > 0.0)) return false;
  }
  return true;
}

TrainResult train_problem(const RegularizedProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  const Index n = problem.dataset().dim();
  const double start_value = static_cast<double>(problem.dataset().size());
  const LinearProblem lp(problem, l2_radius_bound(problem, start_value));
  const auto out = minimize_subgradient(lp, Vector::Zero(n + 1), cfg);

  TrainResult result;
  result.classifier = LinearClassifier{out.point.head(n), out.point[n]};
  result.objective = robust_objective(result.classifier, problem);
  result.iterations_used = out.iterations;
  result.converged = out.converged;
  result.separable = check_separability(problem.dataset(), cfg);
  return result;
}

TrainResult train_regularized(const Dataset& ds, const NormSpec& norm, double c, const SolverConfig& cfg) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("train_regularized: c must be >= 0");
  // c * ||w|| is the support function of the dual-norm ball of radius c.
  const SublinearSet set{AtomicSet::norm_ball(norm.dual_spec(), c), Aggregation::SumBudget};
  return train_problem(robustify(ds, set), cfg);
}

TrainResult train_robust(const Dataset& ds, const SublinearSet& s, const SolverConfig& cfg, BaseRegularizer r) {
  return train_problem(robustify(ds, s, std::move(r)), cfg);
}

GridOracleResult grid_oracle(const Dataset& ds, const NormSpec& norm, double c, const GridBounds& bounds,
                             int resolution, int refine_rounds) {
  const Index n = ds.dim();
  if (n > 3) throw std::invalid_argument("grid_oracle: dimension must be <= 3");
  if (resolution < 2) throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  if (std::pow(static_cast<double>(resolution), static_cast<double>(n + 1)) > 1e8) {
    throw std::invalid_argument("grid_oracle: resolution^(n+1) exceeds 1e8");
  }
  require_same_dim(bounds.lo.size(), n + 1, "grid_oracle bounds");
  require_same_dim(bounds.hi.size(), n + 1, "grid_oracle bounds");
  for (Index k = 0; k <= n; ++k) {
    if (!(bounds.lo[k] <= 0.0 && 0.0 <= bounds.hi[k])) {
      throw std::invalid_argument("grid_oracle: bounds must contain the origin");
    }
  }

  GridOracleResult result;
  result.objective = std::numeric_limits<double>::infinity();
  Vector lo = bounds.lo, hi = bounds.hi;
  const std::size_t m = ds.size();
  std::vector<double> z(m);

  for (int round = 0; round <= refine_rounds; ++round) {
    const Vector step = (hi - lo) / (resolution - 1);
    if (round == 0) result.spacing = step.maxCoeff();
    Vector best_point = Vector::Zero(n + 1);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    Vector w(n);
    while (true) {
      for (Index k = 0; k < n; ++k) w[k] = lo[k] + idx[k] * step[k];
      const double pen = c * norm.value(w);
      for (std::size_t i = 0; i < m; ++i) z[i] = ds[i].y * w.dot(ds[i].x);
      for (int q = 0; q < resolution; ++q) {
        const double b = lo[n] + q * step[n];
        double f = pen;
        for (std::size_t i = 0; i < m; ++i) f += std::max(1.0 - z[i] - ds[i].y * b, 0.0);
        if (f < best) {
          best = f;
          best_point.head(n) = w;
          best_point[n] = b;
        }
      }
      result.evaluations += resolution;
      Index k = 0;
      while (k < n && ++idx[k] == resolution) idx[k++] = 0;
      if (k == n) break;
    }
    if (best < result.objective) {
      result.objective = best;
      result.point = LinearClassifier{best_point.head(n), best_point[n]};
    }
    lo = best_point - 2.0 * step;
    hi = best_point + 2.0 * step;
  }
  return result;
}

}  // namespace robsvm
