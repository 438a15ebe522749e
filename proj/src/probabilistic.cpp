#include "robsvm/probabilistic.hpp"

#include "robsvm/reduction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace robsvm {

namespace {

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

Vector random_unit(Rng& rng, Index n, const NormSpec& norm) {
  std::normal_distribution<double> normal;
  Vector g(n);
  double len = 0.0;
  do {
    for (Index k = 0; k < n; ++k) g[k] = normal(rng);
    len = norm.value(g);
  } while (len == 0.0);
  return g / len;
}

}  // namespace

DisturbanceModel::DisturbanceModel(std::size_t m, Index n, NormSpec budget_norm, Sampler sampler, std::string name)
    : m_(m), n_(n), norm_(std::move(budget_norm)), sampler_(std::move(sampler)), name_(std::move(name)) {
  if (m_ == 0 || n_ < 1) throw std::invalid_argument("DisturbanceModel: m and n must be positive");
  if (norm_.fixed_dim() != 0 && norm_.fixed_dim() != n_) throw DimensionError("DisturbanceModel: budget norm dimension");
  if (!sampler_) throw std::invalid_argument("DisturbanceModel: empty sampler");
}

DisturbanceModel DisturbanceModel::zero(std::size_t m, Index n, NormSpec budget_norm) {
  return {m, n, std::move(budget_norm), [m, n](Rng&) { return std::vector<Vector>(m, Vector::Zero(n)); }, "zero"};
}

DisturbanceModel DisturbanceModel::gaussian(std::size_t m, Index n, double sigma, NormSpec budget_norm) {
  require_nonnegative(sigma, "gaussian sigma");
  auto sampler = [m, n, sigma](Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> d(m, Vector(n));
    for (auto& v : d)
      for (Index k = 0; k < n; ++k) v[k] = sigma * normal(rng);
    return d;
  };
  return {m, n, std::move(budget_norm), sampler, "gaussian"};
}

DisturbanceModel DisturbanceModel::uniform_ball(std::size_t m, Index n, double radius, NormSpec budget_norm) {
  require_nonnegative(radius, "uniform_ball radius");
  auto sampler = [m, n, radius](Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const NormSpec l2 = NormSpec::l2();
    std::vector<Vector> d;
    d.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      Vector u = random_unit(rng, n, l2);
      d.push_back(radius * std::pow(unif(rng), 1.0 / static_cast<double>(n)) * u);
    }
    return d;
  };
  return {m, n, std::move(budget_norm), sampler, "uniform_ball"};
}

DisturbanceModel DisturbanceModel::point_mass(std::size_t m, Index n, double total, NormSpec budget_norm) {
  require_nonnegative(total, "point_mass total");
  Vector e1 = Vector::Zero(n);
  e1[0] = 1.0;
  const Vector d1 = total * e1 / budget_norm.value(e1);
  auto sampler = [m, n, d1](Rng&) {
    std::vector<Vector> d(m, Vector::Zero(n));
    d[0] = d1;
    return d;
  };
  return {m, n, std::move(budget_norm), sampler, "point_mass"};
}

DisturbanceModel DisturbanceModel::uniform_budget(std::size_t m, Index n, double hi, NormSpec budget_norm,
                                                  std::optional<Vector> direction) {
  require_nonnegative(hi, "uniform_budget upper limit");
  std::optional<Vector> unit;
  if (direction) {
    require_same_dim(direction->size(), n, "uniform_budget direction");
    const double len = budget_norm.value(*direction);
    if (len == 0.0) throw std::invalid_argument("uniform_budget: direction must be nonzero");
    unit = *direction / len;
  }
  auto sampler = [m, n, hi, norm = budget_norm, unit](Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    const double total = hi * unif(rng);
    std::vector<double> share(m);
    double sum = 0.0;
    for (auto& s : share) sum += (s = expo(rng));
    std::vector<Vector> d;
    d.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Vector u = unit ? *unit : random_unit(rng, n, norm);
      d.push_back(total * share[i] / sum * u);
    }
    return d;
  };
  return {m, n, std::move(budget_norm), sampler, "uniform_budget"};
}

std::vector<Vector> DisturbanceModel::draw(std::uint64_t seed, std::uint64_t index) const {
  Rng rng = make_rng(seed, {index});
  auto d = sampler_(rng);
  if (d.size() != m_) throw DimensionError("DisturbanceModel: sampler returned the wrong number of disturbances");
  for (const auto& v : d) require_same_dim(v.size(), n_, "DisturbanceModel sample");
  return d;
}

double DisturbanceModel::budget(const std::vector<Vector>& deltas) const {
  double s = 0.0;
  for (const auto& d : deltas) s += norm_.value(d);
  return s;
}

std::vector<double> budget_totals(const DisturbanceModel& dm, std::size_t n_draws, std::uint64_t seed) {
  std::vector<double> out(n_draws);
  for (std::size_t j = 0; j < n_draws; ++j) out[j] = dm.budget(dm.draw(seed, j));
  return out;
}

double empirical_quantile(std::vector<double> values, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("empirical_quantile: eta must lie in (0, 1)");
  if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
  const std::size_t n = values.size();
  // ceil((1 - eta) n) computed as n - floor(eta n) to avoid rounding (1 - eta) first.
  const auto drop = static_cast<std::size_t>(std::floor(eta * static_cast<double>(n) + 1e-9));
  const std::size_t k = std::max<std::size_t>(n - std::min(drop, n), 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

double calibrate_chance(const DisturbanceModel& dm, double eta, std::size_t n_draws, std::uint64_t seed) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("calibrate_chance: eta must lie in (0, 1)");
  if (n_draws < 100) throw std::invalid_argument("calibrate_chance: n_draws must be >= 100");
  return empirical_quantile(budget_totals(dm, n_draws, seed), eta);
}

BudgetPrior BudgetPrior::point_mass(double c0) {
  require_nonnegative(c0, "point mass budget");
  BudgetPrior p;
  p.kind_ = Kind::PointMass;
  p.atoms_ = {{c0, 1.0}};
  return p;
}

BudgetPrior BudgetPrior::discrete(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete prior: no atoms");
  double total = 0.0;
  for (const auto& [c, p] : atoms) {
    require_nonnegative(c, "discrete prior support");
    require_nonnegative(p, "discrete prior probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("discrete prior: probabilities must sum to 1");
  BudgetPrior p;
  p.kind_ = Kind::Discrete;
  p.atoms_ = std::move(atoms);
  return p;
}

BudgetPrior BudgetPrior::uniform(double lo, double hi) {
  require_nonnegative(lo, "uniform prior lower limit");
  require_nonnegative(hi, "uniform prior upper limit");
  if (hi < lo) throw std::invalid_argument("uniform prior: hi < lo");
  BudgetPrior p;
  p.kind_ = Kind::Uniform;
  p.lo_ = lo;
  p.hi_ = hi;
  return p;
}

BudgetPrior BudgetPrior::mixture(std::vector<std::pair<BudgetPrior, double>> components) {
  if (components.empty()) throw std::invalid_argument("mixture prior: no components");
  double total = 0.0;
  for (const auto& [c, w] : components) {
    require_nonnegative(w, "mixture weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture prior: weights must sum to 1");
  BudgetPrior p;
  p.kind_ = Kind::Mixture;
  p.components_ = std::move(components);
  return p;
}

double BudgetPrior::mean() const {
  switch (kind_) {
    case Kind::PointMass: return atoms_.front().first;
    case Kind::Discrete: {
      double s = 0.0;
      for (const auto& [c, p] : atoms_) s += c * p;
      return s;
    }
    case Kind::Uniform: return 0.5 * (lo_ + hi_);
    case Kind::Mixture: {
      double s = 0.0;
      for (const auto& [c, w] : components_) s += w * c.mean();
      return s;
    }
  }
  return 0.0;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string BudgetPrior::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::PointMass: os << "point_mass(" << shortest(atoms_.front().first) << ")"; break;
    case Kind::Discrete:
      os << "discrete(";
      for (std::size_t i = 0; i < atoms_.size(); ++i) os << (i ? "," : "") << shortest(atoms_[i].first) << "@" << shortest(atoms_[i].second);
      os << ")";
      break;
    case Kind::Uniform: os << "uniform(" << shortest(lo_) << "," << shortest(hi_) << ")"; break;
    case Kind::Mixture:
      os << "mixture(";
      for (std::size_t i = 0; i < components_.size(); ++i)
        os << (i ? "," : "") << shortest(components_[i].second) << "*" << components_[i].first.describe();
      os << ")";
      break;
  }
  return os.str();
}

double bayes_regularizer(const BudgetPrior& prior) { return prior.mean(); }

double chance_bound_check(const LinearClassifier& clf, const Dataset& ds, const DisturbanceModel& dm, double c_star,
                          std::size_t n_draws, std::uint64_t seed) {
  require_nonnegative(c_star, "chance_bound_check budget");
  if (n_draws == 0) throw std::invalid_argument("chance_bound_check: n_draws must be positive");
  if (dm.m() != ds.size()) throw DimensionError("chance_bound_check: model and dataset sizes differ");
  require_same_dim(dm.n(), ds.dim(), "chance_bound_check");
  const SublinearSet set{AtomicSet::norm_ball(dm.budget_norm(), c_star), Aggregation::SumBudget};
  // Relative slack absorbs summation-order rounding between the two hinge sums.
  const double bound = robust_objective(clf, robustify(ds, set));
  const double slack = 1e-12 * (1.0 + std::abs(bound));

  std::size_t covered = 0;
  for (std::size_t j = 0; j < n_draws; ++j) {
    const auto d = dm.draw(seed, j);
    double loss = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      loss += hinge_loss(clf, LabeledSample{ds[i].x - d[i], ds[i].y});
    }
    covered += loss <= bound + slack;
  }
  return static_cast<double>(covered) / static_cast<double>(n_draws);
}

}  // namespace robsvm
