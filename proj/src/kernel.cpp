#include "robsvm/kernel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

namespace robsvm {

KernelSpec KernelSpec::polynomial(int degree) {
  if (degree < 1) throw std::invalid_argument("KernelSpec: polynomial degree must be >= 1");
  return {KernelKind::Polynomial, degree, 1.0};
}

KernelSpec KernelSpec::rbf(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("KernelSpec: rbf gamma must be > 0");
  return {KernelKind::Rbf, 1, gamma};
}

double KernelSpec::operator()(const Vector& x, const Vector& xp) const {
  require_same_dim(x.size(), xp.size(), "kernel");
  switch (kind) {
    case KernelKind::Linear: return x.dot(xp);
    case KernelKind::Polynomial: return std::pow(x.dot(xp), degree);
    case KernelKind::Rbf: return std::exp(-gamma * (x - xp).squaredNorm());
    case KernelKind::Indicator:
      return std::memcmp(x.data(), xp.data(), sizeof(double) * static_cast<std::size_t>(x.size())) == 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::optional<std::function<double(double)>> KernelSpec::radial_profile() const {
  switch (kind) {
    case KernelKind::Rbf: {
      const double g = gamma;
      return std::function<double(double)>([g](double t) { return std::exp(-g * t * t); });
    }
    case KernelKind::Indicator:
      return std::function<double(double)>([](double t) { return t == 0.0 ? 1.0 : 0.0; });
    default: return std::nullopt;
  }
}

std::string KernelSpec::name() const {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Polynomial: return "poly" + std::to_string(degree);
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Indicator: return "indicator";
  }
  return "?";
}

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& xp) { return spec(x, xp); }

Matrix gram(const KernelSpec& spec, std::span<const Vector> points) {
  const auto m = static_cast<Index>(points.size());
  Matrix k(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j <= i; ++j) {
      k(i, j) = spec(points[i], points[j]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Matrix gram(const KernelSpec& spec, const Dataset& ds) {
  std::vector<Vector> pts;
  pts.reserve(ds.size());
  for (const auto& s : ds) pts.push_back(s.x);
  return gram(spec, pts);
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigen decomposition failed");
  return eig.eigenvalues().minCoeff();
}

namespace {

double clipped_sqrt(double q) {
  if (q < -kGramTolerance) {
    throw std::domain_error("RKHS norm: negative quadratic form " + std::to_string(q) + " (Gram matrix not PSD)");
  }
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace

KernelClassifier::KernelClassifier(KernelSpec spec, std::vector<Vector> anchors, Vector alphas, double b)
    : spec_(spec), anchors_(std::move(anchors)), alphas_(std::move(alphas)), b_(b) {
  if (static_cast<Index>(anchors_.size()) != alphas_.size()) {
    throw std::invalid_argument("KernelClassifier: one coefficient per anchor is required");
  }
  gram_ = gram(spec_, anchors_);
}

double KernelClassifier::feature_inner(const Vector& x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    if (alphas_[static_cast<Index>(i)] != 0.0) v += alphas_[static_cast<Index>(i)] * spec_(x, anchors_[i]);
  }
  return v;
}

double KernelClassifier::rkhs_norm() const { return clipped_sqrt(alphas_.dot(gram_ * alphas_)); }

double kernel_hinge(const KernelClassifier& kc, const Dataset& ds) {
  double total = 0.0;
  for (const auto& s : ds) total += std::max(1.0 - s.y * kc.decision(s.x), 0.0);
  return total;
}

double kernel_error(const KernelClassifier& kc, const Dataset& ds) {
  std::size_t wrong = 0;
  for (const auto& s : ds) wrong += kc.predict(s.x) != s.y;
  return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

double kernel_regularized_objective(const KernelClassifier& kc, const Dataset& ds, double c) {
  return c * kc.rkhs_norm() + kernel_hinge(kc, ds);
}

double feature_ball_support(const KernelClassifier& kc, double c) {
  // <w, c w/||w||> = c <w,w> / ||w||, with <w,w> = alpha' K alpha.
  const double ww = std::max(kc.alphas().dot(kc.anchor_gram() * kc.alphas()), 0.0);
  if (ww == 0.0) return 0.0;
  return c * ww / std::sqrt(ww);
}

namespace {

class KernelProblem {
 public:
  KernelProblem(const Matrix& k, const Vector& y, double c, double norm_cap)
      : k_(k), y_(y), c_(c), norm_cap_(norm_cap), m_(k.rows()) {}

  double evaluate(const Vector& p, Vector* grad) const {
    const auto alpha = p.head(m_);
    const double b = p[m_];
    const Vector f = k_ * alpha;
    const double norm = clipped_sqrt(alpha.dot(f));
    Vector g = Vector::Zero(m_ + 1);
    double hinge = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const double gap = 1.0 - y_[i] * (f[i] + b);
      if (gap > 0.0) {
        hinge += gap;
        g[i] -= y_[i];
        g[m_] -= y_[i];
      }
    }
    if (norm > 0.0) g.head(m_) += (c_ / norm) * alpha;
    if (grad) *grad = std::move(g);
    return c_ * norm + hinge;
  }

  double step_norm(const Vector&, const Vector& g) const {
    const auto ga = g.head(m_);
    return std::sqrt(std::max(ga.dot(k_ * ga), 0.0) + g[m_] * g[m_]);
  }

  void project(Vector& p) const {
    if (!std::isfinite(norm_cap_)) return;
    const auto alpha = p.head(m_);
    const double norm = std::sqrt(std::max(alpha.dot(k_ * alpha), 0.0));
    if (norm > norm_cap_) p.head(m_) *= norm_cap_ / norm;
  }

 private:
  const Matrix& k_;
  const Vector& y_;
  double c_;
  double norm_cap_;
  Index m_;
};

}  // namespace

KernelTrainResult train_kernel_regularized(const Dataset& ds, const KernelSpec& spec, double c,
                                           const SolverConfig& cfg) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("train_kernel_regularized: c must be >= 0");
  cfg.validate();
  std::vector<Vector> anchors;
  Vector y(static_cast<Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    anchors.push_back(ds[i].x);
    y[static_cast<Index>(i)] = ds[i].y;
  }
  const Matrix k = gram(spec, anchors);
  if (min_eigenvalue(k) < -kGramTolerance) {
    throw std::domain_error("train_kernel_regularized: Gram matrix is not positive semi-definite");
  }
  const auto m = static_cast<Index>(ds.size());
  const double cap = c > 0.0 ? static_cast<double>(m) / c : std::numeric_limits<double>::infinity();
  const KernelProblem problem(k, y, c, cap);
  const auto out = minimize_subgradient(problem, Vector::Zero(m + 1), cfg);

  KernelClassifier kc(spec, std::move(anchors), out.point.head(m), out.point[m]);
  const double objective = kernel_regularized_objective(kc, ds, c);
  return KernelTrainResult{std::move(kc), objective, out.iterations, out.converged};
}

double feature_distance(const KernelSpec& spec, const Vector& x, const Vector& xp) {
  return std::sqrt(std::max(0.0, spec(x, x) + spec(xp, xp) - 2.0 * spec(x, xp)));
}

SmoothnessReport verify_smoothness_condition(const KernelSpec& spec, std::span<const std::pair<Vector, Vector>> pairs,
                                             const std::function<double(double)>& f, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("verify_smoothness_condition: rho must be > 0");
  if (f(0.0) != 0.0) throw std::invalid_argument("verify_smoothness_condition: f(0) must be 0");
  SmoothnessReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, xp] = pairs[i];
    const double d2 = (x - xp).squaredNorm();
    if (std::sqrt(d2) > rho) {
      ++report.skipped;
      continue;
    }
    ++report.checked;
    const double lhs = spec(x, x) + spec(xp, xp) - 2.0 * spec(x, xp);
    const double excess = lhs - f(d2);
    if (excess > 1e-12) {
      report.passed = false;
      report.violations.push_back(i);
    }
    report.worst_excess = std::max(report.worst_excess, excess);
  }
  return report;
}

double rbf_feature_radius(const std::function<double(double)>& f, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("rbf_feature_radius: c must be >= 0");
  const double f0 = f(0.0), fc = f(c);
  if (fc > f0) throw std::invalid_argument("rbf_feature_radius: profile must be non-increasing (f(c) > f(0))");
  return std::sqrt(std::max(0.0, 2.0 * f0 - 2.0 * fc));
}

SampleSpaceSup sample_space_sup(const KernelClassifier& kc, const Vector& x, double c, int resolution) {
  const auto profile = kc.spec().radial_profile();
  if (!profile) throw std::invalid_argument("sample_space_sup: kernel is not radial");
  const Index n = x.size();
  if (n < 1 || n > 2) throw std::invalid_argument("sample_space_sup: dimension must be 1 or 2");
  if (!(c >= 0.0)) throw std::invalid_argument("sample_space_sup: c must be >= 0");
  if (resolution < 2) throw std::invalid_argument("sample_space_sup: resolution must be >= 2");
  const int angles = 4 * (resolution - 1);
  const double work = n == 1 ? resolution : static_cast<double>(resolution) * angles;
  if (work * static_cast<double>(kc.anchors().size()) > 1e8) {
    throw std::invalid_argument("sample_space_sup: resolution exceeds the search cap");
  }

  SampleSpaceSup out;
  out.value = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& d) {
    const double v = kc.feature_inner(x - d);
    if (v > out.value) {
      out.value = v;
      out.argmax = d;
    }
  };
  if (n == 1) {
    for (int k = 0; k < resolution; ++k) consider(Vector{{-c + 2.0 * c * k / (resolution - 1)}});
  } else {
    consider(Vector::Zero(2));
    for (int j = 1; j < resolution; ++j) {
      const double r = c * j / (resolution - 1);
      for (int k = 0; k < angles; ++k) {
        const double a = 2.0 * std::numbers::pi * k / angles;
        consider(Vector{{r * std::cos(a), r * std::sin(a)}});
      }
    }
  }
  out.feature_ball_bound = kc.feature_inner(x) + kc.rkhs_norm() * rbf_feature_radius(*profile, c);
  return out;
}

}  // namespace robsvm
