#include "robsvm/core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace robsvm {

Dataset::Dataset(std::vector<LabeledSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("Dataset: at least one sample is required");
  dim_ = samples_.front().x.size();
  if (dim_ < 1) throw std::invalid_argument("Dataset: samples must have at least one feature");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.x.size() != dim_) {
      throw DimensionError("Dataset: sample " + std::to_string(i) + " has dimension " +
                           std::to_string(s.x.size()) + ", expected " + std::to_string(dim_));
    }
    if (s.y != 1 && s.y != -1) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(i) + " has label " +
                                  std::to_string(s.y) + " outside {-1,+1}");
    }
    if (!s.x.allFinite()) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(i) + " has a non-finite feature");
    }
  }
}

double Dataset::max_l2_norm() const {
  double k = 0.0;
  for (const auto& s : samples_) k = std::max(k, s.x.norm());
  return k;
}

struct NormSpec::Ellipsoid {
  Matrix sigma;
  Matrix sigma_inv;
  Eigen::LLT<Matrix> llt;
  double max_eigenvalue = 0.0;
};

NormSpec NormSpec::l1() { return NormSpec(NormKind::L1, nullptr); }
NormSpec NormSpec::l2() { return NormSpec(NormKind::L2, nullptr); }
NormSpec NormSpec::linf() { return NormSpec(NormKind::Linf, nullptr); }

NormSpec NormSpec::ellipsoidal(const Matrix& sigma) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("NormSpec: ellipsoidal shape matrix must be square and non-empty");
  }
  if (!sigma.allFinite()) throw std::invalid_argument("NormSpec: shape matrix has non-finite entries");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("NormSpec: shape matrix is not symmetric");
  }
  auto ell = std::make_shared<Ellipsoid>();
  ell->sigma = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ell->sigma, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("NormSpec: shape matrix is not positive definite");
  }
  ell->max_eigenvalue = eig.eigenvalues().maxCoeff();
  ell->llt.compute(ell->sigma);
  if (ell->llt.info() != Eigen::Success) {
    throw std::invalid_argument("NormSpec: Cholesky factorization failed");
  }
  ell->sigma_inv = ell->llt.solve(Matrix::Identity(sigma.rows(), sigma.cols()));
  ell->sigma_inv = 0.5 * (ell->sigma_inv + ell->sigma_inv.transpose());
  return NormSpec(NormKind::Ellipsoidal, std::move(ell));
}

const Matrix& NormSpec::sigma() const {
  if (!ell_) throw std::logic_error("NormSpec: sigma() requested for a non-ellipsoidal norm");
  return ell_->sigma;
}

Index NormSpec::fixed_dim() const { return ell_ ? ell_->sigma.rows() : 0; }

void NormSpec::check_dim(const Vector& v) const {
  if (ell_) require_same_dim(v.size(), ell_->sigma.rows(), "NormSpec");
}

double NormSpec::value(const Vector& x) const {
  check_dim(x);
  switch (kind_) {
    case NormKind::L1: return x.lpNorm<1>();
    case NormKind::L2: return x.norm();
    case NormKind::Linf: return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
    case NormKind::Ellipsoidal: {
      // ||L^-1 x||_2 with S = L L'
      const Vector y = ell_->llt.matrixL().solve(x);
      return y.norm();
    }
  }
  return 0.0;
}

double NormSpec::dual(const Vector& z) const {
  check_dim(z);
  switch (kind_) {
    case NormKind::L1: return z.size() == 0 ? 0.0 : z.lpNorm<Eigen::Infinity>();
    case NormKind::L2: return z.norm();
    case NormKind::Linf: return z.lpNorm<1>();
    case NormKind::Ellipsoidal: {
      const Vector y = ell_->llt.matrixU() * z;
      return y.norm();
    }
  }
  return 0.0;
}

NormSpec NormSpec::dual_spec() const {
  switch (kind_) {
    case NormKind::L1: return linf();
    case NormKind::L2: return l2();
    case NormKind::Linf: return l1();
    case NormKind::Ellipsoidal: return ellipsoidal(ell_->sigma_inv);
  }
  return l2();
}

namespace {

Vector sign_vector(const Vector& x) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) g[i] = (x[i] > 0.0) - (x[i] < 0.0);
  return g;
}

Vector linf_subgradient(const Vector& x) {
  Vector g = Vector::Zero(x.size());
  if (x.size() == 0) return g;
  Index k = 0;
  const double top = x.cwiseAbs().maxCoeff(&k);
  if (top > 0.0) g[k] = x[k] > 0.0 ? 1.0 : -1.0;
  return g;
}

}  // namespace

Vector NormSpec::subgradient(const Vector& x) const {
  check_dim(x);
  switch (kind_) {
    case NormKind::L1: return sign_vector(x);
    case NormKind::L2: {
      const double n = x.norm();
      return n > 0.0 ? Vector(x / n) : Vector::Zero(x.size());
    }
    case NormKind::Linf: return linf_subgradient(x);
    case NormKind::Ellipsoidal: {
      const double v = value(x);
      return v > 0.0 ? Vector(ell_->sigma_inv * x / v) : Vector::Zero(x.size());
    }
  }
  return Vector::Zero(x.size());
}

Vector NormSpec::dual_subgradient(const Vector& z) const {
  check_dim(z);
  switch (kind_) {
    case NormKind::L1: return linf_subgradient(z);
    case NormKind::L2: {
      const double n = z.norm();
      return n > 0.0 ? Vector(z / n) : Vector::Zero(z.size());
    }
    case NormKind::Linf: return sign_vector(z);
    case NormKind::Ellipsoidal: {
      const double v = dual(z);
      return v > 0.0 ? Vector(ell_->sigma * z / v) : Vector::Zero(z.size());
    }
  }
  return Vector::Zero(z.size());
}

double NormSpec::l2_ratio(Index n) const {
  switch (kind_) {
    case NormKind::L1:
    case NormKind::L2: return 1.0;
    case NormKind::Linf: return std::sqrt(static_cast<double>(std::max<Index>(n, 1)));
    case NormKind::Ellipsoidal: return std::sqrt(ell_->max_eigenvalue);
  }
  return 1.0;
}

std::string NormSpec::name() const {
  switch (kind_) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
    case NormKind::Ellipsoidal: return "ellipsoidal";
  }
  return "?";
}

bool operator==(const NormSpec& a, const NormSpec& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != NormKind::Ellipsoidal) return true;
  if (a.ell_ == b.ell_) return true;
  return a.ell_->sigma.rows() == b.ell_->sigma.rows() && a.ell_->sigma == b.ell_->sigma;
}

double dual_norm(const NormSpec& norm, const Vector& z) { return norm.dual(z); }

double LinearClassifier::decision(const Vector& x) const {
  require_same_dim(x.size(), w.size(), "LinearClassifier");
  return w.dot(x) + b;
}

int predict(const LinearClassifier& clf, const Vector& x) { return clf.decision(x) >= 0.0 ? 1 : -1; }

double margin_gap(const LinearClassifier& clf, const LabeledSample& s) {
  return 1.0 - s.y * clf.decision(s.x);
}

double hinge_loss(const LinearClassifier& clf, const LabeledSample& s) {
  return std::max(margin_gap(clf, s), 0.0);
}

double empirical_hinge(const LinearClassifier& clf, const Dataset& ds) {
  require_same_dim(clf.w.size(), ds.dim(), "empirical_hinge");
  double total = 0.0;
  for (const auto& s : ds) total += hinge_loss(clf, s);
  return total;
}

double classification_error(const LinearClassifier& clf, const Dataset& ds) {
  require_same_dim(clf.w.size(), ds.dim(), "classification_error");
  std::size_t wrong = 0;
  for (const auto& s : ds) wrong += predict(clf, s.x) != s.y;
  return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

bool has_strict_violation(const LinearClassifier& clf, const Dataset& ds) {
  require_same_dim(clf.w.size(), ds.dim(), "has_strict_violation");
  for (const auto& s : ds) {
    if (s.y * clf.decision(s.x) < 0.0) return true;
  }
  return false;
}

}  // namespace robsvm
