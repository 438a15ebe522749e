#pragma once

#include "robsvm/core.hpp"
#include "robsvm/rng.hpp"

#include <initializer_list>
#include <utility>
#include <vector>

namespace testutil {

using robsvm::Dataset;
using robsvm::LabeledSample;
using robsvm::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Dataset ds1d(std::initializer_list<std::pair<double, int>> pts) {
  std::vector<LabeledSample> s;
  for (auto [x, y] : pts) s.push_back({vec({x}), y});
  return Dataset(std::move(s));
}

inline Dataset random_dataset(robsvm::Rng& rng, std::size_t m, Eigen::Index n, double spread = 1.0) {
  std::normal_distribution<double> normal;
  std::vector<LabeledSample> s;
  for (std::size_t i = 0; i < m; ++i) {
    Vector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = spread * normal(rng);
    s.push_back({x, i % 2 == 0 ? 1 : -1});
  }
  return Dataset(std::move(s));
}

inline Vector random_vector(robsvm::Rng& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = scale * normal(rng);
  return v;
}

}  // namespace testutil
