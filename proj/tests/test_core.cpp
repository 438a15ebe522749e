#include "doctest.h"
#include "helpers.hpp"

#include "robsvm/core.hpp"

#include <cmath>

using namespace robsvm;
using testutil::ds1d;
using testutil::vec;

TEST_SUITE("core") {
  TEST_CASE("dataset validation") {
    CHECK_THROWS(Dataset({}));
    CHECK_THROWS(Dataset({{vec({1.0}), 1}, {vec({1.0, 2.0}), -1}}));
    CHECK_THROWS(Dataset({{vec({1.0}), 0}}));
    CHECK_THROWS(Dataset({{vec({NAN}), 1}}));
    const Dataset ds({{vec({3.0, 4.0}), 1}, {vec({0.0, 1.0}), -1}});
    CHECK(ds.size() == 2);
    CHECK(ds.dim() == 2);
    CHECK(ds.max_l2_norm() == doctest::Approx(5.0));
  }

  TEST_CASE("predict and tie convention") {
    CHECK(predict({vec({1, 0}), 0.0}, vec({2, 5})) == 1);
    CHECK(predict({vec({0, 0}), -1.0}, vec({7, -3})) == -1);
    CHECK(predict({vec({1, 1}), -2.0}, vec({1, 1})) == 1);
    CHECK_THROWS_AS(predict({vec({1, 1}), 0.0}, vec({1})), DimensionError);
  }

  TEST_CASE("hinge loss values") {
    const LinearClassifier one{vec({1}), 0.0};
    CHECK(hinge_loss(one, {vec({1}), 1}) == 0.0);
    CHECK(hinge_loss(one, {vec({1}), -1}) == 2.0);
    CHECK(hinge_loss({vec({0}), 0.0}, {vec({5}), -1}) == 1.0);
    CHECK(empirical_hinge(one, ds1d({{1, 1}, {1, -1}})) == 2.0);
    CHECK(empirical_hinge(one, ds1d({{2, 1}, {-3, -1}})) == 0.0);
    CHECK(empirical_hinge({vec({0}), 0.0}, ds1d({{0, 1}, {0, -1}})) == 2.0);
  }

  TEST_CASE("classification error") {
    const LinearClassifier one{vec({1}), 0.0};
    CHECK(classification_error(one, ds1d({{-2, -1}, {3, 1}})) == 0.0);
    CHECK(classification_error(one, ds1d({{-2, 1}, {3, -1}})) == 1.0);
    CHECK(classification_error(one, ds1d({{1, 1}, {1, -1}})) == 0.5);
  }

  TEST_CASE("dual norms") {
    CHECK(dual_norm(NormSpec::l2(), vec({3, 4})) == doctest::Approx(5.0));
    CHECK(dual_norm(NormSpec::linf(), vec({1, -2, 3})) == 6.0);
    CHECK(dual_norm(NormSpec::l1(), vec({1, -2, 3})) == 3.0);
    Matrix sigma = Matrix::Zero(2, 2);
    sigma.diagonal() << 4, 1;
    CHECK(dual_norm(NormSpec::ellipsoidal(sigma), vec({1, 1})) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(NormSpec::ellipsoidal(sigma).value(vec({2, 0})) == doctest::Approx(1.0));
  }

  TEST_CASE("ellipsoidal norm rejects bad shapes") {
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS(NormSpec::ellipsoidal(asym));
    Matrix indefinite(2, 2);
    indefinite << 1, 0, 0, -1;
    CHECK_THROWS(NormSpec::ellipsoidal(indefinite));
    CHECK_THROWS_AS(NormSpec::ellipsoidal(Matrix::Identity(2, 2)).value(vec({1, 2, 3})), DimensionError);
  }

  TEST_CASE("dual of dual round trip on random vectors") {
    Rng rng(11);
    Matrix a = Matrix::Random(3, 3);
    const Matrix sigma = a * a.transpose() + Matrix::Identity(3, 3);
    for (const auto& norm : {NormSpec::l1(), NormSpec::l2(), NormSpec::linf(), NormSpec::ellipsoidal(sigma)}) {
      for (int t = 0; t < 200; ++t) {
        const Vector z = testutil::random_vector(rng, 3);
        CHECK(std::abs(norm.dual_spec().dual_spec().value(z) - norm.value(z)) <= 1e-12 * (1 + norm.value(z)));
        CHECK(std::abs(norm.dual_spec().value(z) - norm.dual(z)) <= 1e-12 * (1 + norm.dual(z)));
      }
    }
  }

  TEST_CASE("dual norm is the sup over the unit ball (sampled oracle)") {
    Rng rng(5);
    for (const auto& norm : {NormSpec::l1(), NormSpec::l2(), NormSpec::linf()}) {
      for (int t = 0; t < 20; ++t) {
        const Vector z = testutil::random_vector(rng, 3);
        double best = 0.0;
        for (int s = 0; s < 4000; ++s) {
          Vector x = testutil::random_vector(rng, 3);
          x /= norm.value(x);
          best = std::max(best, z.dot(x));
        }
        CHECK(best <= norm.dual(z) + 1e-12);
        // The dual subgradient is a maximizer on the unit ball.
        const Vector xs = norm.dual_subgradient(z);
        CHECK(norm.value(xs) <= 1.0 + 1e-12);
        CHECK(z.dot(xs) == doctest::Approx(norm.dual(z)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("subgradients satisfy the subgradient inequality") {
    Rng rng(7);
    for (const auto& norm : {NormSpec::l1(), NormSpec::l2(), NormSpec::linf()}) {
      for (int t = 0; t < 200; ++t) {
        const Vector x = testutil::random_vector(rng, 4);
        const Vector y = testutil::random_vector(rng, 4);
        CHECK(norm.value(y) >= norm.value(x) + norm.subgradient(x).dot(y - x) - 1e-12);
        CHECK(norm.dual(y) >= norm.dual(x) + norm.dual_subgradient(x).dot(y - x) - 1e-12);
      }
      CHECK(norm.subgradient(Vector::Zero(3)).isZero());
    }
  }

  TEST_CASE("hinge dominates the 0-1 loss") {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
      const Dataset ds = testutil::random_dataset(rng, 9, 3);
      const LinearClassifier clf{testutil::random_vector(rng, 3), testutil::random_vector(rng, 1)[0]};
      CHECK(empirical_hinge(clf, ds) / ds.size() >= classification_error(clf, ds));
    }
  }

  TEST_CASE("hinge is convex in (w, b)") {
    Rng rng(9);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 300; ++t) {
      const LabeledSample s{testutil::random_vector(rng, 2), t % 2 ? 1 : -1};
      const LinearClassifier p1{testutil::random_vector(rng, 2), unif(rng)};
      const LinearClassifier p2{testutil::random_vector(rng, 2), -unif(rng)};
      const double lam = unif(rng);
      const LinearClassifier mid{lam * p1.w + (1 - lam) * p2.w, lam * p1.b + (1 - lam) * p2.b};
      CHECK(hinge_loss(mid, s) <= lam * hinge_loss(p1, s) + (1 - lam) * hinge_loss(p2, s) + 1e-12);
    }
  }
}
