#include "doctest.h"
#include "helpers.hpp"

#include "robsvm/uncertainty.hpp"

#include <cmath>

using namespace robsvm;
using testutil::ds1d;
using testutil::vec;

namespace {

// Worst case over {|d1| + |d2| <= c} for the two-sample 1D set, by a direct grid on (d1, d2).
double grid_worst_case_1d(const LinearClassifier& clf, const Dataset& ds, double c, int steps) {
  double best = -1.0;
  for (int i = 0; i <= steps; ++i) {
    const double d1 = -c + 2 * c * i / steps;
    const double room = c - std::abs(d1);
    for (int j = 0; j <= steps; ++j) {
      const double d2 = -room + 2 * room * j / steps;
      const double loss = hinge_loss(clf, {ds[0].x - vec({d1}), ds[0].y}) + hinge_loss(clf, {ds[1].x - vec({d2}), ds[1].y});
      best = std::max(best, loss);
    }
  }
  return best;
}

struct ShiftedBall {
  Vector center;
  double radius;
  bool contains(const Vector& d) const { return (d - center).norm() <= radius; }
  double support(const Vector& w) const { return w.dot(center) + radius * w.norm(); }
};

}  // namespace

TEST_SUITE("uncertainty") {
  TEST_CASE("support function examples") {
    CHECK(support_function(AtomicSet::norm_ball(NormSpec::l2(), 0.1), vec({3, 4})) == doctest::Approx(0.5));
    CHECK(support_function(AtomicSet::norm_ball(NormSpec::linf(), 2), vec({1, -1, 1})) == 6.0);
    Matrix sigma = Matrix::Zero(2, 2);
    sigma.diagonal() << 4, 1;
    CHECK(support_function(AtomicSet::ellipsoid(sigma), vec({1, 1})) == doctest::Approx(std::sqrt(5.0)));
    CHECK_THROWS(AtomicSet::norm_ball(NormSpec::l2(), -1));
  }

  TEST_CASE("support function is positively homogeneous and matches boundary points") {
    Rng rng(21);
    std::uniform_real_distribution<double> unif(0, 3);
    for (const auto& a : {AtomicSet::norm_ball(NormSpec::l1(), 0.7), AtomicSet::norm_ball(NormSpec::l2(), 1.3),
                          AtomicSet::norm_ball(NormSpec::linf(), 0.2)}) {
      for (int t = 0; t < 100; ++t) {
        const Vector w = testutil::random_vector(rng, 3);
        const double lam = unif(rng);
        CHECK(std::abs(a.support(lam * w) - lam * a.support(w)) <= 1e-12 * (1 + a.support(w)));
        const Vector d = a.boundary_point(testutil::random_vector(rng, 3));
        CHECK(a.contains(d));
        CHECK(w.dot(d) <= a.support(w) + 1e-12);
      }
    }
  }

  TEST_CASE("worst case of the two-sample 1D example") {
    const Dataset ds = ds1d({{1, 1}, {1, -1}});
    const LinearClassifier clf{vec({1}), 0.0};
    const SublinearSet s{AtomicSet::norm_ball(NormSpec::l2(), 0.5), Aggregation::SumBudget};
    const double oracle = grid_worst_case_1d(clf, ds, 0.5, 400);
    CHECK(oracle == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(worst_case_loss_lower(clf, ds, s) == doctest::Approx(oracle).epsilon(1e-12));
    const auto up = worst_case_loss_upper(clf, ds, s);
    CHECK(up.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(std::abs(brute_force_worst_case(clf, ds, s, 200) - 2.5) <= 0.01);
  }

  TEST_CASE("zero radius and zero classifier degrade to the empirical hinge") {
    Rng rng(4);
    const Dataset ds = testutil::random_dataset(rng, 5, 2);
    const LinearClassifier clf{testutil::random_vector(rng, 2), 0.3};
    for (auto agg : {Aggregation::SumBudget, Aggregation::SingleShift, Aggregation::SqrtBudget}) {
      const SublinearSet s0{AtomicSet::norm_ball(NormSpec::l2(), 0.0), agg};
      CHECK(worst_case_loss_lower(clf, ds, s0) == doctest::Approx(empirical_hinge(clf, ds)));
      CHECK(worst_case_loss_upper(clf, ds, s0).value == doctest::Approx(empirical_hinge(clf, ds)));
      CHECK(brute_force_worst_case(clf, ds, s0, 16) == doctest::Approx(empirical_hinge(clf, ds)));
      const SublinearSet s1{AtomicSet::norm_ball(NormSpec::l2(), 2.0), agg};
      const LinearClassifier zero{Vector::Zero(2), 0.0};
      CHECK(worst_case_loss_lower(zero, ds, s1) == doctest::Approx(5.0));
      CHECK(worst_case_loss_upper(zero, ds, s1).value == doctest::Approx(5.0));
    }
  }

  TEST_CASE("single sample: every aggregation and the box agree") {
    const Dataset ds({{vec({0.3, -0.2}), 1}});
    const LinearClassifier clf{vec({1, 2}), -0.1};
    const AtomicSet a = AtomicSet::norm_ball(NormSpec::l2(), 0.4);
    const double sum = brute_force_worst_case(clf, ds, SublinearSet{a, Aggregation::SumBudget}, 64);
    const double single = brute_force_worst_case(clf, ds, SublinearSet{a, Aggregation::SingleShift}, 64);
    const double box = brute_force_worst_case(clf, ds, BoxSet::replicate(a, 1), 64);
    CHECK(sum == doctest::Approx(single).epsilon(1e-12));
    CHECK(sum == doctest::Approx(box).epsilon(1e-12));
  }

  TEST_CASE("atomic validation") {
    CHECK(validate_atomic(AtomicSet::norm_ball(NormSpec::l2(), 1.0), 2, 16, 1).passed);
    CHECK(validate_atomic(AtomicSet::norm_ball(NormSpec::l2(), 0.0), 2, 16, 1).passed);
    const auto bad = validate_atomic(ShiftedBall{vec({1, 0}), 0.1}, 2, 16, 1);
    CHECK_FALSE(bad.passed);
    CHECK(bad.counterexample.has_value());
  }

  TEST_CASE("membership of aggregated sets") {
    const AtomicSet a = AtomicSet::norm_ball(NormSpec::l2(), 1.0);
    const std::vector<Vector> split{vec({0.5, 0}), vec({0, 0.5})};
    const std::vector<Vector> single{vec({0.6, 0.8}), vec({0, 0})};
    const std::vector<Vector> both_full{vec({1, 0}), vec({0, 1})};
    CHECK(SublinearSet{a, Aggregation::SumBudget}.contains(split));
    CHECK_FALSE(SublinearSet{a, Aggregation::SingleShift}.contains(split));
    CHECK(SublinearSet{a, Aggregation::SingleShift}.contains(single));
    CHECK(in_single_sample_envelope(a, single));
    CHECK(in_convex_split_envelope(a, split));
    CHECK_FALSE(in_convex_split_envelope(a, both_full));
    CHECK(BoxSet::replicate(a, 2).contains(both_full));
    // sqrt(0.25) + sqrt(0.25) = 1: on the boundary of the square-root budget.
    const std::vector<Vector> quarter{vec({0.25, 0}), vec({0, 0.25})};
    CHECK(SublinearSet{a, Aggregation::SqrtBudget}.contains(quarter));
    CHECK_FALSE(SublinearSet{a, Aggregation::SqrtBudget}.contains(split));
  }

  TEST_CASE("every aggregation lies between the envelopes (sampled)") {
    Rng rng(8);
    std::uniform_real_distribution<double> unif;
    const AtomicSet a = AtomicSet::norm_ball(NormSpec::l1(), 0.8);
    for (int t = 0; t < 500; ++t) {
      std::vector<Vector> d;
      for (int i = 0; i < 3; ++i) d.push_back(testutil::random_vector(rng, 2, unif(rng) * 0.6));
      for (auto agg : {Aggregation::SumBudget, Aggregation::SingleShift, Aggregation::SqrtBudget}) {
        const SublinearSet s{a, agg};
        if (in_single_sample_envelope(a, d)) CHECK(s.contains(d));
        if (s.contains(d)) CHECK(in_convex_split_envelope(a, d));
      }
    }
  }

  TEST_CASE("sandwich, equality and box dominance on random instances") {
    Rng rng(99);
    std::uniform_real_distribution<double> unif;
    int exact_checked = 0;
    for (int t = 0; t < 60; ++t) {
      const Index n = 1 + t % 3;
      const std::size_t m = 2 + t % 4;
      const Dataset ds = testutil::random_dataset(rng, m, n);
      const LinearClassifier clf{testutil::random_vector(rng, n), unif(rng) - 0.5};
      const AtomicSet a = AtomicSet::norm_ball(t % 2 ? NormSpec::l2() : NormSpec::linf(), unif(rng));
      for (auto agg : {Aggregation::SumBudget, Aggregation::SingleShift, Aggregation::SqrtBudget}) {
        const SublinearSet s{a, agg};
        const double lo = worst_case_loss_lower(clf, ds, s);
        const auto up = worst_case_loss_upper(clf, ds, s);
        const double bf = brute_force_worst_case(clf, ds, s, 32);
        CHECK(lo <= bf + 1e-9);
        CHECK(bf <= up.value + 1e-9);
        if (up.is_exact) {
          CHECK(std::abs(up.value - lo) <= 1e-9);
          ++exact_checked;
        }
        CHECK(brute_force_worst_case(clf, ds, BoxSet::replicate(a, m), 32) >= bf - 1e-12);
      }
    }
    CHECK(exact_checked > 30);
  }

  TEST_CASE("brute force is monotone in resolution and respects the cap") {
    Rng rng(12);
    const Dataset ds = testutil::random_dataset(rng, 4, 3);
    LinearClassifier clf{testutil::random_vector(rng, 3), 0.0};
    const SublinearSet s{AtomicSet::norm_ball(NormSpec::l1(), 0.5), Aggregation::SumBudget};
    double prev = -1;
    for (int r : {4, 8, 16, 32, 64}) {
      const double v = brute_force_worst_case(clf, ds, s, r);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    CHECK_THROWS(brute_force_worst_case(clf, ds, s, 1 << 14));
  }

  TEST_CASE("dimension errors") {
    const Dataset ds = ds1d({{1, 1}});
    const SublinearSet s{AtomicSet::norm_ball(NormSpec::l2(), 1), Aggregation::SumBudget};
    CHECK_THROWS_AS(worst_case_loss_lower({vec({1, 1}), 0}, ds, s), DimensionError);
    CHECK_THROWS(aggregation_from_string("nope"));
    CHECK(aggregation_from_string(to_string(Aggregation::SqrtBudget)) == Aggregation::SqrtBudget);
  }
}
