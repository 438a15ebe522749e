#include "doctest.h"
#include "helpers.hpp"

#include "robsvm/consistency.hpp"
#include "robsvm/data.hpp"

#include <algorithm>
#include <numeric>

using namespace robsvm;
using testutil::ds1d;
using testutil::vec;

namespace {

// Maximum matching by trying every assignment of test samples to train samples.
std::size_t matching_oracle(const Dataset& tr, const Dataset& te, double c) {
  std::vector<int> perm(te.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const auto& b = te[static_cast<std::size_t>(perm[i])];
      pairs += tr[i].y == b.y && (tr[i].x - b.x).norm() <= c;
    }
    best = std::max(best, pairs);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Dataset shuffled(const Dataset& ds, Rng& rng) {
  std::vector<LabeledSample> s(ds.begin(), ds.end());
  std::shuffle(s.begin(), s.end(), rng);
  return Dataset(std::move(s));
}

}  // namespace

TEST_SUITE("consistency") {
  TEST_CASE("exact pairing examples") {
    Rng rng(1);
    const Dataset ds = testutil::random_dataset(rng, 9, 2);
    const auto same = max_pairings_exact(ds, ds, 0.0);
    CHECK(same.pairs == 9);
    CHECK(same.gamma == 0.0);
    const auto ex = max_pairings_exact(ds1d({{0, 1}, {5, 1}}), ds1d({{0.5, 1}, {9, 1}}), 1.0);
    CHECK(ex.pairs == 1);
    CHECK(ex.gamma == 0.5);
    const auto none = max_pairings_exact(ds1d({{0, 1}, {1, 1}}), ds1d({{0, -1}, {1, -1}}), 100.0);
    CHECK(none.pairs == 0);
    CHECK(none.gamma == 1.0);
    CHECK_THROWS(max_pairings_exact(ds1d({{0, 1}}), ds1d({{0, 1}, {1, 1}}), 1.0));
  }

  TEST_CASE("exact pairing matches exhaustive search and is order invariant") {
    Rng rng(2);
    for (int t = 0; t < 40; ++t) {
      const Dataset tr = testutil::random_dataset(rng, 7, 2);
      const Dataset te = testutil::random_dataset(rng, 7, 2);
      const double c = 0.3 + 0.05 * t;
      const auto r = max_pairings_exact(tr, te, c);
      CHECK(r.pairs == matching_oracle(tr, te, c));
      CHECK(max_pairings_exact(shuffled(tr, rng), shuffled(te, rng), c).pairs == r.pairs);
      CHECK(max_pairings_exact(tr, te, c + 0.2).pairs >= r.pairs);
    }
  }

  TEST_CASE("brick lower bound") {
    Rng rng(3);
    const Dataset ds = testutil::random_dataset(rng, 10, 2);
    CHECK(brick_pairing_lower_bound(ds, ds, 0.5, DomainBox::bounding(ds, ds)).pairs == 10);
    CHECK(brick_pairing_lower_bound(ds1d({{0, 1}, {5, 1}}), ds1d({{0.5, 1}, {9, 1}}), 1.0,
                                    DomainBox{vec({0}), vec({10})})
              .pairs == 1);
    const Dataset tr = ds1d({{0.1, 1}, {0.2, 1}, {0.3, 1}, {5.5, 1}, {7.5, 1}});
    const Dataset te = ds1d({{0.15, 1}, {0.25, 1}, {0.35, 1}, {0.05, 1}, {0.45, 1}});
    CHECK(brick_pairing_lower_bound(tr, te, 1.0, DomainBox{vec({0}), vec({10})}).pairs == 3);
    // Half-open cells: 1.0 is in [1, 2) while 0.99 is in [0, 1).
    CHECK(brick_pairing_lower_bound(ds1d({{1.0, 1}}), ds1d({{0.99, 1}}), 1.0, DomainBox{vec({0}), vec({2})}).pairs ==
          0);
    CHECK(brick_pairing_lower_bound(ds1d({{2.0, 1}}), ds1d({{1.5, 1}}), 1.0, DomainBox{vec({0}), vec({2})}).pairs ==
          1);
    CHECK_THROWS(brick_pairing_lower_bound(ds1d({{11, 1}}), ds1d({{1, 1}}), 1.0, DomainBox{vec({0}), vec({10})}));
    for (int t = 0; t < 50; ++t) {
      const Dataset a = testutil::random_dataset(rng, 30, 2);
      const Dataset b = testutil::random_dataset(rng, 30, 2);
      const double c = 0.2 + 0.03 * t;
      CHECK(brick_pairing_lower_bound(a, b, c, DomainBox::bounding(a, b)).pairs <= max_pairings_exact(a, b, c).pairs);
    }
  }

  TEST_CASE("bound formulas") {
    const Dataset tr = gaussian_blobs(20, 2, 2.0, 1.0, std::uint64_t{1});
    const auto fit = train_regularized(tr, NormSpec::l2(), 20 * 0.3);
    const double K = tr.max_l2_norm();
    const auto same = generalization_bound(fit.classifier, tr, tr, 0.3, max_pairings_exact(tr, tr, 0.3), K);
    CHECK(same.gamma == 0.0);
    CHECK(same.error_bound == doctest::Approx(0.3 * fit.classifier.w.norm() + same.train_avg_hinge));
    CHECK(same.error_bound >= same.test_error);

    const Dataset te = gaussian_blobs(20, 2, 2.0, 1.0, std::uint64_t{2});
    const auto p = max_pairings_exact(tr, te, 0.3);
    const double K2 = std::max(K, te.max_l2_norm());
    const auto zero = generalization_bound({Vector::Zero(2), 0.0}, tr, te, 0.3, p, K2);
    CHECK(zero.error_bound == doctest::Approx(p.gamma + 1.0));
    CHECK(zero.hinge_bound == doctest::Approx(p.gamma + 1.0));
    const auto r = generalization_bound(fit.classifier, tr, te, 0.3, p, K2);
    CHECK(r.hinge_bound == doctest::Approx(r.gamma * (1 + K2 * fit.classifier.w.norm() + std::abs(fit.classifier.b)) +
                                           r.regularization + r.train_avg_hinge));
    CHECK_THROWS(generalization_bound(fit.classifier, tr, te, 0.3, p, 0.5 * K2));
    CHECK_THROWS(generalization_bound(fit.classifier, tr, te, 0.3, max_pairings_exact(ds1d({{0, 1}}), ds1d({{0, 1}}), 1),
                                      K2));
  }

  TEST_CASE("linear bound holds on seeded blob draws") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng = make_rng(s, {});
      const Dataset tr = gaussian_blobs(50, 2, 2.0, 1.0, rng);
      const Dataset te = gaussian_blobs(50, 2, 2.0, 1.0, rng);
      const auto fit = train_regularized(tr, NormSpec::l2(), 50 * 0.3);
      const auto p = max_pairings_exact(tr, te, 0.3);
      const auto r = generalization_bound(fit.classifier, tr, te, 0.3, p,
                                          std::max(tr.max_l2_norm(), te.max_l2_norm()));
      CHECK(r.error_bound_holds());
      CHECK(r.hinge_bound_holds());
    }
  }

  TEST_CASE("kernel bound") {
    const KernelSpec k = KernelSpec::rbf(1.0);
    const Dataset tr = gaussian_blobs(20, 2, 2.0, 1.0, std::uint64_t{5});
    const auto fit = train_kernel_regularized(tr, k, 0.5);
    const double cf = rbf_feature_radius(*k.radial_profile(), 0.5);
    const auto same = kernel_generalization_bound(fit.classifier, tr, tr, cf,
                                                  max_pairings_exact(tr, tr, cf, PairingMetric::feature(k)), 1.0);
    CHECK(same.gamma == 0.0);
    CHECK(same.error_bound == doctest::Approx(cf * fit.classifier.rkhs_norm() + same.train_avg_hinge));
    CHECK_THROWS(kernel_generalization_bound(fit.classifier, tr, tr, cf,
                                             max_pairings_exact(tr, tr, cf, PairingMetric::feature(k)), 0.5));

    // Sample-space pairs within c are feature-space pairs within the mapped radius.
    for (std::uint64_t s = 0; s < 30; ++s) {
      Rng rng = make_rng(s, {1});
      const Dataset a = gaussian_blobs(30, 2, 2.0, 1.0, rng);
      const Dataset b = gaussian_blobs(30, 2, 2.0, 1.0, rng);
      const auto ps = max_pairings_exact(a, b, 0.5);
      const auto pf = max_pairings_exact(a, b, cf, PairingMetric::feature(k));
      CHECK(pf.pairs >= ps.pairs);
      const auto f = train_kernel_regularized(a, k, 0.5);
      const auto r = kernel_generalization_bound(f.classifier, a, b, cf, pf, 1.0);
      CHECK(r.error_bound_holds());
      CHECK(r.hinge_bound_holds());
    }
  }

  TEST_CASE("degenerate experiment") {
    ExperimentConfig cfg;
    cfg.sizes = {4, 8, 16};
    cfg.trials = 3;
    cfg.c_schedule = [](std::size_t) { return 0.1; };
    const DataGenerator gen = [](std::size_t m, Rng&) {
      std::vector<LabeledSample> s;
      for (std::size_t i = 0; i < m; ++i) s.push_back(i % 2 ? LabeledSample{vec({-2, 0}), -1} : LabeledSample{vec({2, 0}), 1});
      return Dataset(std::move(s));
    };
    const auto r = run_consistency_experiment(gen, cfg);
    CHECK(r.records.size() == 9);
    for (const auto& s : r.summaries) {
      CHECK(s.median_gamma == 0.0);
      CHECK(s.median_test_error == 0.0);
    }
    CHECK(r.gamma_nonincreasing);
    CHECK_FALSE(r.gamma_strictly_decreasing);
    CHECK(r.bound_violations == 0);
    cfg.sizes = {8, 4};
    CHECK_THROWS(run_consistency_experiment(gen, cfg));
  }

  TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK_THROWS(median({}));
  }
}
