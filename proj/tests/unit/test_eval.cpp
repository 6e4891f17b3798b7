#include <doctest.h>

#include <burnout/dataset.hpp>
#include <burnout/error.hpp>
#include <burnout/eval.hpp>
#include <burnout/rng.hpp>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "support/fixtures.hpp"

using namespace burnout;
using namespace burnout::eval;

TEST_CASE("r2 examples") {
  const std::vector<double> y{1, 2, 3};
  CHECK(r2_score(y, y) == 1.0);
  CHECK(r2_score(y, std::vector<double>{2, 2, 2}) == 0.0);
  CHECK(r2_score(y, std::vector<double>{1.1, 1.9, 3.2}) == doctest::Approx(0.97).epsilon(1e-12));
  CHECK_THROWS(r2_score(std::vector<double>{1, 1}, std::vector<double>{1, 2}));
  CHECK_THROWS(r2_score(y, std::vector<double>{1, 2}));
}

TEST_CASE("fold sizes") {
  auto plan = make_folds(22750, 30, 42);
  auto sizes = plan.fold_sizes();
  CHECK(std::count(sizes.begin(), sizes.end(), 759u) == 10);
  CHECK(std::count(sizes.begin(), sizes.end(), 758u) == 20);
  auto single = make_folds(30, 30, 1).fold_sizes();
  CHECK(std::all_of(single.begin(), single.end(), [](std::size_t s) { return s == 1; }));
  CHECK_THROWS_AS(make_folds(5, 6, 1), ValidationError);
  CHECK_THROWS_AS(make_folds(5, 1, 1), ValidationError);
}

TEST_CASE("fold partition properties") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(500);
    const std::size_t k = 2 + rng.below(n - 1);
    const std::uint64_t seed = rng.next_u64();
    auto plan = make_folds(n, k, seed);
    REQUIRE(plan.fold_assignments.size() == n);
    std::vector<int> seen(n, 0);
    for (std::size_t f = 0; f < k; ++f) {
      for (auto r : plan.test_rows(f)) ++seen[r];
      CHECK(plan.test_rows(f).size() + plan.train_rows(f).size() == n);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    auto sizes = plan.fold_sizes();
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    CHECK(make_folds(n, k, seed).fold_assignments == plan.fold_assignments);
  }
}

TEST_CASE("noiseless linear data is fit inside the tube") {
  Rng rng(13);
  auto x = fixtures::random_matrix(rng, 120, 2);
  std::vector<double> y;
  for (std::size_t r = 0; r < 120; ++r) y.push_back(3.0 * x(r, 0) - 2.0 * x(r, 1));
  auto spec = default_spec(models::ModelKind::Svr);
  spec.svr.kernel = models::KernelKind::Linear;
  spec.svr.epsilon = 0.01;
  spec.svr.c = 100.0;
  auto plan = make_folds(120, 5, 1);
  auto rep = cross_validate(spec, x, y, plan);
  REQUIRE(rep.fold_scores.size() == 5);
  for (double s : rep.fold_scores) CHECK(s >= 0.99);
  double mean = 0.0;
  for (double s : rep.fold_scores) mean += s;
  CHECK(std::abs(rep.mean_r2 - mean / 5.0) < 1e-12);
}

TEST_CASE("constant validation folds are excluded") {
  Matrix x(6, 1, std::vector<double>{0, 1, 2, 3, 4, 5});
  std::vector<double> y{1, 1, 1, 1, 1, 2};
  auto spec = default_spec(models::ModelKind::Knn);
  spec.knn.k = 1;
  auto plan = make_folds(6, 3, 2);
  auto rep = cross_validate(spec, x, y, plan);
  CHECK(rep.warnings() >= 1);
  for (auto f : rep.excluded_folds) CHECK(std::isnan(rep.fold_scores[f]));
}

TEST_CASE("threaded cross validation agrees with serial") {
  auto t = data::generate_synthetic(600, 3);
  auto s = data::encode_supervised(t, data::fit_preprocess(t));
  auto plan = make_folds(s.targets.size(), 4, 9);
  auto spec = default_spec(models::ModelKind::Forest);
  spec.forest.n_trees = 10;
  auto serial = cross_validate(spec, s.features, s.targets, plan);
  auto threaded = cross_validate(spec, s.features, s.targets, plan, {true, 3});
  CHECK(serial.fold_scores == threaded.fold_scores);
}

TEST_CASE("paired test p shrinks as folds grow for a constant offset") {
  double last = 1.0;
  for (std::size_t k : {5u, 10u, 30u}) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < k; ++i) {
      const double base = 0.8 + 0.01 * std::sin(static_cast<double>(i));
      b.push_back(base);
      a.push_back(base + 0.02 + 0.001 * std::cos(3.0 * static_cast<double>(i)));
    }
    const double p = paired_t_test(a, b).p_value;
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("comparison report structure and identical specs") {
  auto t = data::generate_synthetic(400, 4);
  auto s = data::encode_supervised(t, data::fit_preprocess(t));
  auto plan = make_folds(s.targets.size(), 5, 1);
  auto knn = default_spec(models::ModelKind::Knn);
  std::vector<ModelSpec> same{knn, knn, knn};
  same[1].name = "KNN-b";
  same[2].name = "KNN-c";
  auto rep = compare_models(same, s.features, s.targets, plan);
  CHECK(rep.pairwise.size() == 3);
  for (const auto& p : rep.pairwise) {
    CHECK_FALSE(p.test);
    CHECK_FALSE(p.significant);
    CHECK(p.note == "indistinguishable");
  }
  auto doc = nlohmann::json::parse(to_json(rep));
  CHECK(doc["models"].size() == 3);
}

TEST_CASE("crippled KNN loses clearly to SVR") {
  auto t = data::generate_synthetic(1000, 1);
  auto s = data::encode_supervised(t, data::fit_preprocess(t));
  auto plan = make_folds(s.targets.size(), 10, 1);
  auto crippled = default_spec(models::ModelKind::Knn);
  crippled.knn.k = s.targets.size() - s.targets.size() / 10 - 1;
  auto rep = compare_models({default_spec(models::ModelKind::Svr), crippled}, s.features, s.targets, plan);
  const auto& pair = rep.pair("SVR", "KNN");
  REQUIRE(pair.test);
  CHECK(pair.test->p_value < 0.01);
  CHECK(pair.significant);
}

TEST_CASE("comparison runs are byte-reproducible") {
  auto t = data::generate_synthetic(500, 8);
  auto s = data::encode_supervised(t, data::fit_preprocess(t));
  auto plan = make_folds(s.targets.size(), 5, 3);
  auto forest = default_spec(models::ModelKind::Forest);
  forest.forest.n_trees = 10;
  const std::vector<ModelSpec> specs{default_spec(models::ModelKind::Knn), default_spec(models::ModelKind::Svr), forest};
  const auto a = to_json(compare_models(specs, s.features, s.targets, plan));
  const auto b = to_json(compare_models(specs, s.features, s.targets, plan, {true, 2}));
  CHECK(a == b);
}
