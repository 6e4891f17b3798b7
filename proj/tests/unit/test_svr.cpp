#include <doctest.h>

#include <burnout/error.hpp>
#include <burnout/rng.hpp>
#include <burnout/svr.hpp>

#include <cmath>

#include "oracles/qp_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/svr_checks.hpp"

using namespace burnout;
using namespace burnout::models;

TEST_CASE("kernel evaluation") {
  const std::vector<double> a{0.3, -1.0}, b{1.3, 0.0};
  CHECK(kernel_eval({KernelKind::Rbf, 3.0}, a, a) == 1.0);
  CHECK(kernel_eval({KernelKind::Rbf, 0.5}, a, b) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(kernel_eval({KernelKind::Linear, 0.0}, std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 11.0);
  CHECK_THROWS(kernel_eval({KernelKind::Rbf, 1.0}, a, std::vector<double>{1.0}));
  CHECK_THROWS(KernelSpec{KernelKind::Rbf, -1.0}.validate());
}

TEST_CASE("default gamma") {
  Matrix x(4, 2, std::vector<double>{0, 5, 2, 5, 0, 5, 2, 5});
  // Column variances 1 and 0: mean 0.5, so gamma = 1 / (2 * 0.5).
  CHECK(default_gamma(x) == doctest::Approx(1.0));
  Matrix flat(3, 4, 1.0);
  CHECK(default_gamma(flat) == doctest::Approx(0.25));
}

TEST_CASE("decision function examples") {
  SvrModel empty;
  empty.bias = 0.5;
  empty.support_vectors = Matrix(0, 3);
  CHECK(predict_svr(empty, std::vector<double>{1, 2, 3}) == 0.5);

  SvrModel one;
  one.support_vectors = Matrix(1, 2, 0.0);
  one.dual_coefs = {1.0};
  one.bias = 0.5;
  one.kernel = {KernelKind::Rbf, 1.0};
  CHECK(predict_svr(one, std::vector<double>{0, 0}) == 1.5);
  CHECK_THROWS(predict_svr(one, std::vector<double>{0, 0, 0}));
}

TEST_CASE("constant targets give no support vectors") {
  Rng rng(1);
  auto x = fixtures::random_matrix(rng, 30, 3);
  std::vector<double> y(30, 0.42);
  auto m = train_svr(x, y, 1.0, 0.1, {KernelKind::Rbf, 0.5});
  CHECK(m.support_vectors.rows() == 0);
  CHECK(m.bias == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(predict_svr(m, std::vector<double>{5, 5, 5}) == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("input errors") {
  Matrix empty(0, 2);
  std::vector<double> none;
  CHECK_THROWS(train_svr(empty, none, 1.0, 0.1, {}));
  Matrix x(2, 1, std::vector<double>{0, 1});
  std::vector<double> bad{0.0, std::nan("")};
  CHECK_THROWS(train_svr(x, bad, 1.0, 0.1, {}));
  std::vector<double> ok{0.0, 1.0};
  CHECK_THROWS(train_svr(x, ok, -1.0, 0.1, {}));
  CHECK_THROWS(train_svr(x, ok, 1.0, -0.1, {}));
}

TEST_CASE("twenty random points match the dense QP oracle") {
  Rng rng(20);
  auto x = fixtures::random_matrix(rng, 20, 2);
  std::vector<double> y;
  for (std::size_t r = 0; r < 20; ++r) y.push_back(x(r, 0) * x(r, 0) - x(r, 1) + 0.1 * rng.normal());
  const KernelSpec kernel{KernelKind::Rbf, 0.5};
  SmoConfig cfg;
  cfg.tol = 1e-5;
  SvrTrainInfo info;
  auto m = train_svr(x, y, 1.0, 0.1, kernel, cfg, &info);
  const auto rows = fixtures::to_rows(x);
  auto ref = oracle::solve_svr_dual(rows, y, 1.0, 0.1, 0.5);
  CHECK(std::abs(info.objective - ref.objective) <= 1e-3 * std::abs(ref.objective));
  for (std::size_t r = 0; r < rows.size(); ++r)
    CHECK(std::abs(predict_svr(m, x.row(r)) - oracle::predict(rows, ref, 0.5, rows[r])) < 1e-3);
  CHECK(info.objective == doctest::Approx(svr_dual_objective(x, y, info.beta, 0.1, kernel)).epsilon(1e-12));
}

TEST_CASE("KKT conditions and model invariants on random instances") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto in = checks::random_instance(rng, 10 + rng.below(40), 1 + rng.below(4));
    SmoConfig cfg;
    SvrTrainInfo info;
    auto m = train_svr(in.x, in.y, in.c, in.epsilon, {KernelKind::Rbf, in.gamma}, cfg, &info);
    CHECK(info.converged);
    CHECK(info.max_violation < cfg.tol);
    CHECK_NOTHROW(m.validate());
    CHECK(checks::kkt_violation(in.x, in.y, m, info.beta, cfg.tol) == "");
  }
}

TEST_CASE("dual objective never decreases") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto in = checks::random_instance(rng, 60, 3);
    SmoConfig cfg;
    cfg.record_objective = true;
    SvrTrainInfo info;
    train_svr(in.x, in.y, in.c, in.epsilon, {KernelKind::Rbf, in.gamma}, cfg, &info);
    REQUIRE(info.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < info.objective_trace.size(); ++i) {
      CHECK(info.objective_trace[i] >= info.objective_trace[i - 1] - 1e-12 * std::abs(info.objective_trace[i - 1]));
    }
  }
}

TEST_CASE("linear kernel recovers a noiseless line") {
  Matrix x(40, 1);
  std::vector<double> y;
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / 39.0;
    y.push_back(2.0 * x(i, 0) + 0.5);
  }
  auto m = train_svr(x, y, 10.0, 0.01, {KernelKind::Linear, 0.0});
  for (double q : {-0.8, 0.0, 0.7}) CHECK(predict_svr(m, std::vector<double>{q}) == doctest::Approx(2.0 * q + 0.5).epsilon(0.02));
}

TEST_CASE("training is deterministic") {
  Rng rng(3);
  auto in = checks::random_instance(rng, 50, 3);
  auto a = train_svr(in.x, in.y, in.c, in.epsilon, {KernelKind::Rbf, in.gamma});
  auto b = train_svr(in.x, in.y, in.c, in.epsilon, {KernelKind::Rbf, in.gamma});
  CHECK(a == b);
}
