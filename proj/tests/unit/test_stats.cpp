#include <doctest.h>

#include <burnout/distributions.hpp>
#include <burnout/eda.hpp>
#include <burnout/error.hpp>
#include <burnout/rng.hpp>
#include <burnout/stats.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace burnout;
using namespace burnout::stats;

namespace {

struct TGridPoint {
  double t, df, p;
};

// Two-sided p-values, 20 significant digits from arbitrary-precision quadrature.
constexpr TGridPoint kTGrid[] = {
    {0.5, 2, 0.66666666666666666667},  {0.5, 10, 0.62789360574297294271},  {0.5, 29, 0.62084808419378136402},
    {1.0, 2, 0.42264973081037423549},  {1.0, 10, 0.34089313230205987267},  {1.0, 29, 0.32558198801619354111},
    {2.0, 2, 0.18350341907227396727},  {2.0, 10, 0.073388034770740365618}, {2.0, 29, 0.054943637182967189248},
    {2.5, 2, 0.12961172022151080911},  {2.5, 10, 0.031446844236608804249}, {2.5, 29, 0.018325344338426076914},
};

}  // namespace

TEST_CASE("t distribution p-values against the reference grid and the quadrature oracle") {
  for (const auto& g : kTGrid) {
    CAPTURE(g.t);
    CAPTURE(g.df);
    CHECK(std::abs(student_t_two_sided_p(g.t, g.df) - g.p) < 1e-10);
    CHECK(std::abs(student_t_two_sided_p(-g.t, g.df) - g.p) < 1e-10);
    CHECK(std::abs(oracle::t_two_sided_p(g.t, g.df) - g.p) < 1e-9);
  }
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(student_t_cdf(1.3, 7.0) + student_t_cdf(-1.3, 7.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("incomplete gamma and chi-square tail") {
  // Chi-square with 2 df has survival exp(-x/2).
  for (double x : {0.1, 1.0, 3.0, 10.0, 40.0}) CHECK(chi_square_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
  CHECK(incomplete_gamma_p(3.0, 2.0) + incomplete_gamma_q(3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1, b) = 1 - (1 - x)^b
  CHECK(incomplete_beta(1.0, 4.0, 0.3) == doctest::Approx(1.0 - std::pow(0.7, 4)).epsilon(1e-13));
}

TEST_CASE("pearson examples and properties") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(pearson(x, std::vector<double>{4, 4, 4}), DomainError);
  CHECK_THROWS(pearson(x, std::vector<double>{1, 2}));

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20), c(20);
    const double slope = 0.1 + 5.0 * rng.uniform();
    const double shift = rng.normal();
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.normal();
      b[i] = slope * a[i] + shift;
      c[i] = -slope * a[i] + shift;
    }
    CHECK(std::abs(pearson(a, b) - 1.0) < 1e-12);
    CHECK(std::abs(pearson(a, c) + 1.0) < 1e-12);
  }
}

TEST_CASE("median and summary") {
  CHECK(median(std::vector<double>{3, 1, 2}) == 2.0);
  CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto s = summarize(std::vector<double>{1, nan, 3, 5});
  CHECK(s.count == 3);
  CHECK(s.missing == 1);
  CHECK(s.mean == 3.0);
  CHECK(s.sd == 2.0);
  CHECK(s.min == 1.0);
  CHECK(s.max == 5.0);
}

TEST_CASE("group medians") {
  data::Table t;
  t.records = {fixtures::record(1, 1, 1.0, 1.0), fixtures::record(2, 2, 2.0, 2.0), fixtures::record(3, 3, 3.0, 3.0)};
  auto g = group_medians(t, GroupColumn::WfhSetup, NumericColumn::BurnRate);
  REQUIRE(g.size() == 1);
  CHECK(g[0].first == "Yes");
  CHECK(g[0].second == 2.0);
  t.records.push_back(fixtures::record(4, 4, 4.0, 4.0));
  CHECK(group_medians(t, GroupColumn::WfhSetup, NumericColumn::BurnRate)[0].second == 2.5);

  auto big = data::generate_synthetic(500, 9);
  auto before = group_medians(big, GroupColumn::Gender, NumericColumn::BurnRate);
  Rng rng(1);
  rng.shuffle(std::span(big.records));
  CHECK(group_medians(big, GroupColumn::Gender, NumericColumn::BurnRate) == before);

  data::Table empty_group;
  empty_group.records = {fixtures::record(1, 1, 1.0, 0.5),
                         fixtures::record(2, 2, 2.0, std::nullopt, data::Gender::Male)};
  try {
    group_medians(empty_group, GroupColumn::Gender, NumericColumn::BurnRate);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("Male") != std::string::npos);
  }
}

TEST_CASE("welch t-test") {
  const std::vector<double> same{1, 2, 3};
  auto z = welch_t_test(same, same);
  CHECK(z.t_stat == 0.0);
  CHECK(z.p_value == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<double> a{1, 2, 3, 4}, b{2, 3, 4, 5};
  auto r = welch_t_test(a, b);
  CHECK(r.t_stat == doctest::Approx(-1.0954451150103324).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.3153335962012297).epsilon(1e-9));
  CHECK(r.kind == TestKind::Welch);

  auto swapped = welch_t_test(b, a);
  CHECK(swapped.t_stat == doctest::Approx(-r.t_stat).epsilon(1e-15));
  CHECK(swapped.df == r.df);
  CHECK(swapped.p_value == r.p_value);

  CHECK_THROWS(welch_t_test(std::vector<double>{2, 2}, std::vector<double>{2, 2}));
  CHECK_THROWS(welch_t_test(std::vector<double>{1}, std::vector<double>{1, 2}));
}

TEST_CASE("paired t-test") {
  auto r = paired_t_test(std::vector<double>{1, 2, 3}, std::vector<double>{1.1, 2.1, 2.9});
  CHECK(r.t_stat == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.df == 2.0);
  CHECK(r.p_value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(r.kind == TestKind::Paired);
  CHECK_THROWS(paired_t_test(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
}

TEST_CASE("normality test matches reference values") {
  std::vector<double> x;
  for (int i = 1; i <= 40; ++i) x.push_back((i * i) % 17 + 0.5 * i);
  auto r = normality_test(x);
  CHECK(r.statistic == doctest::Approx(0.2991762161551451).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(0.8610625681098283).epsilon(1e-9));
  CHECK(r.skewness_z == doctest::Approx(-0.16743695151970137).epsilon(1e-9));
  CHECK(r.kurtosis_z == doctest::Approx(-0.52071209263943).epsilon(1e-9));

  std::vector<double> y;
  for (int i = 0; i < 25; ++i) y.push_back(std::sin(i) * 3 + (i % 5));
  auto s = normality_test(y);
  CHECK(s.statistic == doctest::Approx(0.733794254700463).epsilon(1e-9));
  CHECK(s.p_value == doctest::Approx(0.692880919874415).epsilon(1e-9));

  CHECK_THROWS(normality_test(std::vector<double>(19, 1.0)));
}

TEST_CASE("normality test rejects uniform data") {
  Rng rng(2);
  std::vector<double> u(5000);
  for (auto& v : u) v = rng.uniform();
  CHECK(normality_test(u).p_value < 0.01);
}

TEST_CASE("pca examples") {
  Matrix line(5, 2);
  for (std::size_t i = 0; i < 5; ++i) line(i, 0) = line(i, 1) = static_cast<double>(i);
  auto l = pca(line, 2);
  CHECK(std::abs(l.explained_variance_ratio[0] - 1.0) < 1e-9);

  Matrix four(4, 2, std::vector<double>{1, 0, -1, 0, 0, 0.5, 0, -0.5});
  auto p = pca(four, 2);
  CHECK(std::abs(p.explained_variance_ratio[0] - 0.8) < 1e-9);
  CHECK(std::abs(std::abs(p.components(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(p.components(0, 1)) < 1e-12);
  CHECK_THROWS(pca(four, 3));
}

TEST_CASE("pca orthonormality and reconstruction on random data") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.below(5);
    auto x = fixtures::random_matrix(rng, 30, d, -3, 3);
    auto p = pca(x, d);
    double ratio_sum = 0.0;
    for (double v : p.explained_variance_ratio) ratio_sum += v;
    CHECK(std::abs(ratio_sum - 1.0) < 1e-9);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        double dot = 0.0;
        for (std::size_t c = 0; c < d; ++c) dot += p.components(a, c) * p.components(b, c);
        CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
      }
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        double rec = 0.0;
        for (std::size_t k = 0; k < d; ++k) rec += p.projections(r, k) * p.components(k, c);
        CHECK(std::abs(rec - (x(r, c) - p.column_means[c])) < 1e-8);
      }
    }
  }
}

TEST_CASE("eda report on synthetic data") {
  auto t = data::generate_synthetic(3000, 1);
  auto rep = build_eda_report(t);
  CHECK(rep.rows == 3000);
  REQUIRE(rep.wfh_welch);
  CHECK(rep.wfh_welch->t_stat > 0.0);
  CHECK(rep.wfh_welch->p_value < 0.01);
  CHECK(rep.pca.components.rows() == data::kFeatureCount);
  auto json = to_json(rep);
  CHECK(json.find("\"normality\"") != std::string::npos);
}

TEST_CASE("correlation matrix is symmetric with a unit diagonal") {
  auto t = data::generate_synthetic(800, 6);
  std::vector<std::vector<double>> cols;
  std::vector<std::string> labels;
  for (auto c : {NumericColumn::Designation, NumericColumn::ResourceAllocation, NumericColumn::MentalFatigueScore,
                 NumericColumn::BurnRate}) {
    cols.push_back(numeric_column(t, c));
    labels.emplace_back(to_string(c));
  }
  auto m = correlation_matrix(labels, cols);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.values(i, i) == 1.0);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::abs(m.values(i, j) - m.values(j, i)) < 1e-12);
      CHECK(std::abs(m.values(i, j)) <= 1.0);
    }
  }
}
