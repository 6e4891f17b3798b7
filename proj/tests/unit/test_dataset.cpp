#include <doctest.h>

#include <burnout/dataset.hpp>
#include <burnout/error.hpp>
#include <burnout/stats.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/fixtures.hpp"

using namespace burnout;
using namespace burnout::data;

namespace {

const char* kHeader =
    "Employee ID,Date of Joining,Gender,Company Type,WFH Setup Available,Designation,Resource Allocation,"
    "Mental Fatigue Score,Burn Rate\n";

Table parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "test.csv");
}

}  // namespace

TEST_CASE("one valid row parses with nothing missing") {
  auto t = parse(std::string(kHeader) + "fffe32,2008-09-30,Female,Service,No,2,3,3.8,0.16\n");
  REQUIRE(t.size() == 1);
  const auto& r = t.records[0];
  CHECK(r.employee_id == "fffe32");
  CHECK(r.date_of_joining == std::chrono::year{2008} / 9 / 30);
  CHECK(r.gender == Gender::Female);
  CHECK(r.company_type == CompanyType::Service);
  CHECK(r.wfh_setup == WfhSetup::No);
  CHECK(r.designation == 2);
  CHECK(r.resource_allocation == 3);
  CHECK(r.mental_fatigue_score == 3.8);
  CHECK(r.burn_rate == 0.16);
  for (const auto& [col, n] : missing_report(t).counts) CHECK_MESSAGE(n == 0, col);
}

TEST_CASE("empty cells are absent, integers may carry a trailing .0") {
  auto t = parse(std::string(kHeader) + "a,2008-01-01,Male,Product,Yes,1.0,,,\n");
  const auto& r = t.records[0];
  CHECK(r.designation == 1);
  CHECK_FALSE(r.resource_allocation);
  CHECK_FALSE(r.mental_fatigue_score);
  CHECK_FALSE(r.burn_rate);
}

TEST_CASE("missing header column is named") {
  std::string header = kHeader;
  header.replace(header.find(",Burn Rate"), 10, "");
  try {
    parse(header + "a,2008-01-01,Male,Product,Yes,1,2,3\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("Burn Rate") != std::string::npos);
  }
}

TEST_CASE("bad cells report row and column") {
  try {
    parse(std::string(kHeader) + "a,2008-01-01,Male,Product,Yes,1,2,3,0.1\nb,2008-01-01,Male,Product,Yes,1,2,eleven,0.1\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("Mental Fatigue Score") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(std::string(kHeader) + "a,2008-01-01,Other,Product,Yes,1,2,3,0.1\n"), FormatError);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "a,2008-01-01,Male,Product,Yes,1,2,11,0.1\n"), FormatError);
  CHECK_THROWS_AS(parse(""), FormatError);
}

TEST_CASE("csv round trip through a file") {
  auto t = generate_synthetic(200, 11);
  const auto path = (std::filesystem::temp_directory_path() / "burnout_dataset_rt.csv").string();
  save_csv(t, path);
  auto back = load_csv(path);
  std::filesystem::remove(path);
  back.provenance = t.provenance;
  CHECK(back == t);
  CHECK_THROWS_AS(load_csv("/nonexistent/dir/x.csv"), IoError);
}

TEST_CASE("missing report counts one absent fatigue") {
  Table t;
  t.records = {fixtures::record(1, 2, 3.0, 0.1), fixtures::record(2, 3, std::nullopt, 0.2),
               fixtures::record(3, 4, 5.0, 0.3), fixtures::record(4, 5, 6.0, 0.4)};
  auto rep = missing_report(t);
  CHECK(rep.count("Mental Fatigue Score") == 1);
  CHECK(rep.count("Resource Allocation") == 0);
  CHECK(rep.count("Burn Rate") == 0);
  CHECK(rep.counts.size() == kCsvColumns.size());
}

TEST_CASE("fit_preprocess stores medians of present values and population sd") {
  Table t;
  t.records = {fixtures::record(1, 1, 1.0, 0.1), fixtures::record(2, 2, 2.0, 0.2),
               fixtures::record(3, std::nullopt, 3.0, 0.3), fixtures::record(4, 4, 4.0, 0.4)};
  auto p = fit_preprocess(t);
  CHECK(p.median("resource_allocation") == 2.0);
  CHECK(p.median("mental_fatigue_score") == 2.5);
  CHECK(p.median("burn_rate") == doctest::Approx(0.25));

  Table three;
  three.records = {fixtures::record(1, 1, 5.0, 0.1), fixtures::record(2, 2, 5.0, 0.2),
                   fixtures::record(3, 3, 5.0, 0.3)};
  auto q = fit_preprocess(three);
  CHECK(q.scaler_means[kDesignation] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(q.scaler_sds[kDesignation] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(q.scaler_means[kMentalFatigue] == 5.0);
  CHECK(q.scaler_sds[kMentalFatigue] == 0.0);
  auto s = apply_preprocess(three, q);
  for (std::size_t r = 0; r < 3; ++r) CHECK(s.features(r, kMentalFatigue) == 0.0);
}

TEST_CASE("fit_preprocess errors") {
  Table one;
  one.records = {fixtures::record(1, 1, 1.0, 0.1)};
  CHECK_THROWS(fit_preprocess(one));
  Table absent;
  absent.records = {fixtures::record(1, 1, std::nullopt, 0.1), fixtures::record(2, 2, std::nullopt, 0.2)};
  CHECK_THROWS(fit_preprocess(absent));
}

TEST_CASE("standardized fitting table has mean 0 and sd 1") {
  auto t = generate_synthetic(2000, 5);
  auto p = fit_preprocess(t);
  auto s = apply_preprocess(t, p);
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    auto col = s.features.column(c);
    double m = 0.0, v = 0.0;
    for (double x : col) m += x;
    m /= static_cast<double>(col.size());
    for (double x : col) v += (x - m) * (x - m);
    v /= static_cast<double>(col.size());
    CHECK(std::abs(m) < 1e-9);
    CHECK(std::abs(std::sqrt(v) - 1.0) < 1e-9);
  }
}

TEST_CASE("indicator encoding") {
  auto r = fixtures::record(2, 3, 7.0, 0.5, Gender::Female, CompanyType::Service, WfhSetup::Yes);
  auto f = encode_raw(r);
  CHECK(f[kGenderFemale] == 1.0);
  CHECK(f[kCompanyService] == 1.0);
  CHECK(f[kWfhYes] == 1.0);
  CHECK(f[kDesignation] == 2.0);
  auto m = encode_raw(fixtures::record(2, std::nullopt, 7.0, 0.5, Gender::Male, CompanyType::Product, WfhSetup::No));
  CHECK(m[kGenderFemale] == 0.0);
  CHECK(m[kCompanyService] == 0.0);
  CHECK(m[kWfhYes] == 0.0);
  CHECK(std::isnan(m[kResourceAllocation]));
}

TEST_CASE("rows without a target are dropped; drop strategy drops incomplete rows") {
  Table t;
  t.records = {fixtures::record(1, 1, 1.0, 0.1), fixtures::record(2, std::nullopt, 2.0, 0.2),
               fixtures::record(3, 3, 3.0, std::nullopt), fixtures::record(4, 4, 4.0, 0.4)};
  auto imputed = apply_preprocess(t, fit_preprocess(t, MissingStrategy::ImputeMedian));
  CHECK(imputed.targets.size() == 3);
  CHECK(imputed.source_rows == std::vector<std::size_t>{0, 1, 3});
  auto dropped = apply_preprocess(t, fit_preprocess(t, MissingStrategy::DropIncomplete));
  CHECK(dropped.targets.size() == 2);
  CHECK(dropped.source_rows == std::vector<std::size_t>{0, 3});
}

TEST_CASE("params validation catches column mismatch") {
  auto t = generate_synthetic(50, 2);
  auto p = fit_preprocess(t);
  p.scaler_means.pop_back();
  CHECK_THROWS(apply_preprocess(t, p));
}

TEST_CASE("synthetic generator is deterministic and rejects n = 0") {
  CHECK(generate_synthetic(1000, 7) == generate_synthetic(1000, 7));
  CHECK_FALSE(generate_synthetic(1000, 7) == generate_synthetic(1000, 8));
  CHECK_THROWS(generate_synthetic(0, 1));
  std::ostringstream a, b;
  write_csv(generate_synthetic(300, 4), a);
  write_csv(generate_synthetic(300, 4), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("synthetic generator shape: fatigue tracks burn rate, WFH lowers it") {
  auto t = generate_synthetic(10000, 1);
  std::vector<double> fatigue, burn, wfh_no, wfh_yes;
  std::size_t masked = 0;
  for (const auto& r : t.records) {
    CHECK(r.designation >= kDesignationMin);
    CHECK(r.designation <= kDesignationMax);
    if (r.burn_rate) {
      CHECK(*r.burn_rate >= 0.0);
      CHECK(*r.burn_rate <= 1.0);
      (r.wfh_setup == WfhSetup::No ? wfh_no : wfh_yes).push_back(*r.burn_rate);
    }
    if (!r.mental_fatigue_score) ++masked;
    if (r.mental_fatigue_score && r.burn_rate) {
      fatigue.push_back(*r.mental_fatigue_score);
      burn.push_back(*r.burn_rate);
    }
  }
  CHECK(stats::pearson(fatigue, burn) >= 0.9);
  CHECK(stats::median(wfh_no) > stats::median(wfh_yes));
  // 5% masking: binomial sd at n = 10000 is about 22 rows.
  CHECK(masked > 400);
  CHECK(masked < 600);
}

TEST_CASE("standardizer inverse") {
  Matrix x(3, 2, std::vector<double>{1, 10, 2, 10, 3, 10});
  auto s = Standardizer::fit(x);
  auto z = s.transform(x);
  auto back = s.inverse(z.row(2));
  CHECK(back[0] == doctest::Approx(3.0));
  CHECK(z(1, 1) == 0.0);
}

TEST_CASE("preprocessing properties on a masked synthetic table") {
  auto t = generate_synthetic(1500, 21);
  auto p = fit_preprocess(t);
  auto raw = encode_supervised(t, p);
  auto scaled = apply_preprocess(t, p);
  REQUIRE(scaled.features.cols() == kFeatureCount);
  CHECK(raw.source_rows == scaled.source_rows);
  const auto scaler = p.scaler();
  for (std::size_t r = 0; r < scaled.features.rows(); ++r) {
    const auto back = scaler.inverse(scaled.features.row(r));
    for (std::size_t c = 0; c < kFeatureCount; ++c) CHECK(std::abs(back[c] - raw.features(r, c)) < 1e-9);
    // Present cells pass through imputation untouched.
    const auto& rec = t.records[raw.source_rows[r]];
    const auto enc = encode_raw(rec);
    for (std::size_t c = 0; c < kFeatureCount; ++c)
      if (!std::isnan(enc[c])) CHECK(raw.features(r, c) == enc[c]);
  }

  auto rep = missing_report(t);
  std::size_t absent_fatigue = 0, absent_resource = 0, absent_burn = 0;
  for (const auto& rec : t.records) {
    absent_fatigue += !rec.mental_fatigue_score;
    absent_resource += !rec.resource_allocation;
    absent_burn += !rec.burn_rate;
  }
  CHECK(rep.count("Mental Fatigue Score") == absent_fatigue);
  CHECK(rep.count("Resource Allocation") == absent_resource);
  CHECK(rep.count("Burn Rate") == absent_burn);
  CHECK(rep.count("Gender") == 0);

  auto dropped = encode_supervised(t, fit_preprocess(t, MissingStrategy::DropIncomplete));
  for (std::size_t r = 0; r < dropped.features.rows(); ++r) {
    const auto enc = encode_raw(t.records[dropped.source_rows[r]]);
    for (std::size_t c = 0; c < kFeatureCount; ++c) CHECK(dropped.features(r, c) == enc[c]);
  }
}
