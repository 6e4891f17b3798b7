#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "burnout/matrix.hpp"

namespace burnout::data {

enum class Gender { Female, Male };
enum class CompanyType { Service, Product };
enum class WfhSetup { Yes, No };

std::string_view to_string(Gender g);
std::string_view to_string(CompanyType c);
std::string_view to_string(WfhSetup w);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<CompanyType> parse_company_type(std::string_view s);
std::optional<WfhSetup> parse_wfh(std::string_view s);

inline constexpr int kDesignationMin = 0;
inline constexpr int kDesignationMax = 5;
inline constexpr int kResourceMin = 1;
inline constexpr int kResourceMax = 10;
inline constexpr double kFatigueMin = 0.0;
inline constexpr double kFatigueMax = 10.0;

// One row of the burnout table. Optional members may be absent in the source.
struct EmployeeRecord {
  std::string employee_id;
  std::chrono::year_month_day date_of_joining{};
  Gender gender = Gender::Female;
  CompanyType company_type = CompanyType::Service;
  WfhSetup wfh_setup = WfhSetup::No;
  int designation = 0;
  std::optional<int> resource_allocation;
  std::optional<double> mental_fatigue_score;
  std::optional<double> burn_rate;

  friend bool operator==(const EmployeeRecord&, const EmployeeRecord&) = default;
};

enum class Provenance { RealCsv, Synthetic };

struct Table {
  std::vector<EmployeeRecord> records;
  Provenance provenance = Provenance::RealCsv;

  std::size_t size() const noexcept { return records.size(); }
  friend bool operator==(const Table&, const Table&) = default;
};

// Canonical CSV header, in file order.
inline constexpr std::array<std::string_view, 9> kCsvColumns = {
    "Employee ID",         "Date of Joining",    "Gender",
    "Company Type",        "WFH Setup Available", "Designation",
    "Resource Allocation", "Mental Fatigue Score", "Burn Rate"};

// Encoded feature layout. The last three are 0/1 indicators before scaling.
inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "designation",   "resource_allocation",  "mental_fatigue_score",
    "gender_female", "company_type_service", "wfh_yes"};
enum FeatureIndex : std::size_t {
  kDesignation = 0,
  kResourceAllocation = 1,
  kMentalFatigue = 2,
  kGenderFemale = 3,
  kCompanyService = 4,
  kWfhYes = 5,
};

using FeatureVector = std::array<double, kFeatureCount>;

Table load_csv(const std::string& path);
Table parse_csv(std::istream& in, std::string_view source_name = "<stream>");
void write_csv(const Table& table, std::ostream& out);
void save_csv(const Table& table, const std::string& path);

struct MissingReport {
  // Every canonical column, in file order, including those with zero missing.
  std::vector<std::pair<std::string, std::size_t>> counts;

  std::size_t count(std::string_view column) const;
};

MissingReport missing_report(const Table& table);

enum class MissingStrategy { ImputeMedian, DropIncomplete };

std::string_view to_string(MissingStrategy s);
std::optional<MissingStrategy> parse_strategy(std::string_view s);

// Imputable columns: the three that can be absent in the source table.
inline constexpr std::array<std::string_view, 3> kImputableColumns = {
    "resource_allocation", "mental_fatigue_score", "burn_rate"};

// Per-column affine scaling fitted on a matrix. Population sd (divide by n).
// A zero sd maps the column to 0 rather than dividing.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> sds;

  static Standardizer fit(const Matrix& x);
  void transform_in_place(std::span<double> row) const;
  void transform_in_place(Matrix& x) const;
  Matrix transform(const Matrix& x) const;
  std::vector<double> inverse(std::span<const double> scaled) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

struct PreprocessParams {
  std::array<double, kImputableColumns.size()> medians{};
  std::vector<double> scaler_means;
  std::vector<double> scaler_sds;
  std::vector<std::string> column_order;
  MissingStrategy strategy = MissingStrategy::ImputeMedian;

  double median(std::string_view column) const;
  Standardizer scaler() const { return {scaler_means, scaler_sds}; }
  // Throws FormatError if any invariant is broken.
  void validate() const;

  friend bool operator==(const PreprocessParams&, const PreprocessParams&) = default;
};

struct Supervised {
  Matrix features;              // one standardized FeatureVector per row
  std::vector<double> targets;  // burn_rate
  std::vector<std::size_t> source_rows;
};

// Indicator encoding without imputation or scaling; absent cells become NaN.
FeatureVector encode_raw(const EmployeeRecord& record);

// Fills absent predictors from the medians and encodes; no scaling.
FeatureVector encode_imputed(const EmployeeRecord& record, const PreprocessParams& params);

// Medians over present values; scaler statistics over the rows apply_preprocess
// would emit, so that the fitting table comes out with mean 0 and sd 1.
PreprocessParams fit_preprocess(const Table& table,
                                MissingStrategy strategy = MissingStrategy::ImputeMedian);

// Rows without burn_rate are always dropped. DropIncomplete drops any row with an
// absent cell; ImputeMedian fills predictors from params.medians.
Supervised apply_preprocess(const Table& table, const PreprocessParams& params);

// Same as apply_preprocess but without the scaling step.
Supervised encode_supervised(const Table& table, const PreprocessParams& params);

FeatureVector standardize(const FeatureVector& raw, const PreprocessParams& params);

// Deterministic table drawn from a latent burn rate b ~ U(0,1); see README for
// the generative model.
Table generate_synthetic(std::size_t n, std::uint64_t seed);

}  // namespace burnout::data
