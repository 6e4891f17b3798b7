#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "burnout/dataset.hpp"
#include "burnout/matrix.hpp"

namespace burnout::stats {

double mean(std::span<const double> x);
// Divides by n - 1.
double sample_variance(std::span<const double> x);
double median(std::span<const double> x);

// Column summary over present values; NaN entries count as missing.
struct Summary {
  std::size_t count = 0;
  std::size_t missing = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample sd
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

// Sample Pearson coefficient. Throws DomainError on constant input.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

// Pairwise-complete correlations: a row enters a cell only when both columns are
// present (non-NaN). Constant columns get NaN off the diagonal.
CorrelationMatrix correlation_matrix(std::vector<std::string> labels,
                                     const std::vector<std::vector<double>>& columns);

enum class GroupColumn { WfhSetup, Gender, CompanyType };
enum class NumericColumn { Designation, ResourceAllocation, MentalFatigueScore, BurnRate };

std::string_view to_string(GroupColumn c);
std::string_view to_string(NumericColumn c);

// Values of a numeric column with NaN for absent cells.
std::vector<double> numeric_column(const data::Table& table, NumericColumn column);

// Median of present target values for each category that occurs in the table, in
// enum declaration order. A category with rows but no present target throws.
std::vector<std::pair<std::string, double>> group_medians(const data::Table& table, GroupColumn group_by,
                                                          NumericColumn target);

enum class TestKind { Welch, Paired };

struct TTestResult {
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
  TestKind kind = TestKind::Welch;
};

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Fold-aligned paired test on d = a - b; df = k - 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// D'Agostino-Pearson omnibus K^2: squared skewness and kurtosis z-scores, chi-square(2).
struct NormalityResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double skewness_z = 0.0;
  double kurtosis_z = 0.0;
  std::size_t n = 0;
};

NormalityResult normality_test(std::span<const double> x);

struct PcaResult {
  Matrix components;  // k x d, unit rows, largest-magnitude entry positive
  std::vector<double> eigenvalues;
  std::vector<double> explained_variance_ratio;
  Matrix projections;  // n x k
  std::vector<double> column_means;
};

PcaResult pca(const Matrix& features, std::size_t k);

}  // namespace burnout::stats
