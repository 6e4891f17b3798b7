#include "burnout/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "burnout/distributions.hpp"
#include "burnout/error.hpp"

namespace burnout::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw DomainError(std::string(what) + ": length mismatch");
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("sample_variance: need at least 2 values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double median(std::span<const double> x) {
  if (x.empty()) throw DomainError("median: empty input");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

Summary summarize(std::span<const double> values) {
  std::vector<double> present;
  present.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) present.push_back(v);
  }
  Summary s;
  s.count = present.size();
  s.missing = values.size() - present.size();
  if (present.empty()) {
    s.mean = s.median = s.sd = s.min = s.max = kNaN;
    return s;
  }
  s.mean = mean(present);
  s.median = median(present);
  s.sd = present.size() >= 2 ? std::sqrt(sample_variance(present)) : kNaN;
  auto [lo, hi] = std::minmax_element(present.begin(), present.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "pearson");
  if (x.size() < 2) throw DomainError("pearson: need at least 2 pairs");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("pearson: constant input, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::vector<std::string> labels,
                                     const std::vector<std::vector<double>>& columns) {
  const std::size_t d = columns.size();
  if (labels.size() != d) throw DomainError("correlation_matrix: label count mismatch");
  CorrelationMatrix out{std::move(labels), Matrix(d, d, kNaN)};
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      std::vector<double> a, b;
      for (std::size_t r = 0; r < columns[i].size(); ++r) {
        if (std::isnan(columns[i][r]) || std::isnan(columns[j][r])) continue;
        a.push_back(columns[i][r]);
        b.push_back(columns[j][r]);
      }
      double value = kNaN;
      try {
        value = i == j ? (pearson(a, b), 1.0) : pearson(a, b);
      } catch (const DomainError&) {
      }
      out.values(i, j) = value;
      out.values(j, i) = value;
    }
  }
  return out;
}

std::string_view to_string(GroupColumn c) {
  switch (c) {
    case GroupColumn::WfhSetup: return "wfh_setup";
    case GroupColumn::Gender: return "gender";
    case GroupColumn::CompanyType: return "company_type";
  }
  return "?";
}

std::string_view to_string(NumericColumn c) {
  switch (c) {
    case NumericColumn::Designation: return "designation";
    case NumericColumn::ResourceAllocation: return "resource_allocation";
    case NumericColumn::MentalFatigueScore: return "mental_fatigue_score";
    case NumericColumn::BurnRate: return "burn_rate";
  }
  return "?";
}

std::vector<double> numeric_column(const data::Table& table, NumericColumn column) {
  std::vector<double> out;
  out.reserve(table.size());
  for (const auto& r : table.records) {
    switch (column) {
      case NumericColumn::Designation:
        out.push_back(r.designation);
        break;
      case NumericColumn::ResourceAllocation:
        out.push_back(r.resource_allocation ? static_cast<double>(*r.resource_allocation) : kNaN);
        break;
      case NumericColumn::MentalFatigueScore:
        out.push_back(r.mental_fatigue_score.value_or(kNaN));
        break;
      case NumericColumn::BurnRate:
        out.push_back(r.burn_rate.value_or(kNaN));
        break;
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> group_medians(const data::Table& table, GroupColumn group_by,
                                                          NumericColumn target) {
  auto group_of = [&](const data::EmployeeRecord& r) -> std::pair<int, std::string_view> {
    switch (group_by) {
      case GroupColumn::WfhSetup: return {static_cast<int>(r.wfh_setup), data::to_string(r.wfh_setup)};
      case GroupColumn::Gender: return {static_cast<int>(r.gender), data::to_string(r.gender)};
      case GroupColumn::CompanyType:
        return {static_cast<int>(r.company_type), data::to_string(r.company_type)};
    }
    return {0, "?"};
  };

  const std::vector<double> values = numeric_column(table, target);
  std::vector<std::string> names(2);
  std::vector<bool> seen(2, false);
  std::vector<std::vector<double>> buckets(2);
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto [idx, name] = group_of(table.records[i]);
    seen[idx] = true;
    names[idx] = std::string(name);
    if (!std::isnan(values[i])) buckets[idx].push_back(values[i]);
  }

  std::vector<std::pair<std::string, double>> out;
  for (std::size_t g = 0; g < buckets.size(); ++g) {
    if (!seen[g]) continue;
    if (buckets[g].empty()) {
      throw DomainError("group_medians: group \"" + names[g] + "\" has no present " +
                        std::string(to_string(target)) + " values");
    }
    out.emplace_back(names[g], median(buckets[g]));
  }
  return out;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DomainError("welch_t_test: each sample needs at least 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  if (va == 0.0 && vb == 0.0) throw DomainError("welch_t_test: both samples have zero variance");
  const double se2 = va + vb;
  TTestResult r;
  r.kind = TestKind::Welch;
  r.t_stat = (mean(a) - mean(b)) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = student_t_two_sided_p(r.t_stat, r.df);
  return r;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "paired_t_test");
  if (a.size() < 2) throw DomainError("paired_t_test: need at least 2 pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double var = sample_variance(diff);
  if (var == 0.0) throw DomainError("paired_t_test: differences have zero variance");
  const double k = static_cast<double>(diff.size());
  TTestResult r;
  r.kind = TestKind::Paired;
  r.t_stat = mean(diff) / std::sqrt(var / k);
  r.df = k - 1.0;
  r.p_value = student_t_two_sided_p(r.t_stat, r.df);
  return r;
}

NormalityResult normality_test(std::span<const double> x) {
  if (x.size() < 20) throw DomainError("normality_test: need at least 20 values");
  const double n = static_cast<double>(x.size());
  const double m = mean(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 == 0.0) throw DomainError("normality_test: constant input");

  // Skewness z-score (D'Agostino 1970).
  const double skew = m3 / std::pow(m2, 1.5);
  const double y = skew * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
  const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                       ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  const double z_skew = delta * std::asinh(y / alpha);

  // Kurtosis z-score (Anscombe & Glynn 1983).
  const double kurt = m4 / (m2 * m2);
  const double expected = 3.0 * (n - 1.0) / (n + 1.0);
  const double var_kurt =
      24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
  const double xk = (kurt - expected) / std::sqrt(var_kurt);
  const double sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                            std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
  const double a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + xk * std::sqrt(2.0 / (a - 4.0));
  const double term2 = denom == 0.0 ? 0.0 : std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  const double z_kurt = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

  NormalityResult r;
  r.n = x.size();
  r.skewness_z = z_skew;
  r.kurtosis_z = z_kurt;
  r.statistic = z_skew * z_skew + z_kurt * z_kurt;
  r.p_value = chi_square_sf(r.statistic, 2.0);
  return r;
}

PcaResult pca(const Matrix& features, std::size_t k) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (k > d) throw DomainError("pca: component count exceeds feature dimension");
  if (n < 2) throw DomainError("pca: need at least 2 rows");

  Eigen::MatrixXd x(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = features(r, c);
  }
  const Eigen::RowVectorXd means = x.colwise().mean();
  x.rowwise() -= means;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DomainError("pca: eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = solver.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  const double trace = std::max(cov.trace(), 0.0);

  PcaResult out;
  out.components = Matrix(k, d);
  out.column_means.assign(means.data(), means.data() + d);
  for (std::size_t i = 0; i < k; ++i) {
    Eigen::VectorXd v = vectors.col(static_cast<Eigen::Index>(i));
    Eigen::Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v(largest) < 0.0) v = -v;
    for (std::size_t c = 0; c < d; ++c) out.components(i, c) = v(static_cast<Eigen::Index>(c));
    const double eig = std::max(values(static_cast<Eigen::Index>(i)), 0.0);
    out.eigenvalues.push_back(eig);
    out.explained_variance_ratio.push_back(trace > 0.0 ? eig / trace : 0.0);
  }

  out.projections = Matrix(n, k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += x(r, c) * out.components(i, c);
      out.projections(r, i) = dot;
    }
  }
  return out;
}

}  // namespace burnout::stats
