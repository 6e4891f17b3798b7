#include "burnout/eda.hpp"

#include <cmath>

#include <json.hpp>

#include "burnout/error.hpp"

namespace burnout::stats {

namespace {

using nlohmann::json;

constexpr NumericColumn kNumericColumns[] = {NumericColumn::Designation, NumericColumn::ResourceAllocation,
                                             NumericColumn::MentalFatigueScore, NumericColumn::BurnRate};

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> present(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) {
    if (!std::isnan(x)) out.push_back(x);
  }
  return out;
}

}  // namespace

EdaReport build_eda_report(const data::Table& table) {
  EdaReport report;
  report.rows = table.size();
  report.missing = data::missing_report(table);

  std::vector<std::string> labels;
  std::vector<std::vector<double>> columns;
  for (auto column : kNumericColumns) {
    auto values = numeric_column(table, column);
    const std::string name(to_string(column));
    report.summaries.emplace_back(name, summarize(values));
    const auto p = present(values);
    if (p.size() >= 20) {
      try {
        report.normality.emplace_back(name, normality_test(p));
      } catch (const DomainError&) {
      }
    }
    labels.push_back(name);
    columns.push_back(std::move(values));
  }
  report.correlation = correlation_matrix(labels, columns);

  for (auto group : {GroupColumn::WfhSetup, GroupColumn::Gender, GroupColumn::CompanyType}) {
    try {
      report.burn_rate_medians.emplace_back(std::string(to_string(group)),
                                            group_medians(table, group, NumericColumn::BurnRate));
    } catch (const DomainError&) {
    }
  }

  std::vector<double> no_wfh, yes_wfh;
  for (const auto& r : table.records) {
    if (!r.burn_rate) continue;
    (r.wfh_setup == data::WfhSetup::No ? no_wfh : yes_wfh).push_back(*r.burn_rate);
  }
  try {
    report.wfh_welch = welch_t_test(no_wfh, yes_wfh);
  } catch (const DomainError&) {
  }

  const auto params = data::fit_preprocess(table);
  const auto supervised = data::apply_preprocess(table, params);
  report.pca = pca(supervised.features, supervised.features.cols());
  return report;
}

std::string to_json(const EdaReport& report) {
  json missing = json::object();
  for (const auto& [name, n] : report.missing.counts) missing[name] = n;

  json summaries = json::object();
  for (const auto& [name, s] : report.summaries) {
    summaries[name] = {{"count", s.count}, {"missing", s.missing}, {"mean", real(s.mean)},
                       {"median", real(s.median)}, {"sd", real(s.sd)}, {"min", real(s.min)},
                       {"max", real(s.max)}};
  }

  json corr_values = json::array();
  for (std::size_t i = 0; i < report.correlation.values.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < report.correlation.values.cols(); ++j) row.push_back(real(report.correlation.values(i, j)));
    corr_values.push_back(row);
  }

  json medians = json::object();
  for (const auto& [group, entries] : report.burn_rate_medians) {
    json g = json::object();
    for (const auto& [label, value] : entries) g[label] = value;
    medians[group] = g;
  }

  json normality = json::object();
  for (const auto& [name, r] : report.normality) {
    normality[name] = {{"test", "dagostino_pearson_k2"}, {"statistic", real(r.statistic)},
                       {"p_value", real(r.p_value)}, {"skewness_z", real(r.skewness_z)},
                       {"kurtosis_z", real(r.kurtosis_z)}, {"n", r.n}};
  }

  json welch = nullptr;
  if (report.wfh_welch) {
    welch = {{"groups", {"No", "Yes"}}, {"t_stat", real(report.wfh_welch->t_stat)},
             {"df", real(report.wfh_welch->df)}, {"p_value", real(report.wfh_welch->p_value)}};
  }

  json components = json::array();
  for (std::size_t i = 0; i < report.pca.components.rows(); ++i) {
    auto row = report.pca.components.row(i);
    components.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json projections = json::array();
  const std::size_t keep = std::min<std::size_t>(2, report.pca.projections.cols());
  for (std::size_t r = 0; r < report.pca.projections.rows(); ++r) {
    json p = json::array();
    for (std::size_t c = 0; c < keep; ++c) p.push_back(report.pca.projections(r, c));
    projections.push_back(p);
  }

  json doc{{"rows", report.rows},
           {"missing", missing},
           {"summary", summaries},
           {"correlation", {{"labels", report.correlation.labels}, {"values", corr_values}}},
           {"burn_rate_medians", medians},
           {"normality", normality},
           {"wfh_welch_t_test", welch},
           {"pca",
            {{"feature_order", data::kFeatureNames},
             {"explained_variance_ratio", report.pca.explained_variance_ratio},
             {"components", components},
             {"projections_pc1_pc2", projections}}}};
  return doc.dump(1) + "\n";
}

}  // namespace burnout::stats
