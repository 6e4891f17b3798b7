#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "burnout/dataset.hpp"
#include "burnout/stats.hpp"

namespace burnout::stats {

// Exploratory report over a table; serialized in place of plots.
struct EdaReport {
  std::size_t rows = 0;
  data::MissingReport missing;
  std::vector<std::pair<std::string, Summary>> summaries;  // numeric columns
  CorrelationMatrix correlation;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> burn_rate_medians;
  std::vector<std::pair<std::string, NormalityResult>> normality;
  std::optional<TTestResult> wfh_welch;  // burn_rate, WFH No minus WFH Yes
  PcaResult pca;                         // all components of the standardized features
};

EdaReport build_eda_report(const data::Table& table);
std::string to_json(const EdaReport& report);

}  // namespace burnout::stats
