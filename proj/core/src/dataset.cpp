#include "burnout/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "burnout/error.hpp"
#include "burnout/rng.hpp"

namespace burnout::data {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV line. Double-quoted fields may contain commas; "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Integers are accepted as "3" or "3.0"; the public dataset stores some as reals.
std::optional<int> parse_integral(std::string_view s) {
  auto v = parse_real(s);
  if (!v || *v != std::floor(*v) || std::abs(*v) > 1e9) return std::nullopt;
  return static_cast<int>(*v);
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
  // YYYY-MM-DD, optionally followed by a time part which is ignored.
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto ok = [](auto r, const char* end) { return r.ec == std::errc() && r.ptr == end; };
  if (!ok(std::from_chars(s.data(), s.data() + 4, y), s.data() + 4)) return std::nullopt;
  if (!ok(std::from_chars(s.data() + 5, s.data() + 7, m), s.data() + 7)) return std::nullopt;
  if (!ok(std::from_chars(s.data() + 8, s.data() + 10, d), s.data() + 10)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string format_date(const std::chrono::year_month_day& ymd) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

[[noreturn]] void cell_error(std::string_view source, std::size_t line, std::string_view column,
                             std::string_view cell, std::string_view why) {
  std::ostringstream msg;
  msg << source << ": row " << line << ", column \"" << column << "\": " << why << " (\"" << cell
      << "\")";
  throw FormatError(msg.str());
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool is_complete(const EmployeeRecord& r) {
  return r.resource_allocation && r.mental_fatigue_score && r.burn_rate;
}

}  // namespace

std::string_view to_string(Gender g) { return g == Gender::Female ? "Female" : "Male"; }
std::string_view to_string(CompanyType c) { return c == CompanyType::Service ? "Service" : "Product"; }
std::string_view to_string(WfhSetup w) { return w == WfhSetup::Yes ? "Yes" : "No"; }

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "Female") return Gender::Female;
  if (s == "Male") return Gender::Male;
  return std::nullopt;
}

std::optional<CompanyType> parse_company_type(std::string_view s) {
  if (s == "Service") return CompanyType::Service;
  if (s == "Product") return CompanyType::Product;
  return std::nullopt;
}

std::optional<WfhSetup> parse_wfh(std::string_view s) {
  if (s == "Yes") return WfhSetup::Yes;
  if (s == "No") return WfhSetup::No;
  return std::nullopt;
}

std::string_view to_string(MissingStrategy s) {
  return s == MissingStrategy::ImputeMedian ? "ImputeMedian" : "DropIncomplete";
}

std::optional<MissingStrategy> parse_strategy(std::string_view s) {
  if (s == "ImputeMedian" || s == "impute") return MissingStrategy::ImputeMedian;
  if (s == "DropIncomplete" || s == "drop") return MissingStrategy::DropIncomplete;
  return std::nullopt;
}

Table load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return parse_csv(in, path);
}

Table parse_csv(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw FormatError(std::string(source) + ": empty file");
  }
  // Strip a UTF-8 byte order mark.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_csv_line(trim(line));
  std::array<std::size_t, kCsvColumns.size()> position{};
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return trim(h) == kCsvColumns[c]; });
    if (it == header.end()) {
      throw FormatError(std::string(source) + ": missing column \"" + std::string(kCsvColumns[c]) + "\"");
    }
    position[c] = static_cast<std::size_t>(it - header.begin());
  }

  Table table;
  table.provenance = Provenance::RealCsv;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << source << ": row " << line_no << ": expected " << header.size() << " cells, found "
          << cells.size();
      throw FormatError(msg.str());
    }
    auto cell = [&](std::size_t c) { return trim(cells[position[c]]); };

    EmployeeRecord r;
    r.employee_id = std::string(cell(0));

    if (auto d = parse_date(cell(1))) {
      r.date_of_joining = *d;
    } else {
      cell_error(source, line_no, kCsvColumns[1], cell(1), "expected YYYY-MM-DD");
    }
    if (auto g = parse_gender(cell(2))) {
      r.gender = *g;
    } else {
      cell_error(source, line_no, kCsvColumns[2], cell(2), "expected Female or Male");
    }
    if (auto c = parse_company_type(cell(3))) {
      r.company_type = *c;
    } else {
      cell_error(source, line_no, kCsvColumns[3], cell(3), "expected Service or Product");
    }
    if (auto w = parse_wfh(cell(4))) {
      r.wfh_setup = *w;
    } else {
      cell_error(source, line_no, kCsvColumns[4], cell(4), "expected Yes or No");
    }

    auto designation = parse_integral(cell(5));
    if (!designation) cell_error(source, line_no, kCsvColumns[5], cell(5), "not an integer");
    if (*designation < kDesignationMin || *designation > kDesignationMax) {
      cell_error(source, line_no, kCsvColumns[5], cell(5), "out of range [0, 5]");
    }
    r.designation = *designation;

    if (!cell(6).empty()) {
      auto v = parse_integral(cell(6));
      if (!v) cell_error(source, line_no, kCsvColumns[6], cell(6), "not an integer");
      if (*v < kResourceMin || *v > kResourceMax) {
        cell_error(source, line_no, kCsvColumns[6], cell(6), "out of range [1, 10]");
      }
      r.resource_allocation = *v;
    }
    if (!cell(7).empty()) {
      auto v = parse_real(cell(7));
      if (!v) cell_error(source, line_no, kCsvColumns[7], cell(7), "not a number");
      if (*v < kFatigueMin || *v > kFatigueMax) {
        cell_error(source, line_no, kCsvColumns[7], cell(7), "out of range [0, 10]");
      }
      r.mental_fatigue_score = *v;
    }
    if (!cell(8).empty()) {
      auto v = parse_real(cell(8));
      if (!v) cell_error(source, line_no, kCsvColumns[8], cell(8), "not a number");
      if (*v < 0.0 || *v > 1.0) cell_error(source, line_no, kCsvColumns[8], cell(8), "out of range [0, 1]");
      r.burn_rate = *v;
    }
    table.records.push_back(std::move(r));
  }
  if (table.records.empty()) throw FormatError(std::string(source) + ": no data rows");
  return table;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
    out << (c ? "," : "") << kCsvColumns[c];
  }
  out << '\n';
  for (const auto& r : table.records) {
    out << r.employee_id << ',' << format_date(r.date_of_joining) << ',' << to_string(r.gender) << ','
        << to_string(r.company_type) << ',' << to_string(r.wfh_setup) << ',' << r.designation << ',';
    if (r.resource_allocation) out << *r.resource_allocation;
    out << ',';
    if (r.mental_fatigue_score) out << format_real(*r.mental_fatigue_score);
    out << ',';
    if (r.burn_rate) out << format_real(*r.burn_rate);
    out << '\n';
  }
}

void save_csv(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  write_csv(table, out);
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

std::size_t MissingReport::count(std::string_view column) const {
  for (const auto& [name, n] : counts) {
    if (name == column) return n;
  }
  throw Error("MissingReport: unknown column " + std::string(column));
}

MissingReport missing_report(const Table& table) {
  MissingReport report;
  for (auto name : kCsvColumns) report.counts.emplace_back(std::string(name), 0);
  for (const auto& r : table.records) {
    if (r.employee_id.empty()) ++report.counts[0].second;
    if (!r.resource_allocation) ++report.counts[6].second;
    if (!r.mental_fatigue_score) ++report.counts[7].second;
    if (!r.burn_rate) ++report.counts[8].second;
  }
  return report;
}

Standardizer Standardizer::fit(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n == 0) throw DomainError("Standardizer::fit: empty matrix");
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += x(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = x(r, c) - mean;
      ss += dev * dev;
    }
    s.means[c] = mean;
    s.sds[c] = std::sqrt(ss / static_cast<double>(n));
  }
  return s;
}

void Standardizer::transform_in_place(std::span<double> row) const {
  if (row.size() != means.size()) throw Error("Standardizer: width mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) {
    row[c] = sds[c] > 0.0 ? (row[c] - means[c]) / sds[c] : 0.0;
  }
}

void Standardizer::transform_in_place(Matrix& x) const {
  for (std::size_t r = 0; r < x.rows(); ++r) transform_in_place(x.row(r));
}

Matrix Standardizer::transform(const Matrix& x) const {
  Matrix out = x;
  transform_in_place(out);
  return out;
}

std::vector<double> Standardizer::inverse(std::span<const double> scaled) const {
  std::vector<double> out(scaled.size());
  for (std::size_t c = 0; c < scaled.size(); ++c) out[c] = scaled[c] * sds[c] + means[c];
  return out;
}

double PreprocessParams::median(std::string_view column) const {
  for (std::size_t i = 0; i < kImputableColumns.size(); ++i) {
    if (kImputableColumns[i] == column) return medians[i];
  }
  throw Error("PreprocessParams: no median for " + std::string(column));
}

void PreprocessParams::validate() const {
  if (scaler_means.size() != kFeatureCount) throw FormatError("scaler_means: expected 6 entries");
  if (scaler_sds.size() != kFeatureCount) throw FormatError("scaler_sds: expected 6 entries");
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(scaler_means[i])) throw FormatError("scaler_means: non-finite entry");
    if (!std::isfinite(scaler_sds[i]) || scaler_sds[i] < 0.0) {
      throw FormatError("scaler_sds: entries must be finite and >= 0");
    }
  }
  for (double m : medians) {
    if (!std::isfinite(m)) throw FormatError("medians: non-finite entry");
  }
  if (column_order.size() != kFeatureCount ||
      !std::equal(column_order.begin(), column_order.end(), kFeatureNames.begin())) {
    throw FormatError("column_order: does not match the encoded feature layout");
  }
}

FeatureVector encode_raw(const EmployeeRecord& r) {
  return {static_cast<double>(r.designation),
          r.resource_allocation ? static_cast<double>(*r.resource_allocation) : kNaN,
          r.mental_fatigue_score.value_or(kNaN),
          r.gender == Gender::Female ? 1.0 : 0.0,
          r.company_type == CompanyType::Service ? 1.0 : 0.0,
          r.wfh_setup == WfhSetup::Yes ? 1.0 : 0.0};
}

FeatureVector encode_imputed(const EmployeeRecord& r, const PreprocessParams& params) {
  FeatureVector v = encode_raw(r);
  if (!r.resource_allocation) v[kResourceAllocation] = params.medians[0];
  if (!r.mental_fatigue_score) v[kMentalFatigue] = params.medians[1];
  return v;
}

namespace {

bool emits_row(const EmployeeRecord& r, MissingStrategy strategy) {
  if (!r.burn_rate) return false;
  return strategy == MissingStrategy::ImputeMedian || is_complete(r);
}

}  // namespace

Supervised encode_supervised(const Table& table, const PreprocessParams& params) {
  Supervised out;
  out.features = Matrix(0, kFeatureCount);
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    const auto& r = table.records[i];
    if (!emits_row(r, params.strategy)) continue;
    const FeatureVector v = encode_imputed(r, params);
    out.features.append_row(v);
    out.targets.push_back(*r.burn_rate);
    out.source_rows.push_back(i);
  }
  return out;
}

PreprocessParams fit_preprocess(const Table& table, MissingStrategy strategy) {
  if (table.records.size() < 2) throw DomainError("fit_preprocess: need at least 2 records");

  std::array<std::vector<double>, kImputableColumns.size()> present;
  for (const auto& r : table.records) {
    if (r.resource_allocation) present[0].push_back(*r.resource_allocation);
    if (r.mental_fatigue_score) present[1].push_back(*r.mental_fatigue_score);
    if (r.burn_rate) present[2].push_back(*r.burn_rate);
  }

  PreprocessParams params;
  params.strategy = strategy;
  params.column_order.assign(kFeatureNames.begin(), kFeatureNames.end());
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (present[i].empty()) {
      throw DomainError("fit_preprocess: column " + std::string(kImputableColumns[i]) +
                        " has no present values");
    }
    params.medians[i] = median_of(present[i]);
  }

  const Supervised encoded = encode_supervised(table, params);
  if (encoded.features.rows() < 2) throw DomainError("fit_preprocess: fewer than 2 usable rows");
  Standardizer scaler = Standardizer::fit(encoded.features);
  params.scaler_means = std::move(scaler.means);
  params.scaler_sds = std::move(scaler.sds);
  return params;
}

Supervised apply_preprocess(const Table& table, const PreprocessParams& params) {
  params.validate();
  Supervised out = encode_supervised(table, params);
  params.scaler().transform_in_place(out.features);
  return out;
}

FeatureVector standardize(const FeatureVector& raw, const PreprocessParams& params) {
  FeatureVector v = raw;
  params.scaler().transform_in_place(v);
  return v;
}

Table generate_synthetic(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("rows", "must be at least 1");
  Rng rng(seed);
  Table table;
  table.provenance = Provenance::Synthetic;
  table.records.reserve(n);
  const std::chrono::sys_days year_start{std::chrono::year{2008} / 1 / 1};

  for (std::size_t i = 0; i < n; ++i) {
    const double b = rng.uniform();
    EmployeeRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "syn%08zu", i);
    r.employee_id = id;
    r.date_of_joining = std::chrono::year_month_day{year_start + std::chrono::days{rng.below(366)}};
    r.burn_rate = b;
    r.mental_fatigue_score = std::clamp(10.0 * b + rng.normal(0.0, 0.7), kFatigueMin, kFatigueMax);
    r.resource_allocation = static_cast<int>(
        std::clamp(std::round(1.0 + 9.0 * b + rng.normal(0.0, 1.5)), 1.0, 10.0));
    r.designation = static_cast<int>(std::clamp(std::round(5.0 * b + rng.normal(0.0, 1.0)), 0.0, 5.0));
    r.gender = rng.bernoulli(0.5) ? Gender::Female : Gender::Male;
    r.company_type = rng.bernoulli(0.5) ? CompanyType::Service : CompanyType::Product;
    const double p_yes = std::clamp(0.7 - 0.4 * b, 0.05, 0.95);
    r.wfh_setup = rng.bernoulli(p_yes) ? WfhSetup::Yes : WfhSetup::No;
    if (rng.bernoulli(0.05)) r.mental_fatigue_score.reset();
    if (rng.bernoulli(0.05)) r.resource_allocation.reset();
    table.records.push_back(std::move(r));
  }
  return table;
}

}  // namespace burnout::data
