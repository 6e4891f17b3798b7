#include "burnout/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "burnout/dataset.hpp"
#include "burnout/error.hpp"
#include "burnout/rng.hpp"

namespace burnout::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json real_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw DomainError("r2_score: length mismatch");
  if (y_true.size() < 2) throw DomainError("r2_score: need at least 2 values");
  const double mean = stats::mean(y_true);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (ss_tot == 0.0) throw DomainError("r2_score: y_true is constant");
  return 1.0 - ss_res / ss_tot;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < n; ++r) {
    if (fold_assignments[r] == fold) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < n; ++r) {
    if (fold_assignments[r] != fold) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : fold_assignments) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("folds", "must be at least 2");
  if (k > n) throw ValidationError("folds", "must not exceed the number of rows (" + std::to_string(n) + ")");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));

  FoldPlan plan{n, k, seed, std::vector<std::size_t>(n)};
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) plan.fold_assignments[perm[pos++]] = f;
  }
  return plan;
}

ModelSpec default_spec(models::ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  switch (kind) {
    case models::ModelKind::Svr: spec.name = "SVR"; break;
    case models::ModelKind::Forest: spec.name = "RandomForest"; break;
    case models::ModelKind::Knn: spec.name = "KNN"; break;
  }
  return spec;
}

models::Model train_model(const ModelSpec& spec, const Matrix& features, std::span<const double> targets) {
  switch (spec.kind) {
    case models::ModelKind::Svr: {
      models::KernelSpec kernel{spec.svr.kernel, spec.svr.gamma.value_or(models::default_gamma(features))};
      return models::train_svr(features, targets, spec.svr.c, spec.svr.epsilon, kernel, spec.svr.smo);
    }
    case models::ModelKind::Forest:
      return models::train_forest(features, targets, spec.forest);
    case models::ModelKind::Knn:
      return models::fit_knn(features, std::vector<double>(targets.begin(), targets.end()),
                             std::min(spec.knn.k, features.rows()));
  }
  throw Error("train_model: unknown model kind");
}

CvReport cross_validate(const ModelSpec& spec, const Matrix& features, std::span<const double> targets,
                        const FoldPlan& plan, const CvOptions& options) {
  if (plan.n != features.rows() || plan.n != targets.size()) {
    throw DomainError("cross_validate: fold plan does not match the number of rows");
  }
  CvReport report;
  report.model_name = spec.name;
  report.fold_scores.assign(plan.k, kNaN);
  std::vector<bool> excluded(plan.k, false);

  auto run_fold = [&](std::size_t fold) {
    const auto train_idx = plan.train_rows(fold);
    const auto test_idx = plan.test_rows(fold);
    Matrix train_x = features.select_rows(train_idx);
    Matrix test_x = features.select_rows(test_idx);
    const auto train_y = select(targets, train_idx);
    const auto test_y = select(targets, test_idx);
    if (options.per_fold_scaling) {
      const auto scaler = data::Standardizer::fit(train_x);
      scaler.transform_in_place(train_x);
      scaler.transform_in_place(test_x);
    }
    const bool constant = std::all_of(test_y.begin(), test_y.end(), [&](double v) { return v == test_y.front(); });
    if (constant || test_y.size() < 2) {
      excluded[fold] = true;
      return;
    }
    const models::Model model = train_model(spec, train_x, train_y);
    std::vector<double> predicted(test_y.size());
    for (std::size_t i = 0; i < test_y.size(); ++i) predicted[i] = models::predict(model, test_x.row(i));
    report.fold_scores[fold] = r2_score(test_y, predicted);
  };

  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, plan.k);
  if (workers == 1) {
    for (std::size_t f = 0; f < plan.k; ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t f = next++; f < plan.k; f = next++) {
          try {
            run_fold(f);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> included;
  for (std::size_t f = 0; f < plan.k; ++f) {
    if (excluded[f]) {
      report.excluded_folds.push_back(f);
    } else {
      included.push_back(report.fold_scores[f]);
    }
  }
  if (included.empty()) throw DomainError("cross_validate: every fold has constant validation targets");
  report.mean_r2 = stats::mean(included);
  report.std_r2 = included.size() >= 2 ? std::sqrt(stats::sample_variance(included)) : 0.0;
  return report;
}

stats::TTestResult paired_t_test(std::span<const double> scores_a, std::span<const double> scores_b) {
  return stats::paired_t_test(scores_a, scores_b);
}

const CvReport& ComparisonReport::report(const std::string& name) const {
  for (const auto& r : reports) {
    if (r.model_name == name) return r;
  }
  throw Error("ComparisonReport: no model named " + name);
}

const PairwiseComparison& ComparisonReport::pair(const std::string& a, const std::string& b) const {
  for (const auto& p : pairwise) {
    if ((p.model_a == a && p.model_b == b) || (p.model_a == b && p.model_b == a)) return p;
  }
  throw Error("ComparisonReport: no comparison between " + a + " and " + b);
}

ComparisonReport compare_models(const std::vector<ModelSpec>& specs, const Matrix& features,
                                std::span<const double> targets, const FoldPlan& plan, const CvOptions& options,
                                double alpha) {
  if (specs.size() < 2) throw ValidationError("models", "need at least two model configurations");
  ComparisonReport out;
  out.alpha = alpha;
  out.folds = plan.k;
  out.seed = plan.seed;
  out.rows = plan.n;
  out.per_fold_scaling = options.per_fold_scaling;
  for (const auto& spec : specs) out.reports.push_back(cross_validate(spec, features, targets, plan, options));

  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    for (std::size_t j = i + 1; j < out.reports.size(); ++j) {
      const auto& a = out.reports[i];
      const auto& b = out.reports[j];
      std::vector<double> sa, sb;
      for (std::size_t f = 0; f < plan.k; ++f) {
        if (std::isnan(a.fold_scores[f]) || std::isnan(b.fold_scores[f])) continue;
        sa.push_back(a.fold_scores[f]);
        sb.push_back(b.fold_scores[f]);
      }
      PairwiseComparison cmp{a.model_name, b.model_name, std::nullopt, false, ""};
      try {
        cmp.test = paired_t_test(sa, sb);
        cmp.significant = cmp.test->p_value < alpha;
      } catch (const DomainError& e) {
        cmp.note = "indistinguishable";
      }
      out.pairwise.push_back(std::move(cmp));
    }
  }
  return out;
}

std::string to_json(const ComparisonReport& report) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& r : report.reports) {
    nlohmann::json scores = nlohmann::json::array();
    for (double s : r.fold_scores) scores.push_back(real_or_null(s));
    models.push_back({{"model", r.model_name},
                      {"mean_r2", real_or_null(r.mean_r2)},
                      {"std_r2", real_or_null(r.std_r2)},
                      {"fold_scores", scores},
                      {"excluded_folds", r.excluded_folds}});
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairwise) {
    nlohmann::json entry{{"model_a", p.model_a}, {"model_b", p.model_b}, {"significant", p.significant}};
    if (p.test) {
      entry["t_stat"] = real_or_null(p.test->t_stat);
      entry["df"] = real_or_null(p.test->df);
      entry["p_value"] = real_or_null(p.test->p_value);
    } else {
      entry["t_stat"] = nullptr;
      entry["df"] = nullptr;
      entry["p_value"] = nullptr;
    }
    if (!p.note.empty()) entry["note"] = p.note;
    pairs.push_back(std::move(entry));
  }
  nlohmann::json doc{{"alpha", report.alpha},
                     {"folds", report.folds},
                     {"seed", report.seed},
                     {"rows", report.rows},
                     {"per_fold_scaling", report.per_fold_scaling},
                     {"models", models},
                     {"pairwise", pairs}};
  return doc.dump(2) + "\n";
}

}  // namespace burnout::eval
