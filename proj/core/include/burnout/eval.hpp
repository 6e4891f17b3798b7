#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burnout/matrix.hpp"
#include "burnout/models.hpp"
#include "burnout/stats.hpp"

namespace burnout::eval {

// 1 - SS_res / SS_tot. Throws DomainError on constant y_true or length mismatch.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);

struct FoldPlan {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_assignments;  // fold index per row

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

// Shuffles 0..n-1 with the seed and deals the permutation into k contiguous
// blocks; the first n % k blocks get one extra row.
FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

struct SvrSpec {
  double c = 1.0;
  double epsilon = 0.1;
  models::KernelKind kernel = models::KernelKind::Rbf;
  std::optional<double> gamma;  // default_gamma() of the training matrix when empty
  models::SmoConfig smo;
};

struct KnnSpec {
  std::size_t k = 5;
};

// A named training configuration.
struct ModelSpec {
  std::string name;
  models::ModelKind kind = models::ModelKind::Svr;
  SvrSpec svr;
  models::ForestParams forest;
  KnnSpec knn;
};

ModelSpec default_spec(models::ModelKind kind);

// Trains the configured model on already standardized features.
models::Model train_model(const ModelSpec& spec, const Matrix& features, std::span<const double> targets);

struct CvOptions {
  // Refit the scaler on each fold's training rows. When false the caller's
  // features are used as given (already globally standardized).
  bool per_fold_scaling = true;
  std::size_t threads = 1;
};

struct CvReport {
  std::string model_name;
  std::vector<double> fold_scores;         // length k; NaN for excluded folds
  std::vector<std::size_t> excluded_folds;  // folds with constant validation targets
  double mean_r2 = 0.0;                    // over included folds
  double std_r2 = 0.0;              // sample sd over included folds

  std::size_t warnings() const noexcept { return excluded_folds.size(); }
};

CvReport cross_validate(const ModelSpec& spec, const Matrix& features, std::span<const double> targets,
                        const FoldPlan& plan, const CvOptions& options = {});

// Fold-aligned paired t-test.
stats::TTestResult paired_t_test(std::span<const double> scores_a, std::span<const double> scores_b);

struct PairwiseComparison {
  std::string model_a;
  std::string model_b;
  std::optional<stats::TTestResult> test;  // empty when the scores are indistinguishable
  bool significant = false;
  std::string note;
};

struct ComparisonReport {
  std::vector<CvReport> reports;
  std::vector<PairwiseComparison> pairwise;
  double alpha = 0.05;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  bool per_fold_scaling = true;

  const CvReport& report(const std::string& name) const;
  const PairwiseComparison& pair(const std::string& a, const std::string& b) const;
};

ComparisonReport compare_models(const std::vector<ModelSpec>& specs, const Matrix& features,
                                std::span<const double> targets, const FoldPlan& plan,
                                const CvOptions& options = {}, double alpha = 0.05);

// JSON document mirroring the two result tables: per-model mean/std R^2 and
// pairwise t, p and significance flags.
std::string to_json(const ComparisonReport& report);

}  // namespace burnout::eval
