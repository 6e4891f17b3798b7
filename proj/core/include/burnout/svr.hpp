#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "burnout/matrix.hpp"

namespace burnout::models {

enum class KernelKind { Rbf, Linear };

std::string_view to_string(KernelKind k);
std::optional<KernelKind> parse_kernel_kind(std::string_view s);

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0;  // RBF width; ignored for Linear

  void validate() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// Rbf: exp(-gamma * |x - y|^2); Linear: <x, y>.
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

// 1 / (d * mean column variance), the usual "scale" heuristic. Falls back to 1 / d
// when every column is constant.
double default_gamma(const Matrix& features);

struct SmoConfig {
  double tol = 1e-3;  // stop when the maximal KKT violation m - M drops below this
  // Exact gradient recomputations allowed after the cached gradient first reports
  // convergence; each one re-verifies the stopping test against drift.
  std::size_t max_passes = 5;
  std::optional<std::size_t> max_iters;  // pair updates; default max(1e7, 100 * n)
  std::uint64_t seed = 0;                // order in which tied violators are scanned
  std::size_t cache_mb = 256;            // kernel row cache budget
  bool record_objective = false;         // fill SvrTrainInfo::objective_trace

  void validate() const;
};

// epsilon-insensitive support vector regression.
struct SvrModel {
  Matrix support_vectors;
  std::vector<double> dual_coefs;  // beta_i = alpha_i - alpha_i^*
  double bias = 0.0;
  KernelSpec kernel;
  double c = 1.0;
  double epsilon = 0.1;

  // Throws FormatError describing the first broken invariant.
  void validate() const;
  friend bool operator==(const SvrModel&, const SvrModel&) = default;
};

struct SvrTrainInfo {
  std::size_t iterations = 0;
  bool converged = false;
  double max_violation = 0.0;
  double objective = 0.0;  // dual objective, maximization form
  std::vector<double> objective_trace;
  // Full dual solution, one entry per training row (including zeros).
  std::vector<double> beta;
};

SvrModel train_svr(const Matrix& features, std::span<const double> targets, double c, double epsilon,
                   const KernelSpec& kernel, const SmoConfig& cfg = {}, SvrTrainInfo* info = nullptr);

double predict_svr(const SvrModel& model, std::span<const double> x);

// -1/2 b'Kb - eps*sum|b| + y'b for a full coefficient vector over the training rows.
double svr_dual_objective(const Matrix& features, std::span<const double> targets, std::span<const double> beta,
                          double epsilon, const KernelSpec& kernel);

}  // namespace burnout::models
