#include "burnout/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <string>

#include "burnout/error.hpp"
#include "burnout/rng.hpp"

namespace burnout::models {

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-12;

// Kernel rows K(i, .) over the training set, least-recently-used eviction.
class KernelRowCache {
 public:
  KernelRowCache(const Matrix& x, const KernelSpec& spec, std::size_t budget_mb)
      : x_(x), spec_(spec), rows_(x.rows()), where_(x.rows()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.rows() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_mb * 1024 * 1024 / row_bytes);
  }

  std::span<const double> row(std::size_t i) {
    if (!rows_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return rows_[i];
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      std::vector<double>().swap(rows_[victim]);
    }
    auto& r = rows_[i];
    r.resize(x_.rows());
    const auto xi = x_.row(i);
    for (std::size_t k = 0; k < x_.rows(); ++k) r[k] = kernel_eval(spec_, xi, x_.row(k));
    lru_.push_front(i);
    where_[i] = lru_.begin();
    return r;
  }

 private:
  const Matrix& x_;
  KernelSpec spec_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::list<std::size_t> lru_;
  std::size_t capacity_ = 2;
};

// Dual in the doubled form used by SMO: variables t < n are alpha_t (sign +1),
// t >= n are alpha*_{t-n} (sign -1). Minimizes 1/2 z'Qz + p'z subject to
// sum sign_t z_t = 0 and 0 <= z_t <= C, with Q_ts = sign_t sign_s K(t mod n, s mod n).
// The gradient is never stored: G_t = p_t + sign_t (K beta)_{t mod n}.
class SmoSolver {
 public:
  SmoSolver(const Matrix& x, std::span<const double> y, double c, double epsilon, const KernelSpec& kernel,
            const SmoConfig& cfg)
      : n_(x.rows()), c_(c), cfg_(cfg), y_(y.begin(), y.end()), cache_(x, kernel, cfg.cache_mb),
        z_(2 * n_, 0.0), p_(2 * n_), f_(n_, 0.0), diag_(n_), order_(2 * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      p_[i] = epsilon - y_[i];
      p_[i + n_] = epsilon + y_[i];
      diag_[i] = kernel_eval(kernel, x.row(i), x.row(i));
    }
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng(cfg.seed);
    rng.shuffle(std::span<std::size_t>(order_));
  }

  void solve(SvrTrainInfo& info) {
    const std::size_t max_iters = cfg_.max_iters.value_or(std::max<std::size_t>(10'000'000, 100 * n_));
    std::size_t refreshes = 0;
    std::size_t iter = 0;
    bool converged = false;
    if (cfg_.record_objective) info.objective_trace.push_back(dual_objective());
    while (iter < max_iters) {
      std::size_t i = 0, j = 0;
      double gap = 0.0;
      if (!select_pair(i, j, gap)) {
        // Cached gradient says optimal; rebuild it exactly before trusting that.
        if (refreshes >= cfg_.max_passes) {
          converged = true;
          break;
        }
        ++refreshes;
        refresh_gradient();
        if (!select_pair(i, j, gap)) {
          converged = true;
          break;
        }
      }
      update_pair(i, j);
      ++iter;
      if (cfg_.record_objective) info.objective_trace.push_back(dual_objective());
    }
    std::size_t i = 0, j = 0;
    double gap = 0.0;
    if (!converged) converged = !select_pair(i, j, gap);
    select_pair(i, j, gap);
    info.iterations = iter;
    info.converged = converged;
    info.max_violation = std::max(gap, 0.0);
    info.objective = dual_objective();
    info.beta = beta();
  }

  std::vector<double> beta() const {
    std::vector<double> b(n_);
    for (std::size_t i = 0; i < n_; ++i) b[i] = z_[i] - z_[i + n_];
    return b;
  }

  // Average of the KKT equalities over free variables; midpoint of the feasible
  // interval when every variable sits at a bound.
  double bias() const {
    double upper = std::numeric_limits<double>::infinity();
    double lower = -upper;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double yg = sign(t) * gradient(t);
      if (at_upper(t)) {
        if (sign(t) < 0) upper = std::min(upper, yg);
        else lower = std::max(lower, yg);
      } else if (at_lower(t)) {
        if (sign(t) > 0) upper = std::min(upper, yg);
        else lower = std::max(lower, yg);
      } else {
        ++free_count;
        free_sum += yg;
      }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (upper + lower);
    return -rho;
  }

 private:
  double sign(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
  std::size_t point(std::size_t t) const { return t < n_ ? t : t - n_; }
  bool at_upper(std::size_t t) const { return z_[t] >= c_; }
  bool at_lower(std::size_t t) const { return z_[t] <= 0.0; }
  double gradient(std::size_t t) const { return p_[t] + sign(t) * f_[point(t)]; }

  // First-order maximal violating pair. Returns false when m - M < tol.
  bool select_pair(std::size_t& i, std::size_t& j, double& gap) const {
    double up_max = -std::numeric_limits<double>::infinity();
    double low_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t : order_) {
      const double g = gradient(t);
      if (sign(t) > 0) {
        if (!at_upper(t) && -g > up_max) {
          up_max = -g;
          i = t;
        }
        if (!at_lower(t) && g > low_max) {
          low_max = g;
          j = t;
        }
      } else {
        if (!at_lower(t) && g > up_max) {
          up_max = g;
          i = t;
        }
        if (!at_upper(t) && -g > low_max) {
          low_max = -g;
          j = t;
        }
      }
    }
    gap = up_max + low_max;
    return gap >= cfg_.tol;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const std::size_t pi = point(i);
    const std::size_t pj = point(j);
    const auto row_i = cache_.row(pi);
    const auto row_j = cache_.row(pj);
    const double si = sign(i);
    const double sj = sign(j);
    const double qij = si * sj * row_i[pj];
    const double gi = gradient(i);
    const double gj = gradient(j);
    const double old_i = z_[i];
    const double old_j = z_[j];
    double& ai = z_[i];
    double& aj = z_[j];

    if (si != sj) {
      double quad = diag_[pi] + diag_[pj] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-gi - gj) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c_) {
          ai = c_;
          aj = c_ - diff;
        }
      } else if (aj > c_) {
        aj = c_;
        ai = c_ + diff;
      }
    } else {
      double quad = diag_[pi] + diag_[pj] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (gi - gj) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) {
          ai = c_;
          aj = sum - c_;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c_) {
        if (aj > c_) {
          aj = c_;
          ai = sum - c_;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const double di = si * (ai - old_i);
    const double dj = sj * (aj - old_j);
    for (std::size_t k = 0; k < n_; ++k) f_[k] += row_i[k] * di + row_j[k] * dj;
  }

  void refresh_gradient() {
    std::fill(f_.begin(), f_.end(), 0.0);
    const auto b = beta();
    for (std::size_t i = 0; i < n_; ++i) {
      if (b[i] == 0.0) continue;
      const auto row = cache_.row(i);
      for (std::size_t k = 0; k < n_; ++k) f_[k] += row[k] * b[i];
    }
  }

  // Maximization form: -(1/2 z'Qz + p'z) = -1/2 sum z_t (G_t + p_t).
  double dual_objective() const {
    double acc = 0.0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      if (z_[t] != 0.0) acc += z_[t] * (gradient(t) + p_[t]);
    }
    return -0.5 * acc;
  }

  std::size_t n_;
  double c_;
  SmoConfig cfg_;
  std::vector<double> y_;
  KernelRowCache cache_;
  std::vector<double> z_;
  std::vector<double> p_;
  std::vector<double> f_;  // K beta
  std::vector<double> diag_;
  std::vector<std::size_t> order_;
};

void require_finite(const Matrix& x, std::span<const double> y) {
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw DomainError("train_svr: non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DomainError("train_svr: non-finite target value");
  }
}

}  // namespace

std::string_view to_string(KernelKind k) { return k == KernelKind::Rbf ? "Rbf" : "Linear"; }

std::optional<KernelKind> parse_kernel_kind(std::string_view s) {
  if (s == "Rbf" || s == "rbf") return KernelKind::Rbf;
  if (s == "Linear" || s == "linear") return KernelKind::Linear;
  return std::nullopt;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::Rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw FormatError("kernel.gamma: must be finite and > 0 for the RBF kernel");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("kernel_eval: dimension mismatch");
  if (spec.kind == KernelKind::Linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return dot;
  }
  double dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    dist2 += d * d;
  }
  return std::exp(-spec.gamma * dist2);
}

double default_gamma(const Matrix& features) {
  const std::size_t d = features.cols();
  const std::size_t n = features.rows();
  if (d == 0) throw DomainError("default_gamma: zero-width matrix");
  if (n == 0) return 1.0 / static_cast<double>(d);
  double total_var = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += features(r, c);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (features(r, c) - mean) * (features(r, c) - mean);
    total_var += ss / static_cast<double>(n);
  }
  const double mean_var = total_var / static_cast<double>(d);
  return mean_var > 0.0 ? 1.0 / (static_cast<double>(d) * mean_var) : 1.0 / static_cast<double>(d);
}

void SmoConfig::validate() const {
  if (!(tol > 0.0)) throw ValidationError("smo.tol", "must be > 0");
  if (max_iters && *max_iters == 0) throw ValidationError("smo.max_iters", "must be > 0");
}

void SvrModel::validate() const {
  kernel.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw FormatError("c: must be finite and > 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw FormatError("epsilon: must be finite and >= 0");
  if (!std::isfinite(bias)) throw FormatError("bias: must be finite");
  if (dual_coefs.size() != support_vectors.rows()) {
    throw FormatError("dual_coefs: length does not match support_vectors");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < dual_coefs.size(); ++i) {
    const double b = dual_coefs[i];
    if (!std::isfinite(b) || b == 0.0 || std::abs(b) > c + 1e-8) {
      throw FormatError("dual_coefs[" + std::to_string(i) + "]: must be nonzero with |value| <= c");
    }
    sum += b;
  }
  if (std::abs(sum) > 1e-6) throw FormatError("dual_coefs: do not sum to zero");
  for (double v : support_vectors.data()) {
    if (!std::isfinite(v)) throw FormatError("support_vectors: non-finite entry");
  }
}

SvrModel train_svr(const Matrix& features, std::span<const double> targets, double c, double epsilon,
                   const KernelSpec& kernel, const SmoConfig& cfg, SvrTrainInfo* info) {
  if (features.rows() == 0) throw DomainError("train_svr: empty training set");
  if (features.rows() != targets.size()) throw DomainError("train_svr: features and targets differ in length");
  if (!(c > 0.0)) throw ValidationError("c", "must be > 0");
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon", "must be >= 0");
  kernel.validate();
  cfg.validate();
  require_finite(features, targets);

  SmoSolver solver(features, targets, c, epsilon, kernel, cfg);
  SvrTrainInfo local;
  SvrTrainInfo& out = info ? *info : local;
  solver.solve(out);

  SvrModel model;
  model.kernel = kernel;
  model.c = c;
  model.epsilon = epsilon;
  model.bias = solver.bias();
  model.support_vectors = Matrix(0, features.cols());
  for (std::size_t i = 0; i < out.beta.size(); ++i) {
    if (std::abs(out.beta[i]) > kSupportThreshold) {
      model.support_vectors.append_row(features.row(i));
      model.dual_coefs.push_back(out.beta[i]);
    }
  }
  return model;
}

double predict_svr(const SvrModel& model, std::span<const double> x) {
  if (x.size() != model.support_vectors.cols()) throw DomainError("predict_svr: dimension mismatch");
  double f = model.bias;
  for (std::size_t i = 0; i < model.dual_coefs.size(); ++i) {
    f += model.dual_coefs[i] * kernel_eval(model.kernel, model.support_vectors.row(i), x);
  }
  return f;
}

double svr_dual_objective(const Matrix& features, std::span<const double> targets, std::span<const double> beta,
                          double epsilon, const KernelSpec& kernel) {
  const std::size_t n = features.rows();
  if (beta.size() != n || targets.size() != n) throw DomainError("svr_dual_objective: length mismatch");
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (beta[j] == 0.0) continue;
      quad += beta[i] * beta[j] * kernel_eval(kernel, features.row(i), features.row(j));
    }
    lin += targets[i] * beta[i] - epsilon * std::abs(beta[i]);
  }
  return -0.5 * quad + lin;
}

}  // namespace burnout::models
