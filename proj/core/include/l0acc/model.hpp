#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l0acc/dataset.hpp"
#include "l0acc/sparsity.hpp"

namespace l0acc {

enum class Loss { least_squares, logistic };

inline constexpr double kDefaultLogisticMu = 1e-10;

/// Per-sample loss g_i plus the ridge weight mu.
///   least squares: g_i(z) = (z - y_i)^2 / 2, mu = 0
///   logistic:      g_i(z) = log(1 + exp(-y_i z)), mu >= 0
struct LossSpec {
  Loss kind = Loss::least_squares;
  double mu = 0.0;

  static LossSpec least_squares() { return {Loss::least_squares, 0.0}; }
  static LossSpec logistic(double mu = kDefaultLogisticMu) { return {Loss::logistic, mu}; }
};

/// Work counters shared by one solver run.
struct EvalCounters {
  std::int64_t gradient_evals = 0;  // full gradients (GE)
  std::int64_t hessian_vec = 0;     // restricted Hessian-vector products (CG)
  std::int64_t full_passes = 0;     // passes touching every column of X
  std::int64_t column_passes = 0;   // from-scratch products over a column subset
};

/// f(w) = sum_i g_i(x_i^T w) + (mu / 2) ||w||^2 over a fixed dataset.
class Model {
 public:
  /// Throws ConfigError when the loss does not fit the task (logistic needs
  /// classification data and vice versa) or mu is negative / non-finite.
  Model(Dataset data, LossSpec loss);

  const Dataset& data() const noexcept { return data_; }
  const DesignMatrix& X() const noexcept { return data_.X; }
  std::span<const double> y() const noexcept { return data_.y; }
  const LossSpec& loss() const noexcept { return loss_; }
  Index rows() const noexcept { return data_.X.rows(); }
  Index cols() const noexcept { return data_.X.cols(); }

  /// sup g''; 1 for least squares, 1/4 for logistic.
  double curvature_bound() const noexcept;

 private:
  Dataset data_;
  LossSpec loss_;
};

/// Cached quantities at one iterate: z = Xw and elementwise g', g'' at z.
///
/// Extrapolated points w + t d on the same support reuse z through linear
/// combinations, so evaluating them costs O(m) instead of a pass over X.
struct LinearState {
  SparseIterate w;
  std::vector<double> z;
  double f = 0.0;
  std::vector<double> gprime;
  std::vector<double> gsecond;
  int updates_since_refresh = 0;
};

/// Builds the state from scratch. Throws NumericError on a non-finite objective.
LinearState make_state(const Model& model, SparseIterate w, EvalCounters* counters = nullptr);

/// X^T g' + mu w over all n coordinates. Counts one gradient evaluation.
std::vector<double> full_gradient(const Model& model, const LinearState& state,
                                  EvalCounters* counters = nullptr);

/// The entries of the full gradient on `cols`, without forming it.
std::vector<double> restricted_gradient(const Model& model, const LinearState& state,
                                        std::span<const Index> cols);

/// (X_J^T diag(g'') X_J + mu I) v. Counts one Hessian-vector product.
std::vector<double> hvp_restricted(const Model& model, const LinearState& state,
                                   std::span<const Index> cols, std::span<const double> v,
                                   EvalCounters* counters = nullptr);

/// <grad^2 f(w) d, d> from a precomputed Xd: sum_i g''_i (Xd)_i^2 + mu ||d||^2.
double directional_curvature(const Model& model, const LinearState& state,
                             std::span<const double> Xd, double d_norm_sq);

/// f(w + t d) - f(w) for d stored on the support of `base`, computed term by
/// term so that tiny changes are not lost to cancellation.
double objective_change(const Model& model, const LinearState& base,
                        std::span<const double> d, std::span<const double> Xd, double t);

/// State at w + t d where d lives on the support of `base` and Xd = X d.
/// O(m) unless the refresh period is exceeded, in which case z is rebuilt.
LinearState shifted_state(const Model& model, const LinearState& base,
                          std::span<const double> d, std::span<const double> Xd, double t,
                          int refresh_period = 100, EvalCounters* counters = nullptr);

/// State at w_k + t (w_k - w_prev). Both states must share one support
/// (ContractError otherwise). Xd is formed as z_k - z_prev.
LinearState update_extrapolated(const Model& model, const LinearState& cur,
                                const LinearState& prev, double t, int refresh_period = 100,
                                EvalCounters* counters = nullptr);

/// Upper estimate of the gradient Lipschitz constant:
/// 1.001 * (lambda_max(X X^T) * curvature_bound + mu), with lambda_max from
/// power iteration (relative residual 1e-3, at most 500 iterations, all-ones
/// start). Throws ConfigError for an all-zero design.
double lipschitz_estimate(const Model& model);

}  // namespace l0acc
