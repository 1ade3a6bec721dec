#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "l0acc/model.hpp"
#include "l0acc/sparsity.hpp"
#include "l0acc/subspace_newton.hpp"

namespace l0acc {

enum class Algorithm { pg, apg, pg_plus, apg_plus };

/// "pg", "apg", "pg+", "apg+".
std::string_view to_string(Algorithm alg);
/// Accepts the names above plus "pg_plus" / "apg_plus".
std::optional<Algorithm> parse_algorithm(std::string_view name);

enum class SpectralMode { bb, exact };

/// Every tunable of the outer solvers. Defaults are the published settings.
struct SolverConfig {
  Algorithm algorithm = Algorithm::apg_plus;
  Index s = 1;
  std::optional<double> lambda;  // empty: 0.999 / L

  // extrapolation
  double eta = 0.5;
  double sigma = 0.05;
  double epsilon_zeta = 1e-20;
  double alpha_min = 1.0;
  double alpha_max = 100.0;
  int max_backtracks = 50;
  SpectralMode spectral_mode = SpectralMode::exact;
  int refresh_period = 100;

  // subspace identification + Newton
  int S_threshold = 5;
  int t_newton = 1;
  double beta_armijo = 0.5;
  double sigma2_armijo = 1e-3;
  std::optional<Damping> damping;
  double alpha_min_ls = 1e-10;

  // stopping
  double eps_hat = 1e-6;
  int max_iter = 10000;

  /// Throws ConfigError on out-of-range settings.
  void validate() const;
  NewtonParams newton_params() const;
};

enum class StepType { pg, extrapolated, newton, newton_failed };
std::string_view to_string(StepType type);

/// State of one outer iteration k, recorded after the gradient at z^k has
/// been evaluated and before the projected gradient step from it.
struct TraceRecord {
  int k = 0;
  StepType step_type = StepType::pg;
  double f = 0.0;
  double residual = 0.0;
  double t_k = 0.0;
  bool support_changed = false;
  std::int64_t ge_cum = 0;
  std::int64_t cg_cum = 0;
};

enum class SolveStatus { converged, max_iter, numeric_error };
std::string_view to_string(SolveStatus status);

/// Work done inside the extrapolation line search, for cost auditing.
struct ExtrapolationStats {
  std::int64_t gate_passed = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t trials = 0;
  std::int64_t design_passes = 0;   // full or column passes over X
  std::int64_t gradient_evals = 0;
};

struct SolveResult {
  SparseIterate w;
  double f = 0.0;
  double residual = 0.0;
  int iterations = 0;  // projected gradient steps taken
  std::int64_t ge = 0;
  std::int64_t cg = 0;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::max_iter;
  std::vector<TraceRecord> trace;

  double lambda = 0.0;
  bool final_unique = true;  // projection at the final residual check
  ExtrapolationStats extrapolation;
  int newton_attempts = 0;
  int newton_failures = 0;
};

enum class Gate { pass, skip };

struct GateResult {
  Gate decision = Gate::skip;
  double zeta = 0.0;
};

/// Skip unless both iterates share a subspace, d != 0 and
/// zeta = -<d, grad_J> / (||d|| ||grad_J||) >= epsilon_zeta.
GateResult extrapolation_gate(const SupportSet& prev, const SupportSet& cur,
                              std::span<const double> grad_J, std::span<const double> d,
                              double epsilon_zeta);

/// Spectral initial step t = -alpha <grad, d> / ||d||^2 with the BB step
/// alpha = <s, s> / <s, r>. Empty when <s, r> <= 0 or d = 0.
std::optional<double> spectral_step_bb(std::span<const double> s_vec,
                                       std::span<const double> r_vec,
                                       std::span<const double> grad_J,
                                       std::span<const double> d);

/// Exact one-dimensional Newton step -<grad, d> / <H d, d>. Empty when the
/// curvature is <= 1e-300.
std::optional<double> spectral_step_exact(const Model& model, const LinearState& state,
                                          std::span<const double> Xd, double grad_dot_d,
                                          double d_norm_sq);

/// Clamp into [c alpha_min, c alpha_max], c = ||grad_J|| / (zeta ||d||).
double safeguard_step(double t_hat, std::span<const double> grad_J,
                      std::span<const double> d, double zeta, const SolverConfig& config);

struct Extrapolation {
  double t = 0.0;
  LinearState state;
  int backtracks = 0;
};

/// t = eta^i t_hat for the smallest i < max_backtracks with
///   f(w + t d) <= f(w) - sigma t^2 ||d||^2,  d = w_k - w_prev.
/// Every trial is an O(m) update of the cached state; no gradient is
/// evaluated. Empty when every trial fails.
std::optional<Extrapolation> backtrack_extrapolation(const Model& model, const LinearState& cur,
                                                     const LinearState& prev, double d_norm_sq,
                                                     double t_hat, const SolverConfig& config,
                                                     EvalCounters* counters = nullptr);

/// Runs config.algorithm from w0 (zero vector when empty).
SolveResult solve(const Model& model, const SolverConfig& config,
                  std::optional<SparseIterate> w0 = std::nullopt);

enum class InnerScheme { plain, extrapolate };

/// The subspace-identification outer loop (PG+ with `plain`, APG+ with
/// `extrapolate`). Other fields of config.algorithm are ignored.
SolveResult pg_plus_meta(const Model& model, const SolverConfig& config, InnerScheme inner,
                         std::optional<SparseIterate> w0 = std::nullopt);

}  // namespace l0acc
