#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "l0acc/model.hpp"
#include "l0acc/sparsity.hpp"

namespace l0acc {

/// Adds c * ||grad f_J||^rho * I to the Newton operator.
struct Damping {
  double c = 0.0;
  double rho = 1.0;
};

struct NewtonParams {
  int t_steps = 1;
  double beta = 0.5;
  double sigma2 = 1e-3;
  std::optional<int> max_cg;  // defaults to |J|
  std::optional<Damping> damping;
  double alpha_min_ls = 1e-10;
  /// Disable to run CG to its iteration budget (or an exact zero residual).
  bool adaptive_cg_stop = true;
};

enum class CgTermination { rule, max_iter, exact, failure };

struct CgStats {
  int iterations = 0;
  double q_final = 0.0;
  CgTermination terminated_by = CgTermination::max_iter;
};

/// out = H v.
using HvpOperator = std::function<void(std::span<const double> v, std::span<double> out)>;

struct PcgResult {
  std::vector<double> p;
  CgStats stats;
  bool ok = true;
};

/// Preconditioned CG from p0 = 0 on H p = -g with Jacobi preconditioner
/// `precond_diag` (entries floored at 1e-12).
///
/// Tracks the model value Q_i = <g, p_i> + <p_i, H p_i> / 2 through the
/// identity Q_i = (<g, p_i> + <p_i, H p_i + g>) / 2, so it needs no extra
/// products. Stops after `max_cg` iterations or, when `adaptive_stop`, at the
/// first i >= 1 with
///   (Q_i - Q_{i-1}) / (Q_i / i) <= min(0.5, sqrt(<g, M^{-1} g>)),
/// the ratio being +inf when Q_i = 0.
PcgResult pcg_solve(const HvpOperator& hvp, std::span<const double> g,
                    std::span<const double> precond_diag, int max_cg, bool adaptive_stop = true);

struct ArmijoResult {
  double alpha = 0.0;
  LinearState state;
};

/// Backtracking alpha = beta^i, smallest i with
///   f(w + alpha p) <= f(w) + sigma2 * alpha * <grad_J, p>.
/// `p` is stored on the support of `state`. Empty on failure: p not a
/// descent direction, or alpha dropped below alpha_min_ls.
std::optional<ArmijoResult> armijo_search(const Model& model, const LinearState& state,
                                          std::span<const double> grad_J,
                                          std::span<const double> p, const NewtonParams& params,
                                          EvalCounters* counters = nullptr);

/// Restricted Newton system at `state`: the operator
/// v -> grad^2 f_J v + c ||grad f_J||^rho v and its Jacobi diagonal.
/// The operator keeps references to model, state and J.
struct NewtonSystem {
  HvpOperator op;
  std::vector<double> diag;
  double shift = 0.0;
};

NewtonSystem newton_system(const Model& model, const LinearState& state, const SupportSet& J,
                           double grad_norm, const std::optional<Damping>& damping,
                           EvalCounters* counters = nullptr);

enum class SsnStatus { ok, failed };

struct SsnResult {
  SparseIterate w;
  LinearState state;
  SsnStatus status = SsnStatus::ok;
  int cg_iterations = 0;
  int steps_taken = 0;
  /// ||grad f_J|| before each step and after the last one.
  std::vector<double> grad_norms;
};

/// `t_steps` truncated Newton steps on f restricted to A_J starting from the
/// restriction of `w_start` to J. Coordinates outside J stay exactly zero.
/// Every Hessian-vector product is added to counters->hessian_vec.
SsnResult ssn_steps(const Model& model, const SupportSet& J, const SparseIterate& w_start,
                    const NewtonParams& params, EvalCounters* counters = nullptr);

}  // namespace l0acc
