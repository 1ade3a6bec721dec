#include "l0acc/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "l0acc/errors.hpp"
#include "l0acc/projected_gradient.hpp"

namespace l0acc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

struct Engine {
  const Model& model;
  const SolverConfig& config;
  bool extrapolate;
  bool newton;
  EvalCounters counters;
  SolveResult result;

  // Extrapolated point from w^k along w^k - w^{k-1}, or empty when skipped.
  std::optional<Extrapolation> try_extrapolate(const LinearState& cur, const LinearState& prev,
                                               const SupportSet& cur_sel,
                                               const SupportSet& prev_sel) {
    const std::vector<double> d = difference(cur.w.values, prev.w.values);
    const std::vector<double> grad_J = restricted_gradient(model, cur, cur_sel.indices);
    const GateResult gate = extrapolation_gate(prev_sel, cur_sel, grad_J, d, config.epsilon_zeta);
    if (gate.decision == Gate::skip) return std::nullopt;
    ++result.extrapolation.gate_passed;

    const double dd = dot(d, d);
    std::optional<double> t_hat;
    if (config.spectral_mode == SpectralMode::exact) {
      const std::vector<double> Xd = difference(cur.z, prev.z);
      t_hat = spectral_step_exact(model, cur, Xd, dot(grad_J, d), dd);
    } else {
      const std::vector<double> r =
          difference(grad_J, restricted_gradient(model, prev, cur_sel.indices));
      t_hat = spectral_step_bb(d, r, grad_J, d);
    }
    if (!t_hat) return std::nullopt;
    const double t0 = safeguard_step(*t_hat, grad_J, d, gate.zeta, config);

    const EvalCounters before = counters;
    std::optional<Extrapolation> ext =
        backtrack_extrapolation(model, cur, prev, dd, t0, config, &counters);
    auto& st = result.extrapolation;
    st.design_passes += (counters.full_passes - before.full_passes) +
                        (counters.column_passes - before.column_passes);
    st.gradient_evals += counters.gradient_evals - before.gradient_evals;
    if (ext) {
      ++st.accepted;
      st.trials += ext->backtracks + 1;
    } else {
      ++st.rejected;
      st.trials += config.max_backtracks;
    }
    return ext;
  }

  void run(const SparseIterate& w0) {
    const Index s = config.s;
    const double lambda = result.lambda;
    const NewtonParams nparams = config.newton_params();

    ProjectionOutcome start = project_topk(w0.to_dense(), s);
    LinearState cur = make_state(model, std::move(start.point), &counters);
    SupportSet cur_sel = std::move(start.selected);
    LinearState prev;
    SupportSet prev_sel;
    int unchanged = 0;

    for (int k = 0;; ++k) {
      const bool changed = k > 0 && !same_support(prev_sel, cur_sel);
      StepType type = StepType::pg;
      double t_k = 0.0;
      std::optional<LinearState> z;

      if (newton) unchanged = (k > 0 && !changed) ? unchanged + 1 : 0;

      if (newton && unchanged >= config.S_threshold) {
        ++result.newton_attempts;
        SsnResult ssn = ssn_steps(model, cur_sel, cur.w, nparams, &counters);
        if (ssn.status == SsnStatus::ok) {
          z = std::move(ssn.state);
          type = StepType::newton;
        } else {
          ++result.newton_failures;
          type = StepType::newton_failed;
          unchanged = 0;
        }
      } else if (extrapolate && k > 0 && !changed) {
        if (auto ext = try_extrapolate(cur, prev, cur_sel, prev_sel)) {
          t_k = ext->t;
          z = std::move(ext->state);
          type = StepType::extrapolated;
        }
      }

      const LinearState& at = z ? *z : cur;
      const std::vector<double> grad = full_gradient(model, at, &counters);
      ProjectionOutcome outcome;
      const double res = residual_from_gradient(at.w, grad, lambda, s, &outcome);
      result.trace.push_back({k, type, at.f, res, t_k, changed, counters.gradient_evals,
                              counters.hessian_vec});

      const bool done = res < config.eps_hat;
      if (!std::isfinite(res) || done || k >= config.max_iter) {
        result.status = !std::isfinite(res) ? SolveStatus::numeric_error
                        : done              ? SolveStatus::converged
                                            : SolveStatus::max_iter;
        result.w = at.w;
        result.f = at.f;
        result.residual = res;
        result.iterations = k;
        result.final_unique = outcome.unique;
        return;
      }

      prev = std::move(cur);
      prev_sel = std::move(cur_sel);
      cur = make_state(model, std::move(outcome.point), &counters);
      cur_sel = std::move(outcome.selected);
      result.w = cur.w;  // last good point if the next iteration throws
      result.f = cur.f;
      result.iterations = k + 1;
    }
  }
};

SolveResult run_engine(const Model& model, const SolverConfig& config,
                       std::optional<SparseIterate> w0, bool extrapolate, bool newton) {
  config.validate();
  SparseIterate start = w0 ? std::move(*w0) : SparseIterate::zeros(model.cols());
  if (start.dim != model.cols()) throw ContractError("w0 dimension differs from column count");
  start.validate();
  if (start.nonzeros() > config.s) throw ContractError("w0 has more than s nonzeros");

  Engine engine{model, config, extrapolate, newton, {}, {}};
  engine.result.lambda = config.lambda ? *config.lambda : 0.999 / lipschitz_estimate(model);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    engine.run(start);
  } catch (const NumericError&) {
    engine.result.status = SolveStatus::numeric_error;
    engine.result.residual = std::numeric_limits<double>::quiet_NaN();
  }
  const auto t1 = std::chrono::steady_clock::now();

  SolveResult out = std::move(engine.result);
  out.wall_time = std::chrono::duration<double>(t1 - t0).count();
  out.ge = engine.counters.gradient_evals;
  out.cg = engine.counters.hessian_vec;
  return out;
}

}  // namespace

std::string_view to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::pg: return "pg";
    case Algorithm::apg: return "apg";
    case Algorithm::pg_plus: return "pg+";
    case Algorithm::apg_plus: return "apg+";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "pg") return Algorithm::pg;
  if (name == "apg") return Algorithm::apg;
  if (name == "pg+" || name == "pg_plus") return Algorithm::pg_plus;
  if (name == "apg+" || name == "apg_plus") return Algorithm::apg_plus;
  return std::nullopt;
}

std::string_view to_string(StepType type) {
  switch (type) {
    case StepType::pg: return "pg";
    case StepType::extrapolated: return "extrapolated";
    case StepType::newton: return "newton";
    case StepType::newton_failed: return "newton_failed";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numeric_error: return "numeric_error";
  }
  return "?";
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (s < 1) fail("s must be >= 1");
  if (lambda && !(*lambda > 0.0 && std::isfinite(*lambda))) fail("lambda must be positive");
  if (!in_open_unit(eta)) fail("eta must lie in (0, 1)");
  if (!in_open_unit(sigma)) fail("sigma must lie in (0, 1)");
  if (!in_open_unit(epsilon_zeta)) fail("epsilon_zeta must lie in (0, 1)");
  if (!(alpha_min > 0.0)) fail("alpha_min must be positive");
  if (!(alpha_max >= alpha_min)) fail("alpha_max must be >= alpha_min");
  if (max_backtracks < 1) fail("max_backtracks must be >= 1");
  if (refresh_period < 0) fail("refresh_period must be >= 0");
  if (S_threshold < 1) fail("S must be >= 1");
  if (t_newton < 1) fail("t must be >= 1");
  if (!in_open_unit(beta_armijo)) fail("beta must lie in (0, 1)");
  if (!in_open_unit(sigma2_armijo)) fail("sigma2 must lie in (0, 1)");
  if (damping && !(damping->c > 0.0 && damping->rho > 0.0 && damping->rho <= 1.0))
    fail("damping needs c > 0 and rho in (0, 1]");
  if (!(alpha_min_ls > 0.0)) fail("alpha_min_ls must be positive");
  if (!(eps_hat > 0.0)) fail("eps_hat must be positive");
  if (max_iter < 0) fail("max_iter must be >= 0");
}

NewtonParams SolverConfig::newton_params() const {
  NewtonParams p;
  p.t_steps = t_newton;
  p.beta = beta_armijo;
  p.sigma2 = sigma2_armijo;
  p.damping = damping;
  p.alpha_min_ls = alpha_min_ls;
  return p;
}

GateResult extrapolation_gate(const SupportSet& prev, const SupportSet& cur,
                              std::span<const double> grad_J, std::span<const double> d,
                              double epsilon_zeta) {
  if (!same_support(prev, cur)) return {};
  const double dn = std::sqrt(dot(d, d));
  const double gn = std::sqrt(dot(grad_J, grad_J));
  if (dn == 0.0 || gn == 0.0) return {};
  const double zeta = -dot(d, grad_J) / (dn * gn);
  if (!(zeta >= epsilon_zeta)) return {Gate::skip, zeta};
  return {Gate::pass, zeta};
}

std::optional<double> spectral_step_bb(std::span<const double> s_vec,
                                       std::span<const double> r_vec,
                                       std::span<const double> grad_J,
                                       std::span<const double> d) {
  const double sr = dot(s_vec, r_vec);
  const double dd = dot(d, d);
  if (!(sr > 0.0) || dd == 0.0) return std::nullopt;
  const double alpha = dot(s_vec, s_vec) / sr;
  return -alpha * dot(grad_J, d) / dd;
}

std::optional<double> spectral_step_exact(const Model& model, const LinearState& state,
                                          std::span<const double> Xd, double grad_dot_d,
                                          double d_norm_sq) {
  const double curvature = directional_curvature(model, state, Xd, d_norm_sq);
  if (!(curvature > 1e-300)) return std::nullopt;
  return -grad_dot_d / curvature;
}

double safeguard_step(double t_hat, std::span<const double> grad_J, std::span<const double> d,
                      double zeta, const SolverConfig& config) {
  const double c = std::sqrt(dot(grad_J, grad_J)) / (zeta * std::sqrt(dot(d, d)));
  return std::clamp(t_hat, c * config.alpha_min, c * config.alpha_max);
}

std::optional<Extrapolation> backtrack_extrapolation(const Model& model, const LinearState& cur,
                                                     const LinearState& prev, double d_norm_sq,
                                                     double t_hat, const SolverConfig& config,
                                                     EvalCounters* counters) {
  if (cur.w.support != prev.w.support)
    throw ContractError("extrapolation needs both iterates on the same support");
  const std::vector<double> d = difference(cur.w.values, prev.w.values);
  const std::vector<double> Xd = difference(cur.z, prev.z);
  double t = t_hat;
  for (int i = 0; i < config.max_backtracks; ++i, t *= config.eta) {
    if (objective_change(model, cur, d, Xd, t) <= -config.sigma * t * t * d_norm_sq)
      return Extrapolation{t, update_extrapolated(model, cur, prev, t, config.refresh_period, counters),
                           i};
  }
  return std::nullopt;
}

SolveResult solve(const Model& model, const SolverConfig& config, std::optional<SparseIterate> w0) {
  switch (config.algorithm) {
    case Algorithm::pg: return run_engine(model, config, std::move(w0), false, false);
    case Algorithm::apg: return run_engine(model, config, std::move(w0), true, false);
    case Algorithm::pg_plus: return pg_plus_meta(model, config, InnerScheme::plain, std::move(w0));
    case Algorithm::apg_plus:
      return pg_plus_meta(model, config, InnerScheme::extrapolate, std::move(w0));
  }
  throw ContractError("unknown algorithm");
}

SolveResult pg_plus_meta(const Model& model, const SolverConfig& config, InnerScheme inner,
                         std::optional<SparseIterate> w0) {
  return run_engine(model, config, std::move(w0), inner == InnerScheme::extrapolate, true);
}

}  // namespace l0acc
