#include "l0acc/subspace_newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l0acc/errors.hpp"

namespace l0acc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

}  // namespace

PcgResult pcg_solve(const HvpOperator& hvp, std::span<const double> g,
                    std::span<const double> precond_diag, int max_cg, bool adaptive_stop) {
  const std::size_t k = g.size();
  if (precond_diag.size() != k) throw ContractError("preconditioner length differs from |J|");

  PcgResult out;
  out.p.assign(k, 0.0);
  std::vector<double> minv(k);
  for (std::size_t i = 0; i < k; ++i) minv[i] = 1.0 / std::max(precond_diag[i], 1e-12);

  // r = -g - H p, the negated linear residual.
  std::vector<double> r(g.begin(), g.end());
  for (double& a : r) a = -a;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < k; ++i) z[i] = minv[i] * r[i];
  std::vector<double> dir = z;
  double rz = dot(r, z);
  const double threshold = std::min(0.5, std::sqrt(rz));  // <g, M^-1 g> == <r, z> at p = 0

  if (rz == 0.0 || max_cg <= 0) {
    out.stats.terminated_by = rz == 0.0 ? CgTermination::exact : CgTermination::max_iter;
    return out;
  }

  std::vector<double> Hd(k);
  double q_prev = 0.0;
  for (int i = 1; i <= max_cg; ++i) {
    hvp(dir, Hd);
    const double dHd = dot(dir, Hd);
    out.stats.iterations = i;
    if (!std::isfinite(dHd)) {
      out.ok = false;
      out.stats.terminated_by = CgTermination::failure;
      return out;
    }
    if (dHd <= 0.0) {
      // Flat or negative direction: keep what we have, or the scaled
      // steepest-descent direction if nothing has been accumulated yet.
      if (i == 1) out.p = dir;
      out.stats.q_final = 0.5 * (dot(g, out.p) - dot(out.p, r));
      out.stats.terminated_by = CgTermination::max_iter;
      return out;
    }
    const double alpha = rz / dHd;
    for (std::size_t j = 0; j < k; ++j) {
      out.p[j] += alpha * dir[j];
      r[j] -= alpha * Hd[j];
    }
    if (!all_finite(out.p) || !all_finite(r)) {
      out.ok = false;
      out.stats.terminated_by = CgTermination::failure;
      return out;
    }

    // Q_i = (<g, p> + <p, Hp + g>) / 2 and Hp + g = -r.
    const double q = 0.5 * (dot(g, out.p) - dot(out.p, r));
    out.stats.q_final = q;
    if (adaptive_stop && q != 0.0 && (q - q_prev) / (q / i) <= threshold) {
      out.stats.terminated_by = CgTermination::rule;
      return out;
    }

    for (std::size_t j = 0; j < k; ++j) z[j] = minv[j] * r[j];
    const double rz_next = dot(r, z);
    if (rz_next == 0.0) {
      out.stats.terminated_by = CgTermination::exact;
      return out;
    }
    const double beta = rz_next / rz;
    for (std::size_t j = 0; j < k; ++j) dir[j] = z[j] + beta * dir[j];
    rz = rz_next;
    q_prev = q;
  }
  out.stats.terminated_by = CgTermination::max_iter;
  return out;
}

std::optional<ArmijoResult> armijo_search(const Model& model, const LinearState& state,
                                          std::span<const double> grad_J,
                                          std::span<const double> p, const NewtonParams& params,
                                          EvalCounters* counters) {
  const double gp = dot(grad_J, p);
  if (!(gp < 0.0)) return std::nullopt;
  const std::vector<double> Xp = matvec_cols(model.X(), state.w.support, p);
  if (counters) ++counters->column_passes;
  for (double alpha = 1.0; alpha >= params.alpha_min_ls; alpha *= params.beta) {
    const double change = objective_change(model, state, p, Xp, alpha);
    if (change <= params.sigma2 * alpha * gp)
      return ArmijoResult{alpha, shifted_state(model, state, p, Xp, alpha, 100, counters)};
  }
  return std::nullopt;
}

NewtonSystem newton_system(const Model& model, const LinearState& state, const SupportSet& J,
                           double grad_norm, const std::optional<Damping>& damping,
                           EvalCounters* counters) {
  NewtonSystem sys;
  sys.shift = damping ? damping->c * std::pow(grad_norm, damping->rho) : 0.0;
  sys.diag = col_weighted_sqnorms(model.X(), J.indices, state.gsecond);
  for (double& d : sys.diag) d += model.loss().mu + sys.shift;
  sys.op = [&model, &state, &J, shift = sys.shift, counters](std::span<const double> v,
                                                              std::span<double> res) {
    const std::vector<double> hv = hvp_restricted(model, state, J.indices, v, counters);
    for (std::size_t j = 0; j < hv.size(); ++j) res[j] = hv[j] + shift * v[j];
  };
  return sys;
}

SsnResult ssn_steps(const Model& model, const SupportSet& J, const SparseIterate& w_start,
                    const NewtonParams& params, EvalCounters* counters) {
  for (std::size_t k = 0; k < w_start.support.size(); ++k)
    if (w_start.values[k] != 0.0 &&
        !std::binary_search(J.indices.begin(), J.indices.end(), w_start.support[k]))
      throw ContractError("starting point has a nonzero outside J");

  SsnResult out;
  out.state = make_state(model, restrict_to(w_start, J), counters);
  const int max_cg = params.max_cg.value_or(static_cast<int>(J.size()));

  for (int step = 0; step < params.t_steps; ++step) {
    const std::vector<double> g = restricted_gradient(model, out.state, J.indices);
    const double gn = std::sqrt(dot(g, g));
    out.grad_norms.push_back(gn);
    if (gn == 0.0) break;

    const NewtonSystem sys = newton_system(model, out.state, J, gn, params.damping, counters);
    PcgResult cg = pcg_solve(sys.op, g, sys.diag, max_cg, params.adaptive_cg_stop);
    out.cg_iterations += cg.stats.iterations;
    if (!cg.ok) {
      out.status = SsnStatus::failed;
      break;
    }
    std::optional<ArmijoResult> ls = armijo_search(model, out.state, g, cg.p, params, counters);
    if (!ls) {
      // A predicted decrease below the resolution of f means we are already
      // at the minimizer to working precision, not that the step is bad.
      const double decrement = -dot(g, cg.p);
      if (!(decrement <= std::numeric_limits<double>::epsilon() * (1.0 + std::abs(out.state.f))))
        out.status = SsnStatus::failed;
      break;
    }
    out.state = std::move(ls->state);
    ++out.steps_taken;
  }
  if (out.status == SsnStatus::ok && out.steps_taken == params.t_steps) {
    const std::vector<double> g = restricted_gradient(model, out.state, J.indices);
    out.grad_norms.push_back(std::sqrt(dot(g, g)));
  }
  out.w = out.state.w;
  return out;
}

}  // namespace l0acc
