#include "l0acc/projected_gradient.hpp"

#include <cmath>
#include <limits>

#include "dense.hpp"
#include "l0acc/errors.hpp"

namespace l0acc {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double a : v) acc += a * a;
  return std::sqrt(acc);
}

// Dense |J| x |J| Hessian of f restricted to J, row-major.
std::vector<double> restricted_hessian(const Model& model, const LinearState& st,
                                       const SupportSet& J) {
  const std::size_t k = J.size();
  const Index m = model.rows();
  std::vector<double> cols(k * m, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const auto col = model.X().column(J.indices[a]);
    for (std::size_t p = 0; p < col.rows.size(); ++p) cols[a * m + col.rows[p]] = col.values[p];
  }
  std::vector<double> H(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double acc = 0.0;
      for (Index i = 0; i < m; ++i) acc += st.gsecond[i] * cols[a * m + i] * cols[b * m + i];
      H[a * k + b] = H[b * k + a] = acc;
    }
    H[a * k + a] += model.loss().mu;
  }
  return H;
}

}  // namespace

ProjectionOutcome gradient_projection(const SparseIterate& w, std::span<const double> grad,
                                      double lambda, Index s) {
  if (grad.size() != w.dim) throw ContractError("gradient length differs from dimension");
  std::vector<double> u(grad.size());
  for (Index i = 0; i < u.size(); ++i) u[i] = -lambda * grad[i];
  for (std::size_t k = 0; k < w.support.size(); ++k) u[w.support[k]] += w.values[k];
  return project_topk(u, s);
}

PgStep pg_step(const Model& model, const LinearState& state, double lambda, Index s,
               EvalCounters* counters) {
  const std::vector<double> g = full_gradient(model, state, counters);
  ProjectionOutcome outcome = gradient_projection(state.w, g, lambda, s);
  LinearState next = make_state(model, outcome.point, counters);
  return {std::move(next), std::move(outcome)};
}

double residual_from_gradient(const SparseIterate& w, std::span<const double> grad, double lambda,
                              Index s, ProjectionOutcome* outcome) {
  ProjectionOutcome proj = gradient_projection(w, grad, lambda, s);
  std::vector<double> diff = w.to_dense();
  for (std::size_t k = 0; k < proj.point.support.size(); ++k)
    diff[proj.point.support[k]] -= proj.point.values[k];
  const double r = norm2(diff) / (1.0 + w.norm() + lambda * norm2(grad));
  if (outcome) *outcome = std::move(proj);
  return r;
}

double residual(const Model& model, const LinearState& state, double lambda, Index s,
                EvalCounters* counters) {
  const std::vector<double> g = full_gradient(model, state, counters);
  return residual_from_gradient(state.w, g, lambda, s);
}

SparseIterate minimize_on_support(const Model& model, const SupportSet& J) {
  const std::size_t k = J.size();
  LinearState st = make_state(model, restrict_to(SparseIterate::zeros(model.cols()), J));
  if (k == 0) return st.w;

  double best_gn = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < 200; ++it) {
    const std::vector<double> g = restricted_gradient(model, st, J.indices);
    const double gn = norm2(g);
    if (gn <= 1e-12) break;
    if (gn < best_gn) {
      best_gn = gn;
      stalled = 0;
    } else if (++stalled >= 5) {
      break;
    }

    std::vector<double> H = restricted_hessian(model, st, J);
    std::vector<double> p(k);
    double ridge = 0.0;
    for (;;) {
      for (std::size_t a = 0; a < k; ++a) p[a] = -g[a];
      std::vector<double> Hr = H;
      for (std::size_t a = 0; a < k; ++a) Hr[a * k + a] += ridge;
      if (detail::cholesky_solve(std::move(Hr), k, p)) break;
      double scale = 0.0;
      for (std::size_t a = 0; a < k; ++a) scale = std::max(scale, std::abs(H[a * k + a]));
      ridge = ridge == 0.0 ? 1e-14 * std::max(scale, 1.0) : ridge * 10.0;
    }

    const std::vector<double> Xp = matvec_cols(model.X(), J.indices, p);
    double gp = 0.0;
    for (std::size_t a = 0; a < k; ++a) gp += g[a] * p[a];
    double alpha = 1.0;
    while (objective_change(model, st, p, Xp, alpha) > 1e-4 * alpha * gp && alpha > 1e-20)
      alpha *= 0.5;
    if (alpha <= 1e-20) break;

    SparseIterate next = st.w;
    for (std::size_t a = 0; a < k; ++a) next.values[a] += alpha * p[a];
    st = make_state(model, std::move(next));
  }
  return st.w;
}

BestSubset brute_force_best_subset(const Model& model, Index s, std::uint64_t max_subsets) {
  const Index n = model.cols();
  const Index k = std::min(s, n);
  if (k == 0) throw ContractError("sparsity level must be >= 1");

  // C(n, k), stopping as soon as it passes the guard.
  std::uint64_t count = 1;
  for (Index i = 1; i <= k; ++i) {
    count = count * (n - k + i) / i;
    if (count > max_subsets)
      throw ConfigError("enumeration over C(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") subsets exceeds the limit of " + std::to_string(max_subsets));
  }

  BestSubset best;
  best.f = std::numeric_limits<double>::infinity();
  std::vector<Index> comb(k);
  for (Index i = 0; i < k; ++i) comb[i] = i;
  for (;;) {
    const SupportSet J{comb};
    SparseIterate w = minimize_on_support(model, J);
    const double f = make_state(model, w).f;
    if (f < best.f) best = {J, std::move(w), f};

    // next combination in lexicographic order
    Index i = k;
    while (i > 0 && comb[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (Index j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

}  // namespace l0acc
