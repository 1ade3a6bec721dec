#include "l0acc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l0acc/errors.hpp"

namespace l0acc {

namespace {

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// log(1 + exp(u)) without overflow.
double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

// Fills f (loss part only), g' and g'' from z. O(m).
double evaluate_elementwise(const Model& model, std::span<const double> z,
                            std::span<double> gprime, std::span<double> gsecond) {
  const auto y = model.y();
  const Index m = z.size();
  double f = 0.0;
  if (model.loss().kind == Loss::least_squares) {
    for (Index i = 0; i < m; ++i) {
      const double r = z[i] - y[i];
      f += 0.5 * r * r;
      gprime[i] = r;
      gsecond[i] = 1.0;
    }
  } else {
    for (Index i = 0; i < m; ++i) {
      const double a = y[i] * z[i];
      f += softplus(-a);
      const double s_neg = sigmoid(-a);
      gprime[i] = -y[i] * s_neg;
      gsecond[i] = s_neg * sigmoid(a);
    }
  }
  return f;
}

void fill_derivatives(const Model& model, LinearState& st) {
  const Index m = model.rows();
  st.gprime.resize(m);
  st.gsecond.resize(m);
  st.f = evaluate_elementwise(model, st.z, st.gprime, st.gsecond) +
         0.5 * model.loss().mu * st.w.squared_norm();
  if (!std::isfinite(st.f)) throw NumericError("objective is not finite");
}

LinearState shift_impl(const Model& model, const LinearState& base, std::span<const double> d,
                       std::span<const double> Xd, double t, int updates, int refresh_period,
                       EvalCounters* counters) {
  const Index m = model.rows();
  if (d.size() != base.w.support.size()) throw ContractError("direction must live on the support");
  if (Xd.size() != m) throw ContractError("Xd must have length m");
  LinearState st;
  st.w.dim = base.w.dim;
  st.w.support = base.w.support;
  st.w.values.resize(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) st.w.values[k] = base.w.values[k] + t * d[k];
  st.updates_since_refresh = updates;
  if (updates > refresh_period) {
    st.z = matvec_cols(model.X(), st.w.support, st.w.values);
    st.updates_since_refresh = 0;
    if (counters) ++counters->column_passes;
  } else {
    st.z.resize(m);
    for (Index i = 0; i < m; ++i) st.z[i] = base.z[i] + t * Xd[i];
  }
  fill_derivatives(model, st);
  return st;
}

}  // namespace

Model::Model(Dataset data, LossSpec loss) : data_(std::move(data)), loss_(loss) {
  if (data_.y.size() != data_.X.rows())
    throw ConfigError("label count " + std::to_string(data_.y.size()) + " differs from row count " +
                      std::to_string(data_.X.rows()));
  if (!std::isfinite(loss_.mu) || loss_.mu < 0.0) throw ConfigError("mu must be finite and >= 0");
  const bool classification = data_.task == Task::classification;
  if ((loss_.kind == Loss::logistic) != classification)
    throw ConfigError(loss_.kind == Loss::logistic
                          ? "logistic loss needs classification data"
                          : "least-squares loss needs regression data");
  if (classification)
    for (double y : data_.y)
      if (y != 1.0 && y != -1.0) throw ConfigError("classification labels must be +1 or -1");
}

double Model::curvature_bound() const noexcept {
  return loss_.kind == Loss::least_squares ? 1.0 : 0.25;
}

LinearState make_state(const Model& model, SparseIterate w, EvalCounters* counters) {
  if (w.dim != model.cols()) throw ContractError("iterate dimension differs from column count");
  w.validate();
  LinearState st;
  st.z = matvec_cols(model.X(), w.support, w.values);
  if (counters) ++counters->column_passes;
  st.w = std::move(w);
  fill_derivatives(model, st);
  return st;
}

std::vector<double> full_gradient(const Model& model, const LinearState& state,
                                  EvalCounters* counters) {
  std::vector<double> g = transpose_matvec(model.X(), state.gprime);
  if (const double mu = model.loss().mu; mu != 0.0)
    for (std::size_t k = 0; k < state.w.support.size(); ++k)
      g[state.w.support[k]] += mu * state.w.values[k];
  if (counters) {
    ++counters->gradient_evals;
    ++counters->full_passes;
  }
  return g;
}

std::vector<double> restricted_gradient(const Model& model, const LinearState& state,
                                        std::span<const Index> cols) {
  std::vector<double> g = transpose_matvec_cols(model.X(), cols, state.gprime);
  if (const double mu = model.loss().mu; mu != 0.0)
    for (std::size_t k = 0; k < cols.size(); ++k) g[k] += mu * state.w.at(cols[k]);
  return g;
}

std::vector<double> hvp_restricted(const Model& model, const LinearState& state,
                                   std::span<const Index> cols, std::span<const double> v,
                                   EvalCounters* counters) {
  std::vector<double> u = matvec_cols(model.X(), cols, v);
  for (Index i = 0; i < u.size(); ++i) u[i] *= state.gsecond[i];
  std::vector<double> out = transpose_matvec_cols(model.X(), cols, u);
  if (const double mu = model.loss().mu; mu != 0.0)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += mu * v[k];
  if (counters) ++counters->hessian_vec;
  return out;
}

double directional_curvature(const Model& model, const LinearState& state,
                             std::span<const double> Xd, double d_norm_sq) {
  double acc = 0.0;
  for (Index i = 0; i < Xd.size(); ++i) acc += state.gsecond[i] * Xd[i] * Xd[i];
  return acc + model.loss().mu * d_norm_sq;
}

double objective_change(const Model& model, const LinearState& base, std::span<const double> d,
                        std::span<const double> Xd, double t) {
  const auto y = model.y();
  const Index m = model.rows();
  double delta = 0.0;
  if (model.loss().kind == Loss::least_squares) {
    for (Index i = 0; i < m; ++i) {
      const double h = t * Xd[i];
      delta += h * (base.z[i] - y[i]) + 0.5 * h * h;
    }
  } else {
    // softplus(u + h) - softplus(u) = log1p(expm1(h) * sigmoid(u)), u = -y z.
    for (Index i = 0; i < m; ++i) {
      const double u = -y[i] * base.z[i];
      const double h = -y[i] * t * Xd[i];
      if (h < 700.0)
        delta += std::log1p(std::expm1(h) * sigmoid(u));
      else
        delta += softplus(u + h) - softplus(u);
    }
  }
  if (const double mu = model.loss().mu; mu != 0.0) {
    double wd = 0.0;
    double dd = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      wd += base.w.values[k] * d[k];
      dd += d[k] * d[k];
    }
    delta += mu * (t * wd + 0.5 * t * t * dd);
  }
  return delta;
}

LinearState shifted_state(const Model& model, const LinearState& base, std::span<const double> d,
                          std::span<const double> Xd, double t, int refresh_period,
                          EvalCounters* counters) {
  return shift_impl(model, base, d, Xd, t, base.updates_since_refresh + 1, refresh_period,
                    counters);
}

LinearState update_extrapolated(const Model& model, const LinearState& cur,
                                const LinearState& prev, double t, int refresh_period,
                                EvalCounters* counters) {
  if (cur.w.support != prev.w.support)
    throw ContractError("extrapolation needs both iterates on the same support");
  const Index m = model.rows();
  std::vector<double> d(cur.w.values.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = cur.w.values[k] - prev.w.values[k];
  std::vector<double> Xd(m);
  for (Index i = 0; i < m; ++i) Xd[i] = cur.z[i] - prev.z[i];
  const int updates = std::max(cur.updates_since_refresh, prev.updates_since_refresh) + 1;
  return shift_impl(model, cur, d, Xd, t, updates, refresh_period, counters);
}

double lipschitz_estimate(const Model& model) {
  const DesignMatrix& X = model.X();
  const bool all_zero = std::all_of(X.values().begin(), X.values().end(),
                                    [](double v) { return v == 0.0; });
  if (all_zero) throw ConfigError("design matrix has no nonzero entries");

  const Index m = X.rows();
  std::vector<double> v(m, 1.0 / std::sqrt(static_cast<double>(m)));
  auto apply = [&](const std::vector<double>& in) { return matvec(X, transpose_matvec(X, in)); };
  auto normalize = [](std::vector<double>& x) {
    double nrm = 0.0;
    for (double a : x) nrm += a * a;
    nrm = std::sqrt(nrm);
    for (double& a : x) a /= nrm;
    return nrm;
  };

  std::vector<double> Av = apply(v);
  if (std::all_of(Av.begin(), Av.end(), [](double a) { return a == 0.0; })) {
    // all-ones lies in the null space of X^T; fall back to a fixed ramp.
    for (Index i = 0; i < m; ++i) v[i] = static_cast<double>(i + 1);
    normalize(v);
    Av = apply(v);
  }

  double theta = 0.0;
  for (int it = 0; it < 500; ++it) {
    theta = 0.0;
    for (Index i = 0; i < m; ++i) theta += v[i] * Av[i];
    double res = 0.0;
    for (Index i = 0; i < m; ++i) res += (Av[i] - theta * v[i]) * (Av[i] - theta * v[i]);
    if (std::sqrt(res) <= 1e-3 * theta) break;
    v = Av;
    normalize(v);
    Av = apply(v);
  }
  return 1.001 * (theta * model.curvature_bound() + model.loss().mu);
}

}  // namespace l0acc
