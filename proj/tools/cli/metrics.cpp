#include <cmath>

#include "cli/cli.hpp"
#include "l0acc/errors.hpp"

namespace l0acc::cli {

Index resolve_sparsity(double fraction, Index m) {
  if (!(fraction > 0.0) || !std::isfinite(fraction))
    throw ConfigError("sparsity fraction must be positive");
  const double raw = std::ceil(fraction * static_cast<double>(m) - 1e-9);
  return std::max<Index>(1, static_cast<Index>(raw));
}

double predict_metric(const SparseIterate& w, const Dataset& test) {
  // Coordinates past the test width are allowed only when they are zero.
  SparseIterate wt;
  wt.dim = test.cols();
  for (std::size_t k = 0; k < w.support.size(); ++k) {
    if (w.support[k] >= test.cols()) {
      if (w.values[k] != 0.0) throw ConfigError("model uses features beyond the test set width");
      continue;
    }
    wt.support.push_back(w.support[k]);
    wt.values.push_back(w.values[k]);
  }
  const std::vector<double> pred = matvec_cols(test.X, wt.support, wt.values);
  const Index m = test.rows();
  if (m == 0) return 0.0;
  if (test.task == Task::classification) {
    Index hits = 0;
    for (Index i = 0; i < m; ++i) hits += ((pred[i] >= 0.0 ? 1.0 : -1.0) == test.y[i]);
    return static_cast<double>(hits) / static_cast<double>(m);
  }
  double sse = 0.0;
  for (Index i = 0; i < m; ++i) sse += (test.y[i] - pred[i]) * (test.y[i] - pred[i]);
  return sse / static_cast<double>(m);
}

MetricsReport predict_metrics(const SolveResult& result, const Dataset& test) {
  MetricsReport r;
  r.classification = test.task == Task::classification;
  r.metric = predict_metric(result.w, test);
  r.f = result.f;
  r.residual = result.residual;
  r.iterations = result.iterations;
  r.ge = result.ge;
  r.cg = result.cg;
  r.wall_time = result.wall_time;
  return r;
}

}  // namespace l0acc::cli
