#include "l0acc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace l0acc {

namespace {

struct Draw {
  DesignMatrix X;
  std::vector<double> w_true;
  std::vector<double> Xw;
};

Draw draw_design(const SyntheticOptions& o, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> factor(o.rows);
  for (double& f : factor) f = normal(rng);

  std::vector<double> dense(o.rows * o.cols, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.rows));
  for (Index i = 0; i < o.rows; ++i)
    for (Index j = 0; j < o.cols; ++j)
      if (o.density >= 1.0 || unif(rng) < o.density)
        dense[i * o.cols + j] = scale * (normal(rng) + o.shared_factor * factor[i]) + o.offset;

  std::vector<Index> perm(o.cols);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> w(o.cols, 0.0);
  for (Index k = 0; k < std::min(o.planted, o.cols); ++k) {
    const double mag = 1.0 + unif(rng);
    w[perm[k]] = unif(rng) < 0.5 ? -mag : mag;
  }
  DesignMatrix X = DesignMatrix::from_dense(o.rows, o.cols, dense);
  std::vector<double> Xw = matvec(X, w);
  return {std::move(X), std::move(w), std::move(Xw)};
}

}  // namespace

SyntheticProblem make_regression(const SyntheticOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  Draw d = draw_design(opts, rng);
  std::normal_distribution<double> normal(0.0, opts.noise);
  for (double& v : d.Xw) v += normal(rng);
  return {{std::move(d.X), std::move(d.Xw), Task::regression}, std::move(d.w_true)};
}

SyntheticProblem make_classification(const SyntheticOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  Draw d = draw_design(opts, rng);
  std::normal_distribution<double> normal(0.0, opts.noise);
  for (double& v : d.Xw) v = (v + normal(rng)) >= 0.0 ? 1.0 : -1.0;
  return {{std::move(d.X), std::move(d.Xw), Task::classification}, std::move(d.w_true)};
}

Dataset make_colon_surrogate(std::uint64_t seed) {
  SyntheticOptions o;
  o.rows = 50;
  o.cols = 2000;
  o.planted = 10;
  o.noise = 0.5;
  o.shared_factor = 2.0;
  o.offset = 0.3;
  o.seed = seed;
  std::mt19937_64 rng(seed);
  Draw d = draw_design(o, rng);
  std::normal_distribution<double> normal(0.0, o.noise);
  for (double& v : d.Xw) v = (v + normal(rng)) >= 0.0 ? 1.0 : -1.0;
  return {std::move(d.X), std::move(d.Xw), Task::regression};
}

}  // namespace l0acc
