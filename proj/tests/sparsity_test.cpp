#include "doctest.h"

#include <cmath>

#include "l0acc/errors.hpp"
#include "l0acc/projected_gradient.hpp"
#include "l0acc/sparsity.hpp"
#include "support/oracles.hpp"

using namespace l0acc;
using namespace l0acc::testing;

namespace {

Model identity_ls(std::vector<double> y) {
  return Model({DesignMatrix::from_dense(2, 2, std::vector{1.0, 0.0, 0.0, 1.0}), std::move(y),
                Task::regression},
               LossSpec::least_squares());
}

// Magnitudes drawn from a small grid so that ties are common.
std::vector<double> tie_prone_vector(Rng& rng, Index n) {
  std::uniform_int_distribution<int> level(0, 4);
  std::bernoulli_distribution neg(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = (neg(rng) ? -1.0 : 1.0) * 0.5 * level(rng);
  return v;
}

}  // namespace

TEST_SUITE("sparsity") {

TEST_CASE("project_topk examples") {
  const auto a = project_topk(std::vector{3.0, -5.0, 1.0}, 2);
  CHECK(a.selected.indices == std::vector<Index>{0, 1});
  CHECK(a.point.values == std::vector{3.0, -5.0});
  CHECK(a.unique);

  const auto b = project_topk(std::vector{2.0, -2.0, 1.0}, 1);
  CHECK(b.selected.indices == std::vector<Index>{0});
  CHECK(b.point.values == std::vector{2.0});
  CHECK_FALSE(b.unique);

  const auto c = project_topk(std::vector{0.0, 0.0, 0.0}, 2);
  CHECK(c.selected.indices == std::vector<Index>{0, 1});
  CHECK(c.point.values == std::vector{0.0, 0.0});
  CHECK_FALSE(c.unique);

  const auto d = project_topk(std::vector{1.0, -2.0}, 5);
  CHECK(d.selected.indices == std::vector<Index>{0, 1});
  CHECK(d.unique);

  CHECK_THROWS_AS(project_topk(std::vector{1.0}, 0), ContractError);
}

TEST_CASE("projection is exact against every subset") {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 1 + rng() % 10;
    const auto v = trial % 2 ? tie_prone_vector(rng, n) : gaussian_vector(rng, n);
    for (Index s = 1; s <= std::min<Index>(3, n); ++s) {
      const auto out = project_topk(v, s);
      CHECK(out.selected.size() == s);
      const double got = outside_mass(v, out.selected.indices);
      double best = INFINITY;
      for (const auto& J : all_subsets(n, s)) best = std::min(best, outside_mass(v, J));
      CHECK(got == best);
    }
  }
}

TEST_CASE("uniqueness flag matches a sorted-magnitude oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + rng() % 9;
    const auto v = tie_prone_vector(rng, n);
    const Index s = 1 + rng() % (n - 1);
    std::vector<double> mags;
    for (double x : v) mags.push_back(std::abs(x));
    std::sort(mags.rbegin(), mags.rend());
    CHECK(project_topk(v, s).unique == (mags[s - 1] > mags[s]));
  }
}

TEST_CASE("ties go to the lowest index") {
  const auto out = project_topk(std::vector{1.0, 2.0, -2.0, 2.0, 0.5}, 2);
  CHECK(out.selected.indices == std::vector<Index>{1, 2});
  CHECK_FALSE(out.unique);
}

TEST_CASE("projection is idempotent") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + rng() % 12;
    const auto v = trial % 2 ? tie_prone_vector(rng, n) : gaussian_vector(rng, n);
    const Index s = 1 + rng() % n;
    const auto once = project_topk(v, s);
    const auto twice = project_topk(once.point.to_dense(), s);
    CHECK(twice.point.to_dense() == once.point.to_dense());
    if (once.point.nonzeros() == once.selected.size())
      CHECK(twice.selected == once.selected);
  }
}

TEST_CASE("same_support examples") {
  CHECK(same_support({{0, 2}}, {{0, 2}}));
  CHECK_FALSE(same_support({{0, 2}}, {{0, 1}}));
  const auto a = project_topk(std::vector{1.0, 0.0, 2.0}, 2);
  const auto b = project_topk(std::vector{3.0, 0.0, -1.0}, 2);
  CHECK(same_support(a.selected, b.selected));
}

TEST_CASE("sparse iterate helpers") {
  const SparseIterate w{{1, 3}, {2.0, 0.0}, 5};
  CHECK(w.nonzeros() == 1);
  CHECK(w.at(1) == 2.0);
  CHECK(w.at(2) == 0.0);
  CHECK(w.to_dense() == std::vector{0.0, 2.0, 0.0, 0.0, 0.0});
  CHECK(restrict_to(w, {{0, 1}}).values == std::vector{0.0, 2.0});
  CHECK_THROWS_AS((SparseIterate{{3, 1}, {1.0, 1.0}, 5}.validate()), ContractError);
  CHECK_THROWS_AS((SparseIterate{{5}, {1.0}, 5}.validate()), ContractError);
}

TEST_CASE("pg_step examples") {
  const Model model = identity_ls({3.0, 1.0});
  const auto st = make_state(model, SparseIterate::zeros(2));
  EvalCounters c;
  const auto step = pg_step(model, st, 0.1, 1, &c);
  CHECK(c.gradient_evals == 1);
  CHECK(step.outcome.selected.indices == std::vector<Index>{0});
  CHECK(step.state.w.support == std::vector<Index>{0});
  CHECK(step.state.w.values[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(step.state.f < st.f);

  const auto fixed = make_state(model, SparseIterate{{0}, {3.0}, 2});
  const auto again = pg_step(model, fixed, 0.1, 1);
  CHECK(again.state.w.to_dense() == fixed.w.to_dense());
}

TEST_CASE("pg_step never increases f") {
  Rng rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const Index m = 2 + rng() % 20, n = 2 + rng() % 20;
    const Model model = trial % 2 ? Model(random_regression(rng, m, n), LossSpec::least_squares())
                                  : Model(random_classification(rng, m, n), LossSpec::logistic());
    const double lambda = 0.999 / lipschitz_estimate(model);
    const Index s = 1 + rng() % n;
    auto st = make_state(model, SparseIterate::zeros(n));
    for (int k = 0; k < 20; ++k) {
      auto next = pg_step(model, st, lambda, s);
      CHECK(next.state.f <= st.f + 1e-12 * (1.0 + std::abs(st.f)));
      st = std::move(next.state);
    }
  }
}

TEST_CASE("residual examples") {
  const Model model = identity_ls({1.0, 2.0});
  const double r = residual(model, make_state(model, SparseIterate::zeros(2)), 0.1, 1);
  const double expected = 0.2 / (1.0 + 0.1 * std::sqrt(5.0));
  CHECK(r == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r == doctest::Approx(0.163452).epsilon(1e-5));

  const Model m31 = identity_ls({3.0, 1.0});
  CHECK(residual(m31, make_state(m31, SparseIterate{{0}, {3.0}, 2}), 0.1, 1) == 0.0);
}

TEST_CASE("residual zero status is scale invariant") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 3 + rng() % 5;
    Dataset d = random_regression(rng, 12, n, 1.0);
    const Model model(d, LossSpec::least_squares());
    const auto best = brute_force_best_subset(model, 2);
    const double c = 0.5 + 4.0 * std::uniform_real_distribution<double>()(rng);

    // Scaling X by c and y by c^2 keeps w* stationary with w* scaled by c.
    auto dense_rm = d.X.to_dense_row_major();
    for (auto& x : dense_rm) x *= c;
    Dataset scaled{DesignMatrix::from_dense(d.rows(), n, dense_rm), d.y, Task::regression};
    for (auto& y : scaled.y) y *= c * c;
    const Model smodel(scaled, LossSpec::least_squares());
    SparseIterate ws = best.w;
    for (auto& v : ws.values) v *= c;

    const double lambda = 0.999 / lipschitz_estimate(model);
    const double slambda = 0.999 / lipschitz_estimate(smodel);
    CHECK(residual(model, make_state(model, best.w), lambda, 2) < 1e-9);
    CHECK(residual(smodel, make_state(smodel, ws), slambda, 2) < 1e-9);

    SparseIterate off = best.w;
    off.values[0] += 0.5;
    SparseIterate soff = off;
    for (auto& v : soff.values) v *= c;
    CHECK(residual(model, make_state(model, off), lambda, 2) > 1e-6);
    CHECK(residual(smodel, make_state(smodel, soff), slambda, 2) > 1e-6);
  }
}

TEST_CASE("residual is Lipschitz away from ties") {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + rng() % 8;
    const Model model(random_regression(rng, 15, n, 1.0), LossSpec::least_squares());
    const double lambda = 0.999 / lipschitz_estimate(model);
    const auto w = SparseIterate::from_dense(gaussian_vector(rng, n));
    const auto grad = full_gradient(model, make_state(model, w));
    ProjectionOutcome out;
    const double r0 = residual_from_gradient(w, grad, lambda, 2, &out);
    if (!out.unique) continue;
    const auto dir = gaussian_vector(rng, n);
    for (double delta : {1e-4, 1e-6, 1e-8}) {
      auto wd = w.to_dense();
      for (Index i = 0; i < n; ++i) wd[i] += delta * dir[i];
      const auto w2 = SparseIterate::from_dense(wd);
      const double r1 = residual(model, make_state(model, w2), lambda, 2);
      CHECK(std::abs(r1 - r0) <= 100.0 * delta);
    }
  }
}

TEST_CASE("brute-force oracle examples") {
  const Model model = identity_ls({3.0, 1.0});
  const auto best = brute_force_best_subset(model, 1);
  CHECK(best.support.indices == std::vector<Index>{0});
  CHECK(best.w.at(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(best.w.at(1) == 0.0);
  CHECK(best.f == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(12);
  const Model full(random_regression(rng, 20, 5, 1.0), LossSpec::least_squares());
  const auto all = brute_force_best_subset(full, 5);
  const Eigen::MatrixXd D = dense(full.X());
  const Eigen::VectorXd w = D.colPivHouseholderQr().solve(to_eigen(full.y()));
  CHECK((to_eigen(all.w.to_dense()) - w).norm() < 1e-9 * (1.0 + w.norm()));

  const Model wide(random_regression(rng, 5, 60, 1.0), LossSpec::least_squares());
  CHECK_THROWS_AS(brute_force_best_subset(wide, 10), ConfigError);
}

TEST_CASE("brute-force oracle beats every projected gradient fixed point") {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + rng() % 6;
    const Model model(random_regression(rng, 10, n), LossSpec::least_squares());
    const double lambda = 0.999 / lipschitz_estimate(model);
    const auto best = brute_force_best_subset(model, 2);
    auto st = make_state(model, SparseIterate::zeros(n));
    for (int k = 0; k < 3000; ++k) st = pg_step(model, st, lambda, 2).state;
    CHECK(st.f >= best.f - 1e-8);
  }
}

}  // TEST_SUITE
