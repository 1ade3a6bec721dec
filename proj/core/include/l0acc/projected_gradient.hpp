#pragma once

#include <cstdint>
#include <span>

#include "l0acc/model.hpp"
#include "l0acc/sparsity.hpp"

namespace l0acc {

/// P_{A_s}(w - lambda * grad).
ProjectionOutcome gradient_projection(const SparseIterate& w, std::span<const double> grad,
                                      double lambda, Index s);

struct PgStep {
  LinearState state;
  ProjectionOutcome outcome;
};

/// One projected gradient (IHT) step. Evaluates the full gradient once and
/// builds the new state from scratch.
PgStep pg_step(const Model& model, const LinearState& state, double lambda, Index s,
               EvalCounters* counters = nullptr);

/// Scaled fixed-point gap
///   ||w - P(w - lambda g)|| / (1 + ||w|| + lambda ||g||)
/// for a gradient `grad` already evaluated at w. Optionally hands back the
/// projection it computed.
double residual_from_gradient(const SparseIterate& w, std::span<const double> grad,
                              double lambda, Index s, ProjectionOutcome* outcome = nullptr);

/// Same, evaluating the gradient (one GE).
double residual(const Model& model, const LinearState& state, double lambda, Index s,
                EvalCounters* counters = nullptr);

/// Minimizer of f restricted to A_J by damped Newton on the dense |J| x |J|
/// Hessian, run until ||grad f_J|| <= 1e-12 or no further progress.
SparseIterate minimize_on_support(const Model& model, const SupportSet& J);

struct BestSubset {
  SupportSet support;
  SparseIterate w;
  double f = 0.0;
};

/// Global minimizer over every |J| = min(s, n) by enumeration. Refuses with
/// ConfigError when C(n, s) exceeds `max_subsets`.
BestSubset brute_force_best_subset(const Model& model, Index s,
                                   std::uint64_t max_subsets = 100000);

}  // namespace l0acc
