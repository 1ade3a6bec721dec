#pragma once

#include <cstdint>
#include <vector>

#include "l0acc/dataset.hpp"

namespace l0acc {

/// Generated problem together with the planted coefficients.
struct SyntheticProblem {
  Dataset data;
  std::vector<double> w_true;
};

struct SyntheticOptions {
  Index rows = 50;
  Index cols = 100;
  Index planted = 5;        // nonzeros in w_true
  double noise = 0.01;      // std-dev of additive noise (regression) or logit noise
  double density = 1.0;     // fraction of stored entries in X
  double shared_factor = 0.0;  // weight of a per-row factor common to every column
  double offset = 0.0;      // constant added to every stored entry
  std::uint64_t seed = 0;
};

/// y = X w_true + noise, Gaussian X.
SyntheticProblem make_regression(const SyntheticOptions& opts);

/// y = sign(X w_true + noise) in {-1, +1}.
SyntheticProblem make_classification(const SyntheticOptions& opts);

/// Dense 50 x 2000 gene-expression-like design (strongly correlated, positive
/// columns) with +-1 targets used as a least-squares regression problem.
/// Stands in for the colon-cancer benchmark at the same shape.
Dataset make_colon_surrogate(std::uint64_t seed = 0);

}  // namespace l0acc
