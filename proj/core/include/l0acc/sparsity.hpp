#pragma once

#include <span>
#include <vector>

#include "l0acc/design_matrix.hpp"

namespace l0acc {

/// Sorted, duplicate-free index set J. Names one subspace A_J of the sparsity set.
struct SupportSet {
  std::vector<Index> indices;

  Index size() const noexcept { return indices.size(); }
  bool operator==(const SupportSet&) const = default;
};

/// Point of R^n stored on an explicit coordinate list.
///
/// `support` may list coordinates whose value is zero: iterates produced by the
/// projection keep the full selected set so that consecutive iterates can be
/// compared subspace-for-subspace.
struct SparseIterate {
  std::vector<Index> support;
  std::vector<double> values;
  Index dim = 0;

  static SparseIterate zeros(Index n) { return {{}, {}, n}; }
  /// Keeps exactly the nonzero entries of `dense`.
  static SparseIterate from_dense(std::span<const double> dense);

  /// Throws ContractError unless support is strictly increasing, in range and
  /// the same length as values.
  void validate() const;

  std::vector<double> to_dense() const;
  double squared_norm() const;
  double norm() const;
  Index nonzeros() const;
  /// Value at coordinate `i` (zero when i is not listed).
  double at(Index i) const;
};

struct ProjectionOutcome {
  SparseIterate point;
  SupportSet selected;
  /// The s-th and (s+1)-th largest magnitudes differ strictly, i.e. the
  /// projection is single-valued at the input.
  bool unique = true;
};

/// Euclidean projection onto {w : ||w||_0 <= s}: keep the s largest
/// magnitudes, ties going to the lowest index. `selected` always holds
/// min(s, n) indices, and `point` is stored on exactly that list.
ProjectionOutcome project_topk(std::span<const double> v, Index s);

/// Both iterates live in the same subspace A_J.
bool same_support(const SupportSet& a, const SupportSet& b);

/// The coordinate list of `w` viewed as a support set.
SupportSet support_of(const SparseIterate& w);

/// Restriction of `w` to `J` (P_{A_J}(w)), stored on exactly J.
SparseIterate restrict_to(const SparseIterate& w, const SupportSet& J);

}  // namespace l0acc
