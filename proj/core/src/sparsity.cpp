#include "l0acc/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "l0acc/errors.hpp"

namespace l0acc {

SparseIterate SparseIterate::from_dense(std::span<const double> dense) {
  SparseIterate w = zeros(dense.size());
  for (Index i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      w.support.push_back(i);
      w.values.push_back(dense[i]);
    }
  }
  return w;
}

void SparseIterate::validate() const {
  if (support.size() != values.size()) throw ContractError("support / values length mismatch");
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= dim) throw ContractError("support index out of range");
    if (k > 0 && support[k] <= support[k - 1])
      throw ContractError("support must be strictly increasing");
  }
}

std::vector<double> SparseIterate::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < support.size(); ++k) out[support[k]] = values[k];
  return out;
}

double SparseIterate::squared_norm() const {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

double SparseIterate::norm() const { return std::sqrt(squared_norm()); }

Index SparseIterate::nonzeros() const {
  return static_cast<Index>(std::count_if(values.begin(), values.end(),
                                          [](double v) { return v != 0.0; }));
}

double SparseIterate::at(Index i) const {
  const auto it = std::lower_bound(support.begin(), support.end(), i);
  if (it == support.end() || *it != i) return 0.0;
  return values[static_cast<std::size_t>(it - support.begin())];
}

ProjectionOutcome project_topk(std::span<const double> v, Index s) {
  if (s < 1) throw ContractError("sparsity level must be >= 1");
  const Index n = v.size();
  ProjectionOutcome out;
  out.point.dim = n;
  if (s >= n) {
    out.selected.indices.resize(n);
    for (Index i = 0; i < n; ++i) out.selected.indices[i] = i;
    out.point.support = out.selected.indices;
    out.point.values.assign(v.begin(), v.end());
    out.unique = true;
    return out;
  }

  std::vector<double> mags(n);
  for (Index i = 0; i < n; ++i) mags[i] = std::abs(v[i]);
  std::vector<double> scratch = mags;
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(s - 1),
                   scratch.end(), std::greater<>());
  const double tau = scratch[s - 1];

  Index above = 0;
  Index at_or_above = 0;
  for (double m : mags) {
    above += (m > tau);
    at_or_above += (m >= tau);
  }
  out.unique = (at_or_above == s);

  Index ties_left = s - above;
  out.selected.indices.reserve(s);
  out.point.support.reserve(s);
  out.point.values.reserve(s);
  for (Index i = 0; i < n; ++i) {
    bool take = mags[i] > tau;
    if (!take && mags[i] == tau && ties_left > 0) {
      take = true;
      --ties_left;
    }
    if (take) {
      out.selected.indices.push_back(i);
      out.point.support.push_back(i);
      out.point.values.push_back(v[i]);
    }
  }
  return out;
}

bool same_support(const SupportSet& a, const SupportSet& b) { return a.indices == b.indices; }

SupportSet support_of(const SparseIterate& w) { return {w.support}; }

SparseIterate restrict_to(const SparseIterate& w, const SupportSet& J) {
  SparseIterate out;
  out.dim = w.dim;
  out.support = J.indices;
  out.values.resize(J.size());
  for (std::size_t k = 0; k < J.size(); ++k) out.values[k] = w.at(J.indices[k]);
  return out;
}

}  // namespace l0acc
