#pragma once

// Small dense helpers for the enumeration oracle. Not part of the public API.

#include <cmath>
#include <cstddef>
#include <vector>

namespace l0acc::detail {

/// Solves A x = b for symmetric positive definite row-major A (size k x k) by
/// Cholesky. Returns false if a pivot is not positive.
inline bool cholesky_solve(std::vector<double> A, std::size_t k, std::vector<double>& b) {
  for (std::size_t j = 0; j < k; ++j) {
    double d = A[j * k + j];
    for (std::size_t p = 0; p < j; ++p) d -= A[j * k + p] * A[j * k + p];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    A[j * k + j] = d;
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = A[i * k + j];
      for (std::size_t p = 0; p < j; ++p) s -= A[i * k + p] * A[j * k + p];
      A[i * k + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    double s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= A[i * k + p] * b[p];
    b[i] = s / A[i * k + i];
  }
  for (std::size_t ii = k; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t p = ii + 1; p < k; ++p) s -= A[p * k + ii] * b[p];
    b[ii] = s / A[ii * k + ii];
  }
  return true;
}

}  // namespace l0acc::detail
