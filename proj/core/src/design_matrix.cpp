#include "l0acc/design_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l0acc/errors.hpp"

namespace l0acc {

namespace {

void check_cols(const DesignMatrix& X, std::span<const Index> cols) {
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] >= X.cols())
      throw ContractError("column index " + std::to_string(cols[k]) + " out of range");
    if (k > 0 && cols[k] <= cols[k - 1])
      throw ContractError("column list must be strictly increasing");
  }
}

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw ContractError(std::string(what) + ": expected length " + std::to_string(want) +
                        ", got " + std::to_string(got));
}

}  // namespace

DesignMatrix::DesignMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
                           std::vector<Index> row_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  if (col_ptr_.size() != cols_ + 1) throw ContractError("col_ptr must have n + 1 entries");
  if (col_ptr_.front() != 0) throw ContractError("col_ptr[0] must be 0");
  if (row_idx_.size() != values_.size()) throw ContractError("row_idx / values length mismatch");
  if (col_ptr_.back() != values_.size()) throw ContractError("col_ptr[n] must equal nnz");
  for (Index j = 0; j < cols_; ++j) {
    if (col_ptr_[j + 1] < col_ptr_[j]) throw ContractError("col_ptr must be nondecreasing");
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] >= rows_) throw ContractError("row index out of range");
      if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1])
        throw ContractError("row indices must increase within a column");
      if (!std::isfinite(values_[p])) throw ContractError("non-finite matrix entry");
    }
  }
}

DesignMatrix DesignMatrix::from_dense(Index rows, Index cols, std::span<const double> row_major) {
  check_len(row_major.size(), rows * cols, "dense matrix");
  std::vector<Index> ptr(cols + 1, 0);
  std::vector<Index> idx;
  std::vector<double> val;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double x = row_major[i * cols + j];
      if (x != 0.0) {
        idx.push_back(i);
        val.push_back(x);
      }
    }
    ptr[j + 1] = val.size();
  }
  return DesignMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

DesignMatrix DesignMatrix::widened(Index cols) const {
  if (cols < cols_) throw ContractError("cannot narrow a design matrix");
  std::vector<Index> ptr = col_ptr_;
  ptr.resize(cols + 1, ptr.back());
  return DesignMatrix(rows_, cols, std::move(ptr), row_idx_, values_);
}

std::vector<double> DesignMatrix::to_dense_row_major() const {
  std::vector<double> out(rows_ * cols_, 0.0);
  for (Index j = 0; j < cols_; ++j)
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) out[row_idx_[p] * cols_ + j] = values_[p];
  return out;
}

void matvec_cols_into(const DesignMatrix& X, std::span<const Index> cols,
                      std::span<const double> v, std::span<double> out) {
  check_cols(X, cols);
  check_len(v.size(), cols.size(), "matvec_cols coefficient vector");
  check_len(out.size(), X.rows(), "matvec_cols output");
  std::fill(out.begin(), out.end(), 0.0);
  const auto ptr = X.col_ptr();
  const auto idx = X.row_idx();
  const auto val = X.values();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const double c = v[k];
    if (c == 0.0) continue;
    for (Index p = ptr[cols[k]]; p < ptr[cols[k] + 1]; ++p) out[idx[p]] += val[p] * c;
  }
}

std::vector<double> matvec_cols(const DesignMatrix& X, std::span<const Index> cols,
                                std::span<const double> v) {
  std::vector<double> out(X.rows());
  matvec_cols_into(X, cols, v, out);
  return out;
}

void transpose_matvec_cols_into(const DesignMatrix& X, std::span<const Index> cols,
                                std::span<const double> u, std::span<double> out) {
  check_cols(X, cols);
  check_len(u.size(), X.rows(), "transpose_matvec_cols input");
  check_len(out.size(), cols.size(), "transpose_matvec_cols output");
  const auto ptr = X.col_ptr();
  const auto idx = X.row_idx();
  const auto val = X.values();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    double acc = 0.0;
    for (Index p = ptr[cols[k]]; p < ptr[cols[k] + 1]; ++p) acc += val[p] * u[idx[p]];
    out[k] = acc;
  }
}

std::vector<double> transpose_matvec_cols(const DesignMatrix& X, std::span<const Index> cols,
                                          std::span<const double> u) {
  std::vector<double> out(cols.size());
  transpose_matvec_cols_into(X, cols, u, out);
  return out;
}

std::vector<double> transpose_matvec(const DesignMatrix& X, std::span<const double> u) {
  check_len(u.size(), X.rows(), "transpose_matvec input");
  std::vector<double> out(X.cols());
  const auto ptr = X.col_ptr();
  const auto idx = X.row_idx();
  const auto val = X.values();
  for (Index j = 0; j < X.cols(); ++j) {
    double acc = 0.0;
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) acc += val[p] * u[idx[p]];
    out[j] = acc;
  }
  return out;
}

std::vector<double> matvec(const DesignMatrix& X, std::span<const double> v) {
  check_len(v.size(), X.cols(), "matvec input");
  std::vector<double> out(X.rows(), 0.0);
  const auto ptr = X.col_ptr();
  const auto idx = X.row_idx();
  const auto val = X.values();
  for (Index j = 0; j < X.cols(); ++j) {
    if (v[j] == 0.0) continue;
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) out[idx[p]] += val[p] * v[j];
  }
  return out;
}

std::vector<double> col_weighted_sqnorms(const DesignMatrix& X, std::span<const Index> cols,
                                         std::span<const double> wts) {
  check_cols(X, cols);
  check_len(wts.size(), X.rows(), "col_weighted_sqnorms weights");
  std::vector<double> out(cols.size());
  const auto ptr = X.col_ptr();
  const auto idx = X.row_idx();
  const auto val = X.values();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    double acc = 0.0;
    for (Index p = ptr[cols[k]]; p < ptr[cols[k] + 1]; ++p) acc += wts[idx[p]] * val[p] * val[p];
    out[k] = acc;
  }
  return out;
}

}  // namespace l0acc
