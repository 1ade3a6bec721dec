#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace l0acc {

using Index = std::size_t;

/// Immutable m x n sparse matrix in compressed sparse column form.
///
/// Every kernel below touches only the columns it is asked for, so the cost
/// of a call is proportional to the number of stored entries in those columns.
/// Accumulation order is fixed (columns in the order given, rows in storage
/// order), which makes repeated runs bit-identical.
class DesignMatrix {
 public:
  struct Column {
    std::span<const Index> rows;
    std::span<const double> values;
  };

  DesignMatrix() = default;

  /// Validates the CSC invariants and throws ContractError if any is broken.
  DesignMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
               std::vector<Index> row_idx, std::vector<double> values);

  /// Row-major dense input; exact zeros are not stored.
  static DesignMatrix from_dense(Index rows, Index cols, std::span<const double> row_major);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return values_.size(); }

  std::span<const Index> col_ptr() const noexcept { return col_ptr_; }
  std::span<const Index> row_idx() const noexcept { return row_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  Column column(Index j) const {
    const Index b = col_ptr_[j];
    const Index e = col_ptr_[j + 1];
    return {std::span<const Index>(row_idx_).subspan(b, e - b),
            std::span<const double>(values_).subspan(b, e - b)};
  }

  /// Same entries, more (empty) columns. `cols` must be >= the current width.
  DesignMatrix widened(Index cols) const;

  std::vector<double> to_dense_row_major() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

// Column-restricted kernels. `cols` must be sorted ascending with every entry
// < X.cols(); violations throw ContractError.

/// X[:, cols] * v.
std::vector<double> matvec_cols(const DesignMatrix& X, std::span<const Index> cols,
                                std::span<const double> v);
void matvec_cols_into(const DesignMatrix& X, std::span<const Index> cols,
                      std::span<const double> v, std::span<double> out);

/// (X^T u) restricted to `cols`.
std::vector<double> transpose_matvec_cols(const DesignMatrix& X, std::span<const Index> cols,
                                          std::span<const double> u);
void transpose_matvec_cols_into(const DesignMatrix& X, std::span<const Index> cols,
                                std::span<const double> u, std::span<double> out);

/// Full X^T u over every column.
std::vector<double> transpose_matvec(const DesignMatrix& X, std::span<const double> u);

/// Full X * v with a dense v of length n.
std::vector<double> matvec(const DesignMatrix& X, std::span<const double> v);

/// diag_k = sum_i wts_i * X[i, cols[k]]^2.
std::vector<double> col_weighted_sqnorms(const DesignMatrix& X, std::span<const Index> cols,
                                         std::span<const double> wts);

}  // namespace l0acc
