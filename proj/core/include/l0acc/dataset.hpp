#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "l0acc/design_matrix.hpp"

namespace l0acc {

enum class Task { regression, classification };

struct Dataset {
  DesignMatrix X;
  std::vector<double> y;
  Task task = Task::regression;

  Index rows() const noexcept { return X.rows(); }
  Index cols() const noexcept { return X.cols(); }
};

/// How raw labels are turned into targets.
///
/// `passthrough` keeps them as real-valued regression targets. `binary` maps
/// them onto {-1, +1}: labels already in {-1, +1} are kept, otherwise the
/// smaller of two distinct values becomes -1 and the larger +1. A single
/// distinct value maps by its sign (> 0 is +1). More than two distinct values
/// is a ConfigError, since the data is not a binary classification set.
enum class LabelPolicy { passthrough, binary };

/// Parses LIBSVM text ("label idx:val idx:val ..."). Indices are 1-based in the
/// text and 0-based in memory. Lines starting with '#' and blank lines are
/// skipped; a trailing '\r' is tolerated. The number of columns is the largest
/// index seen, or `min_cols` if that is larger. Throws ParseError.
Dataset parse_libsvm(std::istream& in, LabelPolicy policy, Index min_cols = 0);
Dataset load_libsvm(const std::filesystem::path& path, LabelPolicy policy, Index min_cols = 0);

/// Loads a train/test pair so that both share one column count (the largest
/// index across both files) and one label mapping.
std::pair<Dataset, Dataset> load_libsvm_pair(const std::filesystem::path& train,
                                             const std::filesystem::path& test,
                                             LabelPolicy policy);

/// Writes LIBSVM text. Values are printed with round-trip precision; exact
/// zeros are not stored and so are not written.
void write_libsvm(std::ostream& out, const Dataset& data);

/// Deterministic shuffled split. The first part gets ceil(fraction * m) rows.
/// Both parts keep the full column count.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double fraction,
                                             std::uint64_t seed);

/// Rows `rows` of `data`, in the given order.
Dataset select_rows(const Dataset& data, std::span<const Index> rows);

}  // namespace l0acc
