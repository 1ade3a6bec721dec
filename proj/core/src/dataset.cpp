#include "l0acc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <string_view>

#include "l0acc/errors.hpp"

namespace l0acc {

namespace {

// Row-ordered triplets straight out of the text.
struct RawRows {
  std::vector<double> labels;
  std::vector<Index> row;
  std::vector<Index> col;
  std::vector<double> val;
  Index max_index = 0;  // 1-based; 0 when no feature was seen
};

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_index(std::string_view tok, long long& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

RawRows read_raw(std::istream& in) {
  RawRows raw;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<Index, double>> feats;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
    if (sv.empty()) continue;

    feats.clear();
    double label = 0.0;
    bool first = true;
    while (!sv.empty()) {
      const auto end = std::find_if(sv.begin(), sv.end(),
                                    [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
      const std::string_view tok(sv.data(), static_cast<std::size_t>(end - sv.begin()));
      sv.remove_prefix(tok.size());
      while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);

      const auto colon = tok.find(':');
      if (first && colon == std::string_view::npos) {
        if (!parse_double(tok, label) || !std::isfinite(label))
          throw ParseError(line_no, "malformed label '" + std::string(tok) + "'");
        first = false;
        continue;
      }
      first = false;
      if (colon == std::string_view::npos)
        throw ParseError(line_no, "expected index:value, got '" + std::string(tok) + "'");
      long long idx = 0;
      if (!parse_index(tok.substr(0, colon), idx))
        throw ParseError(line_no, "malformed index in '" + std::string(tok) + "'");
      if (idx <= 0) throw ParseError(line_no, "feature indices are 1-based, got " + std::to_string(idx));
      double v = 0.0;
      if (!parse_double(tok.substr(colon + 1), v))
        throw ParseError(line_no, "malformed value in '" + std::string(tok) + "'");
      if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value in '" + std::string(tok) + "'");
      feats.emplace_back(static_cast<Index>(idx - 1), v);
    }

    std::sort(feats.begin(), feats.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < feats.size(); ++k)
      if (feats[k].first == feats[k - 1].first)
        throw ParseError(line_no, "duplicate feature index " + std::to_string(feats[k].first + 1));

    const Index r = raw.labels.size();
    raw.labels.push_back(label);
    for (const auto& [c, v] : feats) {
      raw.max_index = std::max(raw.max_index, c + 1);
      if (v == 0.0) continue;
      raw.row.push_back(r);
      raw.col.push_back(c);
      raw.val.push_back(v);
    }
  }
  return raw;
}

DesignMatrix build_csc(const RawRows& raw, Index cols) {
  const Index rows = raw.labels.size();
  std::vector<Index> ptr(cols + 1, 0);
  for (Index c : raw.col) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  std::vector<Index> idx(raw.val.size());
  std::vector<double> val(raw.val.size());
  // Triplets arrive in row order, so rows stay sorted inside each column.
  for (std::size_t t = 0; t < raw.val.size(); ++t) {
    const Index p = next[raw.col[t]]++;
    idx[p] = raw.row[t];
    val[p] = raw.val[t];
  }
  return DesignMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

struct LabelMap {
  double negative_below_or_equal = 0.0;  // labels <= this map to -1
};

LabelMap binary_label_map(const std::set<double>& distinct) {
  if (distinct.size() > 2)
    throw ConfigError("labels take " + std::to_string(distinct.size()) +
                      " distinct values; binary classification needs at most 2");
  if (distinct.empty()) return {0.0};
  if (distinct.size() == 1) return {0.0};
  const double lo = *distinct.begin();
  const double hi = *distinct.rbegin();
  if (lo == -1.0 && hi == 1.0) return {0.0};
  return {lo};
}

Dataset finish(const RawRows& raw, LabelPolicy policy, Index cols, const LabelMap& map) {
  Dataset d{build_csc(raw, cols), raw.labels, Task::regression};
  if (policy == LabelPolicy::binary) {
    d.task = Task::classification;
    for (double& y : d.y) y = (y <= map.negative_below_or_equal) ? -1.0 : 1.0;
  }
  return d;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, LabelPolicy policy, Index min_cols) {
  const RawRows raw = read_raw(in);
  const LabelMap map = policy == LabelPolicy::binary
                           ? binary_label_map({raw.labels.begin(), raw.labels.end()})
                           : LabelMap{};
  return finish(raw, policy, std::max(raw.max_index, min_cols), map);
}

Dataset load_libsvm(const std::filesystem::path& path, LabelPolicy policy, Index min_cols) {
  auto in = open_or_throw(path);
  return parse_libsvm(in, policy, min_cols);
}

std::pair<Dataset, Dataset> load_libsvm_pair(const std::filesystem::path& train,
                                             const std::filesystem::path& test,
                                             LabelPolicy policy) {
  auto in_train = open_or_throw(train);
  auto in_test = open_or_throw(test);
  const RawRows a = read_raw(in_train);
  const RawRows b = read_raw(in_test);
  const Index cols = std::max(a.max_index, b.max_index);
  LabelMap map{};
  if (policy == LabelPolicy::binary) {
    std::set<double> distinct(a.labels.begin(), a.labels.end());
    distinct.insert(b.labels.begin(), b.labels.end());
    map = binary_label_map(distinct);
  }
  return {finish(a, policy, cols, map), finish(b, policy, cols, map)};
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  const DesignMatrix& X = data.X;
  // Transpose to row lists; columns are visited in order so each row stays sorted.
  std::vector<std::vector<std::pair<Index, double>>> rows(X.rows());
  for (Index j = 0; j < X.cols(); ++j) {
    const auto col = X.column(j);
    for (std::size_t p = 0; p < col.rows.size(); ++p) rows[col.rows[p]].emplace_back(j, col.values[p]);
  }
  const auto old_prec = out.precision(17);
  for (Index i = 0; i < X.rows(); ++i) {
    out << data.y[i];
    for (const auto& [j, v] : rows[i]) out << ' ' << (j + 1) << ':' << v;
    out << '\n';
  }
  out.precision(old_prec);
}

Dataset select_rows(const Dataset& data, std::span<const Index> rows) {
  const DesignMatrix& X = data.X;
  std::vector<Index> new_of(X.rows(), X.rows());
  std::vector<double> y;
  y.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= X.rows()) throw ContractError("row index out of range");
    new_of[rows[r]] = r;
    y.push_back(data.y[rows[r]]);
  }
  std::vector<Index> ptr(X.cols() + 1, 0);
  std::vector<Index> idx;
  std::vector<double> val;
  std::vector<std::pair<Index, double>> buf;
  for (Index j = 0; j < X.cols(); ++j) {
    buf.clear();
    const auto col = X.column(j);
    for (std::size_t p = 0; p < col.rows.size(); ++p)
      if (const Index nr = new_of[col.rows[p]]; nr < rows.size()) buf.emplace_back(nr, col.values[p]);
    std::sort(buf.begin(), buf.end());
    for (const auto& [r, v] : buf) {
      idx.push_back(r);
      val.push_back(v);
    }
    ptr[j + 1] = val.size();
  }
  return {DesignMatrix(rows.size(), X.cols(), std::move(ptr), std::move(idx), std::move(val)),
          std::move(y), data.task};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double fraction,
                                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");
  const Index m = data.rows();
  if (m < 2) throw ConfigError("need at least two rows to split");
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto first = std::min<Index>(m, static_cast<Index>(std::ceil(fraction * m - 1e-9)));
  const std::span<const Index> all(perm);
  return {select_rows(data, all.first(first)), select_rows(data, all.subspan(first))};
}

}  // namespace l0acc
