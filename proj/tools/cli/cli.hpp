#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "l0acc/dataset.hpp"
#include "l0acc/model.hpp"
#include "l0acc/solvers.hpp"

namespace l0acc::cli {

enum class Command { solve, bench, transition };

struct SparsitySpec {
  enum class Kind { absolute, fraction, grid };
  Kind kind = Kind::absolute;
  Index count = 0;
  double fraction = 0.0;
  std::vector<double> grid;
};

struct RunSpec {
  Command command = Command::solve;
  std::filesystem::path data_path;
  std::optional<std::filesystem::path> test_path;
  std::optional<double> split;  // train fraction when no test file is given
  Loss loss = Loss::least_squares;
  SparsitySpec sparsity;
  std::vector<Algorithm> algorithms;
  double tol = 1e-6;
  int max_iter = 10000;
  SpectralMode spectral = SpectralMode::exact;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> out_path;
  std::optional<std::filesystem::path> table_path;
  int threads = 1;
};

/// ceil(fraction * m), at least 1.
Index resolve_sparsity(double fraction, Index m);

struct MetricsReport {
  bool classification = false;
  double metric = 0.0;  // accuracy in [0, 1] or mean-squared error
  double f = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::int64_t ge = 0;
  std::int64_t cg = 0;
  double wall_time = 0.0;
};

/// Accuracy with sign(0) = +1 for classification, MSE for regression.
/// Throws ConfigError when w is wider than the test set.
double predict_metric(const SparseIterate& w, const Dataset& test);
MetricsReport predict_metrics(const SolveResult& result, const Dataset& test);

inline constexpr const char* kTraceHeader =
    "k,step_type,f,residual,t_k,support_changed,ge_cum,cg_cum";
inline constexpr const char* kBenchHeader =
    "dataset,algorithm,s,cpu_seconds,ge,cg,metric,converged";
inline constexpr const char* kTransitionHeader =
    "fraction,s,algorithm,cpu_seconds,ge,cg,converged,s_clamped";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

/// n, s, support (0-based), values, f, residual, iterations, ge, cg, status.
nlohmann::json result_to_json(const SolveResult& result, Index s);

struct StoredResult {
  Index n = 0;
  Index s = 0;
  SparseIterate w;
  double f = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::int64_t ge = 0;
  std::int64_t cg = 0;
  std::string status;
};

StoredResult result_from_json(const nlohmann::json& j);
StoredResult load_result(const std::filesystem::path& path);

/// Train (and optional test) data for a run; the test part comes from the
/// test file, an explicit split, or is empty.
struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;
  std::string name;
};
LoadedData load_data(const RunSpec& spec);

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_bench(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_transition(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l0acc::cli
