#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli/cli.hpp"
#include "l0acc/errors.hpp"
#include "l0acc/projected_gradient.hpp"
#include "support/oracles.hpp"

using namespace l0acc;
using namespace l0acc::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kData = L0ACC_DATA_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "l0acc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("l0acc_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return lines_of(ss.str());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("sparsity from a fraction") {
  CHECK(cli::resolve_sparsity(0.01, 50) == 1);
  CHECK(cli::resolve_sparsity(0.05, 100) == 5);
  CHECK(cli::resolve_sparsity(0.1, 72) == 8);
  CHECK(cli::resolve_sparsity(1e-6, 10) == 1);
}

TEST_CASE("prediction metrics") {
  const Dataset cls{DesignMatrix::from_dense(4, 1, std::vector{1.0, -1.0, 2.0, -3.0}),
                    {1.0, -1.0, 1.0, -1.0}, Task::classification};
  CHECK(cli::predict_metric(SparseIterate{{0}, {0.5}, 1}, cls) == 1.0);
  CHECK(cli::predict_metric(SparseIterate::zeros(1), cls) == 0.5);

  const Dataset reg{DesignMatrix::from_dense(2, 2, std::vector{1.0, 0.0, 0.0, 1.0}), {3.0, 1.0},
                    Task::regression};
  CHECK(cli::predict_metric(SparseIterate{{0, 1}, {3.0, 1.0}, 2}, reg) == 0.0);
  CHECK(cli::predict_metric(SparseIterate{{0}, {3.0}, 2}, reg) == 0.5);
  CHECK(cli::predict_metric(SparseIterate::zeros(3), reg) == 5.0);
  CHECK_THROWS_AS(cli::predict_metric(SparseIterate{{2}, {1.0}, 3}, reg), ConfigError);
}

TEST_CASE("solve writes a result that reproduces f and residual") {
  TempDir tmp;
  const auto result = tmp.path / "r.json";
  const auto trace = tmp.path / "t.csv";
  const auto r = run_cli({"solve", "--data", (kData / "tiny_ls.svm").string(), "--loss", "ls",
                          "--s", "2", "--alg", "apg+", "--out", result.string(), "--trace",
                          trace.string()});
  CHECK(r.code == 0);

  const auto stored = cli::load_result(result);
  CHECK(stored.status == "converged");
  CHECK(stored.s == 2);
  CHECK(stored.residual < 1e-6);
  CHECK(stored.ge == stored.iterations + 1);

  const Dataset data = load_libsvm(kData / "tiny_ls.svm", LabelPolicy::passthrough);
  const Model model(data, LossSpec::least_squares());
  CHECK(stored.n == model.cols());
  const auto st = make_state(model, stored.w);
  CHECK(std::abs(st.f - stored.f) <= 1e-10 * (1.0 + std::abs(stored.f)));
  const double lambda = 0.999 / lipschitz_estimate(model);
  CHECK(std::abs(residual(model, st, lambda, 2) - stored.residual) <= 1e-10);

  const auto rows = read_lines(trace);
  REQUIRE(rows.size() == static_cast<std::size_t>(stored.iterations) + 2);
  CHECK(rows[0] == cli::kTraceHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split_csv(rows[i]);
    REQUIRE(cells.size() == 8);
    CHECK(std::stoi(cells[0]) == static_cast<int>(i) - 1);
    CHECK(std::stoll(cells[6]) == static_cast<long long>(i));
  }
}

TEST_CASE("solve exit codes") {
  CHECK(run_cli({"solve", "--data", "/nonexistent/file.svm", "--s", "1"}).code == 1);
  CHECK(run_cli({"solve", "--data", (kData / "tiny_ls.svm").string(), "--s", "2", "--alg", "pg",
                 "--max-iter", "1"})
            .code == 2);
  CHECK(run_cli({"solve", "--data", (kData / "tiny_ls.svm").string(), "--s", "2", "--alg", "pg,apg"})
            .code == 1);
  CHECK(run_cli({"solve", "--data", (kData / "tiny_ls.svm").string(), "--s", "2", "--alg", "ista"})
            .code == 1);
  CHECK(run_cli({"frobnicate"}).code != 0);
  CHECK(run_cli({"solve", "--data", (kData / "tiny_ls.svm").string()}).code == 1);
}

TEST_CASE("solve reports test metrics") {
  const auto r = run_cli({"solve", "--data", (kData / "tiny_cls.svm").string(), "--loss",
                          "logistic", "--s", "2", "--split", "0.8", "--seed", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("accuracy") != std::string::npos);
}

TEST_CASE("bench emits one row per algorithm") {
  TempDir tmp;
  const auto table = tmp.path / "bench.csv";
  const auto r = run_cli({"bench", "--data", (kData / "tiny_ls.svm").string(), "--loss", "ls",
                          "--s", "2", "--alg", "pg,apg,apg+", "--table", table.string(),
                          "--threads", "3"});
  CHECK(r.code == 0);
  const auto rows = read_lines(table);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == cli::kBenchHeader);
  std::vector<long long> ge;
  const char* names[] = {"pg", "apg", "apg+"};
  for (int i = 0; i < 3; ++i) {
    const auto cells = split_csv(rows[i + 1]);
    REQUIRE(cells.size() == 8);
    CHECK(cells[0] == "tiny_ls");
    CHECK(cells[1] == names[i]);
    CHECK(cells[2] == "2");
    CHECK(cells[7] == "1");
    ge.push_back(std::stoll(cells[4]));
  }
  CHECK(ge[1] < ge[0]);
}

TEST_CASE("bench configuration errors") {
  const auto data = (kData / "tiny_ls.svm").string();
  CHECK(run_cli({"bench", "--data", data, "--s", "2", "--alg", ""}).code == 1);
  CHECK(run_cli({"bench", "--data", data, "--loss", "logistic", "--s", "2", "--alg", "pg"}).code == 1);
  CHECK(run_cli({"bench", "--data", data, "--s", "2", "--s-frac", "0.1", "--alg", "pg"}).code != 0);
}

TEST_CASE("transition covers the grid") {
  TempDir tmp;
  const auto table = tmp.path / "tr.csv";
  const auto r = run_cli({"transition", "--data", (kData / "tiny_ls.svm").string(), "--loss", "ls",
                          "--s-grid", "0.2,0.4,0.5", "--alg", "pg,apg", "--table", table.string(),
                          "--threads", "2"});
  CHECK(r.code == 0);
  const auto rows = read_lines(table);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == cli::kTransitionHeader);
  // 24 rows and 8 columns: 0.2 -> 5, 0.4 -> 10 clamped to 8, 0.5 -> 12 clamped to 8.
  const std::vector<std::string> s_expect{"5", "5", "8", "8", "8", "8"};
  const std::vector<std::string> clamp_expect{"0", "0", "1", "1", "1", "1"};
  for (int i = 0; i < 6; ++i) {
    const auto cells = split_csv(rows[i + 1]);
    REQUIRE(cells.size() == 8);
    CHECK(cells[1] == s_expect[i]);
    CHECK(cells[2] == (i % 2 ? "apg" : "pg"));
    CHECK(cells[7] == clamp_expect[i]);
  }
}

TEST_CASE("result json round trip") {
  SolveResult r;
  r.w = SparseIterate{{1, 4}, {0.1 + 0.2, -1.0 / 3.0}, 6};
  r.f = 1.0 / 7.0;
  r.residual = 3.3e-9;
  r.iterations = 12;
  r.ge = 13;
  r.cg = 4;
  r.status = SolveStatus::converged;
  const auto back = cli::result_from_json(cli::result_to_json(r, 2));
  CHECK(back.n == 6);
  CHECK(back.s == 2);
  CHECK(back.w.support == r.w.support);
  CHECK(back.w.values == r.w.values);
  CHECK(back.f == r.f);
  CHECK(back.residual == r.residual);
  CHECK(back.iterations == 12);
  CHECK(back.ge == 13);
  CHECK(back.cg == 4);
  CHECK(back.status == "converged");
}

}  // TEST_SUITE
