#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli/cli.hpp"
#include "l0acc/errors.hpp"

namespace l0acc::cli {

namespace {

LossSpec loss_spec(Loss loss) {
  return loss == Loss::logistic ? LossSpec::logistic() : LossSpec::least_squares();
}

// Runs jobs 0..count-1 on up to `threads` workers. Results land by index, so
// output order never depends on completion order.
void run_jobs(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
}

struct Timed {
  double L = 0.0;
  double seconds = 0.0;
};

Timed estimate_lipschitz(const Model& model) {
  const auto t0 = std::chrono::steady_clock::now();
  const double L = lipschitz_estimate(model);
  const auto t1 = std::chrono::steady_clock::now();
  return {L, std::chrono::duration<double>(t1 - t0).count()};
}

SolverConfig make_config(const RunSpec& spec, Algorithm alg, Index s, double lambda) {
  SolverConfig c;
  c.algorithm = alg;
  c.s = s;
  c.lambda = lambda;
  c.eps_hat = spec.tol;
  c.max_iter = spec.max_iter;
  c.spectral_mode = spec.spectral;
  return c;
}

Index single_sparsity(const RunSpec& spec, Index m) {
  switch (spec.sparsity.kind) {
    case SparsitySpec::Kind::absolute:
      if (spec.sparsity.count < 1) throw ConfigError("--s must be >= 1");
      return spec.sparsity.count;
    case SparsitySpec::Kind::fraction: return resolve_sparsity(spec.sparsity.fraction, m);
    case SparsitySpec::Kind::grid: break;
  }
  throw ConfigError("this command takes --s or --s-frac, not --s-grid");
}

// Writes a CSV table to --table, or to `out` when no path was given.
void emit_table(const RunSpec& spec, const std::string& text, std::ostream& out) {
  if (spec.table_path) {
    std::ofstream f(*spec.table_path);
    if (!f) throw std::runtime_error("cannot write '" + spec.table_path->string() + "'");
    f << text;
  } else {
    out << text;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

LoadedData load_data(const RunSpec& spec) {
  const LabelPolicy policy = spec.loss == Loss::logistic ? LabelPolicy::binary : LabelPolicy::passthrough;
  LoadedData d;
  d.name = spec.data_path.stem().string();
  if (spec.test_path) {
    auto [train, test] = load_libsvm_pair(spec.data_path, *spec.test_path, policy);
    d.train = std::move(train);
    d.test = std::move(test);
  } else {
    d.train = load_libsvm(spec.data_path, policy);
    if (spec.split) {
      auto [train, test] = split_train_test(d.train, *spec.split, spec.seed);
      d.train = std::move(train);
      d.test = std::move(test);
    }
  }
  return d;
}

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.algorithms.size() > 1) throw ConfigError("solve runs exactly one algorithm");
    const Algorithm alg = spec.algorithms.empty() ? Algorithm::apg_plus : spec.algorithms.front();
    LoadedData data = load_data(spec);
    const Model model(std::move(data.train), loss_spec(spec.loss));
    const Index s = single_sparsity(spec, model.rows());
    const Timed lip = estimate_lipschitz(model);
    out << "lipschitz_estimate " << lip.L << " (" << lip.seconds << " s)\n";

    const SolveResult r = solve(model, make_config(spec, alg, s, 0.999 / lip.L));

    if (spec.trace_path) {
      std::ofstream f(*spec.trace_path);
      if (!f) throw std::runtime_error("cannot write '" + spec.trace_path->string() + "'");
      write_trace_csv(f, r.trace);
    }
    if (spec.out_path) {
      std::ofstream f(*spec.out_path);
      if (!f) throw std::runtime_error("cannot write '" + spec.out_path->string() + "'");
      f << result_to_json(r, s).dump(2) << '\n';
    }

    out << "algorithm " << to_string(alg) << "  s " << s << "  status " << to_string(r.status)
        << "\nf " << std::setprecision(12) << r.f << "  residual " << r.residual
        << "\niterations " << r.iterations << "  ge " << r.ge << "  cg " << r.cg << "  time "
        << r.wall_time << " s\n";
    if (data.test) {
      const MetricsReport m = predict_metrics(r, *data.test);
      out << (m.classification ? "accuracy " : "mse ") << m.metric << '\n';
    }
    switch (r.status) {
      case SolveStatus::converged: return 0;
      case SolveStatus::max_iter: return 2;
      case SolveStatus::numeric_error: return 1;
    }
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_bench(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.algorithms.empty()) throw ConfigError("bench needs at least one algorithm");
    LoadedData data = load_data(spec);
    const Model model(std::move(data.train), loss_spec(spec.loss));
    const Dataset& eval = data.test ? *data.test : model.data();
    const Index s = single_sparsity(spec, model.rows());
    const Timed lip = estimate_lipschitz(model);
    err << "lipschitz_estimate " << lip.L << " (" << lip.seconds << " s)\n";

    std::mutex err_mutex;
    std::vector<std::string> rows(spec.algorithms.size());
    run_jobs(rows.size(), spec.threads, [&](std::size_t i) {
      const Algorithm alg = spec.algorithms[i];
      std::ostringstream row;
      row << data.name << ',' << to_string(alg) << ',' << s << ',';
      try {
        const SolveResult r = solve(model, make_config(spec, alg, s, 0.999 / lip.L));
        row << fmt(r.wall_time) << ',' << r.ge << ',' << r.cg << ','
            << fmt(predict_metric(r.w, eval)) << ','
            << (r.status == SolveStatus::converged ? 1 : 0);
      } catch (const std::exception& e) {
        row << "nan,0,0,nan,0";
        const std::lock_guard lock(err_mutex);
        err << "run " << to_string(alg) << " failed: " << e.what() << '\n';
      }
      rows[i] = row.str();
    });

    std::string table = std::string(kBenchHeader) + "\n";
    for (const auto& r : rows) table += r + "\n";
    emit_table(spec, table, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_transition(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.algorithms.empty()) throw ConfigError("transition needs at least one algorithm");
    std::vector<double> grid;
    switch (spec.sparsity.kind) {
      case SparsitySpec::Kind::grid: grid = spec.sparsity.grid; break;
      case SparsitySpec::Kind::fraction: grid = {spec.sparsity.fraction}; break;
      case SparsitySpec::Kind::absolute: throw ConfigError("transition takes --s-grid or --s-frac");
    }
    if (grid.empty()) throw ConfigError("empty sparsity grid");
    LoadedData data = load_data(spec);
    const Model model(std::move(data.train), loss_spec(spec.loss));
    const Timed lip = estimate_lipschitz(model);
    err << "lipschitz_estimate " << lip.L << " (" << lip.seconds << " s)\n";

    struct Job {
      double fraction;
      Index s;
      bool clamped;
      Algorithm alg;
    };
    std::vector<Job> jobs;
    for (double f : grid) {
      Index s = resolve_sparsity(f, model.rows());
      const bool clamped = s > model.cols();
      if (clamped) s = model.cols();
      for (Algorithm alg : spec.algorithms) jobs.push_back({f, s, clamped, alg});
    }

    std::mutex err_mutex;
    std::vector<std::string> rows(jobs.size());
    run_jobs(jobs.size(), spec.threads, [&](std::size_t i) {
      const Job& job = jobs[i];
      std::ostringstream row;
      row << fmt(job.fraction) << ',' << job.s << ',' << to_string(job.alg) << ',';
      try {
        const SolveResult r = solve(model, make_config(spec, job.alg, job.s, 0.999 / lip.L));
        row << fmt(r.wall_time) << ',' << r.ge << ',' << r.cg << ','
            << (r.status == SolveStatus::converged ? 1 : 0);
      } catch (const std::exception& e) {
        row << "nan,0,0,0";
        const std::lock_guard lock(err_mutex);
        err << "run " << to_string(job.alg) << " at fraction " << job.fraction
            << " failed: " << e.what() << '\n';
      }
      row << ',' << (job.clamped ? 1 : 0);
      rows[i] = row.str();
    });

    std::string table = std::string(kTransitionHeader) + "\n";
    for (const auto& r : rows) table += r + "\n";
    emit_table(spec, table, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparsity-constrained ERM solvers (PG / APG / PG+ / APG+)"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string loss = "ls";
  std::string algs;
  std::string spectral = "exact";
  std::string grid;
  std::optional<Index> s_count;
  std::optional<double> s_frac;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--data", spec.data_path, "Training data (LIBSVM format)")->required();
    sub->add_option("--test", spec.test_path, "Test data (LIBSVM format)");
    sub->add_option("--split", spec.split, "Train fraction for a seeded split when --test is absent");
    sub->add_option("--loss", loss, "ls | logistic")->check(CLI::IsMember({"ls", "logistic"}));
    auto* o_s = sub->add_option("--s", s_count, "Sparsity level");
    auto* o_f = sub->add_option("--s-frac", s_frac, "Sparsity as a fraction of m (ceil)");
    auto* o_g = sub->add_option("--s-grid", grid, "Comma-separated fractions of m");
    o_s->excludes(o_f)->excludes(o_g);
    o_f->excludes(o_g);
    sub->add_option("--alg", algs, "Comma-separated list: pg,apg,pg+,apg+");
    sub->add_option("--tol", spec.tol, "Residual tolerance");
    sub->add_option("--max-iter", spec.max_iter, "Iteration cap");
    sub->add_option("--spectral", spectral, "exact | bb")->check(CLI::IsMember({"exact", "bb"}));
    sub->add_option("--seed", spec.seed, "Seed for splits");
    sub->add_option("--trace", spec.trace_path, "Trace CSV output (solve)");
    sub->add_option("--out", spec.out_path, "Result JSON output (solve)");
    sub->add_option("--table", spec.table_path, "Table CSV output (bench / transition)");
    sub->add_option("--threads", spec.threads, "Worker threads for independent runs");
  };
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  auto* bench_cmd = app.add_subcommand("bench", "Compare algorithms on one instance");
  auto* trans_cmd = app.add_subcommand("transition", "Sweep a grid of sparsity fractions");
  add_common(solve_cmd);
  add_common(bench_cmd);
  add_common(trans_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    spec.loss = loss == "logistic" ? Loss::logistic : Loss::least_squares;
    spec.spectral = spectral == "bb" ? SpectralMode::bb : SpectralMode::exact;
    std::stringstream as(algs);
    for (std::string tok; std::getline(as, tok, ',');) {
      if (tok.empty()) continue;
      const auto a = parse_algorithm(tok);
      if (!a) throw ConfigError("unknown algorithm '" + tok + "'");
      spec.algorithms.push_back(*a);
    }
    if (s_count) {
      spec.sparsity = {SparsitySpec::Kind::absolute, *s_count, 0.0, {}};
    } else if (s_frac) {
      spec.sparsity = {SparsitySpec::Kind::fraction, 0, *s_frac, {}};
    } else if (!grid.empty()) {
      spec.sparsity.kind = SparsitySpec::Kind::grid;
      std::stringstream gs(grid);
      for (std::string tok; std::getline(gs, tok, ',');)
        if (!tok.empty()) spec.sparsity.grid.push_back(std::stod(tok));
    } else {
      throw ConfigError("one of --s, --s-frac, --s-grid is required");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (*solve_cmd) return cmd_solve(spec, out, err);
  if (*bench_cmd) return cmd_bench(spec, out, err);
  return cmd_transition(spec, out, err);
}

}  // namespace l0acc::cli
