#include <fstream>
#include <iomanip>
#include <ostream>

#include "cli/cli.hpp"
#include "l0acc/errors.hpp"

namespace l0acc::cli {

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  const auto old = out.precision(17);
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace) {
    out << r.k << ',' << to_string(r.step_type) << ',' << r.f << ',' << r.residual << ','
        << r.t_k << ',' << (r.support_changed ? 1 : 0) << ',' << r.ge_cum << ',' << r.cg_cum
        << '\n';
  }
  out.precision(old);
}

nlohmann::json result_to_json(const SolveResult& result, Index s) {
  nlohmann::json j;
  j["n"] = result.w.dim;
  j["s"] = s;
  j["support"] = result.w.support;
  j["values"] = result.w.values;
  j["f"] = result.f;
  j["residual"] = result.residual;
  j["iterations"] = result.iterations;
  j["ge"] = result.ge;
  j["cg"] = result.cg;
  j["status"] = std::string(to_string(result.status));
  return j;
}

StoredResult result_from_json(const nlohmann::json& j) {
  StoredResult r;
  try {
    r.n = j.at("n").get<Index>();
    r.s = j.at("s").get<Index>();
    r.w.dim = r.n;
    r.w.support = j.at("support").get<std::vector<Index>>();
    r.w.values = j.at("values").get<std::vector<double>>();
    r.f = j.at("f").get<double>();
    r.residual = j.at("residual").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.ge = j.at("ge").get<std::int64_t>();
    r.cg = j.at("cg").get<std::int64_t>();
    r.status = j.at("status").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed result file: ") + e.what());
  }
  r.w.validate();
  return r;
}

StoredResult load_result(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed result file: ") + e.what());
  }
  return result_from_json(j);
}

}  // namespace l0acc::cli
