#include "gscfw/records.hpp"

#include "gscfw/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace gscfw {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_of(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

StepKind kind_from(const std::string& s) {
  for (StepKind k : {StepKind::kForward, StepKind::kAway, StepKind::kDrop, StepKind::kZero,
                     StepKind::kNone}) {
    if (s == to_string(k)) return k;
  }
  throw ParseError(0, "unknown step kind " + s);
}

RunStatus status_from(const std::string& s) {
  for (RunStatus k : {RunStatus::kGapConverged, RunStatus::kIterationCap, RunStatus::kStalled}) {
    if (s == to_string(k)) return k;
  }
  throw ParseError(0, "unknown status " + s);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

}  // namespace

void write_run(std::ostream& out, const RunRecord& r) {
  json head = {{"type", "run"},
               {"problem", r.problem},
               {"method", r.method},
               {"start", r.start},
               {"status", to_string(r.trace.status)},
               {"iterations", r.trace.records.empty() ? 0 : r.trace.records.back().k},
               {"f_final", num(r.trace.f_final)},
               {"sigma_f", num(r.trace.sigma_f)}};
  out << head.dump() << '\n';
  for (const auto& it : r.trace.records) {
    json row = {{"k", it.k},
                {"f", num(it.f)},
                {"gap", num(it.gap)},
                {"alpha", num(it.alpha)},
                {"kind", to_string(it.kind)},
                {"backtracks", it.backtracks},
                {"estimate", num(it.estimate)},
                {"predicted", num(it.predicted_decrease)},
                {"dikin", num(it.dikin)},
                {"certificate", num(it.certificate)},
                {"active", it.active_size},
                {"forced", it.forced_forward},
                {"time", it.elapsed}};
    out << row.dump() << '\n';
  }
}

RunRecord read_run(std::istream& in) {
  RunRecord r;
  std::string line;
  std::size_t n = 0;
  try {
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (n == 1) {
        if (j.value("type", "") != "run") throw ParseError(n, "missing run header");
        r.problem = j.at("problem").get<std::string>();
        r.method = j.at("method").get<std::string>();
        r.start = j.at("start").get<int>();
        r.trace.method = r.method;
        r.trace.status = status_from(j.at("status").get<std::string>());
        r.trace.f_final = num_of(j.at("f_final"));
        r.trace.sigma_f = num_of(j.at("sigma_f"));
        continue;
      }
      IterationRecord it;
      it.k = j.at("k").get<int>();
      it.f = num_of(j.at("f"));
      it.gap = num_of(j.at("gap"));
      it.alpha = num_of(j.at("alpha"));
      it.kind = kind_from(j.at("kind").get<std::string>());
      it.backtracks = j.at("backtracks").get<int>();
      it.estimate = num_of(j.at("estimate"));
      it.predicted_decrease = num_of(j.at("predicted"));
      it.dikin = num_of(j.at("dikin"));
      it.certificate = num_of(j.at("certificate"));
      it.active_size = j.at("active").get<int>();
      it.forced_forward = j.at("forced").get<bool>();
      it.elapsed = j.at("time").get<double>();
      r.trace.records.push_back(it);
    }
  } catch (const json::exception& e) {
    throw ParseError(n, e.what());
  }
  if (n == 0) throw ParseError(0, "empty record file");
  return r;
}

void write_run_file(const std::filesystem::path& path, const RunRecord& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_run(out, r);
}

RunRecord read_run_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return read_run(in);
}

std::vector<RunRecord> read_run_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> out;
  for (const auto& f : files) out.push_back(read_run_file(f));
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records,
                       const std::vector<double>& eps_grid) {
  out << "method,epsilon,rho,rho_iter,rho_time\n";
  for (const auto& m : methods_of(records)) {
    for (const auto& pt : profile(records, m, eps_grid)) {
      out << m << ',' << fmt(pt.epsilon) << ',' << fmt(pt.rho) << ',' << fmt(pt.rho_iter) << ','
          << fmt(pt.rho_time) << '\n';
    }
  }
}

}  // namespace gscfw
