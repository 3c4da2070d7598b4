#include "gscfw/experiment.hpp"

#include "gscfw/errors.hpp"
#include "gscfw/records.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

namespace gscfw {

using nlohmann::json;

const std::vector<std::string> kMethods = {"fw_standard", "fw_line_search", "fwgsc", "lbtfwgsc",
                                           "mbtfwgsc",    "fwlloo",         "asfwgsc"};

namespace {

template <class T>
T get_or(const json& j, const char* key, T dflt) {
  if (!j.contains(key)) return dflt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SolverConfig parse_solver_config(const json& j, SolverConfig c) {
  if (!j.is_object()) throw ConfigError("solver section must be an object");
  static const std::vector<std::string> known = {"epsilon", "max_iter", "gamma_u", "gamma_d",
                                                 "l_init",  "mu_init",  "sigma_f", "line_search_tol",
                                                 "seed"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError("unknown solver field '" + k + "'");
    }
  }
  c.epsilon = get_or(j, "epsilon", c.epsilon);
  c.max_iter = get_or(j, "max_iter", c.max_iter);
  c.gamma_u = get_or(j, "gamma_u", c.gamma_u);
  c.gamma_d = get_or(j, "gamma_d", c.gamma_d);
  c.mu_init = get_or(j, "mu_init", c.mu_init);
  c.line_search_tol = get_or(j, "line_search_tol", c.line_search_tol);
  c.seed = get_or(j, "seed", c.seed);
  if (j.contains("l_init") && !j.at("l_init").is_null()) c.l_init = get_or(j, "l_init", 1.0);
  if (j.contains("sigma_f") && !j.at("sigma_f").is_null() && j.at("sigma_f") != "auto") {
    c.sigma_f = get_or(j, "sigma_f", 1.0);
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  c.output_dir = get_or<std::string>(j, "output_dir", "out/" + c.name);
  c.starts = get_or(j, "starts", c.starts);
  c.seed = get_or(j, "seed", c.seed);
  if (c.starts < 1) throw ConfigError("starts must be >= 1");
  if (j.contains("solver")) c.solver = parse_solver_config(j.at("solver"));
  if (j.contains("epsilons")) c.epsilons = get_or(j, "epsilons", c.epsilons);
  for (double e : c.epsilons) {
    if (!(e > 0.0)) throw ConfigError("epsilons must be positive");
  }
  std::sort(c.epsilons.begin(), c.epsilons.end(), std::greater<>());

  if (!j.contains("problems") || !j.at("problems").is_array() || j.at("problems").empty()) {
    throw ConfigError("config needs a non-empty 'problems' array");
  }
  for (const auto& p : j.at("problems")) {
    ProblemSpec s;
    s.kind = get_or<std::string>(p, "kind", "");
    if (s.kind != "logistic" && s.kind != "portfolio" && s.kind != "dwd" && s.kind != "covariance") {
      throw ConfigError("unknown problem kind '" + s.kind + "'");
    }
    s.id = get_or<std::string>(p, "id", s.kind + std::to_string(c.problems.size()));
    s.params = p;
    for (const auto& q : c.problems) {
      if (q.id == s.id) throw ConfigError("duplicate problem id '" + s.id + "'");
    }
    c.problems.push_back(std::move(s));
  }

  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
    throw ConfigError("config needs a non-empty 'methods' array");
  }
  c.methods = get_or(j, "methods", c.methods);
  for (const auto& m : c.methods) {
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ProblemInstance build_problem(const ProblemSpec& spec) {
  const json& p = spec.params;
  const std::uint64_t seed = get_or<std::uint64_t>(p, "seed", 0);
  ProblemInstance inst;
  try {
    if (spec.kind == "portfolio") {
      inst = portfolio_problem(portfolio_generator(get_or(p, "p", 200), get_or(p, "n", 100), seed));
    } else if (spec.kind == "covariance") {
      inst = covariance_problem(covariance_generator(get_or(p, "p", 30), seed));
    } else if (spec.kind == "logistic" || spec.kind == "dwd") {
      SparseDataset data;
      if (p.contains("libsvm")) {
        const std::string path = get_or<std::string>(p, "libsvm", "");
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open dataset " + path);
        data = libsvm_parse(in, true);
      } else {
        const int rows = get_or(p, "p", spec.kind == "logistic" ? 500 : 200);
        const int cols = get_or(p, spec.kind == "logistic" ? "n" : "d", spec.kind == "logistic" ? 50 : 30);
        data = classification_generator(rows, cols, get_or(p, "density", 0.2), seed);
      }
      if (spec.kind == "logistic") {
        const double gamma = get_or(p, "gamma", 1.0 / static_cast<double>(data.p()));
        inst = logistic_problem(data, gamma, get_or(p, "radius", 10.0), get_or(p, "nu_mode", 2));
      } else {
        inst = dwd_problem(data, get_or(p, "q", 2.0), std::nullopt, get_or(p, "u", 5.0),
                           get_or(p, "R", 10.0));
      }
    } else {
      throw ConfigError("unknown problem kind '" + spec.kind + "'");
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("problem '" + spec.id + "': " + e.what());
  }
  inst.name = spec.id;
  return inst;
}

RunTrace run_method(const std::string& method, const ProblemInstance& inst, const Vector& x0,
                    const SolverConfig& cfg, const Observer& obs) {
  const Objective& f = *inst.objective;
  const FeasibleSet& set = *inst.set;
  if (method == "fw_standard") return fw_standard(f, set, x0, cfg, obs);
  if (method == "fw_line_search") return fw_line_search(f, set, x0, cfg, obs);
  if (method == "fwgsc") return fwgsc(f, set, x0, cfg, obs);
  if (method == "lbtfwgsc") return lbtfwgsc(f, set, x0, cfg, obs);
  if (method == "mbtfwgsc") return mbtfwgsc(f, set, x0, cfg, obs);
  if (method == "fwlloo") {
    if (!inst.lloo) throw ConfigError("fwlloo needs a local oracle; '" + inst.name + "' has none");
    return fwlloo(f, set, *inst.lloo, x0, cfg, obs);
  }
  if (method == "asfwgsc") {
    if (!set.is_polytope()) throw ConfigError("asfwgsc needs a polytope; '" + inst.name + "' is not");
    std::optional<ActiveSet> active;
    if (inst.start_active) active = inst.start_active(x0);
    return asfwgsc(f, set, x0, cfg, obs, active);
  }
  throw ConfigError("unknown method '" + method + "'");
}

std::uint64_t start_seed(std::uint64_t base, std::size_t problem, int start) {
  return splitmix(splitmix(base ^ (problem * 0x100000001b3ULL)) + static_cast<std::uint64_t>(start));
}

std::vector<GridEntry> plan_grid(const ExperimentConfig& cfg) {
  std::vector<GridEntry> g;
  for (std::size_t i = 0; i < cfg.problems.size(); ++i) {
    for (const auto& m : cfg.methods) {
      for (int l = 0; l < cfg.starts; ++l) g.push_back({i, m, l});
    }
  }
  return g;
}

int workers_from_env() {
  if (const char* s = std::getenv("GSCFW_WORKERS")) {
    const int w = std::atoi(s);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string record_file_name(const RunRecord& r) {
  return r.problem + "__" + r.method + "__s" + std::to_string(r.start) + ".jsonl";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers, bool dry_run,
                                std::ostream& log) {
  const auto grid = plan_grid(cfg);
  if (dry_run) {
    for (const auto& g : grid) {
      log << cfg.problems[g.problem].id << ' ' << g.method << " start=" << g.start << '\n';
    }
    log << grid.size() << " runs\n";
    return {};
  }

  std::vector<ProblemInstance> problems;
  for (const auto& p : cfg.problems) problems.push_back(build_problem(p));
  // Validate method/problem pairs before any work starts.
  for (const auto& g : grid) {
    const auto& inst = problems[g.problem];
    if (g.method == "fwlloo" && !inst.lloo) {
      throw ConfigError("fwlloo needs a local oracle; '" + inst.name + "' has none");
    }
    if (g.method == "asfwgsc" && !inst.set->is_polytope()) {
      throw ConfigError("asfwgsc needs a polytope; '" + inst.name + "' is not");
    }
  }

  const auto rec_dir = cfg.output_dir / "records";
  std::filesystem::create_directories(rec_dir);

  std::vector<RunRecord> records(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      const auto& g = grid[i];
      try {
        const auto& inst = problems[g.problem];
        const Vector x0 = inst.start(start_seed(cfg.seed, g.problem, g.start));
        RunRecord r;
        r.problem = inst.name;
        r.method = g.method;
        r.start = g.start;
        r.trace = run_method(g.method, inst, x0, cfg.solver);
        write_run_file(rec_dir / record_file_name(r), r);
        records[i] = std::move(r);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  assign_f_star(records);
  {
    std::ofstream out(cfg.output_dir / "summary.csv");
    write_summary_csv(out, records, cfg.epsilons);
  }
  {
    json fs = json::object();
    for (const auto& r : records) fs[r.problem] = r.f_star;
    std::ofstream out(cfg.output_dir / "fstar.json");
    out << fs.dump(2) << '\n';
  }
  for (const auto& r : records) {
    log << r.problem << ' ' << r.method << " start=" << r.start << ' ' << to_string(r.trace.status)
        << " iters=" << r.trace.records.back().k << " f=" << r.trace.f_final << '\n';
  }
  return {std::move(records)};
}

}  // namespace gscfw
