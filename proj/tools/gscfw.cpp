// gscfw: run experiment grids, build profiles, trace single runs.
//
// Exit codes: 0 ok, 2 config error, 3 solver failure.

#include "gscfw/errors.hpp"
#include "gscfw/experiment.hpp"
#include "gscfw/records.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace gscfw;

namespace {

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad epsilon '" + tok + "'");
    }
    if (!(out.back() > 0.0)) throw ConfigError("epsilons must be positive");
  }
  if (out.empty()) throw ConfigError("empty epsilon list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe methods for generalized self-concordant objectives"};
  app.require_subcommand(1);

  std::string config_path;
  bool dry_run = false;
  auto* run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_flag("--dry-run", dry_run, "list the grid without running it");

  std::string records_dir;
  std::string eps_list = "1e-2,1e-4,1e-6";
  auto* prof = app.add_subcommand("profile", "Profile statistics from a records directory");
  prof->add_option("records", records_dir, "directory of .jsonl run records")->required();
  prof->add_option("--eps", eps_list, "comma-separated epsilon grid");

  std::string problem = "portfolio", method = "fwgsc", out_path;
  int nu_mode = 2, max_iter = 1000, size_p = -1, size_n = -1;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;
  auto* trace = app.add_subcommand("trace", "Run one solver on one generated problem");
  trace->add_option("--problem", problem, "logistic | portfolio | dwd | covariance");
  trace->add_option("--method", method, "solver name");
  trace->add_option("--nu-mode", nu_mode, "2 or 3 (logistic only)");
  trace->add_option("--epsilon", epsilon, "gap tolerance");
  trace->add_option("--max-iter", max_iter, "iteration cap");
  trace->add_option("--seed", seed, "seed for data and start");
  trace->add_option("--p", size_p, "sample / row count (order for covariance)");
  trace->add_option("--n", size_n, "feature count");
  trace->add_option("--out", out_path, "write the run record here (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = load_config(config_path);
      run_experiment(cfg, workers_from_env(), dry_run, std::cout);
      if (!dry_run) std::cout << "summary: " << (cfg.output_dir / "summary.csv").string() << '\n';
    } else if (*prof) {
      const auto eps = parse_eps_list(eps_list);
      auto records = read_run_dir(records_dir);
      if (records.empty()) throw ConfigError("no records in " + records_dir);
      assign_f_star(records);
      write_summary_csv(std::cout, records, eps);
    } else if (*trace) {
      ProblemSpec spec;
      spec.kind = problem;
      spec.id = problem;
      spec.params = {{"kind", problem}, {"seed", seed}, {"nu_mode", nu_mode}};
      if (size_p > 0) spec.params["p"] = size_p;
      if (size_n > 0) spec.params[problem == "dwd" ? "d" : "n"] = size_n;
      if (problem != "logistic" && problem != "portfolio" && problem != "dwd" &&
          problem != "covariance") {
        throw ConfigError("unknown problem '" + problem + "'");
      }
      SolverConfig cfg;
      cfg.epsilon = epsilon;
      cfg.max_iter = max_iter;
      cfg.seed = seed;
      try {
        cfg.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
      const ProblemInstance inst = build_problem(spec);
      RunRecord r;
      r.problem = problem;
      r.method = method;
      r.trace = run_method(method, inst, inst.start(seed), cfg);
      if (out_path.empty()) {
        write_run(std::cout, r);
      } else {
        write_run_file(out_path, r);
        std::cerr << method << " on " << problem << ": " << to_string(r.trace.status)
                  << " after " << r.trace.records.back().k << " iterations, f = " << r.trace.f_final
                  << '\n';
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
