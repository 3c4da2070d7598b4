#pragma once

// Config-driven grid runner: problems x methods x starts.

#include "gscfw/problems.hpp"
#include "gscfw/profile.hpp"
#include "gscfw/solvers.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace gscfw {

struct ProblemSpec {
  std::string id;
  std::string kind;  // logistic | portfolio | dwd | covariance
  nlohmann::json params;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::filesystem::path output_dir = "out";
  std::vector<ProblemSpec> problems;
  std::vector<std::string> methods;
  int starts = 1;
  std::uint64_t seed = 0;
  SolverConfig solver;
  std::vector<double> epsilons{1e-2, 1e-4, 1e-6};
};

extern const std::vector<std::string> kMethods;

/// Throws ConfigError on schema violations.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
SolverConfig parse_solver_config(const nlohmann::json& j, SolverConfig base = {});

ProblemInstance build_problem(const ProblemSpec& spec);

/// Runs one method; ConfigError when the method does not fit the problem.
RunTrace run_method(const std::string& method, const ProblemInstance& inst, const Vector& x0,
                    const SolverConfig& cfg, const Observer& obs = {});

std::uint64_t start_seed(std::uint64_t base, std::size_t problem, int start);

struct GridEntry {
  std::size_t problem;
  std::string method;
  int start;
};
std::vector<GridEntry> plan_grid(const ExperimentConfig& cfg);

/// GSCFW_WORKERS if set and positive, otherwise the hardware thread count.
int workers_from_env();

struct ExperimentResult {
  std::vector<RunRecord> records;  // f_star assigned
};

/// With dry_run the grid is printed to log and nothing runs.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers, bool dry_run,
                                std::ostream& log);

std::string record_file_name(const RunRecord& r);

}  // namespace gscfw
