#pragma once

// Relative errors and the success / iteration / time profile statistics.

#include "gscfw/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gscfw {

struct RunRecord {
  std::string problem;
  std::string method;
  int start = 0;
  RunTrace trace;
  double f_star = std::numeric_limits<double>::quiet_NaN();
};

/// (f - f*) / max(|f*|, 1e-12), with [-1e-12, 0) clamped to 0.
double relative_error(double f_value, double f_star);

/// Sets f_star of every record to the smallest f seen on its problem.
void assign_f_star(std::vector<RunRecord>& records);

/// First k with relative error <= eps, if any.
std::optional<int> iterations_to(const RunRecord& r, double eps);
/// Elapsed seconds at that iteration.
std::optional<double> time_to(const RunRecord& r, double eps);

/// Fraction of the method's (problem, start) runs that reach eps.
double success_ratio(const std::vector<RunRecord>& records, const std::string& method, double eps);

/// Average of N_ijl / min_j' N_ij'l over successful runs, then over problems.
/// Absent when the method solved nothing at this eps.
std::optional<double> iteration_ratio(const std::vector<RunRecord>& records,
                                      const std::string& method, double eps);
std::optional<double> time_ratio(const std::vector<RunRecord>& records, const std::string& method,
                                 double eps);

struct ProfilePoint {
  double epsilon;
  double rho;
  std::optional<double> rho_iter;
  std::optional<double> rho_time;
};

std::vector<ProfilePoint> profile(const std::vector<RunRecord>& records, const std::string& method,
                                  const std::vector<double>& eps_grid);

std::vector<std::string> methods_of(const std::vector<RunRecord>& records);

}  // namespace gscfw
