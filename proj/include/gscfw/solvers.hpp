#pragma once

// Frank-Wolfe solvers sharing one trace format.

#include "gscfw/active_set.hpp"
#include "gscfw/oracles.hpp"
#include "gscfw/stepsize.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gscfw {

struct SolverConfig {
  double epsilon = 1e-6;
  int max_iter = 1000;
  double gamma_u = 2.0;
  double gamma_d = 0.9;
  std::optional<double> l_init;  // finite-difference probe when absent
  double mu_init = 1.0;
  std::optional<double> sigma_f;  // Hessian eigenvalue at x0 when absent
  double line_search_tol = 1e-10;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StepKind { kForward, kAway, kDrop, kZero, kNone };
enum class RunStatus { kGapConverged, kIterationCap, kStalled };

const char* to_string(StepKind k);
const char* to_string(RunStatus s);

/// Record k describes iterate x^k and the step taken from it. The last
/// record of a run has kind kNone.
struct IterationRecord {
  int k = 0;
  double f = 0.0;
  double gap = 0.0;  // FW gap at x^k
  double alpha = 0.0;
  StepKind kind = StepKind::kNone;
  int backtracks = 0;
  double estimate = std::numeric_limits<double>::quiet_NaN();  // L_k or mu_k
  double predicted_decrease = std::numeric_limits<double>::quiet_NaN();
  double dikin = std::numeric_limits<double>::quiet_NaN();  // alpha * M * delta_nu
  double certificate = std::numeric_limits<double>::quiet_NaN();  // gap(x^0) c_k
  int active_size = 0;
  bool forced_forward = false;
  double elapsed = 0.0;
};

struct RunTrace {
  std::string method;
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::kIterationCap;
  Vector x_final;
  double f_final = 0.0;
  double sigma_f = std::numeric_limits<double>::quiet_NaN();  // FWLLOO only
};

/// Called once per record with the iterate it describes. `active` is
/// non-null for the away-step solver.
using Observer =
    std::function<void(const IterationRecord&, const Vector& x, const ActiveSet* active)>;

RunTrace fw_standard(const Objective& f, const FeasibleSet& set, const Vector& x0,
                     const SolverConfig& cfg, const Observer& obs = {});
RunTrace fw_line_search(const Objective& f, const FeasibleSet& set, const Vector& x0,
                        const SolverConfig& cfg, const Observer& obs = {});
RunTrace fwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
               const SolverConfig& cfg, const Observer& obs = {});
RunTrace lbtfwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
                  const SolverConfig& cfg, const Observer& obs = {});
RunTrace mbtfwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
                  const SolverConfig& cfg, const Observer& obs = {});
RunTrace fwlloo(const Objective& f, const FeasibleSet& set, const LlooOracle& lloo,
                const Vector& x0, const SolverConfig& cfg, const Observer& obs = {});
/// x0 must be a vertex unless `initial` gives its decomposition.
RunTrace asfwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
                 const SolverConfig& cfg, const Observer& obs = {},
                 std::optional<ActiveSet> initial = std::nullopt);

struct BacktrackResult {
  double alpha = 0.0;
  double estimate = 0.0;
  int backtracks = 0;
  double f_new = 0.0;
  double model = 0.0;  // Q at the accepted step
  double predicted_decrease = 0.0;
};

/// Quadratic-model backtracking over L.
BacktrackResult step_l(const Objective& f, const Vector& x, const Vector& v, double fx,
                       double gap, double l_prev, const SolverConfig& cfg);
/// GSC-model backtracking over M.
BacktrackResult step_m(const Objective& f, const Vector& x, const Vector& v, double fx,
                       double gap, double mu_prev, const SolverConfig& cfg);

/// Curvature probe <grad(x + h v) - grad(x), v> / (h ||v||^2) used for L_{-1}.
double curvature_probe(const Objective& f, const Vector& x, const Vector& v);

/// Smallest eigenvalue of the Hessian at x (dense, from n Hessian-vector
/// products), floored at 1e-10.
double hessian_min_eigenvalue(const Objective& f, const Vector& x);

}  // namespace gscfw
