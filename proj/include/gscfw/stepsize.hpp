#pragma once

// Scalar step-size kernel: maximize psi(t) = t - xi * omega_nu(t delta) t^2.

#include "gscfw/gsc.hpp"

namespace gscfw {

struct PsiParams {
  double delta = 0.0;
  double xi = 0.0;
  double nu = 2.0;
};

enum class StepStatus {
  kStep,       // regular step
  kConverged,  // gap == 0
  kFlat,       // e == 0 with gap > 0: the cap is taken
};

struct StepDecision {
  double t_star = 0.0;  // +inf when unbounded
  double alpha = 0.0;
  double predicted_decrease = 0.0;
  double cap = 1.0;
  StepStatus status = StepStatus::kStep;
};

double psi(const PsiParams& p, double t);

/// Maximizer of psi. ν = 2 with xi = 0 gives +inf.
double t_star(const PsiParams& p);

/// psi(t_star) in closed form; xi must be positive.
double psi_at_tstar(const PsiParams& p);

double psi_lower_bound(const PsiParams& p);

/// 1 + a (1 - 2^{1/a}) with a = (4 - nu) / (2 (3 - nu)); nu in (2, 3].
double gamma_tilde(double nu);

/// min{cap, t_star(p)} with predicted decrease scale * psi(alpha).
StepDecision clipped_step(const PsiParams& p, double cap, double scale);

/// delta = M_f delta_nu(x), xi = e^2 / gap, alpha = min{cap, t_star}.
StepDecision analytic_step(const GscSpec& spec, const LocalGeometry& geom, double cap = 1.0);

struct ProgressConstants {
  double c1;
  double c2;
};

ProgressConstants progress_constants(double m, double nu, double diam, double l_grad);

}  // namespace gscfw
