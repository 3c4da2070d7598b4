#include "gscfw/stepsize.hpp"

#include "gscfw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gscfw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const PsiParams& p) {
  if (!(p.delta >= 0.0) || !(p.xi >= 0.0)) throw InvalidArgument("psi: delta and xi must be >= 0");
}

// u - log(1 + u), accurate for small u.
double u_minus_log1p(double u) {
  if (std::abs(u) < 0.1) {
    double sum = 0.0;
    double up = u;
    for (int j = 2; j < 60; ++j) {
      up *= -u;
      double term = -up / j;  // (-1)^j u^j / j
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return u - std::log1p(u);
}

// ((1+z)^k - 1 - k z) / z^2
double binomial_remainder(double k, double z) {
  if (std::abs(z) < 0.1) {
    double c = k * (k - 1.0) / 2.0;  // C(k, 2)
    double sum = c;
    double zp = 1.0;
    for (int j = 2; j < 80; ++j) {
      c *= (k - j) / (j + 1.0);
      zp *= z;
      double term = c * zp;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::expm1(k * std::log1p(z)) - k * z) / (z * z);
}

}  // namespace

double psi(const PsiParams& p, double t) {
  check_params(p);
  if (p.xi == 0.0) return t;
  return t - p.xi * omega(p.nu, t * p.delta) * t * t;
}

double t_star(const PsiParams& p) {
  check_params(p);
  if (p.delta == 0.0 && p.xi == 0.0) throw InvalidArgument("t_star: delta and xi both zero");
  const NuBranch branch = classify_nu(p.nu);
  if (branch != NuBranch::kTwo && p.xi == 0.0) {
    throw InvalidArgument("t_star: xi must be positive for nu > 2");
  }
  switch (branch) {
    case NuBranch::kTwo:
      if (p.xi == 0.0) return kInf;
      if (p.delta == 0.0) return 1.0 / p.xi;
      return std::log1p(p.delta / p.xi) / p.delta;
    case NuBranch::kThree:
      return 1.0 / (p.delta + p.xi);
    case NuBranch::kInterior: {
      if (p.delta == 0.0) return 1.0 / p.xi;
      const double nu = p.nu;
      const double z = (p.delta / p.xi) * (4.0 - nu) / (nu - 2.0);
      const double expo = (nu - 2.0) / (4.0 - nu);
      return -std::expm1(-expo * std::log1p(z)) / p.delta;
    }
  }
  return kInf;
}

double psi_at_tstar(const PsiParams& p) {
  check_params(p);
  if (!(p.xi > 0.0)) throw InvalidArgument("psi_at_tstar: xi must be positive");
  if (p.delta == 0.0) return 0.5 / p.xi;
  const double u = p.delta / p.xi;
  switch (classify_nu(p.nu)) {
    case NuBranch::kTwo: {
      const double l = std::log1p(u);
      return (u * l - u_minus_log1p(u)) / (u * u * p.xi);
    }
    case NuBranch::kThree:
      return u_minus_log1p(u) / (u * u * p.xi);
    case NuBranch::kInterior: {
      const double nu = p.nu;
      const double a = (4.0 - nu) / (2.0 * (3.0 - nu));
      const double k = 1.0 / a;
      const double z = u * (4.0 - nu) / (nu - 2.0);
      return -a * (4.0 - nu) / ((nu - 2.0) * p.xi) * binomial_remainder(k, z);
    }
  }
  return 0.0;
}

double gamma_tilde(double nu) {
  const NuBranch branch = classify_nu(nu);
  if (branch == NuBranch::kTwo) return 0.0;
  if (branch == NuBranch::kThree) return 1.0 - std::log(2.0);
  const double a = (4.0 - nu) / (2.0 * (3.0 - nu));
  return 1.0 - a * std::expm1(std::log(2.0) / a);
}

double psi_lower_bound(const PsiParams& p) {
  if (!(p.delta > 0.0) || !(p.xi > 0.0)) {
    throw InvalidArgument("psi_lower_bound: delta and xi must be positive");
  }
  const double u = p.delta / p.xi;
  switch (classify_nu(p.nu)) {
    case NuBranch::kTwo:
      return (2.0 * std::log(2.0) - 1.0) / p.delta * std::min(1.0, u);
    case NuBranch::kThree:
      return (1.0 - std::log(2.0)) / p.delta * std::min(1.0, u);
    case NuBranch::kInterior: {
      const double b = (2.0 - p.nu) / (4.0 - p.nu);
      return gamma_tilde(p.nu) / p.delta * std::min(1.0, -u / b);
    }
  }
  return 0.0;
}

StepDecision clipped_step(const PsiParams& p, double cap, double scale) {
  if (!(cap > 0.0)) throw InvalidArgument("step cap must be positive");
  StepDecision d;
  d.cap = cap;
  d.t_star = t_star(p);
  d.alpha = std::min(cap, d.t_star);
  d.predicted_decrease = scale * psi(p, d.alpha);
  return d;
}

StepDecision analytic_step(const GscSpec& spec, const LocalGeometry& geom, double cap) {
  if (!(cap > 0.0)) throw InvalidArgument("step cap must be positive");
  if (!(geom.gap >= 0.0)) throw InvalidArgument("analytic_step: negative gap");
  StepDecision d;
  d.cap = cap;
  if (geom.gap == 0.0) {
    d.status = StepStatus::kConverged;
    return d;
  }
  if (geom.e == 0.0) {
    d.status = StepStatus::kFlat;
    d.t_star = kInf;
    d.alpha = cap;
    d.predicted_decrease = geom.gap * cap;
    return d;
  }
  PsiParams p{spec.m_f() * geom.delta, geom.e * geom.e / geom.gap, spec.nu()};
  return clipped_step(p, cap, geom.gap);
}

ProgressConstants progress_constants(double m, double nu, double diam, double l_grad) {
  if (!(m >= 0.0) || !(diam > 0.0) || !(l_grad > 0.0)) {
    throw InvalidArgument("progress_constants: inputs must be positive");
  }
  const double ln2 = std::log(2.0);
  switch (classify_nu(nu)) {
    case NuBranch::kTwo:
      return {std::min(0.5, (2.0 * ln2 - 1.0) / (m * diam)),
              (2.0 * ln2 - 1.0) / (l_grad * diam * diam)};
    case NuBranch::kThree:
      return {std::min(0.5, 2.0 * (1.0 - ln2) / (m * std::sqrt(l_grad) * diam)),
              2.0 * (1.0 - ln2) / (l_grad * diam * diam)};
    case NuBranch::kInterior: {
      const double g = gamma_tilde(nu);
      const double b = (2.0 - nu) / (4.0 - nu);
      const double c1 = g / (diam * (nu / 2.0 - 1.0) * m * std::pow(l_grad, (nu - 2.0) / 2.0));
      return {std::min(0.5, c1), -g / (b * diam * diam * l_grad)};
    }
  }
  return {0.0, 0.0};
}

}  // namespace gscfw
