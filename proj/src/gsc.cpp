#include "gscfw/gsc.hpp"

#include "gscfw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gscfw {

NuBranch classify_nu(double nu) {
  if (!(nu >= 2.0 - kNuBranchTol && nu <= 3.0 + kNuBranchTol)) {
    throw InvalidArgument("nu must lie in [2, 3], got " + std::to_string(nu));
  }
  if (std::abs(nu - 2.0) < kNuBranchTol) return NuBranch::kTwo;
  if (std::abs(nu - 3.0) < kNuBranchTol) return NuBranch::kThree;
  return NuBranch::kInterior;
}

GscSpec::GscSpec(double m_f, double nu) : m_f_(m_f), nu_(nu), branch_(classify_nu(nu)) {
  if (!(m_f >= 0.0) || !std::isfinite(m_f)) {
    throw InvalidArgument("M_f must be finite and nonnegative");
  }
}

namespace {

// Power series of omega around 0. Each branch is a series with a simple
// term recurrence; we stop once the term no longer moves the sum.
double omega_series_two(double t) {
  double term = 0.5;  // t^0 / 2!
  double sum = term;
  for (int j = 1; j < 60; ++j) {
    term *= t / (j + 2);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double omega_series_three(double t) {
  double sum = 0.5;
  double tp = 1.0;
  for (int j = 1; j < 400; ++j) {
    tp *= t;
    double term = tp / (j + 2);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// coefficient_j = B (-1)^{j+1} C(m, j+2) / m, coefficient_0 = 1/2.
double omega_series_interior(double nu, double t) {
  const double m = 2.0 * (3.0 - nu) / (2.0 - nu);
  double term = 0.5;
  double sum = term;
  for (int j = 0; j < 400; ++j) {
    term *= -(m - j - 2) / (j + 3) * t;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double omega_direct(NuBranch branch, double nu, double t) {
  switch (branch) {
    case NuBranch::kTwo:
      return (std::expm1(t) - t) / (t * t);
    case NuBranch::kThree:
      return (-t - std::log1p(-t)) / (t * t);
    case NuBranch::kInterior: {
      const double b = (nu - 2.0) / (4.0 - nu);
      const double a = (nu - 2.0) / (2.0 * (3.0 - nu));
      const double m = 2.0 * (3.0 - nu) / (2.0 - nu);
      const double pw = std::expm1(m * std::log1p(-t));  // (1-t)^m - 1
      return b / t * (a / t * pw - 1.0);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double omega(double nu, double t) {
  const NuBranch branch = classify_nu(nu);
  if (std::isnan(t)) throw DomainError("omega: t is NaN");
  if (branch != NuBranch::kTwo && t >= 1.0) {
    throw DomainError("omega: t must be < 1 for nu > 2");
  }
  if (t == 0.0) return 0.5;
  switch (branch) {
    case NuBranch::kTwo:
      if (std::abs(t) < 0.1) return omega_series_two(t);
      break;
    case NuBranch::kThree:
      if (std::abs(t) < 0.1) return omega_series_three(t);
      break;
    case NuBranch::kInterior: {
      // Term ratio is about (|m| + j) t / j; keep it below 1/2.
      const double m = 2.0 * (3.0 - nu) / (2.0 - nu);
      if (std::abs(t) < 0.1 && (std::abs(m) + 2.0) * std::abs(t) < 1.5) {
        return omega_series_interior(nu, t);
      }
      break;
    }
  }
  return omega_direct(branch, nu, t);
}

double delta_nu(const GscSpec& spec, double beta, double e) {
  if (beta < 0.0 || e < 0.0) throw InvalidArgument("delta_nu: negative norm");
  if (spec.branch() == NuBranch::kTwo) return beta;
  if (beta == 0.0 || e == 0.0) return 0.0;
  const double nu = spec.branch() == NuBranch::kThree ? 3.0 : spec.nu();
  return 0.5 * (nu - 2.0) * std::pow(beta, 3.0 - nu) * std::pow(e, nu - 2.0);
}

double d_nu(const GscSpec& spec, double step_euclid, double step_local) {
  return spec.m_f() * delta_nu(spec, step_euclid, step_local);
}

LocalGeometry local_geometry(const Objective& f, const Vector& x, const Vector& v, double gap) {
  LocalGeometry g;
  g.beta = v.norm();
  const double e2 = v.dot(f.hess_vec(x, v));
  g.e = std::sqrt(std::max(0.0, e2));
  g.delta = delta_nu(f.spec(), g.beta, g.e);
  g.gap = gap;
  return g;
}

DescentBounds descent_bounds(const Objective& f, const Vector& x, const Vector& y) {
  const GscSpec spec = f.spec();
  const Vector h = y - x;
  const double local2 = std::max(0.0, h.dot(f.hess_vec(x, h)));
  const double d = d_nu(spec, h.norm(), std::sqrt(local2));
  const double base = f.value(x) + f.gradient(x).dot(h);

  DescentBounds out;
  out.distance = d;
  out.lower = base + omega(spec.nu(), -d) * local2;
  if (spec.branch() == NuBranch::kTwo || d < 1.0) {
    out.upper = base + omega(spec.nu(), d) * local2;
  }
  return out;
}

double gsc_sum_constant(std::span<const WeightedConstant> terms, double nu) {
  classify_nu(nu);
  if (terms.empty()) throw InvalidArgument("gsc_sum_constant: empty term list");
  double best = 0.0;
  for (const auto& t : terms) {
    if (!(t.weight > 0.0)) throw InvalidArgument("gsc_sum_constant: weights must be positive");
    if (t.m < 0.0) throw InvalidArgument("gsc_sum_constant: negative constant");
    best = std::max(best, std::pow(t.weight, 1.0 - nu / 2.0) * t.m);
  }
  return best;
}

double gsc_affine_constant(double m, double nu, double operator_norm,
                           std::optional<double> min_singular_sq) {
  classify_nu(nu);
  if (min_singular_sq) {
    throw InvalidArgument("gsc_affine_constant: min_singular_sq only applies to nu > 3");
  }
  if (m < 0.0 || operator_norm < 0.0) throw InvalidArgument("gsc_affine_constant: negative input");
  return m * std::pow(operator_norm, 3.0 - nu);
}

double gsc_finite_sum_constant(std::span<const FiniteSumTerm> phis, double nu,
                               double lambda_min_q) {
  if (!(nu > 0.0 && nu <= 3.0 + kNuBranchTol)) {
    throw InvalidArgument("gsc_finite_sum_constant: nu must lie in (0, 3]");
  }
  if (phis.empty()) throw InvalidArgument("gsc_finite_sum_constant: empty term list");
  const bool order_three = std::abs(nu - 3.0) < kNuBranchTol;
  if (!order_three && !(lambda_min_q > 0.0)) {
    throw InvalidArgument("gsc_finite_sum_constant: lambda_min(Q) must be positive for nu < 3");
  }
  double best = 0.0;
  for (const auto& p : phis) {
    const double scale = order_three ? 1.0 : std::pow(p.a_norm, 3.0 - nu);
    best = std::max(best, p.m_phi * scale);
  }
  return order_three ? best : std::pow(lambda_min_q, (nu - 3.0) / 2.0) * best;
}

}  // namespace gscfw
