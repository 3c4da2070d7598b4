#pragma once

// Generalized self-concordant (GSC) functions: the class constants, the
// objective contract, and the scalar kernels omega_nu / d_nu / delta_nu.

#include <Eigen/Core>

#include <optional>
#include <span>
#include <utility>

namespace gscfw {

using Vector = Eigen::VectorXd;

enum class NuBranch { kTwo, kInterior, kThree };

// |nu - 2| or |nu - 3| below this selects the endpoint branch.
inline constexpr double kNuBranchTol = 1e-9;

/// Classifies nu in [2, 3]; throws InvalidArgument outside that range.
NuBranch classify_nu(double nu);

/// The pair (M_f, nu) of a function in F_{M_f, nu}.
class GscSpec {
 public:
  GscSpec(double m_f, double nu);

  double m_f() const { return m_f_; }
  double nu() const { return nu_; }
  NuBranch branch() const { return branch_; }

  GscSpec with_m(double m_f) const { return GscSpec(m_f, nu_); }

 private:
  double m_f_;
  double nu_;
  NuBranch branch_;
};

/// Smooth convex objective with an open effective domain.
///
/// value() returns +infinity outside the domain. The Hessian is only
/// accessed through products with a direction. Implementations must be
/// safe for concurrent const calls.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual GscSpec spec() const = 0;

  virtual bool in_domain(const Vector& x) const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Vector hess_vec(const Vector& x, const Vector& v) const = 0;

  /// Exact sup{t in (0,1] : x + t v in dom f} when the problem has a closed
  /// form for it; nullopt selects the generic bisection. A returned value of
  /// 1 means the whole unit segment is in the domain.
  virtual std::optional<double> exact_max_step(const Vector& /*x*/, const Vector& /*v*/) const {
    return std::nullopt;
  }
};

/// Per-iterate quantities feeding the step-size rules for direction v.
struct LocalGeometry {
  double beta = 0.0;   // ||v||_2
  double e = 0.0;      // ||v||_x
  double delta = 0.0;  // delta_nu(x), without the M_f factor
  double gap = 0.0;
};

/// omega_nu(t). Throws DomainError for nu > 2 and t >= 1.
double omega(double nu, double t);

/// d_nu(x, y) from ||y - x||_2 and ||y - x||_x.
double d_nu(const GscSpec& spec, double step_euclid, double step_local);

/// delta_nu(x) from beta = ||v||_2 and e = ||v||_x.
double delta_nu(const GscSpec& spec, double beta, double e);

/// Builds LocalGeometry for direction v at x; e is taken from hess_vec.
LocalGeometry local_geometry(const Objective& f, const Vector& x, const Vector& v, double gap);

struct DescentBounds {
  double lower = 0.0;
  std::optional<double> upper;  // absent when nu > 2 and d_nu(x, y) >= 1
  double distance = 0.0;        // d_nu(x, y)
};

/// Local lower/upper bounds on f(y) around x.
DescentBounds descent_bounds(const Objective& f, const Vector& x, const Vector& y);

struct WeightedConstant {
  double weight;
  double m;
};

/// M_f of sum_i w_i f_i with f_i in F_{M_i, nu}.
double gsc_sum_constant(std::span<const WeightedConstant> terms, double nu);

/// M_f of f(Ax + b) for nu in [2, 3]; the min_singular_sq argument belongs to
/// the nu > 3 case and is rejected.
double gsc_affine_constant(double m, double nu, double operator_norm,
                           std::optional<double> min_singular_sq = std::nullopt);

struct FiniteSumTerm {
  double m_phi;
  double a_norm;
};

/// M_f (order 3) of sum_i phi_i(<a_i, x> + b_i) + <q, x> + <Qx, x>/2.
double gsc_finite_sum_constant(std::span<const FiniteSumTerm> phis, double nu,
                               double lambda_min_q);

}  // namespace gscfw
