#pragma once

// Feasible sets, linear minimization oracles and related queries.
//
// Points are plain vectors. Matrix-valued sets (SymL1Ball) use the
// column-major vectorization, so the Euclidean inner product is the
// Frobenius one.

#include "gscfw/gsc.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gscfw {

using VertexId = std::int64_t;

struct Vertex {
  std::optional<VertexId> id;  // set by polytopes only
  Vector point;
};

class FeasibleSet {
 public:
  virtual ~FeasibleSet() = default;

  virtual Eigen::Index dimension() const = 0;
  /// argmin over the set of <c, .>, lowest index on ties.
  virtual Vertex lmo(const Vector& c) const = 0;
  virtual bool contains(const Vector& x, double tol = 1e-9) const = 0;
  virtual double diameter() const = 0;
  /// True when every lmo output carries a vertex id.
  virtual bool is_polytope() const { return false; }
};

/// Unit simplex {x >= 0, sum x = 1}. Vertex id i is e_i.
class Simplex final : public FeasibleSet {
 public:
  explicit Simplex(Eigen::Index n);
  Eigen::Index dimension() const override { return n_; }
  Vertex lmo(const Vector& c) const override;
  bool contains(const Vector& x, double tol = 1e-9) const override;
  double diameter() const override;
  bool is_polytope() const override { return true; }

 private:
  Eigen::Index n_;
};

/// {||x||_1 <= R}. Vertex id 2i is +R e_i, 2i+1 is -R e_i.
class L1Ball final : public FeasibleSet {
 public:
  L1Ball(Eigen::Index n, double radius);
  Eigen::Index dimension() const override { return n_; }
  Vertex lmo(const Vector& c) const override;
  bool contains(const Vector& x, double tol = 1e-9) const override;
  double diameter() const override { return 2.0 * radius_; }
  bool is_polytope() const override { return true; }
  double radius() const { return radius_; }

 private:
  Eigen::Index n_;
  double radius_;
};

/// Box prod_i [lo_i, hi_i]. Vertex id is the bitmask of coordinates at hi
/// (dimension <= 62).
class Box final : public FeasibleSet {
 public:
  Box(Vector lo, Vector hi);
  Eigen::Index dimension() const override { return lo_.size(); }
  Vertex lmo(const Vector& c) const override;
  bool contains(const Vector& x, double tol = 1e-9) const override;
  double diameter() const override { return (hi_ - lo_).norm(); }
  bool is_polytope() const override { return true; }

 private:
  Vector lo_, hi_;
};

/// Symmetric p x p matrices with entrywise l1 norm <= R, stored column-major.
/// Vertices are +-R E_ii and +-(R/2)(E_ij + E_ji), i < j.
class SymL1Ball final : public FeasibleSet {
 public:
  SymL1Ball(Eigen::Index p, double radius);
  Eigen::Index dimension() const override { return p_ * p_; }
  Vertex lmo(const Vector& c) const override;
  bool contains(const Vector& x, double tol = 1e-9) const override;
  double diameter() const override { return 2.0 * radius_; }
  bool is_polytope() const override { return true; }
  Eigen::Index order() const { return p_; }
  double radius() const { return radius_; }

 private:
  Eigen::Index p_;
  double radius_;
};

/// Cartesian product of Euclidean balls, intervals and nonnegative balls.
class ProductSet final : public FeasibleSet {
 public:
  enum class Kind { kBall, kInterval, kNonnegBall };
  struct Block {
    Kind kind;
    Eigen::Index dim;
    double a;  // ball radius, or interval lower end
    double b;  // interval upper end
  };
  static Block ball(Eigen::Index dim, double radius) { return {Kind::kBall, dim, radius, 0.0}; }
  static Block interval(double lo, double hi) { return {Kind::kInterval, 1, lo, hi}; }
  static Block nonneg_ball(Eigen::Index dim, double radius) {
    return {Kind::kNonnegBall, dim, radius, 0.0};
  }

  explicit ProductSet(std::vector<Block> blocks);
  Eigen::Index dimension() const override { return dim_; }
  Vertex lmo(const Vector& c) const override;
  bool contains(const Vector& x, double tol = 1e-9) const override;
  double diameter() const override;
  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  std::vector<Block> blocks_;
  Eigen::Index dim_ = 0;
};

/// Local linear oracle: minimizes <c, .> over
/// B(x, r) ∩ X and returns u with ||x - u|| <= rho r.
class LlooOracle {
 public:
  virtual ~LlooOracle() = default;
  virtual Vector query(const Vector& x, double r, const Vector& c) const = 0;
  virtual double rho() const = 0;
};

/// Moves at most min(sqrt(n) r / 2, 1) mass from the largest-cost
/// coordinates onto the best vertex.
Vector simplex_lloo(const Vector& x, double r, const Vector& c);

class SimplexLloo final : public LlooOracle {
 public:
  explicit SimplexLloo(Eigen::Index n) : n_(n) {}
  Vector query(const Vector& x, double r, const Vector& c) const override {
    return simplex_lloo(x, r, c);
  }
  double rho() const override;

 private:
  Eigen::Index n_;
};

/// <grad, x - s>. Small negative values from rounding are clamped to 0;
/// anything below the clamp raises OracleViolation.
double fw_gap(const Vector& grad, const Vector& x, const Vector& s);

/// sup{t in (0, 1] : x + t v in dom f}, slightly shrunk when the boundary
/// binds. Uses the objective's exact rule when it has one.
double max_feasible_step(const Objective& f, const Vector& x, const Vector& v);

/// Generic bisection on the domain oracle, 30 halvings.
double max_feasible_step_bisect(const Objective& f, const Vector& x, const Vector& v);

inline constexpr double kStepShrink = 1.0 - 1e-7;

}  // namespace gscfw
