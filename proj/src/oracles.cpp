#include "gscfw/oracles.hpp"

#include "gscfw/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gscfw {

namespace {

void check_dim(const Vector& c, Eigen::Index n, const char* who) {
  if (c.size() != n) throw InvalidArgument(std::string(who) + ": dimension mismatch");
}

// argmin with lowest-index tie-break
Eigen::Index argmin_first(const Vector& c) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < c.size(); ++i) {
    if (c[i] < c[best]) best = i;
  }
  return best;
}

}  // namespace

// --- Simplex ---

Simplex::Simplex(Eigen::Index n) : n_(n) {
  if (n < 1) throw InvalidArgument("Simplex: dimension must be positive");
}

Vertex Simplex::lmo(const Vector& c) const {
  check_dim(c, n_, "simplex_lmo");
  const Eigen::Index i = argmin_first(c);
  Vertex v{i, Vector::Zero(n_)};
  v.point[i] = 1.0;
  return v;
}

bool Simplex::contains(const Vector& x, double tol) const {
  if (x.size() != n_) return false;
  if (x.minCoeff() < -tol) return false;
  return std::abs(x.sum() - 1.0) <= tol;
}

double Simplex::diameter() const { return n_ == 1 ? 0.0 : std::sqrt(2.0); }

double SimplexLloo::rho() const { return std::sqrt(static_cast<double>(n_)); }

Vector simplex_lloo(const Vector& x, double r, const Vector& c) {
  const Eigen::Index n = x.size();
  check_dim(c, n, "simplex_lloo");
  if (!(r > 0.0)) throw InvalidArgument("simplex_lloo: radius must be positive");
  if (x.minCoeff() < -1e-9 || std::abs(x.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("simplex_lloo: x is not on the simplex");
  }
  if (c.isZero(0.0)) return x;

  const double budget = std::min(std::sqrt(static_cast<double>(n)) * r / 2.0, 1.0);
  const Eigen::Index best = argmin_first(c);

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return c[a] > c[b]; });

  Vector u = x.cwiseMax(0.0);
  double left = budget;
  double moved = 0.0;
  for (Eigen::Index i : order) {
    if (left <= 0.0) break;
    const double take = std::min(u[i], left);
    u[i] -= take;
    left -= take;
    moved += take;
  }
  u[best] += moved;
  return u;
}

// --- L1 ball ---

L1Ball::L1Ball(Eigen::Index n, double radius) : n_(n), radius_(radius) {
  if (n < 1) throw InvalidArgument("L1Ball: dimension must be positive");
  if (!(radius > 0.0)) throw InvalidArgument("L1Ball: radius must be positive");
}

Vertex L1Ball::lmo(const Vector& c) const {
  check_dim(c, n_, "l1ball_lmo");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n_; ++i) {
    if (std::abs(c[i]) > std::abs(c[best])) best = i;
  }
  const bool neg = c[best] >= 0.0;  // sign(0) = +1, so the vertex is -R e_i
  Vertex v{2 * best + (neg ? 1 : 0), Vector::Zero(n_)};
  v.point[best] = neg ? -radius_ : radius_;
  return v;
}

bool L1Ball::contains(const Vector& x, double tol) const {
  return x.size() == n_ && x.lpNorm<1>() <= radius_ * (1.0 + tol) + tol;
}

// --- Box ---

Box::Box(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() < 1 || lo_.size() > 62) {
    throw InvalidArgument("Box: bad dimensions");
  }
  if ((hi_.array() < lo_.array()).any()) throw InvalidArgument("Box: lo > hi");
}

Vertex Box::lmo(const Vector& c) const {
  check_dim(c, lo_.size(), "box_lmo");
  Vertex v{VertexId{0}, lo_};
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c[i] < 0.0) {
      v.point[i] = hi_[i];
      *v.id |= VertexId{1} << i;
    }
  }
  return v;
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lo_.size()) return false;
  return ((x - lo_).array() >= -tol).all() && ((hi_ - x).array() >= -tol).all();
}

// --- Symmetric l1 ball ---

SymL1Ball::SymL1Ball(Eigen::Index p, double radius) : p_(p), radius_(radius) {
  if (p < 1) throw InvalidArgument("SymL1Ball: order must be positive");
  if (!(radius > 0.0)) throw InvalidArgument("SymL1Ball: radius must be positive");
}

Vertex SymL1Ball::lmo(const Vector& c) const {
  check_dim(c, p_ * p_, "sym_l1_lmo");
  Eigen::Map<const Eigen::MatrixXd> g(c.data(), p_, p_);
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (((g - g.transpose()).cwiseAbs().array() > 1e-10 * scale).any()) {
    throw InvalidArgument("sym_l1_lmo: gradient is not symmetric");
  }
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < p_; ++i) {
    for (Eigen::Index j = i; j < p_; ++j) {
      const double a = std::abs(i == j ? g(i, i) : 0.5 * (g(i, j) + g(j, i)));
      if (a > best) {
        best = a;
        bi = i;
        bj = j;
      }
    }
  }
  const double gij = bi == bj ? g(bi, bi) : 0.5 * (g(bi, bj) + g(bj, bi));
  const bool neg = gij >= 0.0;
  Vertex v{((bi * p_ + bj) << 1) | (neg ? 1 : 0), Vector::Zero(p_ * p_)};
  Eigen::Map<Eigen::MatrixXd> s(v.point.data(), p_, p_);
  const double sign = neg ? -1.0 : 1.0;
  if (bi == bj) {
    s(bi, bi) = sign * radius_;
  } else {
    s(bi, bj) = s(bj, bi) = sign * radius_ / 2.0;
  }
  return v;
}

bool SymL1Ball::contains(const Vector& x, double tol) const {
  if (x.size() != p_ * p_) return false;
  Eigen::Map<const Eigen::MatrixXd> m(x.data(), p_, p_);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (((m - m.transpose()).cwiseAbs().array() > tol * scale).any()) return false;
  return x.lpNorm<1>() <= radius_ * (1.0 + tol) + tol;
}

// --- Product set ---

ProductSet::ProductSet(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("ProductSet: no blocks");
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw InvalidArgument("ProductSet: empty block");
    if (b.kind == Kind::kInterval) {
      if (b.dim != 1 || b.b < b.a) throw InvalidArgument("ProductSet: bad interval");
    } else if (!(b.a > 0.0)) {
      throw InvalidArgument("ProductSet: radius must be positive");
    }
    dim_ += b.dim;
  }
}

Vertex ProductSet::lmo(const Vector& c) const {
  check_dim(c, dim_, "product_lmo");
  Vertex out{std::nullopt, Vector::Zero(dim_)};
  Eigen::Index off = 0;
  for (const auto& b : blocks_) {
    auto cb = c.segment(off, b.dim);
    auto sb = out.point.segment(off, b.dim);
    switch (b.kind) {
      case Kind::kBall: {
        const double nc = cb.norm();
        if (nc == 0.0) {
          sb[0] = b.a;
        } else {
          sb = -b.a * cb / nc;
        }
        break;
      }
      case Kind::kInterval:
        sb[0] = cb[0] > 0.0 ? b.a : (cb[0] < 0.0 ? b.b : b.a);
        break;
      case Kind::kNonnegBall: {
        Vector w = (-cb).cwiseMax(0.0);
        const double nw = w.norm();
        if (nw > 0.0) sb = b.a * w / nw;
        break;
      }
    }
    off += b.dim;
  }
  return out;
}

bool ProductSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  Eigen::Index off = 0;
  for (const auto& b : blocks_) {
    auto xb = x.segment(off, b.dim);
    switch (b.kind) {
      case Kind::kBall:
        if (xb.norm() > b.a * (1.0 + tol) + tol) return false;
        break;
      case Kind::kInterval:
        if (xb[0] < b.a - tol || xb[0] > b.b + tol) return false;
        break;
      case Kind::kNonnegBall:
        if (xb.minCoeff() < -tol || xb.norm() > b.a * (1.0 + tol) + tol) return false;
        break;
    }
    off += b.dim;
  }
  return true;
}

double ProductSet::diameter() const {
  double sq = 0.0;
  for (const auto& b : blocks_) {
    switch (b.kind) {
      case Kind::kBall: sq += 4.0 * b.a * b.a; break;
      case Kind::kInterval: sq += (b.b - b.a) * (b.b - b.a); break;
      case Kind::kNonnegBall: sq += (b.dim > 1 ? 2.0 : 1.0) * b.a * b.a; break;
    }
  }
  return std::sqrt(sq);
}

// --- gap and step bounds ---

double fw_gap(const Vector& grad, const Vector& x, const Vector& s) {
  const double gx = grad.dot(x);
  const double gs = grad.dot(s);
  const double g = gx - gs;
  if (g >= 0.0) return g;
  const double clamp = 1e-12 * std::max(1.0, std::abs(gx) + std::abs(gs));
  if (g >= -clamp) return 0.0;
  throw OracleViolation("negative Frank-Wolfe gap " + std::to_string(g));
}

double max_feasible_step_bisect(const Objective& f, const Vector& x, const Vector& v) {
  if (!f.in_domain(x)) throw DomainError("max_feasible_step: x not in domain");
  if (f.in_domain(x + v)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f.in_domain(x + mid * v)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo * kStepShrink;
}

double max_feasible_step(const Objective& f, const Vector& x, const Vector& v) {
  if (!f.in_domain(x)) throw DomainError("max_feasible_step: x not in domain");
  if (auto t = f.exact_max_step(x, v)) return *t;
  return max_feasible_step_bisect(f, x, v);
}

}  // namespace gscfw
