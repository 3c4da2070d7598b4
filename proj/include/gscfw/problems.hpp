#pragma once

// Benchmark objectives, their feasible sets and data generators.

#include "gscfw/active_set.hpp"
#include "gscfw/gsc.hpp"
#include "gscfw/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gscfw {

using SparseRow = std::vector<std::pair<int, double>>;
using CsrMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SparseDataset {
  std::vector<SparseRow> rows;  // 0-based, strictly increasing indices
  std::vector<double> labels;   // +1 / -1
  int n = 0;

  std::size_t p() const { return rows.size(); }
  CsrMatrix to_csr() const;
  Eigen::MatrixXd to_dense() const;
  /// Divides every nonzero row by its Euclidean norm.
  void normalize_rows();
  bool operator==(const SparseDataset&) const = default;
};

SparseDataset libsvm_parse(std::istream& in, bool normalize = false);
void libsvm_serialize(const SparseDataset& data, std::ostream& out);

/// Two-class data from a planted separator; rows are normalized.
SparseDataset classification_generator(int p, int n, double density, std::uint64_t seed);

// --- objectives ---

/// (1/p) sum log(1 + exp(-y_i <a_i, x>)) + gamma/2 ||x||^2
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(const SparseDataset& data, double gamma, int nu_mode);
  Eigen::Index dimension() const override { return a_.cols(); }
  GscSpec spec() const override { return spec_; }
  bool in_domain(const Vector& x) const override { return x.allFinite(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector hess_vec(const Vector& x, const Vector& v) const override;
  std::optional<double> exact_max_step(const Vector&, const Vector&) const override {
    return 1.0;
  }
  double max_row_norm() const { return max_row_norm_; }

 private:
  CsrMatrix a_;
  Vector y_;
  double gamma_;
  double max_row_norm_ = 0.0;
  GscSpec spec_;
};

/// -sum_t log(<r_t, x>)
class PortfolioObjective final : public Objective {
 public:
  explicit PortfolioObjective(Eigen::MatrixXd returns);
  Eigen::Index dimension() const override { return r_.cols(); }
  GscSpec spec() const override { return GscSpec(2.0, 3.0); }
  bool in_domain(const Vector& x) const override;
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector hess_vec(const Vector& x, const Vector& v) const override;
  std::optional<double> exact_max_step(const Vector& x, const Vector& v) const override;
  const Eigen::MatrixXd& returns() const { return r_; }

 private:
  Eigen::MatrixXd r_;
};

/// (1/p) sum (a_i^T w + mu y_i + xi_i)^{-q} + c^T xi over x = (w, mu, xi)
class DwdObjective final : public Objective {
 public:
  DwdObjective(const SparseDataset& data, double q, Vector c);
  Eigen::Index dimension() const override { return d_ + 1 + p_; }
  GscSpec spec() const override { return spec_; }
  bool in_domain(const Vector& x) const override;
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector hess_vec(const Vector& x, const Vector& v) const override;
  std::optional<double> exact_max_step(const Vector& x, const Vector& v) const override;

 private:
  Vector margins(const Vector& x) const;
  Vector apply_b(const Vector& v) const;          // (b_i^T v)_i
  Vector apply_bt(const Vector& weights) const;   // sum_i weights_i b_i
  Eigen::MatrixXd a_;
  Vector y_;
  Vector c_;
  double q_;
  Eigen::Index d_, p_;
  GscSpec spec_;
};

/// -log det X + tr(Sigma X) over symmetric X stored column-major.
class CovarianceObjective final : public Objective {
 public:
  explicit CovarianceObjective(Eigen::MatrixXd sigma_hat);
  Eigen::Index dimension() const override { return p_ * p_; }
  GscSpec spec() const override { return GscSpec(2.0, 3.0); }
  bool in_domain(const Vector& x) const override;
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector hess_vec(const Vector& x, const Vector& v) const override;
  std::optional<double> exact_max_step(const Vector& x, const Vector& v) const override;
  Eigen::Index order() const { return p_; }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::Index p_;
};

/// sum_i -w_i log x_i + <c, x>; Burg entropy and the two-variable barrier.
class NegLogSumObjective final : public Objective {
 public:
  NegLogSumObjective(Vector weights, Vector linear);
  Eigen::Index dimension() const override { return w_.size(); }
  GscSpec spec() const override { return spec_; }
  bool in_domain(const Vector& x) const override;
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector hess_vec(const Vector& x, const Vector& v) const override;
  std::optional<double> exact_max_step(const Vector& x, const Vector& v) const override;

 private:
  Vector w_, c_;
  GscSpec spec_;
};

/// (1/2)(x - b)^T Q (x - b), declared with M_f = 0 and nu = 2.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Eigen::MatrixXd q, Vector b);
  Eigen::Index dimension() const override { return b_.size(); }
  GscSpec spec() const override { return GscSpec(0.0, 2.0); }
  bool in_domain(const Vector& x) const override { return x.allFinite(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector hess_vec(const Vector&, const Vector& v) const override { return q_ * v; }
  std::optional<double> exact_max_step(const Vector&, const Vector&) const override {
    return 1.0;
  }

 private:
  Eigen::MatrixXd q_;
  Vector b_;
};

// --- instances ---

struct ProblemInstance {
  std::string name;
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const FeasibleSet> set;
  std::shared_ptr<const LlooOracle> lloo;  // only where a local oracle exists
  std::function<Vector(std::uint64_t seed)> start;
  /// Vertex decomposition of a start that is not a vertex.
  std::function<std::optional<ActiveSet>(const Vector&)> start_active;
  std::optional<double> reference_optimum;
  std::string reference_provenance;
};

ProblemInstance logistic_problem(const SparseDataset& data, double gamma, double radius,
                                 int nu_mode);
ProblemInstance portfolio_problem(Eigen::MatrixXd returns);
Eigen::MatrixXd portfolio_generator(int p, int n, std::uint64_t seed);
ProblemInstance dwd_problem(const SparseDataset& data, double q, std::optional<Vector> c = {},
                            double u = 5.0, double big_r = 10.0);
ProblemInstance covariance_problem(Eigen::MatrixXd sigma_hat);
Eigen::MatrixXd covariance_generator(int p, std::uint64_t seed);

/// DWD constant M_f for q, sample count p and max ||(a_i, y_i, e_i)||.
double dwd_constant(double q, double p, double max_norm);

}  // namespace gscfw
