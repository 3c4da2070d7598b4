#include "gscfw/problems.hpp"

#include "gscfw/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gscfw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Largest t in (0, 1] keeping z + t dz > 0, shrunk when the boundary binds.
double linear_max_step(const Vector& z, const Vector& dz) {
  double t = kInf;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (dz[i] < 0.0) t = std::min(t, z[i] / -dz[i]);
  }
  return t > 1.0 ? 1.0 : t * kStepShrink;
}

double row_norm(const SparseRow& r) {
  double s = 0.0;
  for (const auto& [j, v] : r) s += v * v;
  return std::sqrt(s);
}

}  // namespace

// --- dataset ---

CsrMatrix SparseDataset::to_csr() const {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i]) trip.emplace_back(static_cast<int>(i), j, v);
  }
  CsrMatrix m(static_cast<Eigen::Index>(rows.size()), n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::MatrixXd SparseDataset::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i]) m(static_cast<Eigen::Index>(i), j) = v;
  }
  return m;
}

void SparseDataset::normalize_rows() {
  for (auto& r : rows) {
    const double nr = row_norm(r);
    if (nr > 0.0) {
      for (auto& e : r) e.second /= nr;
    }
  }
}

SparseDataset classification_generator(int p, int n, double density, std::uint64_t seed) {
  if (p < 1 || n < 1 || !(density > 0.0 && density <= 1.0)) {
    throw InvalidArgument("classification_generator: bad sizes or density");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  Vector w(n);
  for (int j = 0; j < n; ++j) w[j] = gauss(rng);

  SparseDataset d;
  d.n = n;
  for (int i = 0; i < p; ++i) {
    SparseRow row;
    for (int j = 0; j < n; ++j) {
      if (unif(rng) < density) row.emplace_back(j, gauss(rng));
    }
    if (row.empty()) row.emplace_back(pick(rng), 1.0);
    double score = 0.0;
    for (const auto& [j, v] : row) score += v * w[j];
    score += 0.5 * gauss(rng);
    d.rows.push_back(std::move(row));
    d.labels.push_back(score >= 0.0 ? 1.0 : -1.0);
  }
  d.normalize_rows();
  return d;
}

// --- logistic ---

LogisticObjective::LogisticObjective(const SparseDataset& data, double gamma, int nu_mode)
    : a_(data.to_csr()), gamma_(gamma), spec_(0.0, 2.0) {
  if (data.p() == 0) throw InvalidArgument("logistic: empty dataset");
  if (!(gamma > 0.0)) throw InvalidArgument("logistic: gamma must be positive");
  y_ = Eigen::Map<const Vector>(data.labels.data(), static_cast<Eigen::Index>(data.p()));
  for (const auto& r : data.rows) max_row_norm_ = std::max(max_row_norm_, row_norm(r));
  if (nu_mode == 2) {
    spec_ = GscSpec(gsc_affine_constant(1.0, 2.0, max_row_norm_), 2.0);
  } else if (nu_mode == 3) {
    const FiniteSumTerm t{1.0, max_row_norm_};
    spec_ = GscSpec(gsc_finite_sum_constant(std::span(&t, 1), 2.0, gamma), 3.0);
  } else {
    throw InvalidArgument("logistic: nu_mode must be 2 or 3");
  }
}

double LogisticObjective::value(const Vector& x) const {
  if (!in_domain(x)) return kInf;
  const Vector m = y_.cwiseProduct(a_ * x);
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += softplus(-m[i]);
  return s / static_cast<double>(m.size()) + 0.5 * gamma_ * x.squaredNorm();
}

Vector LogisticObjective::gradient(const Vector& x) const {
  const Vector m = y_.cwiseProduct(a_ * x);
  Vector w(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) w[i] = -y_[i] * sigmoid(-m[i]);
  return (a_.transpose() * w) / static_cast<double>(m.size()) + gamma_ * x;
}

Vector LogisticObjective::hess_vec(const Vector& x, const Vector& v) const {
  const Vector m = y_.cwiseProduct(a_ * x);
  Vector av = a_ * v;
  for (Eigen::Index i = 0; i < m.size(); ++i) av[i] *= sigmoid(m[i]) * sigmoid(-m[i]);
  return (a_.transpose() * av) / static_cast<double>(m.size()) + gamma_ * v;
}

ProblemInstance logistic_problem(const SparseDataset& data, double gamma, double radius,
                                 int nu_mode) {
  auto obj = std::make_shared<LogisticObjective>(data, gamma, nu_mode);
  const int n = data.n;
  ProblemInstance inst;
  inst.name = "logistic";
  inst.objective = obj;
  inst.set = std::make_shared<L1Ball>(n, radius);
  inst.start = [n, radius](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 2 * n - 1);
    const int id = pick(rng);
    Vector x = Vector::Zero(n);
    x[id / 2] = (id % 2 == 0) ? radius : -radius;
    return x;
  };
  return inst;
}

// --- portfolio ---

PortfolioObjective::PortfolioObjective(Eigen::MatrixXd returns) : r_(std::move(returns)) {
  if (r_.rows() < 1 || r_.cols() < 1) throw InvalidArgument("portfolio: empty return matrix");
}

bool PortfolioObjective::in_domain(const Vector& x) const {
  if (!x.allFinite()) return false;
  return ((r_ * x).array() > 0.0).all();
}

double PortfolioObjective::value(const Vector& x) const {
  if (!x.allFinite()) return kInf;
  const Vector rx = r_ * x;
  if (!(rx.array() > 0.0).all()) return kInf;
  return -rx.array().log().sum();
}

Vector PortfolioObjective::gradient(const Vector& x) const {
  const Vector rx = r_ * x;
  return -(r_.transpose() * rx.cwiseInverse());
}

Vector PortfolioObjective::hess_vec(const Vector& x, const Vector& v) const {
  const Vector rx = r_ * x;
  const Vector rv = r_ * v;
  return r_.transpose() * rv.cwiseQuotient(rx.cwiseProduct(rx));
}

std::optional<double> PortfolioObjective::exact_max_step(const Vector& x, const Vector& v) const {
  return linear_max_step(r_ * x, r_ * v);
}

Eigen::MatrixXd portfolio_generator(int p, int n, std::uint64_t seed) {
  if (p < 1 || n < 1) throw InvalidArgument("portfolio_generator: sizes must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.1);
  Eigen::MatrixXd r(p, n);
  for (int t = 0; t < p; ++t) {
    for (int i = 0; i < n; ++i) r(t, i) = 1.0 + gauss(rng);
  }
  return r;
}

ProblemInstance portfolio_problem(Eigen::MatrixXd returns) {
  auto obj = std::make_shared<PortfolioObjective>(std::move(returns));
  const Eigen::Index n = obj->dimension();
  ProblemInstance inst;
  inst.name = "portfolio";
  inst.objective = obj;
  inst.set = std::make_shared<Simplex>(n);
  inst.lloo = std::make_shared<SimplexLloo>(n);
  inst.start = [obj, n](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    const Eigen::Index first = pick(rng);
    for (Eigen::Index k = 0; k < n; ++k) {
      Vector x = Vector::Zero(n);
      x[(first + k) % n] = 1.0;
      if (obj->in_domain(x)) return x;
    }
    throw InvalidArgument("portfolio: no simplex vertex lies in dom f");
  };
  return inst;
}

// --- DWD ---

double dwd_constant(double q, double p, double max_norm) {
  const double m_phi = (q + 2.0) / std::pow(q * (q + 1.0), 1.0 / (q + 2.0));
  return m_phi * std::pow(p, 1.0 / (q + 2.0)) * std::pow(max_norm, q / (q + 2.0));
}

DwdObjective::DwdObjective(const SparseDataset& data, double q, Vector c)
    : a_(data.to_dense()),
      c_(std::move(c)),
      q_(q),
      d_(data.n),
      p_(static_cast<Eigen::Index>(data.p())),
      spec_(0.0, 2.0) {
  if (p_ == 0) throw InvalidArgument("dwd: empty dataset");
  if (!(q >= 1.0)) throw InvalidArgument("dwd: q must be >= 1");
  if (c_.size() != p_) throw InvalidArgument("dwd: c must have one entry per sample");
  y_ = Eigen::Map<const Vector>(data.labels.data(), p_);
  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < p_; ++i) {
    max_norm = std::max(max_norm, std::sqrt(a_.row(i).squaredNorm() + y_[i] * y_[i] + 1.0));
  }
  const double nu = 2.0 * (q + 3.0) / (q + 2.0);
  spec_ = GscSpec(dwd_constant(q, static_cast<double>(p_), max_norm), nu);
}

Vector DwdObjective::apply_b(const Vector& v) const {
  return a_ * v.head(d_) + v[d_] * y_ + v.tail(p_);
}

Vector DwdObjective::apply_bt(const Vector& wt) const {
  Vector out(dimension());
  out.head(d_) = a_.transpose() * wt;
  out[d_] = y_.dot(wt);
  out.tail(p_) = wt;
  return out;
}

Vector DwdObjective::margins(const Vector& x) const { return apply_b(x); }

bool DwdObjective::in_domain(const Vector& x) const {
  if (x.size() != dimension() || !x.allFinite()) return false;
  return (margins(x).array() > 0.0).all();
}

double DwdObjective::value(const Vector& x) const {
  if (!x.allFinite()) return kInf;
  const Vector z = margins(x);
  if (!(z.array() > 0.0).all()) return kInf;
  return z.array().pow(-q_).sum() / static_cast<double>(p_) + c_.dot(x.tail(p_));
}

Vector DwdObjective::gradient(const Vector& x) const {
  const Vector z = margins(x);
  const Vector w = (-q_ * z.array().pow(-q_ - 1.0)).matrix() / static_cast<double>(p_);
  Vector g = apply_bt(w);
  g.tail(p_) += c_;
  return g;
}

Vector DwdObjective::hess_vec(const Vector& x, const Vector& v) const {
  const Vector z = margins(x);
  const Vector w = (q_ * (q_ + 1.0) * z.array().pow(-q_ - 2.0)).matrix() / static_cast<double>(p_);
  return apply_bt(w.cwiseProduct(apply_b(v)));
}

std::optional<double> DwdObjective::exact_max_step(const Vector& x, const Vector& v) const {
  return linear_max_step(margins(x), apply_b(v));
}

ProblemInstance dwd_problem(const SparseDataset& data, double q, std::optional<Vector> c,
                            double u, double big_r) {
  const Eigen::Index p = static_cast<Eigen::Index>(data.p());
  auto obj = std::make_shared<DwdObjective>(data, q, c ? *c : Vector(Vector::Ones(p)));
  const Eigen::Index d = data.n;
  ProblemInstance inst;
  inst.name = "dwd";
  inst.objective = obj;
  inst.set = std::make_shared<ProductSet>(std::vector<ProductSet::Block>{
      ProductSet::ball(d, 1.0), ProductSet::interval(-u, u),
      ProductSet::nonneg_ball(p, std::sqrt(big_r))});
  inst.start = [d, p, big_r](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(1e-3, 1.0);
    std::uniform_real_distribution<double> scale(0.2, 0.9);
    Vector xi(p);
    for (Eigen::Index i = 0; i < p; ++i) xi[i] = unif(rng);
    xi *= scale(rng) * std::sqrt(big_r) / xi.norm();
    Vector x = Vector::Zero(d + 1 + p);
    x.tail(p) = xi;
    return x;
  };
  return inst;
}

// --- covariance ---

namespace {

Eigen::Map<const Eigen::MatrixXd> as_matrix(const Vector& x, Eigen::Index p) {
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), p, p);
}

bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return ((m - m.transpose()).cwiseAbs().array() <= 1e-10 * scale).all();
}

Vector flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace

CovarianceObjective::CovarianceObjective(Eigen::MatrixXd sigma_hat)
    : sigma_(std::move(sigma_hat)), p_(sigma_.rows()) {
  if (sigma_.rows() != sigma_.cols() || p_ < 1) throw InvalidArgument("covariance: Sigma must be square");
  if (!is_symmetric(sigma_)) throw InvalidArgument("covariance: Sigma must be symmetric");
}

bool CovarianceObjective::in_domain(const Vector& x) const {
  if (x.size() != p_ * p_ || !x.allFinite()) return false;
  const auto m = as_matrix(x, p_);
  if (!is_symmetric(m)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

double CovarianceObjective::value(const Vector& x) const {
  if (x.size() != p_ * p_ || !x.allFinite()) return kInf;
  const auto m = as_matrix(x, p_);
  if (!is_symmetric(m)) return kInf;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return kInf;
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -logdet + sigma_.cwiseProduct(m).sum();
}

Vector CovarianceObjective::gradient(const Vector& x) const {
  Eigen::LLT<Eigen::MatrixXd> llt(as_matrix(x, p_));
  if (llt.info() != Eigen::Success) throw DomainError("covariance: X is not positive definite");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p_, p_));
  inv = 0.5 * (inv + inv.transpose());
  return flatten(sigma_ - inv);
}

Vector CovarianceObjective::hess_vec(const Vector& x, const Vector& v) const {
  Eigen::LLT<Eigen::MatrixXd> llt(as_matrix(x, p_));
  if (llt.info() != Eigen::Success) throw DomainError("covariance: X is not positive definite");
  const Eigen::MatrixXd a = llt.solve(as_matrix(v, p_));                  // X^{-1} V
  Eigen::MatrixXd h = llt.solve(a.transpose()).transpose();              // X^{-1} V X^{-1}
  h = 0.5 * (h + h.transpose());
  return flatten(h);
}

std::optional<double> CovarianceObjective::exact_max_step(const Vector& x, const Vector& v) const {
  Eigen::LLT<Eigen::MatrixXd> llt(as_matrix(x, p_));
  if (llt.info() != Eigen::Success) throw DomainError("covariance: X is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const auto tri = l.triangularView<Eigen::Lower>();
  Eigen::MatrixXd w = tri.solve(Eigen::MatrixXd(as_matrix(v, p_)));
  w = tri.solve(Eigen::MatrixXd(w.transpose())).transpose();  // L^{-1} V L^{-T}
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-w, Eigen::EigenvaluesOnly);
  const double lam = es.eigenvalues().maxCoeff();
  if (lam < 1.0) return 1.0;
  return kStepShrink / lam;
}

Eigen::MatrixXd covariance_generator(int p, std::uint64_t seed) {
  if (p < 1) throw InvalidArgument("covariance_generator: p must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.5, 1.0);
  Eigen::MatrixXd g(p, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
  Vector s(p);
  for (int i = 0; i < p; ++i) s[i] = unif(rng);
  Eigen::MatrixXd sigma = q * s.asDiagonal() * q.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

ProblemInstance covariance_problem(Eigen::MatrixXd sigma_hat) {
  auto obj = std::make_shared<CovarianceObjective>(std::move(sigma_hat));
  const Eigen::Index p = obj->order();
  const double radius = std::ceil(std::sqrt(static_cast<double>(p)));
  ProblemInstance inst;
  inst.name = "covariance";
  inst.objective = obj;
  inst.set = std::make_shared<SymL1Ball>(p, radius);
  inst.start = [p, radius](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    Vector d(p);
    for (Eigen::Index i = 0; i < p; ++i) d[i] = expo(rng) + 1e-3;
    d *= radius / d.sum();
    Eigen::MatrixXd x = d.asDiagonal();
    return flatten(x);
  };
  inst.start_active = [p, radius](const Vector& x) -> std::optional<ActiveSet> {
    const auto m = as_matrix(x, p);
    if (!m.isDiagonal(0.0) || std::abs(m.diagonal().sum() - radius) > 1e-9 * radius ||
        m.diagonal().minCoeff() < 0.0) {
      return std::nullopt;
    }
    ActiveSet a;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (m(i, i) == 0.0) continue;
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p, p);
      e(i, i) = radius;
      a.add((i * p + i) << 1, flatten(e), m(i, i) / radius);
    }
    a.normalize();
    return a;
  };
  return inst;
}

// --- small analytic objectives ---

NegLogSumObjective::NegLogSumObjective(Vector weights, Vector linear)
    : w_(std::move(weights)), c_(std::move(linear)), spec_(2.0, 3.0) {
  if (w_.size() < 1 || c_.size() != w_.size()) throw InvalidArgument("neglog: size mismatch");
  std::vector<WeightedConstant> terms;
  for (Eigen::Index i = 0; i < w_.size(); ++i) terms.push_back({w_[i], 2.0});
  spec_ = GscSpec(gsc_sum_constant(terms, 3.0), 3.0);
}

bool NegLogSumObjective::in_domain(const Vector& x) const {
  return x.size() == w_.size() && x.allFinite() && (x.array() > 0.0).all();
}

double NegLogSumObjective::value(const Vector& x) const {
  if (!in_domain(x)) return kInf;
  return -(w_.array() * x.array().log()).sum() + c_.dot(x);
}

Vector NegLogSumObjective::gradient(const Vector& x) const {
  return (-w_.array() / x.array()).matrix() + c_;
}

Vector NegLogSumObjective::hess_vec(const Vector& x, const Vector& v) const {
  return (w_.array() * v.array() / x.array().square()).matrix();
}

std::optional<double> NegLogSumObjective::exact_max_step(const Vector& x, const Vector& v) const {
  return linear_max_step(x, v);
}

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd q, Vector b) : q_(std::move(q)), b_(std::move(b)) {
  if (q_.rows() != b_.size() || q_.cols() != b_.size()) throw InvalidArgument("quadratic: size mismatch");
}

double QuadraticObjective::value(const Vector& x) const {
  if (!x.allFinite()) return kInf;
  const Vector d = x - b_;
  return 0.5 * d.dot(q_ * d);
}

Vector QuadraticObjective::gradient(const Vector& x) const { return q_ * (x - b_); }

}  // namespace gscfw
