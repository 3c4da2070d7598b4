#include "doctest.h"
#include "gscfw/errors.hpp"
#include "gscfw/problems.hpp"
#include "gscfw/solvers.hpp"
#include "oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace gscfw;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector gauss_vec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Vector symmetrize(const Vector& v, Eigen::Index p) {
  Eigen::Map<const Eigen::MatrixXd> m(v.data(), p, p);
  const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  return Eigen::Map<const Vector>(s.data(), p * p);
}

// Directional checks: <grad, v> and H v against central differences.
void check_derivatives(const Objective& f, const Vector& x, const Vector& v) {
  const double h = 1e-6;
  const double fd = (f.value(x + h * v) - f.value(x - h * v)) / (2.0 * h);
  const double an = f.gradient(x).dot(v);
  CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
  const Vector hv = f.hess_vec(x, v);
  const Vector hv_fd = oracle::fd_hess_vec([&](const Vector& y) { return f.gradient(y); }, x, v);
  CHECK(oracle::rel_diff(hv, hv_fd) <= 1e-5);
}

SparseDataset parse(const std::string& s, bool normalize = false) {
  std::istringstream in(s);
  return libsvm_parse(in, normalize);
}

}  // namespace

TEST_CASE("logistic constants and values") {
  const int p = 64;
  const auto data = classification_generator(p, 12, 0.4, 5);
  LogisticObjective f2(data, 1.0 / p, 2), f3(data, 1.0 / p, 3);
  CHECK(f2.spec().m_f() == doctest::Approx(1.0));
  CHECK(f2.spec().nu() == 2.0);
  CHECK(f3.spec().m_f() == doctest::Approx(std::sqrt(static_cast<double>(p))));
  CHECK(f3.spec().nu() == 3.0);
  CHECK(f2.spec().m_f() / f3.spec().m_f() == doctest::Approx(1.0 / std::sqrt(64.0)));

  SparseDataset one;
  one.rows = {{{0, 1.0}}};
  one.labels = {1.0};
  one.n = 1;
  LogisticObjective g(one, 0.5, 2);
  CHECK(g.value(Vector::Zero(1)) == doctest::Approx(std::log(2.0)));

  // gradient at 0: -(1/p) sum y_i a_i / 2
  const Eigen::MatrixXd a = data.to_dense();
  Vector expect = Vector::Zero(12);
  for (int i = 0; i < p; ++i) expect -= data.labels[i] * a.row(i).transpose() / 2.0;
  expect /= p;
  CHECK(oracle::rel_diff(f2.gradient(Vector::Zero(12)), expect) < 1e-14);

  CHECK_THROWS_AS(LogisticObjective(SparseDataset{}, 1.0, 2), InvalidArgument);
  CHECK_THROWS_AS(LogisticObjective(data, 1.0, 4), InvalidArgument);
}

TEST_CASE("logistic derivatives") {
  const auto data = classification_generator(40, 10, 0.5, 2);
  LogisticObjective f(data, 0.025, 2);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const Vector x = gauss_vec(rng, 10);
    check_derivatives(f, x, gauss_vec(rng, 10));
    const Vector fd = oracle::fd_gradient([&](const Vector& y) { return f.value(y); }, x);
    CHECK(oracle::rel_diff(f.gradient(x), fd) < 1e-7);
  }
  // large margins stay finite
  CHECK(std::isfinite(f.value(Vector::Constant(10, 1e4))));
  CHECK(std::isfinite(f.value(Vector::Constant(10, -1e4))));
}

TEST_CASE("portfolio objective") {
  PortfolioObjective ones(Eigen::MatrixXd::Ones(5, 3));
  const Vector x = vec({0.2, 0.3, 0.5});
  CHECK(ones.value(x) == doctest::Approx(0.0));
  CHECK(oracle::rel_diff(ones.gradient(x), Vector::Constant(3, -5.0)) < 1e-15);

  Eigen::MatrixXd single(3, 1);
  single << 1.1, 0.9, 1.3;
  PortfolioObjective s(single);
  CHECK(s.value(Vector::Ones(1)) ==
        doctest::Approx(-(std::log(1.1) + std::log(0.9) + std::log(1.3))));

  Eigen::MatrixXd neg(2, 2);
  neg << 1.0, -1.0, 1.0, 1.0;
  PortfolioObjective n(neg);
  CHECK_FALSE(n.in_domain(vec({0.5, 0.5})));
  CHECK(n.in_domain(vec({0.6, 0.4})));
  CHECK(std::isinf(n.value(vec({0.4, 0.6}))));

  PortfolioObjective f(portfolio_generator(30, 8, 4));
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    Vector y = gauss_vec(rng, 8).cwiseAbs();
    y /= y.sum();
    check_derivatives(f, y, 0.1 * gauss_vec(rng, 8));
  }
}

TEST_CASE("portfolio 2x2 instance against a 1-D solve") {
  Eigen::MatrixXd r(2, 2);
  r << 1.2, 0.9, 0.8, 1.1;
  PortfolioObjective f(r);
  // x = (t, 1 - t); d/dt of -f is decreasing in t
  auto dneg = [](double t) { return 0.3 / (0.9 + 0.3 * t) - 0.3 / (1.1 - 0.3 * t); };
  const double t_ref = oracle::bisect_decreasing(dneg, 0.0, 1.0);
  const double t_gold = oracle::golden_max(
      [&](double t) { return -f.value(vec({t, 1.0 - t})); }, 0.0, 1.0);
  CHECK(std::abs(t_ref - t_gold) < 1e-6);
  SolverConfig cfg;
  cfg.epsilon = 1e-15;
  cfg.max_iter = 2000;
  const auto tr = asfwgsc(f, Simplex(2), vec({1.0, 0.0}), cfg);
  CHECK(std::abs(tr.x_final[0] - t_ref) <= 1e-8);
}

TEST_CASE("portfolio generator statistics") {
  const Eigen::MatrixXd r = portfolio_generator(1000, 100, 11);
  const double n = static_cast<double>(r.size());
  const double mean = r.mean();
  CHECK(std::abs(mean - 1.0) <= 3.0 * 0.1 / std::sqrt(n));
  const double var = (r.array() - mean).square().sum() / (n - 1.0);
  CHECK(std::abs(var - 0.01) <= 0.001);
  CHECK(r == portfolio_generator(1000, 100, 11));
  CHECK(r != portfolio_generator(1000, 100, 12));
  CHECK_THROWS_AS(portfolio_generator(0, 3, 1), InvalidArgument);
}

TEST_CASE("classification generator") {
  const auto d = classification_generator(200, 30, 0.3, 8);
  CHECK(d.p() == 200);
  CHECK(d.n == 30);
  int pos = 0;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < d.p(); ++i) {
    CHECK((d.labels[i] == 1.0 || d.labels[i] == -1.0));
    pos += d.labels[i] > 0;
    double sq = 0.0;
    int last = -1;
    for (const auto& [j, v] : d.rows[i]) {
      CHECK(j > last);
      last = j;
      sq += v * v;
    }
    if (!d.rows[i].empty()) CHECK(sq == doctest::Approx(1.0));
    nnz += d.rows[i].size();
  }
  CHECK(pos > 0);
  CHECK(pos < 200);
  const double density = static_cast<double>(nnz) / (200.0 * 30.0);
  CHECK(density > 0.2);
  CHECK(density < 0.4);
  CHECK(d == classification_generator(200, 30, 0.3, 8));
}

TEST_CASE("dwd objective") {
  const auto data = classification_generator(25, 6, 0.6, 3);
  auto inst = dwd_problem(data, 2.0);
  CHECK(inst.objective->spec().nu() == doctest::Approx(2.5));
  CHECK(DwdObjective(data, 1.0, Vector::Ones(25)).spec().nu() == doctest::Approx(8.0 / 3.0));
  const auto* set = dynamic_cast<const ProductSet*>(inst.set.get());
  REQUIRE(set != nullptr);
  REQUIRE(set->blocks().size() == 3);
  CHECK(set->blocks()[0].a == 1.0);
  CHECK(set->blocks()[1].a == -5.0);
  CHECK(set->blocks()[1].b == 5.0);
  CHECK(set->blocks()[2].a == doctest::Approx(std::sqrt(10.0)));
  CHECK(inst.objective->dimension() == 6 + 1 + 25);

  // q = 2: ((q+2)/(q(q+1))^{1/(q+2)}) p^{1/(q+2)} m^{q/(q+2)}
  CHECK(dwd_constant(2.0, 16.0, 9.0) == doctest::Approx(4.0 / std::pow(6.0, 0.25) * 2.0 * 3.0));

  std::mt19937_64 rng(4);
  const Vector x0 = inst.start(3);
  for (int t = 0; t < 10; ++t) check_derivatives(*inst.objective, x0, 0.01 * gauss_vec(rng, 32));
}

TEST_CASE("dwd single-sample toy") {
  SparseDataset one;
  one.rows = {{{0, 1.0}}};
  one.labels = {1.0};
  one.n = 1;
  DwdObjective f(one, 2.0, Vector::Ones(1));
  // x = (w, mu, xi): (w + mu + xi)^{-2} + xi
  const Vector x = vec({0.3, 0.1, 0.4});
  CHECK(f.value(x) == doctest::Approx(std::pow(0.8, -2.0) + 0.4));
  const Vector fd = oracle::fd_gradient([&](const Vector& y) { return f.value(y); }, x);
  CHECK(oracle::rel_diff(f.gradient(x), fd) < 1e-7);
  CHECK_FALSE(f.in_domain(vec({-0.3, -0.1, 0.1})));
  CHECK_THROWS_AS(DwdObjective(one, 0.5, Vector::Ones(1)), InvalidArgument);
}

TEST_CASE("covariance objective") {
  const int p = 4;
  const Eigen::MatrixXd sigma = covariance_generator(p, 2);
  CHECK((sigma - sigma.transpose()).norm() < 1e-14);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma).eigenvalues().minCoeff() > 0.0);
  CHECK(sigma == covariance_generator(p, 2));
  CovarianceObjective f(sigma);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  const Vector id = Eigen::Map<const Vector>(eye.data(), p * p);
  CHECK(f.value(id) == doctest::Approx(sigma.trace()));
  const Eigen::MatrixXd g_expect = sigma - eye;
  CHECK(oracle::rel_diff(f.gradient(id), Eigen::Map<const Vector>(g_expect.data(), p * p)) <
        1e-13);

  CovarianceObjective unit(eye);
  CHECK(unit.gradient(id).norm() < 1e-13);
  CHECK(unit.value(id) == doctest::Approx(static_cast<double>(p)));

  Vector bad = -id;
  CHECK_FALSE(f.in_domain(bad));

  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    const Vector v = 0.1 * symmetrize(gauss_vec(rng, p * p), p);
    check_derivatives(f, id + 0.5 * v, symmetrize(gauss_vec(rng, p * p), p));
  }
  Eigen::MatrixXd asym = eye;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(CovarianceObjective{asym}, InvalidArgument);
}

TEST_CASE("neg-log-sum objective") {
  NegLogSumObjective f(vec({1.0, 4.0}), vec({0.5, 0.0}));
  CHECK(f.spec().m_f() == doctest::Approx(2.0));
  CHECK(f.spec().nu() == 3.0);
  CHECK(NegLogSumObjective(vec({4.0}), vec({0.0})).spec().m_f() == doctest::Approx(1.0));
  check_derivatives(f, vec({0.7, 1.3}), vec({0.2, -0.4}));
}

TEST_CASE("problem instances: starts are feasible and seeded") {
  std::vector<ProblemInstance> all;
  all.push_back(logistic_problem(classification_generator(30, 8, 0.5, 1), 1.0 / 30, 10.0, 2));
  all.push_back(portfolio_problem(portfolio_generator(30, 8, 1)));
  all.push_back(dwd_problem(classification_generator(20, 5, 0.5, 1), 2.0));
  all.push_back(covariance_problem(covariance_generator(5, 1)));
  for (const auto& inst : all) {
    CAPTURE(inst.name);
    CHECK(inst.set->dimension() == inst.objective->dimension());
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Vector x = inst.start(seed);
      CHECK(inst.set->contains(x));
      CHECK(inst.objective->in_domain(x));
      CHECK(x == inst.start(seed));
    }
  }
  const auto& cov = all[3];
  const Vector x = cov.start(2);
  const auto a = cov.start_active(x);
  REQUIRE(a.has_value());
  CHECK((a->reconstruct() - x).norm() < 1e-12);
  CHECK(std::abs(a->weight_sum() - 1.0) < 1e-12);
  CHECK(all[1].lloo != nullptr);
}

TEST_CASE("libsvm parse") {
  const auto d = parse("+1 1:0.5 3:2\n\n-1 2:1e-3\n1\n");
  CHECK(d.p() == 3);
  CHECK(d.n == 3);
  CHECK(d.labels == std::vector<double>{1.0, -1.0, 1.0});
  CHECK(d.rows[0] == SparseRow{{0, 0.5}, {2, 2.0}});
  CHECK(d.rows[1] == SparseRow{{1, 1e-3}});
  CHECK(d.rows[2].empty());

  const auto n = parse("+1 1:3 2:4\n", true);
  CHECK(n.rows[0][0].second == doctest::Approx(0.6));
  CHECK(n.rows[0][1].second == doctest::Approx(0.8));

  const Eigen::MatrixXd dense = d.to_dense();
  CHECK(dense(0, 2) == 2.0);
  CHECK(dense(1, 0) == 0.0);
  CHECK(d.to_csr().nonZeros() == 3);
}

TEST_CASE("libsvm errors carry the line number") {
  auto line_of = [](const std::string& s) {
    try {
      parse(s);
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(line_of("+1 1:1\n2 1:1\n") == 2);
  CHECK(line_of("+1 3:1 2:1\n") == 1);
  CHECK(line_of("+1 2:1 2:1\n") == 1);
  CHECK(line_of("+1 0:1\n") == 1);
  CHECK(line_of("+1 1:x\n") == 1);
  CHECK(line_of("+1 1:\n") == 1);
  CHECK(line_of("+1 :4\n") == 1);
  CHECK(line_of("-1 1:1\n\nabc\n") == 3);
  CHECK(line_of("+1 1:1\n-1 4:2\n") == -1);
}

TEST_CASE("libsvm round trip") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = classification_generator(50, 40, 0.2, seed);
    std::ostringstream out;
    libsvm_serialize(d, out);
    auto back = parse(out.str());
    // trailing all-zero columns are not visible in the text format
    back.n = d.n;
    CHECK(back == d);
  }
}
