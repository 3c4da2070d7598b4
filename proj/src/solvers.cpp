#include "gscfw/solvers.hpp"

#include "gscfw/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gscfw {

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (max_iter < 0) throw InvalidArgument("max_iter must be nonnegative");
  if (!(gamma_u > 1.0)) throw InvalidArgument("gamma_u must exceed 1");
  if (!(gamma_d > 0.0 && gamma_d < 1.0)) throw InvalidArgument("gamma_d must lie in (0, 1)");
  if (l_init && !(*l_init > 0.0)) throw InvalidArgument("l_init must be positive");
  if (!(mu_init > 0.0)) throw InvalidArgument("mu_init must be positive");
  if (sigma_f && !(*sigma_f > 0.0)) throw InvalidArgument("sigma_f must be positive");
  if (!(line_search_tol > 0.0)) throw InvalidArgument("line_search_tol must be positive");
}

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::kForward: return "forward";
    case StepKind::kAway: return "away";
    case StepKind::kDrop: return "drop";
    case StepKind::kZero: return "zero";
    case StepKind::kNone: return "none";
  }
  return "?";
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kGapConverged: return "gap-converged";
    case RunStatus::kIterationCap: return "iteration-cap";
    case RunStatus::kStalled: return "stalled";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

// Absorbs rounding in f when comparing against a sufficient-decrease model.
double model_slack(double fx) { return 1e-12 * (1.0 + std::abs(fx)); }

void check_start(const Objective& f, const FeasibleSet& set, const Vector& x0) {
  if (x0.size() != f.dimension() || set.dimension() != f.dimension()) {
    throw InvalidArgument("dimension mismatch between objective, set and start");
  }
  if (!set.contains(x0, 1e-8)) throw InvalidArgument("initial point is outside the feasible set");
  if (!f.in_domain(x0)) throw InvalidArgument("initial point is outside dom f");
}

struct StepOut {
  Vector x_next;
  bool stall = false;
};

// One loop for the plain FW variants. `step` fills the step fields of the
// record and returns the next iterate.
template <class Step>
RunTrace run_fw(const char* name, const Objective& f, const FeasibleSet& set, const Vector& x0,
                const SolverConfig& cfg, const Observer& obs, Step step) {
  cfg.validate();
  check_start(f, set, x0);
  RunTrace trace;
  trace.method = name;
  const auto t0 = Clock::now();
  Vector x = x0;
  bool stalled = false;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.f = f.value(x);
    const Vector g = f.gradient(x);
    const Vertex s = set.lmo(g);
    rec.gap = fw_gap(g, x, s.point);

    bool done = true;
    if (rec.gap <= cfg.epsilon) {
      trace.status = RunStatus::kGapConverged;
    } else if (stalled) {
      trace.status = RunStatus::kStalled;
    } else if (k >= cfg.max_iter) {
      trace.status = RunStatus::kIterationCap;
    } else {
      done = false;
    }
    if (done) {
      rec.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
      trace.records.push_back(rec);
      if (obs) obs(rec, x, nullptr);
      trace.x_final = x;
      trace.f_final = rec.f;
      return trace;
    }

    StepOut out = step(k, x, g, s, rec);
    stalled = out.stall;
    rec.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    trace.records.push_back(rec);
    if (obs) obs(rec, x, nullptr);
    x = std::move(out.x_next);
  }
}

void require_in_domain(const Objective& f, const Vector& y, const char* who) {
  if (!f.in_domain(y)) throw OracleViolation(std::string(who) + ": step left dom f");
}

}  // namespace

double curvature_probe(const Objective& f, const Vector& x, const Vector& v) {
  const double vv = v.squaredNorm();
  if (vv == 0.0) return 1.0;
  double h = 1e-4;
  while (!f.in_domain(x + h * v) && h > 1e-30) h *= 0.5;
  const double curv = (f.gradient(x + h * v) - f.gradient(x)).dot(v) / (h * vv);
  return std::max(std::abs(curv), 1e-8);
}

double hessian_min_eigenvalue(const Objective& f, const Vector& x) {
  const Eigen::Index n = f.dimension();
  Eigen::MatrixXd h(n, n);
  Vector e = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e[i] = 1.0;
    h.col(i) = f.hess_vec(x, e);
    e[i] = 0.0;
  }
  const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return std::max(es.eigenvalues().minCoeff(), 1e-10);
}

BacktrackResult step_l(const Objective& f, const Vector& x, const Vector& v, double fx,
                       double gap, double l_prev, const SolverConfig& cfg) {
  const double b2 = v.squaredNorm();
  if (!(gap > 0.0) || b2 == 0.0) throw InvalidArgument("step_l: needs gap > 0 and v != 0");
  BacktrackResult r;
  double lt = cfg.gamma_d * l_prev;
  for (int bt = 0; bt <= 100; ++bt) {
    const double alpha = std::min(1.0, gap / (lt * b2));
    const Vector y = x + alpha * v;
    const double q = fx - alpha * gap + 0.5 * alpha * alpha * lt * b2;
    if (f.in_domain(y)) {
      const double fy = f.value(y);
      if (fy <= q + model_slack(fx)) {
        r.alpha = alpha;
        r.estimate = lt;
        r.backtracks = bt;
        r.f_new = fy;
        r.model = q;
        r.predicted_decrease = fx - q;
        return r;
      }
    }
    lt *= cfg.gamma_u;
  }
  throw BacktrackFailure("step_l: no acceptable L after 100 increases");
}

BacktrackResult step_m(const Objective& f, const Vector& x, const Vector& v, double fx,
                       double gap, double mu_prev, const SolverConfig& cfg) {
  if (!(gap > 0.0)) throw InvalidArgument("step_m: needs gap > 0");
  const GscSpec spec = f.spec();
  const LocalGeometry geom = local_geometry(f, x, v, gap);
  BacktrackResult r;
  double mt = cfg.gamma_d * mu_prev;
  for (int bt = 0; bt <= 100; ++bt) {
    const StepDecision d = analytic_step(spec.with_m(mt), geom, 1.0);
    const Vector y = x + d.alpha * v;
    const double q = fx - d.predicted_decrease;
    if (f.in_domain(y)) {
      const double fy = f.value(y);
      if (fy <= q + model_slack(fx)) {
        r.alpha = d.alpha;
        r.estimate = mt;
        r.backtracks = bt;
        r.f_new = fy;
        r.model = q;
        r.predicted_decrease = d.predicted_decrease;
        return r;
      }
    }
    mt *= cfg.gamma_u;
  }
  throw BacktrackFailure("step_m: no acceptable M after 100 increases");
}

RunTrace fw_standard(const Objective& f, const FeasibleSet& set, const Vector& x0,
                     const SolverConfig& cfg, const Observer& obs) {
  int zeros = 0;
  return run_fw("fw_standard", f, set, x0, cfg, obs,
                [&](int k, const Vector& x, const Vector&, const Vertex& s, IterationRecord& rec) {
                  const double alpha = 2.0 / (k + 2.0);
                  Vector y = x + alpha * (s.point - x);
                  StepOut out;
                  if (f.in_domain(y)) {
                    zeros = 0;
                    rec.alpha = alpha;
                    rec.kind = StepKind::kForward;
                    out.x_next = std::move(y);
                  } else {
                    ++zeros;
                    rec.alpha = 0.0;
                    rec.kind = StepKind::kZero;
                    out.x_next = x;
                    out.stall = zeros >= 50;
                  }
                  return out;
                });
}

RunTrace fw_line_search(const Objective& f, const FeasibleSet& set, const Vector& x0,
                        const SolverConfig& cfg, const Observer& obs) {
  return run_fw(
      "fw_line_search", f, set, x0, cfg, obs,
      [&](int, const Vector& x, const Vector&, const Vertex& s, IterationRecord& rec) {
        const Vector v = s.point - x;
        const double tmax = max_feasible_step(f, x, v);
        auto slope = [&](double t) { return f.gradient(x + t * v).dot(v); };
        double alpha = 0.0;
        if (tmax > 0.0) {
          if (slope(tmax) <= 0.0) {
            alpha = tmax;
          } else {
            double lo = 0.0, hi = tmax;
            for (int it = 0; it < 200 && hi - lo > cfg.line_search_tol; ++it) {
              const double mid = 0.5 * (lo + hi);
              if (slope(mid) > 0.0) {
                hi = mid;
              } else {
                lo = mid;
              }
            }
            alpha = 0.5 * (lo + hi);
          }
        }
        StepOut out;
        rec.alpha = alpha;
        rec.kind = alpha > 0.0 ? StepKind::kForward : StepKind::kZero;
        out.x_next = x + alpha * v;
        return out;
      });
}

RunTrace fwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
               const SolverConfig& cfg, const Observer& obs) {
  const GscSpec spec = f.spec();
  return run_fw("fwgsc", f, set, x0, cfg, obs,
                [&](int, const Vector& x, const Vector&, const Vertex& s, IterationRecord& rec) {
                  const Vector v = s.point - x;
                  const LocalGeometry geom = local_geometry(f, x, v, rec.gap);
                  const StepDecision d = analytic_step(spec, geom, 1.0);
                  StepOut out;
                  out.x_next = x + d.alpha * v;
                  require_in_domain(f, out.x_next, "fwgsc");
                  rec.alpha = d.alpha;
                  rec.kind = StepKind::kForward;
                  rec.estimate = spec.m_f();
                  rec.predicted_decrease = d.predicted_decrease;
                  rec.dikin = d.alpha * spec.m_f() * geom.delta;
                  return out;
                });
}

RunTrace lbtfwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
                  const SolverConfig& cfg, const Observer& obs) {
  std::optional<double> l = cfg.l_init;
  return run_fw("lbtfwgsc", f, set, x0, cfg, obs,
                [&](int, const Vector& x, const Vector&, const Vertex& s, IterationRecord& rec) {
                  const Vector v = s.point - x;
                  if (!l) l = curvature_probe(f, x, v);
                  const BacktrackResult r = step_l(f, x, v, rec.f, rec.gap, *l, cfg);
                  l = r.estimate;
                  StepOut out;
                  out.x_next = x + r.alpha * v;
                  rec.alpha = r.alpha;
                  rec.kind = StepKind::kForward;
                  rec.backtracks = r.backtracks;
                  rec.estimate = r.estimate;
                  rec.predicted_decrease = r.predicted_decrease;
                  return out;
                });
}

RunTrace mbtfwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
                  const SolverConfig& cfg, const Observer& obs) {
  const GscSpec spec = f.spec();
  double mu = cfg.mu_init;
  return run_fw("mbtfwgsc", f, set, x0, cfg, obs,
                [&](int, const Vector& x, const Vector&, const Vertex& s, IterationRecord& rec) {
                  const Vector v = s.point - x;
                  const BacktrackResult r = step_m(f, x, v, rec.f, rec.gap, mu, cfg);
                  mu = r.estimate;
                  StepOut out;
                  out.x_next = x + r.alpha * v;
                  rec.alpha = r.alpha;
                  rec.kind = StepKind::kForward;
                  rec.backtracks = r.backtracks;
                  rec.estimate = r.estimate;
                  rec.predicted_decrease = r.predicted_decrease;
                  const double e = std::sqrt(std::max(0.0, v.dot(f.hess_vec(x, v))));
                  rec.dikin = r.alpha * r.estimate * delta_nu(spec, v.norm(), e);
                  return out;
                });
}

RunTrace fwlloo(const Objective& f, const FeasibleSet& set, const LlooOracle& lloo,
                const Vector& x0, const SolverConfig& cfg, const Observer& obs) {
  cfg.validate();
  check_start(f, set, x0);
  const GscSpec spec = f.spec();
  const Vector g0 = f.gradient(x0);
  const double gap0 = fw_gap(g0, x0, set.lmo(g0).point);
  const double sigma = cfg.sigma_f ? *cfg.sigma_f : hessian_min_eigenvalue(f, x0);
  if (!(sigma > 0.0)) throw InvalidArgument("fwlloo: sigma_f must be positive");
  const double r0 = std::sqrt(2.0 * gap0 / sigma);
  double c = 1.0;

  RunTrace trace = run_fw(
      "fwlloo", f, set, x0, cfg, obs,
      [&](int, const Vector& x, const Vector& g, const Vertex&, IterationRecord& rec) {
        rec.certificate = gap0 * c;
        const Vector u = lloo.query(x, r0 * std::sqrt(c), g);
        const Vector v = u - x;
        double alpha = 1.0;
        rec.kind = StepKind::kForward;
        if (v.norm() == 0.0) {
          rec.kind = StepKind::kZero;
        } else {
          const LocalGeometry geom = local_geometry(f, x, v, rec.gap);
          if (geom.e > 0.0) {
            const PsiParams p{spec.m_f() * geom.delta, 2.0 * geom.e * geom.e / (gap0 * c),
                              spec.nu()};
            alpha = std::min(1.0, t_star(p));
          }
          rec.dikin = alpha * spec.m_f() * geom.delta;
        }
        StepOut out;
        out.x_next = x + alpha * v;
        require_in_domain(f, out.x_next, "fwlloo");
        rec.alpha = alpha;
        c *= std::exp(-alpha / 2.0);
        return out;
      });
  trace.sigma_f = sigma;
  trace.records.back().certificate = gap0 * c;
  return trace;
}

RunTrace asfwgsc(const Objective& f, const FeasibleSet& set, const Vector& x0,
                 const SolverConfig& cfg, const Observer& obs, std::optional<ActiveSet> initial) {
  cfg.validate();
  check_start(f, set, x0);
  if (!set.is_polytope()) throw InvalidArgument("asfwgsc: feasible set is not a polytope");
  ActiveSet active;
  if (initial) {
    active = std::move(*initial);
    const Vector rec_x = active.reconstruct();
    if ((rec_x - x0).norm() > 1e-9 * (1.0 + x0.norm())) {
      throw InvalidArgument("asfwgsc: initial active set does not reproduce x0");
    }
  } else {
    Vertex w = set.lmo(-x0);
    if (!w.id || (w.point - x0).norm() > 1e-12 * (1.0 + x0.norm())) {
      throw InvalidArgument("asfwgsc: x0 is not a vertex and no active set was given");
    }
    active = ActiveSet::single(*w.id, w.point);
  }

  const GscSpec spec = f.spec();
  RunTrace trace;
  trace.method = "asfwgsc";
  const auto t0 = Clock::now();
  Vector x = x0;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.f = f.value(x);
    rec.active_size = static_cast<int>(active.size());
    const Vector g = f.gradient(x);
    const Vertex s = set.lmo(g);
    if (!s.id) throw InvalidArgument("asfwgsc: lmo returned a vertex without id");
    rec.gap = fw_gap(g, x, s.point);

    if (rec.gap <= cfg.epsilon || k >= cfg.max_iter) {
      trace.status =
          rec.gap <= cfg.epsilon ? RunStatus::kGapConverged : RunStatus::kIterationCap;
      rec.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
      trace.records.push_back(rec);
      if (obs) obs(rec, x, &active);
      trace.x_final = x;
      trace.f_final = rec.f;
      return trace;
    }

    const auto [uid, upt] = away_vertex(g, active);
    const double fw_val = g.dot(s.point - x);
    const double away_val = g.dot(x - *upt);
    bool away = fw_val > away_val;
    if (away && active.size() == 1) {
      away = false;
      rec.forced_forward = true;
    }
    Vector v;
    double cap = 1.0;
    if (away) {
      const double mu = active.weight(uid);
      v = x - *upt;
      cap = mu / (1.0 - mu);
    } else {
      v = s.point - x;
    }
    const double big_g = -g.dot(v);
    if (!(big_g > 0.0)) throw OracleViolation("asfwgsc: direction is not a descent direction");
    const LocalGeometry geom = local_geometry(f, x, v, big_g);
    const StepDecision d = analytic_step(spec, geom, cap);
    const bool drop = away && d.t_star >= cap;

    Vector x_next = x + d.alpha * v;
    require_in_domain(f, x_next, "asfwgsc");
    rec.alpha = d.alpha;
    rec.kind = away ? (drop ? StepKind::kDrop : StepKind::kAway) : StepKind::kForward;
    rec.estimate = spec.m_f();
    rec.predicted_decrease = d.predicted_decrease;
    rec.dikin = d.alpha * spec.m_f() * geom.delta;
    rec.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    trace.records.push_back(rec);
    if (obs) obs(rec, x, &active);

    if (away) {
      active.away_update(d.alpha, uid, drop);
    } else {
      active.forward_update(d.alpha, s);
    }
    x = std::move(x_next);
  }
}

}  // namespace gscfw
