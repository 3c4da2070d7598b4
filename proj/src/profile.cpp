#include "gscfw/profile.hpp"

#include "gscfw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gscfw {

double relative_error(double f_value, double f_star) {
  const double r = (f_value - f_star) / std::max(std::abs(f_star), 1e-12);
  return (r < 0.0 && r >= -1e-12) ? 0.0 : r;
}

void assign_f_star(std::vector<RunRecord>& records) {
  std::map<std::string, double> best;
  for (const auto& r : records) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& it : r.trace.records) m = std::min(m, it.f);
    auto [pos, inserted] = best.try_emplace(r.problem, m);
    if (!inserted) pos->second = std::min(pos->second, m);
  }
  for (auto& r : records) r.f_star = best.at(r.problem);
}

std::optional<int> iterations_to(const RunRecord& r, double eps) {
  for (const auto& it : r.trace.records) {
    if (relative_error(it.f, r.f_star) <= eps) return it.k;
  }
  return std::nullopt;
}

std::optional<double> time_to(const RunRecord& r, double eps) {
  for (const auto& it : r.trace.records) {
    if (relative_error(it.f, r.f_star) <= eps) return it.elapsed;
  }
  return std::nullopt;
}

double success_ratio(const std::vector<RunRecord>& records, const std::string& method, double eps) {
  std::size_t total = 0, ok = 0;
  for (const auto& r : records) {
    if (r.method != method) continue;
    ++total;
    if (iterations_to(r, eps)) ++ok;
  }
  if (total == 0) throw InvalidArgument("success_ratio: no records for method " + method);
  return static_cast<double>(ok) / static_cast<double>(total);
}

namespace {

// value(r) is N or T; ratio(value, best) handles the degenerate minimum.
template <class Value, class Ratio>
std::optional<double> average_ratio(const std::vector<RunRecord>& records,
                                    const std::string& method, double eps, Value value,
                                    Ratio ratio) {
  using Key = std::pair<std::string, int>;
  std::map<Key, double> best;
  for (const auto& r : records) {
    if (auto v = value(r, eps)) {
      auto [pos, inserted] = best.try_emplace(Key{r.problem, r.start}, *v);
      if (!inserted) pos->second = std::min(pos->second, *v);
    }
  }
  if (best.empty()) throw InvalidArgument("profile: no run reached eps on any instance");

  std::map<std::string, std::pair<double, int>> per_problem;
  for (const auto& r : records) {
    if (r.method != method) continue;
    if (auto v = value(r, eps)) {
      auto& acc = per_problem[r.problem];
      acc.first += ratio(*v, best.at(Key{r.problem, r.start}));
      acc.second += 1;
    }
  }
  if (per_problem.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [p, acc] : per_problem) sum += acc.first / acc.second;
  return sum / static_cast<double>(per_problem.size());
}

}  // namespace

std::optional<double> iteration_ratio(const std::vector<RunRecord>& records,
                                      const std::string& method, double eps) {
  return average_ratio(
      records, method, eps,
      [](const RunRecord& r, double e) -> std::optional<double> {
        if (auto n = iterations_to(r, e)) return static_cast<double>(*n);
        return std::nullopt;
      },
      [](double n, double n_min) { return n_min > 0.0 ? n / n_min : n + 1.0; });
}

std::optional<double> time_ratio(const std::vector<RunRecord>& records, const std::string& method,
                                 double eps) {
  return average_ratio(
      records, method, eps, [](const RunRecord& r, double e) { return time_to(r, e); },
      [](double t, double t_min) { return std::max(t, 1e-9) / std::max(t_min, 1e-9); });
}

std::vector<ProfilePoint> profile(const std::vector<RunRecord>& records, const std::string& method,
                                  const std::vector<double>& eps_grid) {
  std::vector<ProfilePoint> out;
  for (double eps : eps_grid) {
    ProfilePoint pt{eps, success_ratio(records, method, eps), std::nullopt, std::nullopt};
    try {
      pt.rho_iter = iteration_ratio(records, method, eps);
      pt.rho_time = time_ratio(records, method, eps);
    } catch (const InvalidArgument&) {
      // nobody solved anything at this eps
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<std::string> methods_of(const std::vector<RunRecord>& records) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.method).second) out.push_back(r.method);
  }
  return out;
}

}  // namespace gscfw
