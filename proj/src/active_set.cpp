#include "gscfw/active_set.hpp"

#include "gscfw/errors.hpp"

namespace gscfw {

ActiveSet ActiveSet::single(VertexId id, Vector point) {
  ActiveSet a;
  a.entries_.emplace(id, Entry{std::move(point), 1.0});
  return a;
}

void ActiveSet::add(VertexId id, const Vector& point, double weight) {
  if (!(weight > 0.0)) throw InvalidArgument("ActiveSet::add: weight must be positive");
  auto [it, inserted] = entries_.try_emplace(id, Entry{point, 0.0});
  it->second.weight += weight;
}

void ActiveSet::normalize() {
  const double s = weight_sum();
  if (!(s > 0.0)) throw InvalidArgument("ActiveSet: zero total weight");
  for (auto& [id, e] : entries_) e.weight /= s;
}

double ActiveSet::weight(VertexId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? 0.0 : it->second.weight;
}

Vector ActiveSet::reconstruct() const {
  if (entries_.empty()) throw InvalidArgument("ActiveSet: empty");
  Vector x = Vector::Zero(entries_.begin()->second.point.size());
  for (const auto& [id, e] : entries_) x += e.weight * e.point;
  return x;
}

double ActiveSet::weight_sum() const {
  double s = 0.0;
  for (const auto& [id, e] : entries_) s += e.weight;
  return s;
}

void ActiveSet::forward_update(double alpha, const Vertex& s) {
  if (!s.id) throw InvalidArgument("ActiveSet: vertex without id");
  for (auto& [id, e] : entries_) e.weight *= (1.0 - alpha);
  auto [it, inserted] = entries_.try_emplace(*s.id, Entry{s.point, 0.0});
  it->second.weight += alpha;
  if (alpha >= 1.0) {
    // full step collapses onto s
    for (auto jt = entries_.begin(); jt != entries_.end();) {
      jt = jt->first == *s.id ? std::next(jt) : entries_.erase(jt);
    }
    it->second.weight = 1.0;
  }
  purge();
}

void ActiveSet::away_update(double alpha, VertexId u, bool drop) {
  auto it = entries_.find(u);
  if (it == entries_.end()) throw InvalidArgument("ActiveSet: away vertex not active");
  for (auto& [id, e] : entries_) e.weight *= (1.0 + alpha);
  it->second.weight -= alpha;
  if (drop) entries_.erase(it);
  purge();
}

void ActiveSet::purge() {
  bool changed = false;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second.weight < kPurge) {
      it = entries_.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  if (changed) normalize();
}

std::pair<VertexId, const Vector*> away_vertex(const Vector& grad, const ActiveSet& active) {
  if (active.empty()) throw InvalidArgument("away_vertex: empty active set");
  const ActiveSet::Entry* best = nullptr;
  VertexId best_id = 0;
  double best_val = 0.0;
  for (const auto& [id, e] : active.entries()) {
    const double val = grad.dot(e.point);
    if (best == nullptr || val > best_val) {
      best = &e;
      best_id = id;
      best_val = val;
    }
  }
  return {best_id, &best->point};
}

}  // namespace gscfw
