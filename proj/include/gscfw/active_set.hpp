#pragma once

// Vertex representation x = sum_u mu_u u used by the away-step solver.

#include "gscfw/oracles.hpp"

#include <map>
#include <utility>

namespace gscfw {

class ActiveSet {
 public:
  struct Entry {
    Vector point;
    double weight;
  };

  ActiveSet() = default;
  static ActiveSet single(VertexId id, Vector point);

  /// Adds weight to a vertex (inserting it if absent). Used to build
  /// non-vertex starting points; call normalize() afterwards.
  void add(VertexId id, const Vector& point, double weight);
  void normalize();

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  double weight(VertexId id) const;
  const std::map<VertexId, Entry>& entries() const { return entries_; }

  Vector reconstruct() const;
  double weight_sum() const;

  /// x <- (1 - alpha) x + alpha s
  void forward_update(double alpha, const Vertex& s);
  /// x <- (1 + alpha) x - alpha u; alpha equal to the cap drops u.
  void away_update(double alpha, VertexId u, bool drop);

  static constexpr double kPurge = 1e-12;

 private:
  void purge();
  std::map<VertexId, Entry> entries_;
};

/// argmax over active vertices of <grad, u>, lowest id on ties.
std::pair<VertexId, const Vector*> away_vertex(const Vector& grad, const ActiveSet& active);

}  // namespace gscfw
