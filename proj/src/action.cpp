#include "pburgers/action.hpp"

#include <algorithm>
#include <cmath>

#include "pburgers/error.hpp"
#include "pburgers/sweep.hpp"

namespace pburgers {

namespace {

constexpr double kTieTolerance = 1e-12;

double segment_cost(const SpaceTimePoint& a, const SpaceTimePoint& b) {
  const double dt = b.t - a.t;
  const double dx = b.x - a.x;
  if (dt > 0.0) return dx * dx / (2.0 * dt);
  if (dt == 0.0 && dx == 0.0) return 0.0;
  throw Error(ErrorKind::invalid_path, "path times must increase");
}

std::vector<SpaceTimePoint> resolve(const PointField& field, const BrokenPath& path) {
  std::vector<SpaceTimePoint> out;
  out.reserve(path.vertices.size());
  for (std::size_t i : path.vertices) {
    if (i >= field.size()) throw Error(ErrorKind::invalid_path, "vertex index out of range");
    out.push_back(field.points()[i]);
  }
  return out;
}

// Backward x-sequence of the path, closed by the start position; the rightmost
// minimizer is its lexicographic maximum.
bool right_of(const std::vector<SpaceTimePoint>& a, const std::vector<SpaceTimePoint>& b,
              double start_x) {
  std::size_t i = a.size(), j = b.size();
  while (true) {
    const double xa = i > 0 ? a[i - 1].x : start_x;
    const double xb = j > 0 ? b[j - 1].x : start_x;
    if (xa != xb) return xa > xb;
    if (i == 0 || j == 0) return i > j;
    --i;
    --j;
  }
}

}  // namespace

void CorridorPolicy::validate() const {
  if (!(half_width_rate > 0.0) || !std::isfinite(half_width_rate)) {
    throw Error(ErrorKind::invalid_parameter, "half_width_rate must be positive");
  }
  if (!(slack >= 0.0) || !std::isfinite(slack)) {
    throw Error(ErrorKind::invalid_parameter, "slack must be non-negative");
  }
  if (max_widenings < 0) throw Error(ErrorKind::invalid_parameter, "max_widenings must be >= 0");
}

double kinetic_action(const std::vector<SpaceTimePoint>& nodes) {
  double sum = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) sum += segment_cost(nodes[i - 1], nodes[i]);
  return sum;
}

double kinetic_action(const PointField& field, const BrokenPath& path) {
  return polyline_action(path.start, resolve(field, path), path.end).kinetic;
}

ActionValue polyline_action(const PathAnchor& start, const std::vector<SpaceTimePoint>& vertices,
                            const PathAnchor& end) {
  if (!(start.t < end.t)) throw Error(ErrorKind::invalid_path, "start.t must be below end.t");
  ActionValue a;
  SpaceTimePoint prev = start;
  for (const auto& v : vertices) {
    if (v.t < start.t || v.t > end.t) {
      throw Error(ErrorKind::invalid_path, "vertex time outside [start.t, end.t]");
    }
    a.kinetic += segment_cost(prev, v);
    if (v.t < end.t) ++a.visited;
    prev = v;
  }
  a.kinetic += segment_cost(prev, end);
  a.total = a.kinetic - static_cast<double>(a.visited);
  return a;
}

ActionValue path_action(const PointField& field, const BrokenPath& path) {
  return polyline_action(path.start, resolve(field, path), path.end);
}

Corridor chord_corridor(const PathAnchor& start, const PathAnchor& end, double half_width) {
  return Corridor{start.t,          end.t,           start.x - half_width,
                  end.x - half_width, start.x + half_width, end.x + half_width};
}

double path_margin(const Corridor& c, const PathAnchor& start,
                   const std::vector<SpaceTimePoint>& vertices, const PathAnchor& end) {
  double m = std::min(c.margin(start.x, start.t), c.margin(end.x, end.t));
  for (const auto& v : vertices) m = std::min(m, c.margin(v.x, v.t));
  return m;
}

Minimizer min_action(const FieldSource& source, const PathAnchor& start, const PathAnchor& end,
                     const CorridorPolicy& policy) {
  policy.validate();
  if (!(start.t < end.t) || !std::isfinite(start.x) || !std::isfinite(end.x) ||
      !std::isfinite(end.t) || !std::isfinite(start.t)) {
    throw Error(ErrorKind::invalid_parameter, "need finite anchors with start.t < end.t");
  }
  const double duration = end.t - start.t;
  double slack = policy.slack;
  for (int k = 0;; ++k) {
    const Corridor c = chord_corridor(start, end, policy.half_width_rate * duration + slack);
    LaxOleinikSweep sweep(source.points_in(c),
                          {InitialPiece{start.x, start.x, Quad{0.0, 0.0, 0.0, start.x}}}, start.t,
                          c);
    sweep.run(end.t);
    const auto choice = sweep.query(end.x);
    Minimizer m;
    m.vertices = sweep.path(choice);
    m.slack_used = slack;
    m.widenings = k;
    if (path_margin(c, start, m.vertices, end) >= 0.5 * slack) {
      m.action = polyline_action(start, m.vertices, end);
      return m;
    }
    if (k == policy.max_widenings) {
      throw Error(ErrorKind::corridor_escape, "minimizer reached the corridor boundary");
    }
    slack *= 2.0;
  }
}

TwoPointResult min_action_two_point(const PointField& field, const PathAnchor& start,
                                    const PathAnchor& end, const CorridorPolicy& policy) {
  const FixedFieldSource source(field);
  const Minimizer m = min_action(source, start, end, policy);
  TwoPointResult r;
  r.action = m.action;
  r.path.start = start;
  r.path.end = end;
  for (const auto& v : m.vertices) r.path.vertices.push_back(*field.index_of(v));
  return r;
}

TwoPointResult brute_force_action(const PointField& field, const PathAnchor& start,
                                  const PathAnchor& end) {
  if (!(start.t < end.t)) throw Error(ErrorKind::invalid_parameter, "start.t must be below end.t");
  std::vector<std::size_t> cand;
  const auto& pts = field.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (p.t > start.t && p.t < end.t) cand.push_back(i);
    if (p.t == start.t && p.x == start.x) cand.push_back(i);
  }
  if (cand.size() > kOracleCapacity) {
    throw Error(ErrorKind::oracle_capacity_exceeded, "too many points for exhaustive search");
  }
  const std::size_t n = cand.size();
  std::vector<SpaceTimePoint> best_v, v;
  std::vector<std::size_t> best_idx, idx;
  ActionValue best;
  bool have = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    v.clear();
    idx.clear();
    bool ok = true;
    for (std::size_t b = 0; b < n; ++b) {
      if (!(mask >> b & 1U)) continue;
      const auto& p = pts[cand[b]];
      if (!v.empty() && !(p.t > v.back().t)) {
        ok = false;
        break;
      }
      v.push_back(p);
      idx.push_back(cand[b]);
    }
    if (!ok) continue;
    const ActionValue a = polyline_action(start, v, end);
    bool take = !have || a.total < best.total - kTieTolerance;
    if (!take && a.total <= best.total + kTieTolerance) take = right_of(v, best_v, start.x);
    if (take) {
      best = a;
      best_v = v;
      best_idx = idx;
      have = true;
    }
  }
  TwoPointResult r;
  r.action = best;
  r.path = BrokenPath{start, best_idx, end};
  return r;
}

}  // namespace pburgers
