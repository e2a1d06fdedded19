#pragma once

#include <cstdint>
#include <vector>

#include "pburgers/corridor.hpp"
#include "pburgers/point_field.hpp"

namespace pburgers {

using PathAnchor = SpaceTimePoint;

/// Start anchor, field vertices by index, end anchor.
struct BrokenPath {
  PathAnchor start{};
  std::vector<std::size_t> vertices;
  PathAnchor end{};
};

struct ActionValue {
  double kinetic = 0.0;
  std::int64_t visited = 0;
  double total = 0.0;
};

struct CorridorPolicy {
  double half_width_rate = 4.0;
  double slack = 5.0;
  int max_widenings = 6;

  void validate() const;
};

/// Sum of dx^2 / (2 dt) along a polyline. Consecutive nodes must have
/// increasing times; a repeated node (same x and t) costs nothing.
double kinetic_action(const std::vector<SpaceTimePoint>& nodes);
double kinetic_action(const PointField& field, const BrokenPath& path);

/// Kinetic action minus the vertices with time in [start.t, end.t).
ActionValue path_action(const PointField& field, const BrokenPath& path);

/// Same as path_action for a path given by vertex coordinates.
ActionValue polyline_action(const PathAnchor& start, const std::vector<SpaceTimePoint>& vertices,
                            const PathAnchor& end);

struct TwoPointResult {
  ActionValue action;
  BrokenPath path;
};

/// Minimizer between two anchors with vertices given as coordinates.
struct Minimizer {
  ActionValue action;
  std::vector<SpaceTimePoint> vertices;  // increasing time
  double slack_used = 0.0;
  int widenings = 0;
};

/// Exact minimum action over broken lines through field points inside the
/// corridor |x - chord(t)| <= rate (t1 - t0) + slack, with escape detection
/// and widening. Ties go to the rightmost minimizer.
TwoPointResult min_action_two_point(const PointField& field, const PathAnchor& start,
                                    const PathAnchor& end, const CorridorPolicy& policy = {});
Minimizer min_action(const FieldSource& source, const PathAnchor& start, const PathAnchor& end,
                     const CorridorPolicy& policy = {});

/// Exhaustive search over subsets of the field points with time in
/// [start.t, end.t). Refuses more than `kOracleCapacity` such points.
inline constexpr std::size_t kOracleCapacity = 20;
TwoPointResult brute_force_action(const PointField& field, const PathAnchor& start,
                                  const PathAnchor& end);

/// Corridor around the chord of two anchors.
Corridor chord_corridor(const PathAnchor& start, const PathAnchor& end, double half_width);

/// Smallest distance from the path nodes to the corridor boundary.
double path_margin(const Corridor& c, const PathAnchor& start,
                   const std::vector<SpaceTimePoint>& vertices, const PathAnchor& end);

}  // namespace pburgers
