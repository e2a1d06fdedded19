#pragma once

#include <cstdint>
#include <vector>

#include "pburgers/point_field.hpp"

namespace pburgers {

/// Convex space-time region {(x, t): t in [t_lo, t_hi], left(t) <= x <= right(t)}
/// with both boundaries linear in t. A straight segment between two points of
/// the region never leaves it.
struct Corridor {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double left_lo = 0.0;
  double left_hi = 0.0;
  double right_lo = 0.0;
  double right_hi = 0.0;

  double left(double t) const;
  double right(double t) const;
  bool contains(const SpaceTimePoint& p) const;
  /// Distance from x to the nearer boundary at time t (negative outside).
  double margin(double x, double t) const;
  Window bounding_box() const;
};

/// Where the minimization engine gets its forcing points from.
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  /// Points of the corridor with t in [t_lo, t_hi), sorted in field order.
  virtual std::vector<SpaceTimePoint> points_in(const Corridor& c) const = 0;
};

/// Infinite Poisson field, materialized cell by cell on demand. Any two
/// corridors see identical points on their overlap.
class PoissonFieldSource final : public FieldSource {
 public:
  PoissonFieldSource(std::uint64_t seed, double intensity = 1.0);
  std::vector<SpaceTimePoint> points_in(const Corridor& c) const override;

  std::uint64_t seed() const { return seed_; }
  double intensity() const { return intensity_; }

 private:
  std::uint64_t seed_;
  double intensity_;
};

/// A finite field. Requests for corridors whose bounding box leaves the
/// field window fail with window-too-small.
class FixedFieldSource final : public FieldSource {
 public:
  explicit FixedFieldSource(const PointField& field) : field_(&field) {}
  std::vector<SpaceTimePoint> points_in(const Corridor& c) const override;

 private:
  const PointField* field_;
};

}  // namespace pburgers
