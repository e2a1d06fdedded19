#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pburgers {

struct SpaceTimePoint {
  double x = 0.0;
  double t = 0.0;

  friend bool operator==(const SpaceTimePoint&, const SpaceTimePoint&) = default;
};

/// Field order: by time, ties broken by position.
inline bool time_order(const SpaceTimePoint& a, const SpaceTimePoint& b) {
  return a.t < b.t || (a.t == b.t && a.x < b.x);
}

/// Closed space-time rectangle [x_min, x_max] x [t_min, t_max].
struct Window {
  double x_min = 0.0;
  double x_max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;

  bool valid() const;
  bool contains(const SpaceTimePoint& p) const;
  bool contains(const Window& other) const;
  double area() const { return (x_max - x_min) * (t_max - t_min); }

  friend bool operator==(const Window&, const Window&) = default;
};

/// A realization of a homogeneous Poisson field restricted to a window.
///
/// Fields produced by `generate` are a pure function of (seed, intensity,
/// window). Fields produced by transformations (shear, time shift, explicit
/// point lists) are marked derived: their points cannot be regenerated from
/// the seed.
class PointField {
 public:
  PointField() = default;

  /// Builds a derived field from explicit points. Points must lie in the
  /// window and be pairwise distinct; they are sorted on construction.
  static PointField from_points(const Window& window,
                                std::vector<SpaceTimePoint> points,
                                std::uint64_t seed = 0,
                                double intensity = 1.0);

  std::uint64_t seed() const { return seed_; }
  double intensity() const { return intensity_; }
  const Window& window() const { return window_; }
  const std::vector<SpaceTimePoint>& points() const { return points_; }
  bool derived() const { return derived_; }
  std::size_t size() const { return points_.size(); }

  /// Index of a point with exactly these coordinates, if present.
  std::optional<std::size_t> index_of(const SpaceTimePoint& p) const;

 private:
  friend PointField generate(std::uint64_t, double, const Window&);

  PointField(std::uint64_t seed, double intensity, Window window,
             std::vector<SpaceTimePoint> points, bool derived)
      : seed_(seed), intensity_(intensity), window_(window),
        points_(std::move(points)), derived_(derived) {}

  std::uint64_t seed_ = 0;
  double intensity_ = 1.0;
  Window window_{};
  std::vector<SpaceTimePoint> points_;
  bool derived_ = true;
};

/// Appends the points of unit cell [i, i+1) x [j, j+1). The cell's stream is
/// derived from (seed, i, j) alone, so any window sees the same points.
void sample_cell(std::uint64_t seed, double intensity, std::int64_t i,
                 std::int64_t j, std::vector<SpaceTimePoint>& out);

PointField generate(std::uint64_t seed, double intensity, const Window& window);

/// Points with x in [x_min, x_max) and t in [t_min, t_max).
std::size_t count_in(const PointField& field, const Window& rect);

/// Image of the field under (x, s) -> (x + a + v s, s).
PointField shear(const PointField& field, double v, double a);

/// Image of the field under (x, s) -> (x, s - tau).
PointField time_shift(const PointField& field, double tau);

/// Image of the field under (x, s) -> (-x, s).
PointField reflect(const PointField& field);

/// Text format: `seed intensity x_min x_max t_min t_max` then `x t` per line.
void write_field(std::ostream& out, const PointField& field);
PointField read_field(std::istream& in);

}  // namespace pburgers
