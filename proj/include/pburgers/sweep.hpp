#pragma once

#include <limits>
#include <vector>

#include "pburgers/corridor.hpp"
#include "pburgers/point_field.hpp"

namespace pburgers {

/// q(x) = c + m (x - x0) + k/2 (x - x0)^2, always with k >= 0.
struct Quad {
  double c = 0.0;
  double m = 0.0;
  double k = 0.0;
  double x0 = 0.0;

  double operator()(double x) const {
    const double d = x - x0;
    return c + d * (m + 0.5 * k * d);
  }
  double slope(double x) const { return m + k * (x - x0); }

  friend bool operator==(const Quad&, const Quad&) = default;
};

struct QuadPiece {
  double lo = 0.0;
  double hi = 0.0;
  Quad q{};
};

/// A piece of a time-t_start potential; a path anchor is a piece with lo == hi.
using InitialPiece = QuadPiece;

struct MoreauEval {
  double value = std::numeric_limits<double>::infinity();
  double z = 0.0;
};

/// min over z in [lo, hi] of q(z) + (x - z)^2 / (2 tau), tau > 0. Exact: the
/// objective is a convex quadratic in z, so the minimizer is the clamped
/// stationary point.
MoreauEval restricted_moreau(const Quad& q, double lo, double hi, double x, double tau);

/// Piecewise quadratic function at one time, tagged with the source that
/// attains it on each piece.
struct EnvelopePiece {
  double lo = 0.0;
  double hi = 0.0;
  Quad q{};
  int source = 0;
};

/// Forward dynamic program over configuration points in a convex corridor.
///
/// A source is either a configuration point (index >= 0) or a piece of the
/// time-`t_start` initial potential (index -1 - j). The value of a point is
/// the minimum over sources of source value plus straight-line kinetic cost,
/// minus one for the point itself.
///
/// Sources that are not part of the lower envelope of all source functions on
/// the corridor cross-section at some time can never be optimal afterwards
/// (any later path would cross that time inside the corridor), so the sweep
/// rebuilds that envelope at slab boundaries and drops the rest. Queries then
/// scan envelope pieces and the current slab's points outward from x, with
/// exact lower bounds for stopping.
///
/// Ties within `tie_tolerance` go to the rightmost source: larger origin x,
/// then later origin time.
class LaxOleinikSweep {
 public:
  struct Options {
    double slab_height = 1.0;
    double tie_tolerance = 1e-12;
  };

  struct Choice {
    double value = std::numeric_limits<double>::infinity();
    int source = 0;
    /// Start position at t_start of the selected minimizer.
    double start_z = 0.0;
  };

  /// `points` must be sorted in field order with times in [t_start, +inf).
  /// Initial pieces must satisfy lo <= hi with finite ends; an anchor is a
  /// single piece with lo == hi.
  LaxOleinikSweep(std::vector<SpaceTimePoint> points, std::vector<InitialPiece> initial,
                  double t_start, const Corridor& corridor, Options options);
  LaxOleinikSweep(std::vector<SpaceTimePoint> points, std::vector<InitialPiece> initial,
                  double t_start, const Corridor& corridor)
      : LaxOleinikSweep(std::move(points), std::move(initial), t_start, corridor, Options{}) {}

  /// Processes every point with t < t_end. Call once.
  void run(double t_end);

  /// Best source for (x, t_end).
  Choice query(double x) const;

  /// Configuration points of the chosen minimizer, increasing in time.
  std::vector<SpaceTimePoint> path(const Choice& c) const;

  /// Lower envelope of all source functions at t_end over the corridor
  /// cross-section.
  std::vector<EnvelopePiece> envelope() const;

  /// Value of one source at (x, t); `z` receives the start position for
  /// initial sources.
  double source_value(int source, double x, double t, double* z = nullptr) const;

  /// Origin of a point source; for initial sources the piece's left end.
  SpaceTimePoint source_origin(int source) const;

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  const Corridor& corridor() const { return corridor_; }
  const std::vector<SpaceTimePoint>& points() const { return points_; }
  std::size_t processed() const { return processed_; }
  double point_value(std::size_t i) const { return value_[i]; }
  int point_parent(std::size_t i) const { return parent_[i]; }
  const std::vector<InitialPiece>& initial() const { return initial_; }

 private:
  void rebuild(double r);
  void reset_slab(double ta, double tb);
  void prepare_envelope_bounds();
  void consider(Choice& best, int source, double x, double t) const;
  bool better(const Choice& a, const Choice& b, double a_key_x, double a_key_t,
              double b_key_x, double b_key_t) const;
  void append_parts(int source, double r, double lo, double hi,
                    std::vector<EnvelopePiece>& out) const;
  std::vector<EnvelopePiece> lower_envelope(const std::vector<int>& sources, double r) const;
  std::vector<int> gather_sources() const;
  Choice query_at(double x, double t) const;
  void key_of(int source, double z, double& kx, double& kt) const;

  std::vector<SpaceTimePoint> points_;
  std::vector<InitialPiece> initial_;
  double t_start_;
  Corridor corridor_;
  Options opts_;

  std::vector<double> value_;
  std::vector<int> parent_;
  std::vector<double> start_z_;
  std::size_t processed_ = 0;
  double t_end_ = 0.0;
  bool ran_ = false;

  std::vector<EnvelopePiece> env_;
  double env_time_ = 0.0;
  bool env_is_initial_ = true;
  std::vector<double> env_lo_;
  std::vector<double> env_tree_;
  std::size_t env_tree_size_ = 1;

  // current slab
  double slab_start_ = 0.0;
  double bucket_x0_ = 0.0;
  double bucket_width_ = 1.0;
  std::vector<std::vector<int>> buckets_;
  std::vector<double> tree_;
  std::size_t tree_size_ = 1;
  std::vector<int> slab_points_;
};

}  // namespace pburgers
