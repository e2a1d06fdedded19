#include "pburgers/corridor.hpp"

#include <algorithm>
#include <cmath>

#include "pburgers/error.hpp"

namespace pburgers {

namespace {

double lerp(double lo, double hi, double t_lo, double t_hi, double t) {
  if (t_hi == t_lo) return lo;
  const double w = (t - t_lo) / (t_hi - t_lo);
  return lo + (hi - lo) * w;
}

}  // namespace

double Corridor::left(double t) const { return lerp(left_lo, left_hi, t_lo, t_hi, t); }
double Corridor::right(double t) const { return lerp(right_lo, right_hi, t_lo, t_hi, t); }

bool Corridor::contains(const SpaceTimePoint& p) const {
  return p.t >= t_lo && p.t <= t_hi && p.x >= left(p.t) && p.x <= right(p.t);
}

double Corridor::margin(double x, double t) const {
  return std::min(x - left(t), right(t) - x);
}

Window Corridor::bounding_box() const {
  return Window{std::min(left_lo, left_hi), std::max(right_lo, right_hi), t_lo, t_hi};
}

PoissonFieldSource::PoissonFieldSource(std::uint64_t seed, double intensity)
    : seed_(seed), intensity_(intensity) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorKind::invalid_parameter, "intensity must be finite and >= 0");
  }
}

std::vector<SpaceTimePoint> PoissonFieldSource::points_in(const Corridor& c) const {
  std::vector<SpaceTimePoint> out;
  if (intensity_ == 0.0 || !(c.t_hi > c.t_lo)) return out;
  const auto j0 = static_cast<std::int64_t>(std::floor(c.t_lo));
  const auto j1 = static_cast<std::int64_t>(std::floor(c.t_hi));
  std::vector<SpaceTimePoint> cell;
  for (std::int64_t j = j0; j <= j1; ++j) {
    const double ta = std::max(c.t_lo, static_cast<double>(j));
    const double tb = std::min(c.t_hi, static_cast<double>(j + 1));
    if (ta > tb) continue;
    const double xa = std::min(c.left(ta), c.left(tb));
    const double xb = std::max(c.right(ta), c.right(tb));
    const auto i0 = static_cast<std::int64_t>(std::floor(xa));
    const auto i1 = static_cast<std::int64_t>(std::floor(xb));
    for (std::int64_t i = i0; i <= i1; ++i) {
      cell.clear();
      sample_cell(seed_, intensity_, i, j, cell);
      for (const auto& p : cell) {
        if (p.t < c.t_hi && c.contains(p)) out.push_back(p);
      }
    }
  }
  std::sort(out.begin(), out.end(), time_order);
  return out;
}

std::vector<SpaceTimePoint> FixedFieldSource::points_in(const Corridor& c) const {
  if (!field_->window().contains(c.bounding_box())) {
    throw Error(ErrorKind::window_too_small,
                "corridor exceeds the field window; regenerate a larger field");
  }
  std::vector<SpaceTimePoint> out;
  const auto& pts = field_->points();
  auto it = std::lower_bound(pts.begin(), pts.end(), SpaceTimePoint{-INFINITY, c.t_lo},
                             time_order);
  for (; it != pts.end() && it->t < c.t_hi; ++it) {
    if (c.contains(*it)) out.push_back(*it);
  }
  return out;
}

}  // namespace pburgers
