#include "pburgers/point_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pburgers/error.hpp"
#include "pburgers/rng.hpp"

namespace pburgers {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::out_of_window: return "out-of-window";
    case ErrorKind::invalid_path: return "invalid-path";
    case ErrorKind::window_too_small: return "window-too-small";
    case ErrorKind::corridor_escape: return "corridor-escape";
    case ErrorKind::oracle_capacity_exceeded: return "oracle-capacity-exceeded";
    case ErrorKind::invalid_pairing: return "invalid-pairing";
    case ErrorKind::invalid_initial_condition: return "invalid-initial-condition";
    case ErrorKind::parse: return "parse-error";
  }
  return "error";
}

bool Window::valid() const {
  return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(t_min) &&
         std::isfinite(t_max) && x_min < x_max && t_min < t_max;
}

bool Window::contains(const SpaceTimePoint& p) const {
  return p.x >= x_min && p.x <= x_max && p.t >= t_min && p.t <= t_max;
}

bool Window::contains(const Window& o) const {
  return o.x_min >= x_min && o.x_max <= x_max && o.t_min >= t_min &&
         o.t_max <= t_max;
}

namespace {

void require_valid(const Window& w) {
  if (!w.valid()) {
    throw Error(ErrorKind::invalid_parameter, "window must satisfy x_min < x_max, t_min < t_max");
  }
}

// Poisson count by sequential inversion. Large means are split into a sum of
// independent smaller draws so exp(-mean) never underflows.
std::int64_t poisson_count(CellRng& rng, double mean) {
  constexpr double kChunk = 30.0;
  std::int64_t total = 0;
  const int chunks = mean > kChunk ? static_cast<int>(std::ceil(mean / kChunk)) : 1;
  const double lambda = mean / chunks;
  for (int c = 0; c < chunks; ++c) {
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::int64_t k = 0;
    while (u >= cdf && k < 10000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
      if (p == 0.0) break;
    }
    total += k;
  }
  return total;
}

}  // namespace

void sample_cell(std::uint64_t seed, double intensity, std::int64_t i,
                 std::int64_t j, std::vector<SpaceTimePoint>& out) {
  if (intensity <= 0.0) return;
  CellRng rng(cell_key(seed, i, j));
  const std::int64_t n = poisson_count(rng, intensity);
  const std::size_t first = out.size();
  for (std::int64_t k = 0; k < n; ++k) {
    SpaceTimePoint p{};
    bool duplicate = true;
    while (duplicate) {
      p.x = static_cast<double>(i) + rng.uniform();
      p.t = static_cast<double>(j) + rng.uniform();
      duplicate = std::any_of(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                              [&](const SpaceTimePoint& q) { return q == p; });
    }
    out.push_back(p);
  }
}

PointField generate(std::uint64_t seed, double intensity, const Window& window) {
  require_valid(window);
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorKind::invalid_parameter, "intensity must be finite and >= 0");
  }
  std::vector<SpaceTimePoint> pts;
  if (intensity > 0.0) {
    const auto i0 = static_cast<std::int64_t>(std::floor(window.x_min));
    const auto i1 = static_cast<std::int64_t>(std::floor(window.x_max));
    const auto j0 = static_cast<std::int64_t>(std::floor(window.t_min));
    const auto j1 = static_cast<std::int64_t>(std::floor(window.t_max));
    std::vector<SpaceTimePoint> cell;
    for (std::int64_t j = j0; j <= j1; ++j) {
      for (std::int64_t i = i0; i <= i1; ++i) {
        cell.clear();
        sample_cell(seed, intensity, i, j, cell);
        for (const auto& p : cell) {
          if (window.contains(p)) pts.push_back(p);
        }
      }
    }
    std::sort(pts.begin(), pts.end(), time_order);
  }
  return PointField(seed, intensity, window, std::move(pts), false);
}

PointField PointField::from_points(const Window& window,
                                   std::vector<SpaceTimePoint> points,
                                   std::uint64_t seed, double intensity) {
  require_valid(window);
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.t)) {
      throw Error(ErrorKind::invalid_parameter, "point coordinates must be finite");
    }
    if (!window.contains(p)) {
      throw Error(ErrorKind::out_of_window, "point outside the field window");
    }
  }
  std::sort(points.begin(), points.end(), time_order);
  if (std::adjacent_find(points.begin(), points.end()) != points.end()) {
    throw Error(ErrorKind::invalid_parameter, "duplicate points in field");
  }
  return PointField(seed, intensity, window, std::move(points), true);
}

std::optional<std::size_t> PointField::index_of(const SpaceTimePoint& p) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), p, time_order);
  if (it != points_.end() && *it == p) {
    return static_cast<std::size_t>(it - points_.begin());
  }
  return std::nullopt;
}

std::size_t count_in(const PointField& field, const Window& rect) {
  if (!field.window().contains(rect)) {
    throw Error(ErrorKind::out_of_window, "rectangle not contained in the field window");
  }
  const auto& pts = field.points();
  auto lo = std::lower_bound(pts.begin(), pts.end(), SpaceTimePoint{-INFINITY, rect.t_min},
                             time_order);
  std::size_t n = 0;
  for (auto it = lo; it != pts.end() && it->t < rect.t_max; ++it) {
    if (it->x >= rect.x_min && it->x < rect.x_max) ++n;
  }
  return n;
}

namespace {

PointField map_field(const PointField& field, Window window, auto&& f) {
  std::vector<SpaceTimePoint> pts;
  pts.reserve(field.size());
  for (const auto& p : field.points()) pts.push_back(f(p));
  // Rounding in the map can push a boundary point a few ulps outside the
  // image box; widen it by the same amount.
  for (const auto& p : pts) {
    window.x_min = std::min(window.x_min, p.x);
    window.x_max = std::max(window.x_max, p.x);
    window.t_min = std::min(window.t_min, p.t);
    window.t_max = std::max(window.t_max, p.t);
  }
  return PointField::from_points(window, std::move(pts), field.seed(), field.intensity());
}

}  // namespace

PointField shear(const PointField& field, double v, double a) {
  const Window& w = field.window();
  const double xs[] = {w.x_min + a + v * w.t_min, w.x_min + a + v * w.t_max,
                       w.x_max + a + v * w.t_min, w.x_max + a + v * w.t_max};
  Window image{*std::min_element(std::begin(xs), std::end(xs)),
               *std::max_element(std::begin(xs), std::end(xs)), w.t_min, w.t_max};
  return map_field(field, image, [&](const SpaceTimePoint& p) {
    return SpaceTimePoint{p.x + a + v * p.t, p.t};
  });
}

PointField time_shift(const PointField& field, double tau) {
  const Window& w = field.window();
  Window image{w.x_min, w.x_max, w.t_min - tau, w.t_max - tau};
  return map_field(field, image, [&](const SpaceTimePoint& p) {
    return SpaceTimePoint{p.x, p.t - tau};
  });
}

PointField reflect(const PointField& field) {
  const Window& w = field.window();
  Window image{-w.x_max, -w.x_min, w.t_min, w.t_max};
  return map_field(field, image, [](const SpaceTimePoint& p) {
    return SpaceTimePoint{-p.x, p.t};
  });
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field(std::ostream& out, const PointField& field) {
  const Window& w = field.window();
  out << field.seed() << ' ' << fmt17(field.intensity()) << ' ' << fmt17(w.x_min) << ' '
      << fmt17(w.x_max) << ' ' << fmt17(w.t_min) << ' ' << fmt17(w.t_max) << '\n';
  for (const auto& p : field.points()) {
    out << fmt17(p.x) << ' ' << fmt17(p.t) << '\n';
  }
}

PointField read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, "missing field header");
  std::istringstream header(line);
  std::uint64_t seed = 0;
  double intensity = 0.0;
  Window w{};
  if (!(header >> seed >> intensity >> w.x_min >> w.x_max >> w.t_min >> w.t_max)) {
    throw Error(ErrorKind::parse, "bad field header: " + line);
  }
  std::vector<SpaceTimePoint> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    SpaceTimePoint p{};
    if (!(row >> p.x >> p.t)) throw Error(ErrorKind::parse, "bad field row: " + line);
    pts.push_back(p);
  }
  return PointField::from_points(w, std::move(pts), seed, intensity);
}

}  // namespace pburgers
