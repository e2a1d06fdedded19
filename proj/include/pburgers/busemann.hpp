#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pburgers/backward.hpp"
#include "pburgers/hopf_lax.hpp"

namespace pburgers {

enum class BusemannStatus { exact, horizon_insufficient };

struct BusemannValue {
  PathAnchor p1{};
  PathAnchor p2{};
  double v = 0.0;
  double value = 0.0;
  double coalescence_time = 0.0;
  BusemannStatus status = BusemannStatus::horizon_insufficient;
};

/// Action of the minimizer into p2 minus that into p1, both measured from
/// their coalescence point.
BusemannValue busemann(const FieldSource& source, double v, const PathAnchor& p1,
                       const PathAnchor& p2, const HorizonParams& horizon = {});

/// busemann(v, (0, 0), (x, t)).
BusemannValue global_potential(const FieldSource& source, double v, double x, double t,
                               const HorizonParams& horizon = {});

struct VelocityDomain {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<SpaceTimePoint> generator;
  /// u(x) = slope * x + intercept on [lo, hi].
  double slope = 0.0;
  double intercept = 0.0;
  bool unreliable = false;

  double operator()(double x) const { return slope * x + intercept; }
};

struct VelocityProfile {
  double t = 0.0;
  double slope_v = 0.0;
  double horizon_T = 0.0;
  bool stabilized = false;
  std::vector<VelocityDomain> domains;
  /// Velocity jump (right minus left) at each interior boundary.
  std::vector<Shock> jumps;

  double operator()(double x) const;
};

VelocityProfile global_velocity(const FieldSource& source, double v, double t, double a, double b,
                                const HorizonParams& horizon = {});

struct GlobalCheck {
  double discrepancy = 0.0;
  bool skipped = false;
  std::string reason;
};

/// Evolves U_v(., s) from s to t and compares with U_v(., t) on `grid`
/// abscissas of [a, b], up to an additive constant.
GlobalCheck check_global_solution(const FieldSource& source, double v, double s, double t,
                                  double a, double b, const HorizonParams& horizon = {},
                                  const CorridorPolicy& evolution = {}, std::size_t grid = 1001);

const char* to_string(BusemannStatus s) noexcept;

}  // namespace pburgers
