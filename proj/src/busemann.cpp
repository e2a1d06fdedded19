#include "pburgers/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pburgers/error.hpp"
#include "pburgers/hopf_lax.hpp"

namespace pburgers {

namespace {

double tail_action(const BackwardMinimizer& m, const SpaceTimePoint& c) {
  std::vector<SpaceTimePoint> asc;
  for (auto it = m.vertices.rbegin(); it != m.vertices.rend(); ++it) {
    if (it->t >= c.t) asc.push_back(*it);
  }
  return polyline_action(c, asc, m.endpoint).total;
}

}  // namespace

const char* to_string(BusemannStatus s) noexcept {
  return s == BusemannStatus::exact ? "exact" : "horizon-insufficient";
}

BusemannValue busemann(const FieldSource& source, double v, const PathAnchor& p1,
                       const PathAnchor& p2, const HorizonParams& horizon) {
  BusemannValue out;
  out.p1 = p1;
  out.p2 = p2;
  out.v = v;
  if (p1 == p2) {
    out.status = BusemannStatus::exact;
    out.coalescence_time = p1.t;
    return out;
  }
  const CoalescedPair pair = coalesced_pair(source, p1, p2, v, horizon);
  if (pair.result.status == CoalescenceStatus::coalesced) {
    const SpaceTimePoint c = *pair.result.point;
    out.value = tail_action(pair.m2, c) - tail_action(pair.m1, c);
    out.coalescence_time = c.t;
    out.status = BusemannStatus::exact;
  } else if (pair.m1.stabilized && pair.m2.stabilized && pair.m1.vertices.empty() &&
             pair.m2.vertices.empty()) {
    // No forcing reached either minimizer: both are straight lines of slope v.
    out.value = v * (p2.x - p1.x) - 0.5 * v * v * (p2.t - p1.t);
    out.coalescence_time = -std::numeric_limits<double>::infinity();
    out.status = BusemannStatus::exact;
  } else {
    out.coalescence_time = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

BusemannValue global_potential(const FieldSource& source, double v, double x, double t,
                               const HorizonParams& horizon) {
  return busemann(source, v, PathAnchor{0.0, 0.0}, PathAnchor{x, t}, horizon);
}

double VelocityProfile::operator()(double x) const {
  if (domains.empty()) throw Error(ErrorKind::invalid_parameter, "empty velocity profile");
  auto it = std::upper_bound(domains.begin(), domains.end(), x,
                             [](double v, const VelocityDomain& d) { return v < d.lo; });
  if (it != domains.begin()) --it;
  return (*it)(x);
}

VelocityProfile global_velocity(const FieldSource& source, double v, double t, double a, double b,
                                const HorizonParams& horizon) {
  const Fan fan = backward_fan(source, v, t, a, b, horizon);
  VelocityProfile prof;
  prof.t = t;
  prof.slope_v = v;
  prof.horizon_T = fan.horizon_T;
  prof.stabilized = fan.stabilized;
  const auto& pieces = fan.potential.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Quad& q = pieces[i].q;
    VelocityDomain d;
    d.lo = pieces[i].lo;
    d.hi = pieces[i].hi;
    d.generator = fan.domains[i].generator;
    d.unreliable = fan.domains[i].unreliable;
    d.slope = q.k;
    d.intercept = q.m - q.k * q.x0;
    if (d.generator) {
      d.slope = 1.0 / (t - d.generator->t);
      d.intercept = -d.generator->x * d.slope;
    }
    if (!prof.domains.empty()) {
      const auto& left = prof.domains.back();
      prof.jumps.push_back(Shock{d.lo, d(d.lo) - left(d.lo)});
    }
    prof.domains.push_back(d);
  }
  return prof;
}

GlobalCheck check_global_solution(const FieldSource& source, double v, double s, double t,
                                  double a, double b, const HorizonParams& horizon,
                                  const CorridorPolicy& evolution, std::size_t grid) {
  if (!(s <= t)) throw Error(ErrorKind::invalid_parameter, "need s <= t");
  GlobalCheck out;
  if (s == t) return out;
  // Both fans hang from the same anchors (reference time t). Stability is
  // judged at time t; the fan at time s uses the same level.
  HorizonParams h = horizon;
  if (h.T0 <= t - s) h.T0 = t - s + h.T0;
  Fan late = backward_fan(source, v, t, a, b, h, t);
  if (!late.stabilized) {
    out.skipped = true;
    out.reason = "horizon-insufficient at time t";
    return out;
  }
  const auto xs = linspace(a, b, grid);
  double margin = 8.0 + std::abs(v) * (t - s);
  for (int attempt = 0; attempt < 5; ++attempt, margin *= 2.0) {
    const Fan early = fan_at_level(source, v, s, a - margin, b + margin, h, t, late.level);
    try {
      const auto prof = apply_cocycle(source, early.potential, s, t, xs, evolution);
      std::vector<double> target;
      target.reserve(xs.size());
      for (double x : xs) target.push_back(late.potential(x));
      out.discrepancy = quotient_distance(prof.potential, target);
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::window_too_small) throw;
    }
  }
  out.skipped = true;
  out.reason = "minimizers start outside the sampled interval";
  return out;
}

}  // namespace pburgers
