#include "pburgers/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pburgers/error.hpp"
#include "pburgers/sweep.hpp"

namespace pburgers {

namespace {

std::vector<SpaceTimePoint> since(const std::vector<SpaceTimePoint>& desc, double t0) {
  std::vector<SpaceTimePoint> out;
  for (const auto& p : desc) {
    if (p.t < t0) break;
    out.push_back(p);
  }
  return out;
}

struct FanRun {
  std::vector<EnvelopePiece> env;
  std::vector<std::optional<SpaceTimePoint>> generator;  // per env piece
  std::vector<std::vector<SpaceTimePoint>> path;         // per env piece, increasing time
};

FanRun run_fan(const FieldSource& source, double ax, double t0, double t, double a, double b,
               const CorridorPolicy& policy) {
  const double T = t - t0;
  double slack = policy.slack;
  for (int k = 0;; ++k) {
    const double w = policy.half_width_rate * T + slack;
    const Corridor c{t0, t, ax - w, a - w, ax + w, b + w};
    LaxOleinikSweep sweep(source.points_in(c), {InitialPiece{ax, ax, Quad{0.0, 0.0, 0.0, ax}}}, t0,
                          c);
    sweep.run(t);
    FanRun run;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& p : sweep.envelope()) {
      const double lo = std::max(p.lo, a);
      const double hi = std::min(p.hi, b);
      if (!(lo < hi) && !(a == b && p.lo <= a && a <= p.hi && run.env.empty())) continue;
      if (!run.env.empty() && run.env.back().source == p.source && run.env.back().q == p.q) {
        run.env.back().hi = hi;
        continue;
      }
      run.env.push_back(EnvelopePiece{lo, hi, p.q, p.source});
      run.path.emplace_back();
      if (p.source >= 0) {
        run.generator.emplace_back(sweep.points()[static_cast<std::size_t>(p.source)]);
        LaxOleinikSweep::Choice ch;
        ch.source = p.source;
        run.path.back() = sweep.path(ch);
        for (const auto& q : run.path.back()) margin = std::min(margin, c.margin(q.x, q.t));
      } else {
        run.generator.emplace_back();
      }
    }
    if (margin >= 0.5 * slack) return run;
    if (k == policy.max_widenings) {
      throw Error(ErrorKind::corridor_escape, "minimizer reached the corridor boundary");
    }
    slack *= 2.0;
  }
}

PiecewiseQuadraticPotential fan_potential(const FanRun& run, double v) {
  std::vector<QuadPiece> pieces;
  for (const auto& p : run.env) pieces.push_back(QuadPiece{p.lo, p.hi, p.q});
  return PiecewiseQuadraticPotential(std::move(pieces), v, v, false);
}

std::vector<InfluenceDomain> domains_of(const FanRun& run) {
  std::vector<InfluenceDomain> out;
  for (std::size_t i = 0; i < run.env.size(); ++i) {
    out.push_back(InfluenceDomain{run.env[i].lo, run.env[i].hi, run.generator[i], false});
  }
  return out;
}

std::vector<SpaceTimePoint> after(const std::vector<SpaceTimePoint>& asc, double t0) {
  auto it = std::lower_bound(asc.begin(), asc.end(), t0,
                             [](const SpaceTimePoint& p, double v) { return p.t < v; });
  return {it, asc.end()};
}

// Marks domains of `cur` that have no exact counterpart in `prev` (same
// generator, same minimizer after `since_t`, same boundaries, same value up
// to one common constant); returns whether everything matched.
bool compare_fans(const FanRun& prev, const FanRun& cur, double since_t,
                  std::vector<InfluenceDomain>& domains) {
  constexpr double kTol = 1e-9;
  const auto p_prev = fan_potential(prev, 0.0);
  const auto p_cur = fan_potential(cur, 0.0);
  const double a = cur.env.front().lo;
  const double shift = p_cur(a) - p_prev(a);
  bool all = true;
  for (std::size_t i = 0; i < cur.env.size(); ++i) {
    bool ok = false;
    for (std::size_t j = 0; j < prev.env.size(); ++j) {
      if (prev.generator[j] != cur.generator[i]) continue;
      if (after(prev.path[j], since_t) != after(cur.path[i], since_t)) break;
      if (std::abs(prev.env[j].lo - cur.env[i].lo) > kTol ||
          std::abs(prev.env[j].hi - cur.env[i].hi) > kTol) {
        continue;
      }
      const double xm = 0.5 * (cur.env[i].lo + cur.env[i].hi);
      ok = std::abs(p_cur(xm) - p_prev(xm) - shift) <= kTol;
      break;
    }
    domains[i].unreliable = !ok;
    all = all && ok;
  }
  return all;
}

}  // namespace

void HorizonParams::validate() const {
  if (!(T0 > 0.0) || !(T_max >= T0) || !std::isfinite(T_max)) {
    throw Error(ErrorKind::invalid_parameter, "need 0 < T0 <= T_max");
  }
  if (fan_agreements < 1) throw Error(ErrorKind::invalid_parameter, "fan_agreements must be >= 1");
  if (!(stability_fraction > 0.0) || stability_fraction > 1.0) {
    throw Error(ErrorKind::invalid_parameter, "stability_fraction must be in (0, 1]");
  }
  corridor.validate();
}

BackwardMinimizer backward_minimizer(const FieldSource& source, const PathAnchor& endpoint,
                                     double v, const HorizonParams& horizon) {
  horizon.validate();
  auto solve = [&](double T) {
    BackwardMinimizer m;
    m.endpoint = endpoint;
    m.slope_v = v;
    m.horizon_T = T;
    m.anchor = PathAnchor{endpoint.x - v * T, endpoint.t - T};
    auto path = min_action(source, m.anchor, endpoint, horizon.corridor).vertices;
    m.vertices.assign(path.rbegin(), path.rend());
    m.stable_until = endpoint.t;
    return m;
  };
  double T = horizon.T0;
  BackwardMinimizer prev = solve(T);
  while (2.0 * T <= horizon.T_max) {
    BackwardMinimizer cur = solve(2.0 * T);
    const double lo = endpoint.t - horizon.stability_fraction * T;
    if (since(prev.vertices, lo) == since(cur.vertices, lo)) {
      cur.stabilized = true;
      cur.stable_until = lo;
      return cur;
    }
    prev = std::move(cur);
    T *= 2.0;
  }
  return prev;
}

BackwardMinimizer backward_minimizer(std::uint64_t seed, const PathAnchor& endpoint, double v,
                                     const HorizonParams& horizon, double intensity) {
  return backward_minimizer(PoissonFieldSource(seed, intensity), endpoint, v, horizon);
}

CoalescenceResult coalescence(const BackwardMinimizer& m1, const BackwardMinimizer& m2) {
  if (m1.slope_v != m2.slope_v) {
    throw Error(ErrorKind::invalid_pairing, "minimizers have different slopes");
  }
  CoalescenceResult r;
  if (!m1.stabilized || !m2.stabilized) return r;
  const double bound = std::max(m1.stable_until, m2.stable_until);
  const auto a = since(m1.vertices, bound);
  const auto b = since(m2.vertices, bound);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = std::find(b.begin(), b.end(), a[i]);
    if (it == b.end()) continue;
    const auto j = static_cast<std::size_t>(it - b.begin());
    if (a.size() - i == b.size() - j && std::equal(a.begin() + static_cast<std::ptrdiff_t>(i),
                                                   a.end(), it)) {
      r.point = a[i];
      r.time = a[i].t;
      r.status = CoalescenceStatus::coalesced;
      return r;
    }
  }
  return r;
}

CoalescedPair coalesced_pair(const FieldSource& source, const PathAnchor& p1,
                             const PathAnchor& p2, double v, const HorizonParams& horizon) {
  auto attempt = [&](double T0) {
    HorizonParams h = horizon;
    h.T0 = T0;
    CoalescedPair out;
    out.m1 = backward_minimizer(source, p1, v, h);
    out.m2 = p1 == p2 ? out.m1 : backward_minimizer(source, p2, v, h);
    out.result = coalescence(out.m1, out.m2);
    return out;
  };
  // A coalescence only counts once the next starting horizon reproduces it
  // together with both paths above it; a single stabilization can be fooled
  // by a near tie further back.
  auto above = [](const BackwardMinimizer& m, double t) { return since(m.vertices, t); };
  auto same = [&](const CoalescedPair& a, const CoalescedPair& b) {
    if (a.result.status != CoalescenceStatus::coalesced ||
        b.result.status != CoalescenceStatus::coalesced || *a.result.point != *b.result.point) {
      return false;
    }
    const double t = a.result.point->t;
    return above(a.m1, t) == above(b.m1, t) && above(a.m2, t) == above(b.m2, t);
  };
  double T0 = horizon.T0;
  CoalescedPair prev = attempt(T0);
  while (4.0 * T0 <= horizon.T_max) {
    T0 *= 2.0;
    CoalescedPair cur = attempt(T0);
    if (same(prev, cur)) return cur;
    prev = std::move(cur);
  }
  prev.result = CoalescenceResult{};
  return prev;
}

namespace {

struct FanLevel {
  double ax;
  double t0;
};

FanLevel fan_level(double v, double a, double b, const HorizonParams& h, double ref, int level) {
  const double back = h.T0 * std::ldexp(1.0, level);
  return FanLevel{0.5 * (a + b) - v * back, ref - back};
}

void check_fan_args(double t, double a, double b, const HorizonParams& h, double ref) {
  h.validate();
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorKind::invalid_parameter, "need a finite interval a <= b");
  }
  if (!(ref - h.T0 < t)) {
    throw Error(ErrorKind::invalid_parameter, "anchor reference leaves no horizon");
  }
}

Fan make_fan(const FanRun& run, double v, double t, double T, int level) {
  Fan fan;
  fan.t = t;
  fan.v = v;
  fan.horizon_T = T;
  fan.level = level;
  fan.domains = domains_of(run);
  fan.potential = fan_potential(run, v);
  return fan;
}

}  // namespace

Fan backward_fan(const FieldSource& source, double v, double t, double a, double b,
                 const HorizonParams& horizon, std::optional<double> anchor_ref) {
  const double ref = anchor_ref.value_or(t);
  check_fan_args(t, a, b, horizon, ref);
  int level = 0;
  auto run_level = [&](int k) {
    const FanLevel f = fan_level(v, a, b, horizon, ref, k);
    return run_fan(source, f.ax, f.t0, t, a, b, horizon.corridor);
  };
  FanRun prev = run_level(level);
  Fan fan = make_fan(prev, v, t, t - fan_level(v, a, b, horizon, ref, level).t0, level);
  for (auto& d : fan.domains) d.unreliable = true;
  int agreed = 0;
  while (horizon.T0 * std::ldexp(1.0, level + 1) <= horizon.T_max) {
    ++level;
    FanRun cur = run_level(level);
    const double T = t - fan_level(v, a, b, horizon, ref, level).t0;
    const double T_prev = t - fan_level(v, a, b, horizon, ref, level - 1).t0;
    fan = make_fan(cur, v, t, T, level);
    if (compare_fans(prev, cur, t - horizon.stability_fraction * T_prev, fan.domains)) {
      if (++agreed >= horizon.fan_agreements) {
        fan.stabilized = true;
        return fan;
      }
    } else {
      agreed = 0;
    }
    prev = std::move(cur);
  }
  return fan;
}

Fan fan_at_level(const FieldSource& source, double v, double t, double a, double b,
                 const HorizonParams& horizon, double anchor_ref, int level) {
  check_fan_args(t, a, b, horizon, anchor_ref);
  const FanLevel f = fan_level(v, a, b, horizon, anchor_ref, level);
  return make_fan(run_fan(source, f.ax, f.t0, t, a, b, horizon.corridor), v, t, t - f.t0, level);
}

std::vector<InfluenceDomain> influence_domains(const FieldSource& source, double v, double t,
                                               double a, double b, const HorizonParams& horizon) {
  return backward_fan(source, v, t, a, b, horizon).domains;
}

}  // namespace pburgers
