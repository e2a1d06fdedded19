#pragma once

#include <optional>
#include <vector>

#include "pburgers/action.hpp"
#include "pburgers/potential.hpp"

namespace pburgers {

struct HorizonParams {
  double T0 = 16.0;
  double T_max = 512.0;
  double stability_fraction = 0.5;
  /// Consecutive agreeing doublings a fan needs before it counts as stable.
  int fan_agreements = 2;
  CorridorPolicy corridor{0.25, 12.0, 6};

  void validate() const;
};

struct BackwardMinimizer {
  PathAnchor endpoint{};
  double slope_v = 0.0;
  double horizon_T = 0.0;
  PathAnchor anchor{};
  std::vector<SpaceTimePoint> vertices;  // decreasing time
  /// Vertices later than this agreed across the last horizon doubling.
  double stable_until = 0.0;
  bool stabilized = false;
};

/// Minimizers from (x - vT, t - T) to the endpoint for T = T0, 2 T0, ... up
/// to T_max, stopping once two consecutive horizons agree on the most recent
/// stability_fraction of the shorter one.
BackwardMinimizer backward_minimizer(const FieldSource& source, const PathAnchor& endpoint,
                                     double v, const HorizonParams& horizon = {});
BackwardMinimizer backward_minimizer(std::uint64_t seed, const PathAnchor& endpoint, double v,
                                     const HorizonParams& horizon = {}, double intensity = 1.0);

enum class CoalescenceStatus { coalesced, horizon_insufficient };

struct CoalescenceResult {
  std::optional<SpaceTimePoint> point;
  std::optional<double> time;
  CoalescenceStatus status = CoalescenceStatus::horizon_insufficient;
};

/// Latest common vertex after which (backward in time, within both stable
/// ranges) the two vertex lists coincide.
CoalescenceResult coalescence(const BackwardMinimizer& m1, const BackwardMinimizer& m2);

/// Both minimizers plus their coalescence. The starting horizon is doubled
/// until two consecutive starting horizons give the same coalescence point and
/// the same paths above it; otherwise the result is horizon-insufficient.
struct CoalescedPair {
  BackwardMinimizer m1;
  BackwardMinimizer m2;
  CoalescenceResult result;
};
CoalescedPair coalesced_pair(const FieldSource& source, const PathAnchor& p1,
                             const PathAnchor& p2, double v, const HorizonParams& horizon = {});

/// One maximal interval on which every backward minimizer has the same last
/// configuration point.
struct InfluenceDomain {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<SpaceTimePoint> generator;
  bool unreliable = false;
};

/// Minimizers from one remote anchor to every point of [a, b] x {t}, with the
/// horizon doubled until the result stops changing.
///
/// Level k uses the anchor ((a + b) / 2 - v T0 2^k, ref - T0 2^k); ref
/// defaults to t. Fans at different times built with the same ref share
/// their anchors, so they are related exactly by the forward evolution.
struct Fan {
  double t = 0.0;
  double v = 0.0;
  double horizon_T = 0.0;
  int level = 0;
  bool stabilized = false;
  /// Value function from the anchor on [a, b], exact.
  PiecewiseQuadraticPotential potential;
  std::vector<InfluenceDomain> domains;
};

Fan backward_fan(const FieldSource& source, double v, double t, double a, double b,
                 const HorizonParams& horizon = {}, std::optional<double> anchor_ref = {});

/// The fan of one level, without any stability check.
Fan fan_at_level(const FieldSource& source, double v, double t, double a, double b,
                 const HorizonParams& horizon, double anchor_ref, int level);

/// Domain boundaries are exact breakpoints of the fan envelope.
std::vector<InfluenceDomain> influence_domains(const FieldSource& source, double v, double t,
                                               double a, double b,
                                               const HorizonParams& horizon = {});

}  // namespace pburgers
