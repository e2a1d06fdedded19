#pragma once

#include <optional>
#include <vector>

#include "pburgers/action.hpp"
#include "pburgers/potential.hpp"

namespace pburgers {

struct EnvelopeResult {
  double value = 0.0;
  double argmin_z = 0.0;
};

/// inf_z W(z) + (q - z)^2 / (2 tau); ties go to the largest z.
EnvelopeResult moreau_envelope(const PiecewiseLinearPotential& w, double q, double tau);

struct Shock {
  double x = 0.0;
  double jump = 0.0;  // velocity right minus velocity left
};

struct EvolvedProfile {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> potential;
  std::vector<double> velocity;
  std::vector<double> ystar;
  /// Last configuration point of each minimizer, absent when it has none.
  std::vector<std::optional<SpaceTimePoint>> generator;
  /// The evolved potential on [x.front(), x.back()].
  PiecewiseQuadraticPotential evolved;
  std::vector<Shock> shocks;
};

/// Evolves W from time s to t through the forcing and samples at xs.
/// t == s returns W itself.
EvolvedProfile apply_cocycle(const FieldSource& source, const PiecewiseQuadraticPotential& w,
                             double s, double t, const std::vector<double>& xs,
                             const CorridorPolicy& policy = {});
EvolvedProfile apply_cocycle(const PointField& field, const PiecewiseQuadraticPotential& w,
                             double s, double t, const std::vector<double>& xs,
                             const CorridorPolicy& policy = {});

/// apply_cocycle on `resolution` equispaced abscissas of [a, b].
EvolvedProfile velocity_profile(const FieldSource& source, const PiecewiseQuadraticPotential& w,
                                double s, double t, double a, double b, std::size_t resolution,
                                const CorridorPolicy& policy = {});

std::vector<double> linspace(double a, double b, std::size_t n);

/// Sup over xs of |f - g| after subtracting each one's value at xs.front().
double quotient_distance(const std::vector<double>& f, const std::vector<double>& g);

}  // namespace pburgers
