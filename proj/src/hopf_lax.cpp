#include "pburgers/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pburgers/error.hpp"

namespace pburgers {

namespace {

constexpr double kTie = 1e-12;

void check_abscissas(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorKind::invalid_parameter, "no query abscissas");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || (i > 0 && xs[i] < xs[i - 1])) {
      throw Error(ErrorKind::invalid_parameter, "abscissas must be finite and sorted");
    }
  }
}

// Envelope pieces overlapping [a, b], cut to it.
std::vector<EnvelopePiece> restrict_to(const std::vector<EnvelopePiece>& env, double a, double b) {
  std::vector<EnvelopePiece> out;
  for (const auto& p : env) {
    const double l = std::max(p.lo, a);
    const double h = std::min(p.hi, b);
    if (l < h) out.push_back(EnvelopePiece{l, h, p.q, p.source});
    if (a == b && p.lo <= a && a <= p.hi && out.empty()) {
      out.push_back(EnvelopePiece{a, a, p.q, p.source});
    }
  }
  return out;
}

}  // namespace

EnvelopeResult moreau_envelope(const PiecewiseLinearPotential& w, double q, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::invalid_parameter, "tau must be positive");
  }
  const auto& b = w.breakpoints();
  const auto& m = w.slopes();
  EnvelopeResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double lo = k == 0 ? -std::numeric_limits<double>::infinity() : b[k - 1];
    const double hi = k == b.size() ? std::numeric_limits<double>::infinity() : b[k];
    const double z = std::clamp(q - m[k] * tau, lo, hi);
    const double v = w(z) + (q - z) * (q - z) / (2.0 * tau);
    if (v < best.value - kTie || (v <= best.value + kTie && z > best.argmin_z)) {
      best = EnvelopeResult{v, z};
    }
  }
  return best;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {a};
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  xs.back() = b;
  return xs;
}

double quotient_distance(const std::vector<double>& f, const std::vector<double>& g) {
  if (f.size() != g.size() || f.empty()) {
    throw Error(ErrorKind::invalid_parameter, "profiles must have equal nonzero length");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    d = std::max(d, std::abs((f[i] - f[0]) - (g[i] - g[0])));
  }
  return d;
}

EvolvedProfile apply_cocycle(const FieldSource& source, const PiecewiseQuadraticPotential& w,
                             double s, double t, const std::vector<double>& xs,
                             const CorridorPolicy& policy) {
  policy.validate();
  check_abscissas(xs);
  if (!std::isfinite(s) || !std::isfinite(t) || t < s) {
    throw Error(ErrorKind::invalid_parameter, "need finite s <= t");
  }
  EvolvedProfile prof;
  prof.t = t;
  prof.x = xs;
  const double x_lo = xs.front();
  const double x_hi = xs.back();
  if (t == s) {
    for (double x : xs) {
      prof.potential.push_back(w(x));
      prof.velocity.push_back(w.slope(x));
      prof.ystar.push_back(x);
      prof.generator.emplace_back();
    }
    prof.evolved = PiecewiseQuadraticPotential(w.clip(x_lo, x_hi), w.left_slope(),
                                               w.right_slope(), false);
    return prof;
  }

  const double dur = t - s;
  const double reach_left = std::max(w.max_slope(), 0.0) + policy.half_width_rate;
  const double reach_right = std::max(-w.min_slope(), 0.0) + policy.half_width_rate;
  double slack = policy.slack;
  for (int k = 0;; ++k) {
    const Corridor c{s, t, x_lo - dur * reach_left - slack, x_lo - slack,
                     x_hi + dur * reach_right + slack, x_hi + slack};
    LaxOleinikSweep sweep(source.points_in(c), w.clip(c.left_lo, c.right_lo), s, c);
    sweep.run(t);
    const auto env = restrict_to(sweep.envelope(), x_lo, x_hi);

    double margin = std::numeric_limits<double>::infinity();
    double z_min = std::numeric_limits<double>::infinity();
    double z_max = -z_min;
    for (const auto& piece : env) {
      for (double x : {piece.lo, piece.hi}) {
        double z = 0.0;
        sweep.source_value(piece.source, x, t, &z);
        z_min = std::min(z_min, z);
        z_max = std::max(z_max, z);
        margin = std::min(margin, c.margin(z, s));
      }
      if (piece.source >= 0) {
        LaxOleinikSweep::Choice ch;
        ch.source = piece.source;
        for (const auto& v : sweep.path(ch)) margin = std::min(margin, c.margin(v.x, v.t));
      }
    }
    if (margin < 0.5 * slack) {
      if (k == policy.max_widenings) {
        throw Error(ErrorKind::corridor_escape, "minimizer reached the corridor boundary");
      }
      slack *= 2.0;
      continue;
    }
    if (!w.exact_outside() && (z_min < w.lo() || z_max > w.hi())) {
      throw Error(ErrorKind::window_too_small,
                  "minimizers start outside the interval where the potential is known");
    }

    const auto& pts = sweep.points();
    for (double x : xs) {
      const auto ch = sweep.query(x);
      prof.potential.push_back(ch.value);
      prof.ystar.push_back(ch.start_z);
      if (ch.source >= 0) {
        const auto& p = pts[static_cast<std::size_t>(ch.source)];
        prof.velocity.push_back((x - p.x) / (t - p.t));
        prof.generator.emplace_back(p);
      } else {
        prof.velocity.push_back((x - ch.start_z) / dur);
        prof.generator.emplace_back();
      }
    }
    std::vector<QuadPiece> pieces;
    for (std::size_t i = 0; i < env.size(); ++i) {
      pieces.push_back(QuadPiece{env[i].lo, env[i].hi, env[i].q});
      if (i > 0 && env[i].source != env[i - 1].source) {
        // neighbouring pieces of the initial potential can hand over smoothly
        const double xb = env[i].lo;
        const double jump = env[i].q.slope(xb) - env[i - 1].q.slope(xb);
        if (std::abs(jump) > 1e-12) prof.shocks.push_back(Shock{xb, jump});
      }
    }
    prof.evolved =
        PiecewiseQuadraticPotential(std::move(pieces), w.left_slope(), w.right_slope(), false);
    return prof;
  }
}

EvolvedProfile apply_cocycle(const PointField& field, const PiecewiseQuadraticPotential& w,
                             double s, double t, const std::vector<double>& xs,
                             const CorridorPolicy& policy) {
  return apply_cocycle(FixedFieldSource(field), w, s, t, xs, policy);
}

EvolvedProfile velocity_profile(const FieldSource& source, const PiecewiseQuadraticPotential& w,
                                double s, double t, double a, double b, std::size_t resolution,
                                const CorridorPolicy& policy) {
  if (!(a <= b) || resolution == 0) {
    throw Error(ErrorKind::invalid_parameter, "need a <= b and a positive resolution");
  }
  return apply_cocycle(source, w, s, t, linspace(a, b, resolution), policy);
}

}  // namespace pburgers
