#pragma once

#include <string>
#include <vector>

#include "pburgers/sweep.hpp"

namespace pburgers {

/// Continuous piecewise linear function on the real line.
///
/// slopes[0] applies left of breakpoints[0], slopes.back() right of the last
/// breakpoint; W(anchor_x) = anchor_value fixes the additive constant.
class PiecewiseLinearPotential {
 public:
  PiecewiseLinearPotential() : slopes_{0.0} {}
  PiecewiseLinearPotential(double anchor_x, double anchor_value, std::vector<double> breakpoints,
                           std::vector<double> slopes);

  static PiecewiseLinearPotential linear(double slope) { return {0.0, 0.0, {}, {slope}}; }

  double operator()(double x) const;
  /// Right derivative.
  double slope(double x) const;

  double anchor_x() const { return anchor_x_; }
  double anchor_value() const { return anchor_value_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double v_minus() const { return slopes_.front(); }
  double v_plus() const { return slopes_.back(); }

  /// `anchor_x anchor_value ; b1 b2 ... ; m0 m1 ... mK`
  std::string to_literal() const;
  static PiecewiseLinearPotential parse(const std::string& literal);

 private:
  double anchor_x_ = 0.0;
  double anchor_value_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> slopes_;
  std::vector<double> values_;  // W at each breakpoint
};

/// Continuous piecewise quadratic function known on [lo, hi], extended
/// linearly with fixed slopes outside. `exact_outside` says whether the
/// extension is part of the function or only a placeholder.
class PiecewiseQuadraticPotential {
 public:
  PiecewiseQuadraticPotential() = default;
  PiecewiseQuadraticPotential(std::vector<QuadPiece> pieces, double left_slope, double right_slope,
                              bool exact_outside);
  /// Exact conversion.
  explicit PiecewiseQuadraticPotential(const PiecewiseLinearPotential& w);

  double operator()(double x) const;
  /// Right derivative.
  double slope(double x) const;

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }
  bool exact_outside() const { return exact_outside_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }
  double min_slope() const;
  double max_slope() const;
  const std::vector<QuadPiece>& pieces() const { return pieces_; }

  /// Pieces covering [a, b], extensions included.
  std::vector<QuadPiece> clip(double a, double b) const;

 private:
  std::size_t locate(double x) const;

  std::vector<QuadPiece> pieces_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
  bool exact_outside_ = true;
};

}  // namespace pburgers
