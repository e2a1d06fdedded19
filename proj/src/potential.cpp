#include "pburgers/potential.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "pburgers/error.hpp"

namespace pburgers {

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  const char* p = text.c_str();
  while (true) {
    while (*p == ' ' || *p == '\t' || *p == ',') ++p;
    if (*p == '\0') break;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(p, &end);
    if (end == p || errno == ERANGE || !std::isfinite(v)) {
      throw Error(ErrorKind::parse, "bad number in potential literal: " + text);
    }
    out.push_back(v);
    p = end;
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PiecewiseLinearPotential::PiecewiseLinearPotential(double anchor_x, double anchor_value,
                                                   std::vector<double> breakpoints,
                                                   std::vector<double> slopes)
    : anchor_x_(anchor_x),
      anchor_value_(anchor_value),
      breaks_(std::move(breakpoints)),
      slopes_(std::move(slopes)) {
  if (!std::isfinite(anchor_x_) || !std::isfinite(anchor_value_)) {
    throw Error(ErrorKind::invalid_parameter, "anchor must be finite");
  }
  if (slopes_.size() != breaks_.size() + 1) {
    throw Error(ErrorKind::invalid_parameter, "need exactly one more slope than breakpoints");
  }
  for (double m : slopes_) {
    if (!std::isfinite(m)) throw Error(ErrorKind::invalid_parameter, "slopes must be finite");
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (!std::isfinite(breaks_[i]) || (i > 0 && !(breaks_[i] > breaks_[i - 1]))) {
      throw Error(ErrorKind::invalid_parameter, "breakpoints must be finite and increasing");
    }
  }
  values_.assign(breaks_.size(), 0.0);
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    values_[i] = values_[i - 1] + slopes_[i] * (breaks_[i] - breaks_[i - 1]);
  }
  if (!breaks_.empty()) {
    const double shift = anchor_value_ - (*this)(anchor_x_);
    for (double& v : values_) v += shift;
  }
}

double PiecewiseLinearPotential::operator()(double x) const {
  if (breaks_.empty()) return anchor_value_ + slopes_[0] * (x - anchor_x_);
  const auto k = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                          breaks_.begin());
  if (k == 0) return values_[0] + slopes_[0] * (x - breaks_[0]);
  return values_[k - 1] + slopes_[k] * (x - breaks_[k - 1]);
}

double PiecewiseLinearPotential::slope(double x) const {
  const auto k = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                          breaks_.begin());
  return slopes_[k];
}

std::string PiecewiseLinearPotential::to_literal() const {
  std::string s = fmt17(anchor_x_) + " " + fmt17(anchor_value_) + " ;";
  for (double b : breaks_) s += " " + fmt17(b);
  s += " ;";
  for (double m : slopes_) s += " " + fmt17(m);
  return s;
}

PiecewiseLinearPotential PiecewiseLinearPotential::parse(const std::string& literal) {
  std::vector<std::string> parts;
  std::stringstream ss(literal);
  std::string part;
  while (std::getline(ss, part, ';')) parts.push_back(part);
  if (parts.size() != 3) {
    throw Error(ErrorKind::parse, "potential literal needs three ';'-separated fields");
  }
  const auto anchor = parse_list(parts[0]);
  if (anchor.size() != 2) throw Error(ErrorKind::parse, "anchor needs x and value");
  try {
    return PiecewiseLinearPotential(anchor[0], anchor[1], parse_list(parts[1]),
                                    parse_list(parts[2]));
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
}

PiecewiseQuadraticPotential::PiecewiseQuadraticPotential(std::vector<QuadPiece> pieces,
                                                         double left_slope, double right_slope,
                                                         bool exact_outside)
    : pieces_(std::move(pieces)),
      left_slope_(left_slope),
      right_slope_(right_slope),
      exact_outside_(exact_outside) {
  if (pieces_.empty()) throw Error(ErrorKind::invalid_parameter, "potential needs a piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.lo <= p.hi) || p.q.k < 0.0) {
      throw Error(ErrorKind::invalid_parameter, "bad potential piece");
    }
    if (i > 0 && pieces_[i - 1].hi != p.lo) {
      throw Error(ErrorKind::invalid_parameter, "potential pieces must be contiguous");
    }
  }
}

PiecewiseQuadraticPotential::PiecewiseQuadraticPotential(const PiecewiseLinearPotential& w)
    : left_slope_(w.v_minus()), right_slope_(w.v_plus()), exact_outside_(true) {
  const auto& b = w.breakpoints();
  const auto& m = w.slopes();
  if (b.empty()) {
    const double x0 = w.anchor_x();
    pieces_.push_back(QuadPiece{x0 - 1.0, x0 + 1.0, Quad{w.anchor_value(), m[0], 0.0, x0}});
    return;
  }
  pieces_.push_back(QuadPiece{b[0] - 1.0, b[0], Quad{w(b[0]), m[0], 0.0, b[0]}});
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    pieces_.push_back(QuadPiece{b[i], b[i + 1], Quad{w(b[i]), m[i + 1], 0.0, b[i]}});
  }
  pieces_.push_back(QuadPiece{b.back(), b.back() + 1.0, Quad{w(b.back()), m.back(), 0.0, b.back()}});
}

std::size_t PiecewiseQuadraticPotential::locate(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const QuadPiece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return 0;
  return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

double PiecewiseQuadraticPotential::operator()(double x) const {
  if (x < lo()) return pieces_.front().q(lo()) + left_slope_ * (x - lo());
  if (x > hi()) return pieces_.back().q(hi()) + right_slope_ * (x - hi());
  return pieces_[locate(x)].q(x);
}

double PiecewiseQuadraticPotential::slope(double x) const {
  if (x < lo()) return left_slope_;
  if (x >= hi()) return right_slope_;
  std::size_t i = locate(x);
  while (i + 1 < pieces_.size() && pieces_[i].hi <= x) ++i;
  return pieces_[i].q.slope(x);
}

double PiecewiseQuadraticPotential::min_slope() const {
  double m = std::min(left_slope_, right_slope_);
  for (const auto& p : pieces_) m = std::min(m, p.q.slope(p.lo));
  return m;
}

double PiecewiseQuadraticPotential::max_slope() const {
  double m = std::max(left_slope_, right_slope_);
  for (const auto& p : pieces_) m = std::max(m, p.q.slope(p.hi));
  return m;
}

std::vector<QuadPiece> PiecewiseQuadraticPotential::clip(double a, double b) const {
  std::vector<QuadPiece> out;
  if (a < lo()) {
    out.push_back(QuadPiece{a, std::min(lo(), b), Quad{(*this)(lo()), left_slope_, 0.0, lo()}});
  }
  for (const auto& p : pieces_) {
    const double l = std::max(p.lo, a);
    const double h = std::min(p.hi, b);
    if (l < h || (a == b && l == h)) out.push_back(QuadPiece{l, h, p.q});
    if (a == b && l == h) break;
  }
  if (b > hi() && !(a == b && !out.empty())) {
    out.push_back(QuadPiece{std::max(hi(), a), b, Quad{(*this)(hi()), right_slope_, 0.0, hi()}});
  }
  if (out.empty()) out.push_back(QuadPiece{a, b, Quad{(*this)(a), slope(a), 0.0, a}});
  return out;
}

}  // namespace pburgers
