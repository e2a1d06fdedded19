#include "pburgers/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "pburgers/error.hpp"

namespace pburgers {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double v) { return v * v; }

// Minimum of a convex quadratic over [lo, hi].
double piece_min(const EnvelopePiece& p) {
  double z;
  if (p.q.k > 0.0) {
    z = std::clamp(p.q.x0 - p.q.m / p.q.k, p.lo, p.hi);
  } else {
    z = p.q.m > 0.0 ? p.lo : p.hi;
  }
  return p.q(z);
}

// Visits the leaves of [l, r] of a min segment tree in increasing (or
// decreasing) order, skipping every subtree for which keep(a, b, min) fails.
template <class Keep, class Visit>
void outward(const std::vector<double>& tree, std::size_t node, std::size_t nl, std::size_t nr,
             std::size_t l, std::size_t r, bool rightward, const Keep& keep, const Visit& visit) {
  if (nr < l || nl > r || !(tree[node] < kInf)) return;
  if (!keep(std::max(nl, l), std::min(nr, r), tree[node])) return;
  if (nl == nr) {
    visit(nl);
    return;
  }
  const std::size_t mid = nl + (nr - nl) / 2;
  if (rightward) {
    outward(tree, 2 * node, nl, mid, l, r, rightward, keep, visit);
    outward(tree, 2 * node + 1, mid + 1, nr, l, r, rightward, keep, visit);
  } else {
    outward(tree, 2 * node + 1, mid + 1, nr, l, r, rightward, keep, visit);
    outward(tree, 2 * node, nl, mid, l, r, rightward, keep, visit);
  }
}

}  // namespace

MoreauEval restricted_moreau(const Quad& q, double lo, double hi, double x, double tau) {
  const double z_free = q.x0 + ((x - q.x0) - q.m * tau) / (1.0 + q.k * tau);
  const double z = std::clamp(z_free, lo, hi);
  return MoreauEval{q(z) + sq(x - z) / (2.0 * tau), z};
}

LaxOleinikSweep::LaxOleinikSweep(std::vector<SpaceTimePoint> points,
                                 std::vector<InitialPiece> initial, double t_start,
                                 const Corridor& corridor, Options options)
    : points_(std::move(points)),
      initial_(std::move(initial)),
      t_start_(t_start),
      corridor_(corridor),
      opts_(options) {
  if (initial_.empty()) throw Error(ErrorKind::invalid_parameter, "no initial condition");
  for (const auto& p : initial_) {
    if (!(p.lo <= p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi) || p.q.k < 0.0) {
      throw Error(ErrorKind::invalid_parameter, "bad initial piece");
    }
  }
  if (!(opts_.slab_height > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "slab height must be positive");
  }
  std::sort(initial_.begin(), initial_.end(),
            [](const InitialPiece& a, const InitialPiece& b) { return a.lo < b.lo; });
}

double LaxOleinikSweep::source_value(int source, double x, double t, double* z) const {
  if (source >= 0) {
    const auto& p = points_[static_cast<std::size_t>(source)];
    if (!(t > p.t)) return kInf;
    if (z) *z = start_z_[static_cast<std::size_t>(source)];
    return value_[static_cast<std::size_t>(source)] + sq(x - p.x) / (2.0 * (t - p.t));
  }
  const auto& piece = initial_[static_cast<std::size_t>(-1 - source)];
  const double tau = t - t_start_;
  if (tau <= 0.0) {
    if (z) *z = x;
    return (x >= piece.lo && x <= piece.hi) ? piece.q(x) : kInf;
  }
  const MoreauEval e = restricted_moreau(piece.q, piece.lo, piece.hi, x, tau);
  if (z) *z = e.z;
  return e.value;
}

SpaceTimePoint LaxOleinikSweep::source_origin(int source) const {
  if (source >= 0) return points_[static_cast<std::size_t>(source)];
  return SpaceTimePoint{initial_[static_cast<std::size_t>(-1 - source)].lo, t_start_};
}

void LaxOleinikSweep::key_of(int source, double z, double& kx, double& kt) const {
  if (source >= 0) {
    const auto& p = points_[static_cast<std::size_t>(source)];
    kx = p.x;
    kt = p.t;
  } else {
    kx = z;
    kt = t_start_;
  }
}

bool LaxOleinikSweep::better(const Choice& a, const Choice& b, double akx, double akt,
                             double bkx, double bkt) const {
  if (!(b.value < kInf)) return a.value < kInf;
  if (a.value < b.value - opts_.tie_tolerance) return true;
  if (a.value > b.value + opts_.tie_tolerance) return false;
  return akx > bkx || (akx == bkx && akt > bkt);
}

void LaxOleinikSweep::consider(Choice& best, int source, double x, double t) const {
  Choice c;
  c.source = source;
  c.value = source_value(source, x, t, &c.start_z);
  if (!(c.value < kInf)) return;
  double akx, akt, bkx = 0.0, bkt = 0.0;
  key_of(source, c.start_z, akx, akt);
  if (best.value < kInf) key_of(best.source, best.start_z, bkx, bkt);
  if (better(c, best, akx, akt, bkx, bkt)) best = c;
}

void LaxOleinikSweep::prepare_envelope_bounds() {
  const std::size_t n = env_.size();
  env_lo_.resize(n);
  for (std::size_t i = 0; i < n; ++i) env_lo_[i] = env_[i].lo;
  env_tree_size_ = 1;
  while (env_tree_size_ < n) env_tree_size_ <<= 1;
  env_tree_.assign(2 * env_tree_size_, kInf);
  for (std::size_t i = 0; i < n; ++i) env_tree_[env_tree_size_ + i] = piece_min(env_[i]);
  for (std::size_t i = env_tree_size_; i-- > 1;) {
    env_tree_[i] = std::min(env_tree_[2 * i], env_tree_[2 * i + 1]);
  }
}

void LaxOleinikSweep::reset_slab(double ta, double tb) {
  slab_start_ = ta;
  const double xa = std::min(corridor_.left(ta), corridor_.left(tb));
  const double xb = std::max(corridor_.right(ta), corridor_.right(tb));
  bucket_x0_ = xa;
  const auto nb = static_cast<std::size_t>(
      std::max(1.0, std::ceil((xb - xa) / bucket_width_) + 1.0));
  buckets_.resize(nb);
  for (auto& b : buckets_) b.clear();
  tree_size_ = 1;
  while (tree_size_ < nb) tree_size_ <<= 1;
  tree_.assign(2 * tree_size_, kInf);
  slab_points_.clear();
}

void LaxOleinikSweep::append_parts(int source, double r, double lo, double hi,
                                   std::vector<EnvelopePiece>& out) const {
  auto push = [&](double a, double b, const Quad& q) {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (a < b) out.push_back(EnvelopePiece{a, b, q, source});
  };
  if (source >= 0) {
    const auto& p = points_[static_cast<std::size_t>(source)];
    push(lo, hi, Quad{value_[static_cast<std::size_t>(source)], 0.0, 1.0 / (r - p.t), p.x});
    return;
  }
  const auto& piece = initial_[static_cast<std::size_t>(-1 - source)];
  const double tau = r - t_start_;
  const Quad& q = piece.q;
  if (piece.lo == piece.hi) {
    push(lo, hi, Quad{q(piece.lo), 0.0, 1.0 / tau, piece.lo});
    return;
  }
  const double xl = piece.lo + tau * q.slope(piece.lo);
  const double xr = piece.hi + tau * q.slope(piece.hi);
  push(-kInf, xl, Quad{q(piece.lo), 0.0, 1.0 / tau, piece.lo});
  push(xl, xr, Quad{q.c + 0.5 * q.m * q.m * tau, q.m, q.k / (1.0 + q.k * tau), q.x0 + q.m * tau});
  push(xr, kInf, Quad{q(piece.hi), 0.0, 1.0 / tau, piece.hi});
}

namespace {

struct Evaluated {
  double value;
  double slope;
};

Evaluated at(const Quad& q, double x) {
  const double d = x - q.x0;
  return Evaluated{q.c + d * (q.m + 0.5 * q.k * d), q.m + q.k * d};
}

}  // namespace

std::vector<EnvelopePiece> LaxOleinikSweep::lower_envelope(const std::vector<int>& sources,
                                                           double r) const {
  const double lo = corridor_.left(r);
  const double hi = corridor_.right(r);
  // Runs of pieces stored back to back; run k is [cut[k], cut[k + 1]).
  std::vector<EnvelopePiece> cur, next;
  std::vector<std::size_t> cut, next_cut;
  cur.reserve(sources.size() + 8);
  cut.push_back(0);
  for (int s : sources) {
    append_parts(s, r, lo, hi, cur);
    if (cur.size() > cut.back()) cut.push_back(cur.size());
  }
  if (cut.size() == 1) return {};

  auto rightmost = [&](int a, double za, int b, double zb) {
    double akx, akt, bkx, bkt;
    key_of(a, za, akx, akt);
    key_of(b, zb, bkx, bkt);
    return akx > bkx || (akx == bkx && akt > bkt);
  };

  auto emit = [&](double u, double w, const EnvelopePiece& src, std::size_t run_start) {
    if (!(u < w)) return;
    if (next.size() > run_start && next.back().source == src.source && next.back().q == src.q &&
        next.back().hi == u) {
      next.back().hi = w;
    } else {
      next.push_back(EnvelopePiece{u, w, src.q, src.source});
    }
  };

  auto merge = [&](std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    const std::size_t run_start = next.size();
    std::size_t i = a0, j = b0;
    double at_x = lo;
    while (i < a1 && j < b1) {
      const EnvelopePiece& pa = cur[i];
      const EnvelopePiece& pb = cur[j];
      const double end = std::min(pa.hi, pb.hi);
      if (at_x < end) {
        const double xm = 0.5 * (at_x + end);
        const double hw = 0.5 * (end - at_x);
        const Evaluated ea = at(pa.q, xm);
        const Evaluated eb = at(pb.q, xm);
        // Difference a - b as a quadratic in y = x - xm.
        const double qa = 0.5 * (pa.q.k - pb.q.k);
        const double qb = ea.slope - eb.slope;
        const double qc = ea.value - eb.value;
        double roots[2];
        int nr = 0;
        auto keep = [&](double y) {
          if (y > -hw && y < hw) roots[nr++] = xm + y;
        };
        if (qa == 0.0) {
          if (qb != 0.0) keep(-qc / qb);
        } else {
          const double disc = qb * qb - 4.0 * qa * qc;
          if (disc > 0.0) {
            const double sq_disc = std::sqrt(disc);
            const double qq = -0.5 * (qb + std::copysign(sq_disc, qb));
            if (qq != 0.0) {
              keep(qq / qa);
              keep(qc / qq);
            }
          }
        }
        if (nr == 2 && roots[0] > roots[1]) std::swap(roots[0], roots[1]);
        double bounds[4];
        int nb = 0;
        bounds[nb++] = at_x;
        for (int k = 0; k < nr; ++k) {
          if (roots[k] > bounds[nb - 1] && roots[k] < end) bounds[nb++] = roots[k];
        }
        bounds[nb++] = end;
        const double tol = 1e-12 * (1.0 + std::abs(ea.value) + std::abs(eb.value));
        for (int k = 0; k + 1 < nb; ++k) {
          const double y = 0.5 * (bounds[k] + bounds[k + 1]) - xm;
          const double d = qc + y * (qb + qa * y);
          bool take_a;
          if (d < -tol) {
            take_a = true;
          } else if (d > tol) {
            take_a = false;
          } else {
            take_a = rightmost(pa.source, pa.lo, pb.source, pb.lo);
          }
          emit(bounds[k], bounds[k + 1], take_a ? pa : pb, run_start);
        }
        at_x = end;
      }
      if (pa.hi == end) ++i;
      if (pb.hi == end) ++j;
    }
  };

  while (cut.size() > 2) {
    next.clear();
    next_cut.assign(1, 0);
    const std::size_t runs = cut.size() - 1;
    for (std::size_t k = 0; k + 1 < runs; k += 2) {
      merge(cut[k], cut[k + 1], cut[k + 1], cut[k + 2]);
      next_cut.push_back(next.size());
    }
    if (runs % 2 == 1) {
      next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(cut[runs - 1]),
                  cur.begin() + static_cast<std::ptrdiff_t>(cut[runs]));
      next_cut.push_back(next.size());
    }
    std::swap(cur, next);
    std::swap(cut, next_cut);
  }
  return cur;
}

std::vector<int> LaxOleinikSweep::gather_sources() const {
  // Envelope sources keep their spatial order; slab points are sorted by x
  // and interleaved so merges stay balanced.
  std::vector<int> slab = slab_points_;
  std::sort(slab.begin(), slab.end(), [&](int a, int b) {
    return points_[static_cast<std::size_t>(a)].x < points_[static_cast<std::size_t>(b)].x;
  });
  std::vector<int> out;
  out.reserve(env_.size() + slab.size());
  std::vector<char> seen_point(points_.size(), 0);
  std::vector<char> seen_initial(initial_.size(), 0);
  auto push = [&](int s) {
    char& flag = s >= 0 ? seen_point[static_cast<std::size_t>(s)]
                        : seen_initial[static_cast<std::size_t>(-1 - s)];
    if (!flag) {
      flag = 1;
      out.push_back(s);
    }
  };
  std::size_t k = 0;
  for (const auto& piece : env_) {
    while (k < slab.size() && points_[static_cast<std::size_t>(slab[k])].x < piece.lo) {
      push(slab[k++]);
    }
    push(piece.source);
  }
  while (k < slab.size()) push(slab[k++]);
  return out;
}

void LaxOleinikSweep::rebuild(double r) {
  env_ = lower_envelope(gather_sources(), r);
  env_time_ = r;
  env_is_initial_ = false;
  prepare_envelope_bounds();
}

LaxOleinikSweep::Choice LaxOleinikSweep::query_at(double x, double t) const {
  Choice best;
  const double tol = opts_.tie_tolerance;
  const std::size_t n = env_.size();
  if (n > 0) {
    const double tau = t - env_time_;
    auto ub = std::upper_bound(env_lo_.begin(), env_lo_.end(), x);
    const std::size_t j =
        ub == env_lo_.begin() ? 0 : static_cast<std::size_t>(ub - env_lo_.begin()) - 1;
    if (tau <= 0.0) {
      // Only pieces containing x carry finite cost.
      for (std::size_t i = j;; --i) {
        if (env_[i].hi < x) break;
        if (env_[i].lo <= x) consider(best, env_[i].source, x, t);
        if (i == 0) break;
      }
      for (std::size_t i = j + 1; i < n && env_[i].lo <= x; ++i) {
        consider(best, env_[i].source, x, t);
      }
    } else {
      const double inv2tau = 0.5 / tau;
      consider(best, env_[j].source, x, t);
      auto visit = [&](std::size_t i) { consider(best, env_[i].source, x, t); };
      if (j + 1 < n) {
        auto keep = [&](std::size_t a, std::size_t, double m) {
          const double d = std::max(0.0, env_[a].lo - x);
          return m + d * d * inv2tau <= best.value + tol;
        };
        outward(env_tree_, 1, 0, env_tree_size_ - 1, j + 1, n - 1, true, keep, visit);
      }
      if (j > 0) {
        auto keep = [&](std::size_t, std::size_t b, double m) {
          const double d = std::max(0.0, x - env_[b].hi);
          return m + d * d * inv2tau <= best.value + tol;
        };
        outward(env_tree_, 1, 0, env_tree_size_ - 1, 0, j - 1, false, keep, visit);
      }
    }
  }

  const double h_eff = t - slab_start_;
  if (!slab_points_.empty() && h_eff > 0.0) {
    const double inv2h = 0.5 / h_eff;
    const std::size_t nb = buckets_.size();
    auto visit = [&](std::size_t b) {
      for (int i : buckets_[b]) {
        if (points_[static_cast<std::size_t>(i)].t < t) consider(best, i, x, t);
      }
    };
    auto b0 = static_cast<std::ptrdiff_t>(std::floor((x - bucket_x0_) / bucket_width_));
    const auto c = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(b0, 0, static_cast<std::ptrdiff_t>(nb) - 1));
    visit(c);
    if (c + 1 < nb) {
      auto keep = [&](std::size_t a, std::size_t, double m) {
        const double d = std::max(0.0, bucket_x0_ + static_cast<double>(a) * bucket_width_ - x);
        return m + d * d * inv2h <= best.value + tol;
      };
      outward(tree_, 1, 0, tree_size_ - 1, c + 1, nb - 1, true, keep, visit);
    }
    if (c > 0) {
      auto keep = [&](std::size_t, std::size_t b, double m) {
        const double d =
            std::max(0.0, x - (bucket_x0_ + static_cast<double>(b + 1) * bucket_width_));
        return m + d * d * inv2h <= best.value + tol;
      };
      outward(tree_, 1, 0, tree_size_ - 1, 0, c - 1, false, keep, visit);
    }
  }
  return best;
}

void LaxOleinikSweep::run(double t_end) {
  if (ran_) throw Error(ErrorKind::invalid_parameter, "sweep already ran");
  if (!(t_end > t_start_)) throw Error(ErrorKind::invalid_parameter, "t_end must exceed t_start");
  ran_ = true;
  t_end_ = t_end;
  const double h = opts_.slab_height;
  const std::size_t n = static_cast<std::size_t>(
      std::lower_bound(points_.begin(), points_.end(), SpaceTimePoint{-kInf, t_end}, time_order) -
      points_.begin());
  value_.assign(points_.size(), kInf);
  parent_.assign(points_.size(), 0);
  start_z_.assign(points_.size(), 0.0);

  env_.clear();
  for (std::size_t j = 0; j < initial_.size(); ++j) {
    env_.push_back(EnvelopePiece{initial_[j].lo, initial_[j].hi, initial_[j].q,
                                 -1 - static_cast<int>(j)});
  }
  env_time_ = t_start_;
  env_is_initial_ = true;
  prepare_envelope_bounds();

  std::int64_t k = 0;
  double slab_end = t_start_ + h;
  reset_slab(t_start_, slab_end);

  for (std::size_t i = 0; i < n; ++i) {
    const SpaceTimePoint p = points_[i];
    if (p.t < t_start_) throw Error(ErrorKind::invalid_parameter, "point before sweep start");
    if (p.t >= slab_end) {
      k = static_cast<std::int64_t>(std::floor((p.t - t_start_) / h));
      while (t_start_ + static_cast<double>(k + 1) * h <= p.t) ++k;
      while (k > 0 && t_start_ + static_cast<double>(k) * h > p.t) --k;
      const double r = t_start_ + static_cast<double>(k) * h;
      slab_end = t_start_ + static_cast<double>(k + 1) * h;
      if (!slab_points_.empty()) rebuild(r);
      reset_slab(r, slab_end);
    }
    const Choice c = query_at(p.x, p.t);
    if (!(c.value < kInf)) continue;
    value_[i] = c.value - 1.0;
    parent_[i] = c.source;
    start_z_[i] = c.source >= 0 ? start_z_[static_cast<std::size_t>(c.source)] : c.start_z;
    const auto idx = static_cast<int>(i);
    slab_points_.push_back(idx);
    auto b = static_cast<std::ptrdiff_t>(std::floor((p.x - bucket_x0_) / bucket_width_));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(buckets_.size()) - 1);
    buckets_[static_cast<std::size_t>(b)].push_back(idx);
    std::size_t node = static_cast<std::size_t>(b) + tree_size_;
    while (node >= 1 && value_[i] < tree_[node]) {
      tree_[node] = value_[i];
      node >>= 1;
    }
  }
  processed_ = n;
}

LaxOleinikSweep::Choice LaxOleinikSweep::query(double x) const {
  if (!ran_) throw Error(ErrorKind::invalid_parameter, "sweep has not run");
  return query_at(x, t_end_);
}

std::vector<SpaceTimePoint> LaxOleinikSweep::path(const Choice& c) const {
  std::vector<SpaceTimePoint> out;
  int s = c.source;
  while (s >= 0) {
    out.push_back(points_[static_cast<std::size_t>(s)]);
    s = parent_[static_cast<std::size_t>(s)];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<EnvelopePiece> LaxOleinikSweep::envelope() const {
  if (!ran_) throw Error(ErrorKind::invalid_parameter, "sweep has not run");
  return lower_envelope(gather_sources(), t_end_);
}

}  // namespace pburgers
