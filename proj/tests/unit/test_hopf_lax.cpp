#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pburgers/error.hpp"
#include "pburgers/hopf_lax.hpp"
#include "pburgers/rng.hpp"

using namespace pburgers;

namespace {

PiecewiseLinearPotential random_potential(CellRng& r, int pieces, double spread) {
  std::vector<double> breaks, slopes;
  double x = -spread;
  for (int i = 0; i + 1 < pieces; ++i) {
    x += 2 * spread / pieces * (0.2 + 1.6 * r.uniform());
    breaks.push_back(x);
  }
  for (int i = 0; i < pieces; ++i) slopes.push_back(-2 + 4 * r.uniform());
  return {0.0, -1 + 2 * r.uniform(), breaks, slopes};
}

const Window kWide{-200, 200, -1, 30};

}  // namespace

TEST_CASE("piecewise linear evaluation") {
  CHECK(PiecewiseLinearPotential{}(12.5) == 0.0);
  CHECK(PiecewiseLinearPotential::linear(1.0)(3.0) == 3.0);
  const PiecewiseLinearPotential hat(0.0, 2.0, {0.0}, {1.0, -1.0});
  CHECK(hat(0.0) == 2.0);
  CHECK(hat(-1.0) == 1.0);
  CHECK(hat(3.0) == -1.0);
  CHECK(hat.v_minus() == 1.0);
  CHECK(hat.v_plus() == -1.0);
  CHECK_THROWS_AS(PiecewiseLinearPotential(0, 0, {1.0, 0.5}, {0, 1, 2}), Error);
  CHECK_THROWS_AS(PiecewiseLinearPotential(0, 0, {1.0}, {0}), Error);
}

TEST_CASE("potential literals round trip") {
  CellRng r(3);
  const auto w = random_potential(r, 6, 4.0);
  const auto back = PiecewiseLinearPotential::parse(w.to_literal());
  for (double x = -10; x <= 10; x += 0.37) CHECK(back(x) == w(x));
  CHECK(PiecewiseLinearPotential::parse("0 0 ; ; 0")(5.0) == 0.0);
  for (const char* bad : {"", "1 2 3", "0 0 ; 1 ; x y", "0 0 ; 1 ; 1"}) {
    try {
      PiecewiseLinearPotential::parse(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
    }
  }
}

TEST_CASE("Moreau envelope closed forms") {
  const auto zero = moreau_envelope(PiecewiseLinearPotential{}, 1.7, 0.9);
  CHECK(zero.value == 0.0);
  CHECK(zero.argmin_z == 1.7);
  for (double x : {-2.0, 0.0, 3.5}) {
    const auto e = moreau_envelope(PiecewiseLinearPotential::linear(1.0), x, 1.0);
    CHECK(e.argmin_z == x - 1.0);
    CHECK(std::abs(e.value - (x - 0.5)) <= 1e-15);
  }
  CHECK_THROWS_AS(moreau_envelope(PiecewiseLinearPotential{}, 0.0, 0.0), Error);
}

TEST_CASE("Moreau envelope matches grid search") {
  for (int i = 0; i < 40; ++i) {
    CellRng r(derive_seed(8, i));
    const auto w = random_potential(r, 10, 5.0);
    const double q = -4 + 8 * r.uniform();
    const double tau = 0.1 + 2 * r.uniform();
    const auto e = moreau_envelope(w, q, tau);
    double ref = oracle::grid_envelope(w, q, tau, q - 10, q + 10, 1e-4);
    for (double b : w.breakpoints()) ref = std::min(ref, w(b) + (q - b) * (q - b) / (2 * tau));
    CHECK(std::abs(e.value - ref) <= 1e-6);
    CHECK(e.value == doctest::Approx(w(e.argmin_z) + (q - e.argmin_z) * (q - e.argmin_z) / (2 * tau)));
  }
}

TEST_CASE("evolution without forcing is the Moreau envelope") {
  const PointField empty = PointField::from_points(kWide, {});
  const PiecewiseLinearPotential hat(0.0, 0.0, {0.0}, {1.0, -1.0});
  const auto xs = linspace(-3, 3, 61);
  const auto prof = apply_cocycle(empty, PiecewiseQuadraticPotential(hat), 0.0, 1.0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto e = moreau_envelope(hat, xs[i], 1.0);
    CHECK(std::abs(prof.potential[i] - e.value) <= 1e-12);
    CHECK(prof.velocity[i] == doctest::Approx(xs[i] - prof.ystar[i]));
  }
  REQUIRE(prof.shocks.size() == 1);
  CHECK(prof.shocks[0].jump < 0);

  const auto rest = apply_cocycle(empty, PiecewiseQuadraticPotential(PiecewiseLinearPotential{}),
                                  0.0, 2.0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(rest.potential[i] == 0.0);
    CHECK(rest.velocity[i] == 0.0);
  }
  const auto moving = velocity_profile(FixedFieldSource(empty),
                                       PiecewiseQuadraticPotential(PiecewiseLinearPotential::linear(0.7)),
                                       0.0, 3.0, -5, 5, 21);
  for (double u : moving.velocity) CHECK(std::abs(u - 0.7) <= 1e-12);
}

TEST_CASE("single forcing point") {
  const PointField one = PointField::from_points(kWide, {{0.5, 0.5}});
  const auto prof =
      apply_cocycle(one, PiecewiseQuadraticPotential(PiecewiseLinearPotential{}), 0.0, 1.0, {0.0});
  // start at z = 0.5, straight up to the point, then on to x = 0
  CHECK(prof.potential[0] == -0.75);
  REQUIRE(prof.generator[0].has_value());

  const auto wide = velocity_profile(FixedFieldSource(one),
                                     PiecewiseQuadraticPotential(PiecewiseLinearPotential{}), 0.0,
                                     1.0, -3, 4, 701);
  // the path through the point wins on (-0.5, 1.5)
  REQUIRE(wide.shocks.size() == 2);
  CHECK(wide.shocks[0].x == doctest::Approx(-0.5));
  CHECK(wide.shocks[1].x == doctest::Approx(1.5));
  for (const auto& s : wide.shocks) CHECK(s.jump == doctest::Approx(-2.0));
}

TEST_CASE("equal times return the initial potential") {
  const PoissonFieldSource src(4);
  const PiecewiseLinearPotential hat(0.0, 0.0, {0.0}, {1.0, -1.0});
  const auto prof = apply_cocycle(src, PiecewiseQuadraticPotential(hat), 2.0, 2.0, {-1, 0, 1});
  CHECK(prof.potential == std::vector<double>{-1, 0, -1});
}

TEST_CASE("velocities are slopes of the final segments and jumps are negative") {
  for (int seed = 0; seed < 10; ++seed) {
    const PoissonFieldSource src(seed);
    CellRng r(derive_seed(21, seed));
    const auto w = random_potential(r, 5, 3.0);
    const double s = 0.0, t = 6.0;
    const auto prof = velocity_profile(src, PiecewiseQuadraticPotential(w), s, t, -8, 8, 401);
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
      const auto& g = prof.generator[i];
      const double expected =
          g ? (prof.x[i] - g->x) / (t - g->t) : (prof.x[i] - prof.ystar[i]) / (t - s);
      CHECK(std::abs(prof.velocity[i] - expected) <= 1e-9);
    }
    for (const auto& sh : prof.shocks) CHECK(sh.jump <= 1e-9);
  }
}

TEST_CASE("two-step evolution equals one step") {
  for (int seed = 0; seed < 6; ++seed) {
    const PoissonFieldSource src(100 + seed);
    CellRng r(derive_seed(13, seed));
    const auto w = PiecewiseQuadraticPotential(random_potential(r, 4, 2.0));
    const double mid = 1 + 6 * r.uniform();
    const auto xs = linspace(-4, 4, 81);
    const auto direct = apply_cocycle(src, w, 0.0, 8.0, xs);
    const auto first = apply_cocycle(src, w, 0.0, mid, {-120.0, 120.0});
    const auto second = apply_cocycle(src, first.evolved, mid, 8.0, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(std::abs(direct.potential[i] - second.potential[i]) <= 1e-9);
    }
  }
}

TEST_CASE("an evolved potential refuses queries that need unknown values") {
  const PoissonFieldSource src(5);
  const auto w = PiecewiseQuadraticPotential(PiecewiseLinearPotential{});
  const auto first = apply_cocycle(src, w, 0.0, 2.0, {-1.0, 1.0});
  CHECK_FALSE(first.evolved.exact_outside());
  try {
    apply_cocycle(src, first.evolved, 2.0, 40.0, {30.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::window_too_small);
  }
}

TEST_CASE("asymptotic slopes survive the evolution") {
  // least squares slope over the outer tenths of [-50, 50]
  auto fit = [](const EvolvedProfile& p, std::size_t a, std::size_t b) {
    double mx = 0, my = 0;
    for (std::size_t i = a; i < b; ++i) mx += p.x[i], my += p.potential[i];
    mx /= static_cast<double>(b - a);
    my /= static_cast<double>(b - a);
    double sxy = 0, sxx = 0;
    for (std::size_t i = a; i < b; ++i) {
      sxy += (p.x[i] - mx) * (p.potential[i] - my);
      sxx += (p.x[i] - mx) * (p.x[i] - mx);
    }
    return sxy / sxx;
  };
  const PiecewiseLinearPotential w(0.0, 0.0, {-1.0, 1.0}, {-0.8, 0.0, 0.6});
  int good = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const PoissonFieldSource src(derive_seed(55, seed));
    const auto prof = velocity_profile(src, PiecewiseQuadraticPotential(w), 0.0, 1.0, -50, 50, 1001);
    const auto n = prof.x.size();
    const double left = fit(prof, 0, n / 10);
    const double right = fit(prof, n - n / 10, n);
    if (std::abs(left - w.v_minus()) <= 0.2 && std::abs(right - w.v_plus()) <= 0.2) ++good;
  }
  CHECK(good >= 90);
}
