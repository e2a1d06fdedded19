#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "pburgers/error.hpp"
#include "pburgers/point_field.hpp"
#include "pburgers/rng.hpp"

using namespace pburgers;

TEST_CASE("zero intensity gives an empty field") {
  CHECK(generate(1, 0.0, {-3, 3, 0, 2}).size() == 0);
}

TEST_CASE("negative intensity and bad windows are rejected") {
  CHECK_THROWS_AS(generate(1, -1.0, {0, 1, 0, 1}), Error);
  CHECK_THROWS_AS(generate(1, 1.0, {1, 0, 0, 1}), Error);
}

TEST_CASE("generation is deterministic and window consistent") {
  const PointField small = generate(1, 1.0, {0, 1, 0, 1});
  const PointField large = generate(1, 1.0, {-5, 5, -5, 5});
  CHECK(small.points() == generate(1, 1.0, {0, 1, 0, 1}).points());
  std::vector<SpaceTimePoint> inside;
  for (const auto& p : large.points()) {
    if (small.window().contains(p)) inside.push_back(p);
  }
  CHECK(inside == small.points());
  CHECK_FALSE(large.derived());
}

TEST_CASE("points are sorted and distinct") {
  const PointField f = generate(3, 4.0, {-10, 10, 0, 10});
  for (std::size_t i = 1; i < f.size(); ++i) {
    CHECK(time_order(f.points()[i - 1], f.points()[i]));
  }
}

TEST_CASE("mean count over seeds matches the intensity") {
  const int n = 2000;
  double sum = 0.0;
  for (int s = 0; s < n; ++s) sum += static_cast<double>(generate(s, 1.0, {0, 2, 0, 2}).size());
  const double mean = sum / n;
  CHECK(std::abs(mean - 4.0) <= 3.0 * std::sqrt(4.0 / n));
}

TEST_CASE("cell counts fit Poisson(1) and neighbouring cells are uncorrelated") {
  const int n = 2000;
  // bins 0..5 and >= 6
  std::vector<double> observed(7, 0.0);
  std::vector<double> a, b;
  for (int s = 0; s < n; ++s) {
    const PointField f = generate(derive_seed(11, s), 1.0, {0, 2, 0, 1});
    const auto c0 = count_in(f, {0, 1, 0, 1});
    const auto c1 = count_in(f, {1, 2, 0, 1});
    observed[std::min<std::size_t>(c0, 6)] += 1.0;
    a.push_back(static_cast<double>(c0));
    b.push_back(static_cast<double>(c1));
  }
  double chi2 = 0.0, tail = 1.0, pk = std::exp(-1.0);
  for (int k = 0; k < 6; ++k) {
    const double expected = n * pk;
    chi2 += (observed[k] - expected) * (observed[k] - expected) / expected;
    tail -= pk;
    pk /= (k + 1);
  }
  chi2 += (observed[6] - n * tail) * (observed[6] - n * tail) / (n * tail);
  // 99th percentile of chi-square with 6 degrees of freedom
  CHECK(chi2 < 16.812);

  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.1);
}

TEST_CASE("count_in is half open on the upper edges") {
  const Window w{-1, 2, -1, 2};
  const auto one = PointField::from_points(w, {{0.5, 0.5}});
  CHECK(count_in(PointField::from_points(w, {}), {0, 1, 0, 1}) == 0);
  CHECK(count_in(one, {0, 1, 0, 1}) == 1);
  CHECK(count_in(one, {0, 0.5, 0, 1}) == 0);
  CHECK(count_in(one, {0.5, 1, 0.5, 1}) == 1);
  CHECK_THROWS_AS(count_in(one, {-5, 1, 0, 1}), Error);
}

TEST_CASE("from_points rejects duplicates and points outside the window") {
  const Window w{0, 1, 0, 1};
  CHECK_THROWS_AS(PointField::from_points(w, {{0.5, 0.5}, {0.5, 0.5}}), Error);
  try {
    PointField::from_points(w, {{2, 0.5}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::out_of_window);
  }
}

TEST_CASE("shear maps points and preserves counts on image rectangles") {
  const Window w{-1, 5, 0, 3};
  const auto f = PointField::from_points(w, {{1, 2}});
  const auto g = shear(f, 1.0, 0.0);
  REQUIRE(g.size() == 1);
  CHECK(g.points()[0] == SpaceTimePoint{3, 2});
  CHECK(g.derived());
  CHECK(shear(f, 0.0, 0.0).points() == f.points());

  // unit cells map to parallelograms; count those through the inverse map
  const PointField big = generate(5, 1.0, {-20, 20, 0, 4});
  const double v = 0.75, a = 0.3;
  const PointField sh = shear(big, v, a);
  for (int j = 0; j < 4; ++j) {
    for (int i = -10; i < 10; ++i) {
      std::size_t direct = 0, image = 0;
      for (const auto& p : big.points()) {
        if (p.t >= j && p.t < j + 1 && p.x >= i && p.x < i + 1) ++direct;
      }
      for (const auto& p : sh.points()) {
        const double x = p.x - a - v * p.t;
        if (p.t >= j && p.t < j + 1 && x >= i && x < i + 1) ++image;
      }
      CHECK(direct == image);
    }
  }
}

TEST_CASE("time shift and reflection") {
  const Window w{-3, 3, 0, 3};
  const auto f = PointField::from_points(w, {{1, 2}, {-1, 0.5}});
  CHECK(time_shift(f, 2.0).points()[1] == SpaceTimePoint{1, 0});
  CHECK(time_shift(f, 0.0).points() == f.points());
  const PointField g = generate(9, 1.0, {-4, 4, -2, 2});
  CHECK(time_shift(time_shift(g, 0.5), 1.25).points() == time_shift(g, 1.75).points());
  const auto r = reflect(f);
  CHECK(r.points()[1] == SpaceTimePoint{-1, 2});
  CHECK(reflect(reflect(g)).points() == g.points());
}

TEST_CASE("field files round trip exactly") {
  const PointField f = generate(42, 1.5, {-3.25, 4, -1, 2.5});
  std::stringstream s;
  write_field(s, f);
  const PointField g = read_field(s);
  CHECK(g.points() == f.points());
  CHECK(g.window() == f.window());
  CHECK(g.seed() == 42);
  CHECK(g.intensity() == 1.5);

  std::stringstream bad("1 1 0 1 0\n");
  CHECK_THROWS_AS(read_field(bad), Error);
}
