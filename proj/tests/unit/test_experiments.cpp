#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pburgers/error.hpp"
#include "pburgers/experiments.hpp"
#include "pburgers/parallel.hpp"

using namespace pburgers;

namespace {

std::string csv_of(const EstimateReport& r) {
  std::ostringstream s;
  write_report_csv(s, r);
  return s.str();
}

std::string json_of(const EstimateReport& r) {
  std::ostringstream s;
  write_report_json(s, r);
  return s.str();
}

ReplicaPlan small_plan(unsigned threads, std::size_t replicas = 6) {
  ReplicaPlan p;
  p.master_seed = 99;
  p.replicas = replicas;
  p.threads = threads;
  return p;
}

}  // namespace

TEST_CASE("summary statistics") {
  const auto e = summarize("x", {1, 2, 3, 4});
  CHECK(e.estimate == 2.5);
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(e.n == 4);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(std::isnan(summarize("empty", {}).estimate));
  CHECK(std::isnan(sample_sd({1.0})));
}

TEST_CASE("replica seeds are distinct and plans validated") {
  ReplicaPlan p;
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < 10000; ++i) seeds.insert(p.seed(i));
  CHECK(seeds.size() == 10000);
  p.replicas = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.threads = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("parallel_for fills every slot and reports the first failure") {
  std::vector<int> out(1000);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i % 10 == 7) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
}

TEST_CASE("attraction conditions") {
  CHECK_NOTHROW(check_attraction_conditions(PiecewiseLinearPotential{}, 0.0));
  CHECK_NOTHROW(check_attraction_conditions(PiecewiseLinearPotential::linear(1.0), 1.0));
  const PiecewiseLinearPotential tent(0.0, 0.0, {0.0}, {1.0, -1.0});
  try {
    check_attraction_conditions(tent, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_initial_condition);
  }
  CHECK_THROWS_AS(check_attraction_conditions(PiecewiseLinearPotential::linear(0.5), 1.0), Error);
  CHECK_NOTHROW(check_attraction_conditions(PiecewiseLinearPotential::linear(-1.0), -1.0));
}

TEST_CASE("shape report layout") {
  const auto r = estimate_shape(small_plan(1), 10.0, {-0.5, 0.0, 0.5});
  CHECK(r.experiment == "shape");
  CHECK(r.instances == 18);
  CHECK(r.estimates.size() == 3);
  CHECK(r.estimate("v=0").n == 6);
  CHECK(std::isfinite(r.value("residual v=0.5")));
  CHECK(std::isfinite(r.value("residual_se v=-0.5")));
  const std::string csv = csv_of(r);
  CHECK(csv.rfind("experiment,parameter,replica,value\nshape,v=-0.5,0,", 0) == 0);
  CHECK_THROWS_AS(estimate_shape(small_plan(1), -1.0, {0.0}), Error);
  CHECK_THROWS_AS(estimate_shape(small_plan(1), 10.0, {}), Error);
}

TEST_CASE("reports do not depend on the thread count") {
  HorizonParams h;
  h.T_max = 64;
  const PiecewiseLinearPotential zero;
  auto all = [&](unsigned threads) {
    const auto p = small_plan(threads, 5);
    std::string s;
    for (const auto& r : {estimate_shape(p, 8.0, {0.0, 1.0}), concentration_scan(p, {4.0, 8.0}, 2),
                          mean_busemann_increment(p, 0.0, h),
                          coalescence_statistics(p, 0.0, {1.0, 2.0}, h),
                          attraction_experiment(p, zero, 0.0, {-10.0, -20.0}, 2.0, h),
                          straightness_scan(p, 0.0, 0.2, {8.0, 16.0})}) {
      s += csv_of(r) + json_of(r);
    }
    return s;
  };
  const std::string one = all(1);
  CHECK(one == all(3));
  CHECK(one == all(1));
}

TEST_CASE("concentration needs two replicas per batch") {
  CHECK_THROWS_AS(concentration_scan(small_plan(1, 6), {10.0}, 5), Error);
}
