// Acceptance checks. `acceptance --criterion N` runs one check, no argument
// runs all of them; each prints one PASS/FAIL line.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pburgers/busemann.hpp"
#include "pburgers/cli.hpp"
#include "pburgers/error.hpp"
#include "pburgers/experiments.hpp"
#include "pburgers/rng.hpp"

using namespace pburgers;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

PiecewiseLinearPotential random_potential(CellRng& r, int pieces) {
  std::vector<double> breaks, slopes;
  double x = -3.0;
  for (int i = 0; i + 1 < pieces; ++i) {
    x += 6.0 / pieces * (0.3 + 1.4 * r.uniform());
    breaks.push_back(x);
  }
  for (int i = 0; i < pieces; ++i) slopes.push_back(-1 + 2 * r.uniform());
  return {0.0, 0.0, breaks, slopes};
}

ReplicaPlan plan(std::size_t replicas) {
  ReplicaPlan p;
  p.master_seed = 1;
  p.replicas = replicas;
  return p;
}

Outcome oracle_equivalence() {
  const Window wide{-100, 100, -1, 10};
  double worst = 0.0;
  int path_mismatch = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    CellRng r(derive_seed(1, inst));
    const int n = static_cast<int>(r.next() % 13);
    const double T = 0.5 + 4 * r.uniform();
    std::vector<SpaceTimePoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back({-2 + 4 * r.uniform(), T * r.uniform()});
    if (inst % 7 == 0 && n > 0) pts[0] = {0.0, 0.0};
    const auto field = PointField::from_points(wide, pts);
    const PathAnchor a{0, 0}, b{-1.5 + 3 * r.uniform(), T};
    const auto dp = min_action_two_point(field, a, b);
    const auto bf = brute_force_action(field, a, b);
    const double local = oracle::min_action(pts, a, b);
    worst = std::max({worst, std::abs(dp.action.total - bf.action.total),
                      std::abs(dp.action.total - local)});
    const auto again = path_action(field, dp.path);
    if (again.total != dp.action.total || again.visited != dp.action.visited) ++path_mismatch;
  }
  return {worst <= 1e-9 && path_mismatch == 0,
          "instances=1000 max_diff=" + num(worst) + " path_mismatch=" + std::to_string(path_mismatch)};
}

Outcome shear_identity() {
  double worst = 0.0;
  int vertex_mismatch = 0, cases = 0;
  for (int seed = 0; seed < 100; ++seed) {
    CellRng r(derive_seed(2, seed));
    const PointField field = generate(derive_seed(20, seed), 1.0, {-150, 150, -1, 12});
    const PathAnchor p{-1 + 2 * r.uniform(), 0}, q{-3 + 6 * r.uniform(), 10};
    const double a = -1 + 2 * r.uniform();
    const auto base = min_action_two_point(field, p, q);
    for (double v : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      const PointField sh = shear(field, v, a);
      const auto img = min_action_two_point(sh, {p.x + a + v * p.t, p.t}, {q.x + a + v * q.t, q.t});
      const double correction = v * (q.x - p.x) + 0.5 * v * v * (q.t - p.t);
      worst = std::max(worst, std::abs(img.action.total - (base.action.total + correction)));
      bool same = img.path.vertices.size() == base.path.vertices.size();
      for (std::size_t i = 0; same && i < base.path.vertices.size(); ++i) {
        const auto& o = field.points()[base.path.vertices[i]];
        same = sh.points()[img.path.vertices[i]] == SpaceTimePoint{o.x + a + v * o.t, o.t};
      }
      if (!same) ++vertex_mismatch;
      ++cases;
    }
  }
  return {worst <= 1e-9 && vertex_mismatch == 0,
          "cases=" + std::to_string(cases) + " max_diff=" + num(worst) +
              " vertex_mismatch=" + std::to_string(vertex_mismatch)};
}

Outcome cocycle_identity() {
  double worst = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    const PoissonFieldSource src(derive_seed(3, seed));
    CellRng r(derive_seed(30, seed));
    const auto w = PiecewiseQuadraticPotential(random_potential(r, 4));
    const double s = 0.0, t = 10.0;
    const double mid = s + (t - s) * (0.05 + 0.9 * r.uniform());
    const auto xs = linspace(-5, 5, 201);
    const auto direct = apply_cocycle(src, w, s, t, xs);
    for (double M = 32;; M *= 2) {
      try {
        const auto first = apply_cocycle(src, w, s, mid, {-5 - M, 5 + M});
        const auto second = apply_cocycle(src, first.evolved, mid, t, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
          worst = std::max(worst, std::abs(direct.potential[i] - second.potential[i]));
        }
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::window_too_small || M > 1e4) throw;
      }
    }
  }
  return {worst <= 1e-6, "seeds=50 sup_diff=" + num(worst)};
}

Outcome shape_function() {
  const std::vector<double> vs{-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto r = estimate_shape(plan(200), 100.0, vs);
  const double upper = r.value("alpha0_upper99");
  bool ok = upper < 0.0;
  std::string detail = "alpha(0)=" + num(r.estimate("v=0").estimate) + " upper99=" + num(upper);
  for (double v : vs) {
    if (v == 0.0) continue;
    char key[32];
    std::snprintf(key, sizeof key, "v=%.17g", v);
    const double res = r.value(std::string("residual ") + key);
    const double se = r.value(std::string("residual_se ") + key);
    ok = ok && std::abs(res) <= 3 * se;
    detail += " r(" + num(v, 2) + ")=" + num(res, 3) + "/" + num(se, 3);
  }
  return {ok, detail};
}

Outcome concentration() {
  const std::vector<double> ts{25.0, 50.0, 100.0, 200.0};
  const auto r = concentration_scan(plan(200), ts, 5);
  std::string detail = "median sd/(sqrt(t) ln t):";
  for (double t : ts) detail += " " + num(r.value("median_ratio t=" + num(t, 17)), 4);
  return {r.value("median_ratio_nonincreasing") == 1.0, detail};
}

Outcome busemann_algebra() {
  int checked = 0, antisym_fail = 0;
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const PoissonFieldSource src(derive_seed(6, seed));
    CellRng r(derive_seed(60, seed));
    const double v = -1.0 + 0.5 * (seed % 5);
    auto pt = [&] { return PathAnchor{-2 + 4 * r.uniform(), -1 + 2 * r.uniform()}; };
    const PathAnchor p1 = pt(), p2 = pt(), p3 = pt();
    const auto b12 = busemann(src, v, p1, p2);
    const auto b21 = busemann(src, v, p2, p1);
    const auto b23 = busemann(src, v, p2, p3);
    const auto b13 = busemann(src, v, p1, p3);
    if (b12.status != BusemannStatus::exact || b21.status != BusemannStatus::exact ||
        b23.status != BusemannStatus::exact || b13.status != BusemannStatus::exact) {
      continue;
    }
    ++checked;
    if (b21.value != -b12.value) ++antisym_fail;
    worst = std::max(worst, std::abs(b13.value - (b12.value + b23.value)));
  }
  return {checked >= 80 && antisym_fail == 0 && worst <= 1e-9,
          "exact_instances=" + std::to_string(checked) + "/100 antisymmetry_failures=" +
              std::to_string(antisym_fail) + " additivity_max=" + num(worst)};
}

Outcome mean_increment() {
  bool ok = true;
  std::string detail;
  for (double v : {0.0, 1.0}) {
    const auto r = mean_busemann_increment(plan(440), v);
    const auto& e = r.estimate("v=" + num(v, 17));
    ok = ok && e.n >= 400 && std::abs(e.estimate - v) <= 3 * e.se;
    detail += " v=" + num(v, 2) + ": mean=" + num(e.estimate) + " se=" + num(e.se) +
              " coalesced=" + std::to_string(e.n);
  }
  return {ok, detail.substr(1)};
}

Outcome coalescence() {
  HorizonParams h;
  h.T_max = 500.0;
  h.T0 = 500.0 / 64;
  const auto r = coalescence_statistics(plan(200), 0.0, {1.0}, h);
  const auto& e = r.estimate("fraction separation=1");
  return {e.estimate >= 0.95, "fraction=" + num(e.estimate) + " of " + std::to_string(e.n) +
                                  " median_depth=" + num(r.value("median_depth separation=1"))};
}

Outcome global_solution() {
  int compared = 0, good = 0, skipped = 0;
  double worst = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    const PoissonFieldSource src(derive_seed(9, seed));
    const auto c = check_global_solution(src, 0.0, -5.0, 0.0, -5.0, 5.0);
    if (c.skipped) {
      ++skipped;
      continue;
    }
    ++compared;
    worst = std::max(worst, c.discrepancy);
    if (c.discrepancy <= 1e-6) ++good;
  }
  const bool ok = compared >= 10 && good >= 0.95 * compared;
  return {ok, "within_1e-6=" + std::to_string(good) + "/" + std::to_string(compared) +
                  " skipped=" + std::to_string(skipped) + " max=" + num(worst)};
}

Outcome negative_jumps() {
  double worst = -INFINITY;
  std::size_t jumps = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const PoissonFieldSource src(derive_seed(10, seed));
    const auto u = global_velocity(src, 0.0, 0.0, -5, 5);
    for (const auto& j : u.jumps) worst = std::max(worst, j.jump), ++jumps;
    CellRng r(derive_seed(100, seed));
    const auto w = PiecewiseQuadraticPotential(random_potential(r, 5));
    const auto prof = velocity_profile(src, w, 0.0, 8.0, -10, 10, 401);
    for (const auto& s : prof.shocks) worst = std::max(worst, s.jump), ++jumps;
  }
  return {worst <= 1e-9, "jumps=" + std::to_string(jumps) + " largest=" + num(worst)};
}

Outcome pullback_attraction() {
  const std::vector<double> s_list{-50.0, -100.0, -200.0, -500.0};
  const auto r = attraction_experiment(plan(100), PiecewiseLinearPotential{}, 0.0, s_list, 5.0);
  const auto& e = r.estimate("agreement s=-500");
  const double slope = r.value("median_slope_ratio s=-500");
  const bool ok = e.estimate >= 0.95 && r.value("median_agreement_nondecreasing") == 1.0 &&
                  std::abs(slope) <= 0.2;
  std::string detail = "agreement(s=-500)=" + num(e.estimate) + " se=" + num(e.se) +
                       " replicas=" + std::to_string(e.n) + " skipped=" + std::to_string(e.skipped) +
                       " medians:";
  for (double s : s_list) detail += " " + num(r.value("median_agreement s=" + num(s, 17)));
  detail += " median y*/s=" + num(slope);
  return {ok, detail};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "pburgers_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> runs{
      {"experiment", "shape", "--t", "20", "--replicas", "12"},
      {"experiment", "concentration", "--times", "5,10", "--replicas", "12", "--batches", "3"},
      {"experiment", "increment", "--replicas", "12", "--T-max", "128"},
      {"experiment", "coalescence", "--replicas", "12", "--separations", "1,3", "--T-max", "128"},
      {"experiment", "attraction", "--replicas", "6", "--s", "-20,-50", "--T-max", "128"},
      {"experiment", "straightness", "--replicas", "12", "--T-list", "16,32"},
      {"busemann", "--p1", "0,0", "--p2", "2,0", "--replicas", "8"},
  };
  int differing = 0, failed = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::string reference;
    for (const char* threads : {"1", "2", "4", "1"}) {
      const auto csv = dir / ("run" + std::to_string(k) + "_" + threads + ".csv");
      const auto js = dir / ("run" + std::to_string(k) + "_" + threads + ".json");
      std::vector<std::string> args{"pburgers", "--seed", "5", "--threads", threads,
                                    "--out", csv.string()};
      if (runs[k][0] == "experiment") args.insert(args.end(), {"--json-out", js.string()});
      args.insert(args.end(), runs[k].begin(), runs[k].end());
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
      if (code != 0 && code != 3) ++failed;
      std::string content = read_file(csv) + out.str();
      if (runs[k][0] == "experiment") {
        // the embedded run configuration names the thread count and paths
        const std::string j = read_file(js);
        content += j.substr(0, j.find("\"config\""));
      }
      if (reference.empty()) {
        reference = content;
      } else if (content != reference) {
        ++differing;
      }
    }
  }
  return {differing == 0 && failed == 0,
          "commands=" + std::to_string(runs.size()) + " thread_counts=1,2,4 differing=" +
              std::to_string(differing) + " failed=" + std::to_string(failed)};
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"oracle equivalence", 60, oracle_equivalence},
      {"shear identity", 60, shear_identity},
      {"cocycle identity", 120, cocycle_identity},
      {"shape function", 600, shape_function},
      {"concentration", 900, concentration},
      {"busemann algebra", 600, busemann_algebra},
      {"mean increment", 1200, mean_increment},
      {"coalescence", 1200, coalescence},
      {"global solution", 1200, global_solution},
      {"negative jumps", 300, negative_jumps},
      {"pullback attraction", 1800, pullback_attraction},
      {"determinism", 300, determinism},
  };
  return all;
}

bool run_one(int n) {
  const auto& c = criteria()[static_cast<std::size_t>(n - 1)];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= c.limit_seconds;
  const bool pass = o.pass && in_time;
  std::cout << "criterion " << n << " (" << c.name << "): " << (pass ? "PASS" : "FAIL") << " "
            << o.detail << " time=" << num(secs, 3) << "s limit=" << c.limit_seconds << "s"
            << (in_time ? "" : " TIME EXCEEDED") << std::endl;
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "1-12; all when omitted")->check(CLI::Range(0, 12));
  CLI11_PARSE(app, argc, argv);
  bool ok = true;
  if (criterion > 0) {
    ok = run_one(criterion);
  } else {
    for (int n = 1; n <= 12; ++n) ok = run_one(n) && ok;
  }
  return ok ? 0 : 1;
}
