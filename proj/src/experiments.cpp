#include "pburgers/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "pburgers/busemann.hpp"
#include "pburgers/error.hpp"
#include "pburgers/hopf_lax.hpp"
#include "pburgers/parallel.hpp"
#include "pburgers/rng.hpp"

namespace pburgers {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string param(const char* name, double x) { return std::string(name) + "=" + fmt(x); }

void require_nonempty(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw Error(ErrorKind::invalid_parameter, std::string(what) + " is empty");
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::invalid_parameter, std::string(what) + " must be finite");
    }
  }
}

EstimateReport start_report(const char* name, const ReplicaPlan& plan) {
  plan.validate();
  EstimateReport r;
  r.experiment = name;
  r.plan = plan;
  return r;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::uint64_t ReplicaPlan::seed(std::size_t index) const { return derive_seed(master_seed, index); }

void ReplicaPlan::validate() const {
  if (replicas == 0) throw Error(ErrorKind::invalid_parameter, "replicas must be positive");
  if (threads == 0) throw Error(ErrorKind::invalid_parameter, "threads must be positive");
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorKind::invalid_parameter, "intensity must be finite and > 0");
  }
}

const Estimate& EstimateReport::estimate(const std::string& parameter) const {
  for (const auto& e : estimates) {
    if (e.parameter == parameter) return e;
  }
  throw Error(ErrorKind::invalid_parameter, "no estimate for " + parameter);
}

double EstimateReport::value(const std::string& name) const {
  for (const auto& [k, v] : summary) {
    if (k == name) return v;
  }
  throw Error(ErrorKind::invalid_parameter, "no summary value " + name);
}

double sample_sd(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return kNaN;
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

Estimate summarize(std::string parameter, const std::vector<double>& values, std::size_t skipped) {
  Estimate e;
  e.parameter = std::move(parameter);
  e.n = values.size();
  e.skipped = skipped;
  if (values.empty()) {
    e.estimate = kNaN;
    e.se = kNaN;
    return e;
  }
  double sum = 0.0;
  for (double x : values) sum += x;
  e.estimate = sum / static_cast<double>(values.size());
  e.se = sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
  return e;
}

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EstimateReport estimate_shape(const ReplicaPlan& plan, double t, const std::vector<double>& v_list,
                              const CorridorPolicy& policy) {
  auto report = start_report("shape", plan);
  require_nonempty(v_list, "v_list");
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::invalid_parameter, "t must be > 0");
  policy.validate();

  const std::size_t nv = v_list.size();
  std::vector<double> out(plan.replicas * nv);
  parallel_for(out.size(), plan.threads, [&](std::size_t k) {
    const std::size_t i = k / nv, j = k % nv;
    PoissonFieldSource src(derive_seed(plan.seed(i), j), plan.intensity);
    const double v = v_list[j];
    out[k] = min_action(src, {0.0, 0.0}, {v * t, t}, policy).action.total / t;
  });

  std::vector<Estimate> by_v;
  for (std::size_t j = 0; j < nv; ++j) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < plan.replicas; ++i) {
      vals.push_back(out[i * nv + j]);
      report.samples.push_back({param("v", v_list[j]), i, out[i * nv + j]});
    }
    by_v.push_back(summarize(param("v", v_list[j]), vals));
  }
  report.estimates = by_v;
  report.instances = out.size();

  const auto zero = std::find(v_list.begin(), v_list.end(), 0.0);
  if (zero != v_list.end()) {
    const Estimate& e0 = by_v[static_cast<std::size_t>(zero - v_list.begin())];
    // one-sided 99% upper bound for alpha(0)
    report.summary.emplace_back("alpha0_upper99", e0.estimate + 2.3263478740408408 * e0.se);
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = v_list[j];
      if (v == 0.0) continue;
      const Estimate& e = by_v[j];
      report.summary.emplace_back("residual " + param("v", v),
                                  e.estimate - e0.estimate - 0.5 * v * v);
      report.summary.emplace_back("residual_se " + param("v", v),
                                  std::sqrt(e.se * e.se + e0.se * e0.se));
    }
  }
  return report;
}

EstimateReport concentration_scan(const ReplicaPlan& plan, const std::vector<double>& t_list,
                                  std::size_t batches, const CorridorPolicy& policy) {
  auto report = start_report("concentration", plan);
  require_nonempty(t_list, "t_list");
  for (double t : t_list) {
    if (!(t > 1.0)) throw Error(ErrorKind::invalid_parameter, "times must exceed 1");
  }
  if (batches == 0 || plan.replicas < 2 * batches) {
    throw Error(ErrorKind::invalid_parameter, "need at least two replicas per batch");
  }
  policy.validate();

  const std::size_t nt = t_list.size();
  std::vector<double> out(plan.replicas * nt);
  parallel_for(out.size(), plan.threads, [&](std::size_t k) {
    const std::size_t i = k / nt, j = k % nt;
    PoissonFieldSource src(derive_seed(plan.seed(i), j), plan.intensity);
    out[k] = min_action(src, {0.0, 0.0}, {0.0, t_list[j]}, policy).action.total;
  });
  report.instances = out.size();

  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = t_list[j];
    const double scale = std::sqrt(t) * std::log(t);
    std::vector<double> vals;
    for (std::size_t i = 0; i < plan.replicas; ++i) {
      vals.push_back(out[i * nt + j]);
      report.samples.push_back({param("t", t), i, out[i * nt + j]});
    }
    report.estimates.push_back(summarize(param("t", t), vals));
    const double sd = sample_sd(vals);
    std::vector<double> ratios;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<double> part;
      for (std::size_t i = b; i < vals.size(); i += batches) part.push_back(vals[i]);
      ratios.push_back(sample_sd(part) / scale);
    }
    const double med = median(ratios);
    report.summary.emplace_back("sd " + param("t", t), sd);
    report.summary.emplace_back("ratio " + param("t", t), sd / scale);
    report.summary.emplace_back("median_ratio " + param("t", t), med);
    if (med > prev) monotone = false;
    prev = med;
  }
  report.summary.emplace_back("median_ratio_nonincreasing", monotone ? 1.0 : 0.0);
  return report;
}

EstimateReport mean_busemann_increment(const ReplicaPlan& plan, double v,
                                       const HorizonParams& horizon) {
  auto report = start_report("increment", plan);
  horizon.validate();
  std::vector<BusemannValue> out(plan.replicas);
  parallel_for(out.size(), plan.threads, [&](std::size_t i) {
    PoissonFieldSource src(plan.seed(i), plan.intensity);
    out[i] = busemann(src, v, {0.0, 0.0}, {1.0, 0.0}, horizon);
  });
  std::vector<double> vals;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].status != BusemannStatus::exact) {
      ++skipped;
      continue;
    }
    vals.push_back(out[i].value);
    report.samples.push_back({param("v", v), i, out[i].value});
  }
  report.estimates.push_back(summarize(param("v", v), vals, skipped));
  report.instances = out.size();
  report.skipped = skipped;
  report.summary.emplace_back("coalesced", static_cast<double>(vals.size()));
  return report;
}

EstimateReport coalescence_statistics(const ReplicaPlan& plan, double v,
                                      const std::vector<double>& separations,
                                      const HorizonParams& horizon) {
  auto report = start_report("coalescence", plan);
  require_nonempty(separations, "separations");
  horizon.validate();
  const std::size_t nd = separations.size();
  std::vector<double> depth(plan.replicas * nd, kNaN);
  parallel_for(depth.size(), plan.threads, [&](std::size_t k) {
    const std::size_t i = k / nd, j = k % nd;
    PoissonFieldSource src(plan.seed(i), plan.intensity);
    const auto pair = coalesced_pair(src, {0.0, 0.0}, {separations[j], 0.0}, v, horizon);
    if (pair.result.status == CoalescenceStatus::coalesced) depth[k] = -*pair.result.time;
  });
  report.instances = depth.size();
  for (std::size_t j = 0; j < nd; ++j) {
    const std::string p = param("separation", separations[j]);
    std::vector<double> hit, depths;
    for (std::size_t i = 0; i < plan.replicas; ++i) {
      const double d = depth[i * nd + j];
      hit.push_back(std::isnan(d) ? 0.0 : 1.0);
      report.samples.push_back({"coalesced " + p, i, hit.back()});
      if (!std::isnan(d)) {
        depths.push_back(d);
        report.samples.push_back({"depth " + p, i, d});
      }
    }
    Estimate frac = summarize("fraction " + p, hit);
    const double q = frac.estimate;
    frac.se = std::sqrt(q * (1.0 - q) / static_cast<double>(hit.size()));
    report.estimates.push_back(frac);
    report.estimates.push_back(summarize("depth " + p, depths, hit.size() - depths.size()));
    report.summary.emplace_back("median_depth " + p, median(depths));
  }
  return report;
}

void check_attraction_conditions(const PiecewiseLinearPotential& w, double v) {
  const double vm = w.v_minus(), vp = w.v_plus();
  bool ok = false;
  if (v == 0.0) {
    ok = vm <= 0.0 && 0.0 <= vp;
  } else if (v > 0.0) {
    ok = vm == v && vp > -v;
  } else {
    ok = vp == v && vm < -v;
  }
  if (!ok || !std::isfinite(v)) {
    throw Error(ErrorKind::invalid_initial_condition,
                "asymptotic slopes (" + fmt(vm) + ", " + fmt(vp) +
                    ") do not select the direction v = " + fmt(v));
  }
}

EstimateReport attraction_experiment(const ReplicaPlan& plan, const PiecewiseLinearPotential& w,
                                     double v, const std::vector<double>& s_list, double R,
                                     const HorizonParams& horizon, const CorridorPolicy& policy,
                                     std::size_t grid) {
  check_attraction_conditions(w, v);
  auto report = start_report("attraction", plan);
  require_nonempty(s_list, "s_list");
  for (double s : s_list) {
    if (!(s < 0.0)) throw Error(ErrorKind::invalid_parameter, "start times must be negative");
  }
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::invalid_parameter, "R must be > 0");
  if (grid < 3) throw Error(ErrorKind::invalid_parameter, "grid must have at least 3 points");
  horizon.validate();
  policy.validate();

  const std::size_t ns = s_list.size();
  const auto xs = linspace(-R, R, grid);
  const std::size_t mid = grid / 2;
  const PiecewiseQuadraticPotential w0(w);
  std::vector<double> agree(plan.replicas * ns, kNaN), slope(plan.replicas * ns, kNaN);
  parallel_for(plan.replicas, plan.threads, [&](std::size_t i) {
    PoissonFieldSource src(plan.seed(i), plan.intensity);
    const auto u = global_velocity(src, v, 0.0, -R, R, horizon);
    for (std::size_t j = 0; j < ns; ++j) {
      const double s = s_list[j];
      const auto prof = apply_cocycle(src, w0, s, 0.0, xs, policy);
      slope[i * ns + j] = prof.ystar[mid] / s;
      if (!u.stabilized) continue;
      std::size_t hits = 0;
      for (std::size_t k = 0; k < grid; ++k) {
        if (std::abs(prof.velocity[k] - u(xs[k])) <= 1e-6) ++hits;
      }
      agree[i * ns + j] = static_cast<double>(hits) / static_cast<double>(grid);
    }
  });

  report.instances = agree.size();
  double prev = -std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t j = 0; j < ns; ++j) {
    const std::string p = param("s", s_list[j]);
    std::vector<double> a, y;
    for (std::size_t i = 0; i < plan.replicas; ++i) {
      const double g = agree[i * ns + j];
      y.push_back(slope[i * ns + j]);
      report.samples.push_back({"slope_ratio " + p, i, y.back()});
      if (std::isnan(g)) continue;
      a.push_back(g);
      report.samples.push_back({"agreement " + p, i, g});
    }
    const std::size_t skipped = plan.replicas - a.size();
    report.skipped += skipped;
    report.estimates.push_back(summarize("agreement " + p, a, skipped));
    report.estimates.push_back(summarize("slope_ratio " + p, y));
    report.summary.emplace_back("median_agreement " + p, median(a));
    report.summary.emplace_back("median_slope_ratio " + p, median(y));
  }
  // medians ordered by increasing |s|
  std::vector<std::size_t> order(ns);
  for (std::size_t j = 0; j < ns; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
    return std::abs(s_list[p]) < std::abs(s_list[q]);
  });
  for (std::size_t j : order) {
    const double med = report.value("median_agreement " + param("s", s_list[j]));
    if (med < prev) monotone = false;
    prev = med;
  }
  report.summary.emplace_back("median_agreement_nondecreasing", monotone ? 1.0 : 0.0);
  return report;
}

EstimateReport straightness_scan(const ReplicaPlan& plan, double v, double delta,
                                 const std::vector<double>& T_list, const CorridorPolicy& policy) {
  auto report = start_report("straightness", plan);
  require_nonempty(T_list, "T_list");
  for (double T : T_list) {
    if (!(T > 0.0)) throw Error(ErrorKind::invalid_parameter, "durations must be positive");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "delta must lie in [0, 1)");
  }
  policy.validate();
  const std::size_t nT = T_list.size();
  std::vector<double> out(plan.replicas * nT);
  parallel_for(out.size(), plan.threads, [&](std::size_t k) {
    const std::size_t i = k / nT, j = k % nT;
    PoissonFieldSource src(plan.seed(i), plan.intensity);
    const double T = T_list[j];
    const auto m = min_action(src, {-v * T, -T}, {0.0, 0.0}, policy);
    double dev = 0.0;
    for (const auto& p : m.vertices) dev = std::max(dev, std::abs(p.x - v * p.t));
    out[k] = dev / std::pow(T, 1.0 - delta);
  });
  report.instances = out.size();
  for (std::size_t j = 0; j < nT; ++j) {
    const std::string p = param("T", T_list[j]);
    std::vector<double> vals;
    for (std::size_t i = 0; i < plan.replicas; ++i) {
      vals.push_back(out[i * nT + j]);
      report.samples.push_back({p, i, vals.back()});
    }
    report.estimates.push_back(summarize(p, vals));
    report.summary.emplace_back("median " + p, median(vals));
  }
  report.summary.emplace_back("delta", delta);
  return report;
}

void write_report_csv(std::ostream& out, const EstimateReport& report) {
  out << "experiment,parameter,replica,value\n";
  for (const auto& s : report.samples) {
    out << report.experiment << ',' << s.parameter << ',' << s.replica << ',' << fmt(s.value)
        << '\n';
  }
}

void write_report_json(std::ostream& out, const EstimateReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["experiment"] = report.experiment;
  j["master_seed"] = report.plan.master_seed;
  j["replicas"] = report.plan.replicas;
  j["intensity"] = report.plan.intensity;
  j["instances"] = report.instances;
  j["skipped"] = report.skipped;
  ordered_json est = ordered_json::array();
  for (const auto& e : report.estimates) {
    est.push_back({{"parameter", e.parameter},
                   {"estimate", e.estimate},
                   {"se", e.se},
                   {"n", e.n},
                   {"skipped", e.skipped}});
  }
  j["estimates"] = est;
  ordered_json summary = ordered_json::object();
  for (const auto& [k, v] : report.summary) summary[k] = v;
  j["summary"] = summary;
  out << j.dump(2) << '\n';
}

}  // namespace pburgers
