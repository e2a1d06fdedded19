#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pburgers/backward.hpp"
#include "pburgers/potential.hpp"

namespace pburgers {

struct ReplicaPlan {
  std::uint64_t master_seed = 1;
  std::size_t replicas = 100;
  /// Worker threads; results never depend on it.
  unsigned threads = 1;
  double intensity = 1.0;

  std::uint64_t seed(std::size_t index) const;
  void validate() const;
};

struct Estimate {
  std::string parameter;
  double estimate = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::size_t skipped = 0;
};

struct Sample {
  std::string parameter;
  std::size_t replica = 0;
  double value = 0.0;
};

struct EstimateReport {
  std::string experiment;
  ReplicaPlan plan;
  std::vector<Estimate> estimates;
  std::vector<Sample> samples;
  /// Derived scalars, in insertion order.
  std::vector<std::pair<std::string, double>> summary;
  std::size_t instances = 0;
  std::size_t skipped = 0;

  const Estimate& estimate(const std::string& parameter) const;
  double value(const std::string& name) const;
};

/// Mean and standard error (sample sd / sqrt(n)) of the values.
Estimate summarize(std::string parameter, const std::vector<double>& values,
                   std::size_t skipped = 0);
double median(std::vector<double> values);
double sample_sd(const std::vector<double>& values);

/// A^{0,t}(0, vt) / t per replica and v, on independent fields. With 0 in
/// v_list, also reports residual(v) = alpha(v) - alpha(0) - v^2/2 and its
/// standard error.
EstimateReport estimate_shape(const ReplicaPlan& plan, double t, const std::vector<double>& v_list,
                              const CorridorPolicy& policy = {});

/// Standard deviation of A^{0,t}(0, 0) per t, scaled by sqrt(t) ln t. The
/// replicas are also split into `batches` groups; the median of the group
/// ratios is reported per t.
EstimateReport concentration_scan(const ReplicaPlan& plan, const std::vector<double>& t_list,
                                  std::size_t batches = 5, const CorridorPolicy& policy = {});

/// B_v((0, 0), (1, 0)) over replicas whose minimizers coalesced.
EstimateReport mean_busemann_increment(const ReplicaPlan& plan, double v,
                                       const HorizonParams& horizon = {});

/// Coalesced fraction and depth endpoint.t - t_c for endpoints (0, 0), (d, 0).
EstimateReport coalescence_statistics(const ReplicaPlan& plan, double v,
                                      const std::vector<double>& separations,
                                      const HorizonParams& horizon = {});

/// Throws invalid-initial-condition unless (W, v) admits pullback attraction.
void check_attraction_conditions(const PiecewiseLinearPotential& w, double v);

/// Fraction of grid points of [-R, R] where the velocity evolved from W at
/// time s matches the global solution at time 0, per s; plus y*(s)/s at x=0.
/// Replicas whose global velocity does not stabilize are skipped.
EstimateReport attraction_experiment(const ReplicaPlan& plan, const PiecewiseLinearPotential& w,
                                     double v, const std::vector<double>& s_list, double R,
                                     const HorizonParams& horizon = {.T_max = 1024.0},
                                     const CorridorPolicy& policy = {0.5, 8.0, 6},
                                     std::size_t grid = 201);

/// Maximal distance of the minimizer from (-vT, -T) to (0, 0) to its chord,
/// divided by T^(1 - delta).
EstimateReport straightness_scan(const ReplicaPlan& plan, double v, double delta,
                                 const std::vector<double>& T_list,
                                 const CorridorPolicy& policy = {0.5, 8.0, 6});

/// Long format: experiment,parameter,replica,value.
void write_report_csv(std::ostream& out, const EstimateReport& report);
void write_report_json(std::ostream& out, const EstimateReport& report);

}  // namespace pburgers
