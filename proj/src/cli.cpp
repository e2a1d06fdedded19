#include "pburgers/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pburgers/busemann.hpp"
#include "pburgers/error.hpp"
#include "pburgers/experiments.hpp"
#include "pburgers/hopf_lax.hpp"
#include "pburgers/parallel.hpp"
#include "pburgers/rng.hpp"

namespace pburgers {

namespace {

using nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON config files: top-level keys are global flags, nested objects are
/// subcommands, arrays are lists.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return fmt(v.get<double>());
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("unsupported config value " + v.dump());
  }

  static void collect(const ordered_json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        collect(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static ordered_json value_of(const std::string& s) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    std::int64_t i = 0;
    if (auto r = std::from_chars(first, last, i); r.ec == std::errc() && r.ptr == last) return i;
    std::uint64_t u = 0;
    if (auto r = std::from_chars(first, last, u); r.ec == std::errc() && r.ptr == last) return u;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) return d;
    return s;
  }

  static ordered_json dump(const CLI::App* app, bool default_also) {
    ordered_json j = ordered_json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      std::vector<std::string> vals = opt->results();
      if (vals.empty()) {
        if (!default_also || opt->get_default_str().empty()) continue;
        vals = {opt->get_default_str()};
      }
      if (vals.size() == 1 && opt->get_items_expected_max() <= 1) {
        j[name] = value_of(vals.front());
      } else {
        ordered_json arr = ordered_json::array();
        for (const auto& v : vals) arr.push_back(value_of(v));
        j[name] = arr;
      }
    }
    for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }
};

struct Common {
  std::uint64_t seed = 1;
  double intensity = 1.0;
  unsigned threads = 1;
  std::string field_in;
  std::string out;
  std::string json_out;
  std::optional<double> corridor_rate, corridor_slack;
  std::optional<int> max_widenings;
  std::optional<double> T0, T_max, stability_fraction, horizon_rate, horizon_slack;
  std::optional<int> fan_agreements;

  CorridorPolicy corridor(CorridorPolicy p) const {
    if (corridor_rate) p.half_width_rate = *corridor_rate;
    if (corridor_slack) p.slack = *corridor_slack;
    if (max_widenings) p.max_widenings = *max_widenings;
    p.validate();
    return p;
  }

  HorizonParams horizon(HorizonParams h = {}) const {
    if (T0) h.T0 = *T0;
    if (T_max) h.T_max = *T_max;
    if (stability_fraction) h.stability_fraction = *stability_fraction;
    if (fan_agreements) h.fan_agreements = *fan_agreements;
    if (horizon_rate) h.corridor.half_width_rate = *horizon_rate;
    if (horizon_slack) h.corridor.slack = *horizon_slack;
    if (max_widenings) h.corridor.max_widenings = *max_widenings;
    h.validate();
    return h;
  }

  ReplicaPlan plan(std::size_t replicas) const {
    ReplicaPlan p;
    p.master_seed = seed;
    p.replicas = replicas;
    p.threads = threads;
    p.intensity = intensity;
    p.validate();
    return p;
  }
};

/// Relative paths live under PBURGERS_OUTPUT_DIR when it is set; with no
/// explicit path, `fallback` is used there.
std::string output_path(const std::string& given, const std::string& fallback) {
  const char* dir = std::getenv("PBURGERS_OUTPUT_DIR");
  const bool has_dir = dir != nullptr && *dir != '\0';
  if (given.empty()) {
    return has_dir ? (std::filesystem::path(dir) / fallback).string() : std::string();
  }
  if (!has_dir || std::filesystem::path(given).is_absolute()) return given;
  return (std::filesystem::path(dir) / given).string();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

SpaceTimePoint to_point(const std::vector<double>& v, const char* what) {
  if (v.size() != 2) {
    throw Error(ErrorKind::invalid_parameter, std::string(what) + " needs x,t");
  }
  return {v[0], v[1]};
}

/// Field points come from --field-in when given, else from the seed.
struct SourceHolder {
  std::optional<PointField> field;
  std::unique_ptr<FieldSource> source;

  explicit SourceHolder(const Common& c) {
    if (c.field_in.empty()) {
      source = std::make_unique<PoissonFieldSource>(c.seed, c.intensity);
      return;
    }
    std::ifstream in(c.field_in);
    if (!in) throw Error(ErrorKind::invalid_parameter, "cannot read " + c.field_in);
    field = read_field(in);
    source = std::make_unique<FixedFieldSource>(*field);
  }
  const FieldSource& operator*() const { return *source; }
};

void write_profile_csv(std::ostream& out, const std::vector<double>& x,
                       const std::vector<double>& potential, const std::vector<double>& velocity,
                       const std::vector<double>& ystar) {
  out << "x,potential,velocity,ystar\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << fmt(x[i]) << ',' << fmt(potential[i]) << ',' << fmt(velocity[i]) << ','
        << fmt(ystar[i]) << '\n';
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::window_too_small:
    case ErrorKind::corridor_escape:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulations of inviscid Burgers turbulence driven by a Poisson point field",
               "pburgers"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with flag values; flags on the command line win");
  app.require_subcommand(1);

  Common c;
  app.add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app.add_option("--intensity", c.intensity, "Point field intensity")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads for replicas; outputs do not depend on it")
      ->capture_default_str();
  app.add_option("--field-in", c.field_in, "Read the point field from this file");
  app.add_option("--out", c.out, "Primary output file (CSV)");
  app.add_option("--json-out", c.json_out, "JSON summary file");
  app.add_option("--corridor-rate", c.corridor_rate, "Corridor half-width per unit time");
  app.add_option("--corridor-slack", c.corridor_slack, "Corridor slack");
  app.add_option("--max-widenings", c.max_widenings, "Corridor doublings before giving up");
  app.add_option("--T0", c.T0, "Initial backward horizon");
  app.add_option("--T-max", c.T_max, "Largest backward horizon");
  app.add_option("--stability-fraction", c.stability_fraction,
                 "Fraction of the previous horizon that must agree");
  app.add_option("--fan-agreements", c.fan_agreements,
                 "Consecutive agreeing doublings for fans");
  app.add_option("--horizon-rate", c.horizon_rate, "Corridor rate for backward minimizers");
  app.add_option("--horizon-slack", c.horizon_slack, "Corridor slack for backward minimizers");

  std::string summary;
  std::size_t instances = 0, skipped = 0;

  // gen-field
  auto* gen = app.add_subcommand("gen-field", "Sample the point field on a window");
  std::vector<double> window;
  std::string field_out;
  gen->add_option("--window", window, "x_min,x_max,t_min,t_max")->delimiter(',')->required();
  gen->add_option("--field-out", field_out, "Field file");

  // action
  auto* act = app.add_subcommand("action", "Minimal action between two space-time points");
  std::vector<double> from, to;
  act->add_option("--from", from, "x,t")->delimiter(',')->required();
  act->add_option("--to", to, "x,t")->delimiter(',')->required();

  // evolve
  auto* evo = app.add_subcommand("evolve", "Evolve a piecewise linear potential from s to t");
  std::string w_literal = "0 0 ; ; 0";
  double evo_s = 0.0, evo_t = 1.0, evo_a = -5.0, evo_b = 5.0;
  std::size_t resolution = 101;
  std::vector<double> xs;
  evo->add_option("--W", w_literal, "Potential literal `ax av ; b1 ... ; m0 ... mK`")
      ->capture_default_str();
  evo->add_option("--s", evo_s, "Start time")->capture_default_str();
  evo->add_option("--t", evo_t, "End time")->capture_default_str();
  evo->add_option("--a", evo_a, "Left end of the sampling interval")->capture_default_str();
  evo->add_option("--b", evo_b, "Right end of the sampling interval")->capture_default_str();
  evo->add_option("--resolution", resolution, "Number of abscissas")->capture_default_str();
  evo->add_option("--x", xs, "Explicit abscissas")->delimiter(',');

  // geodesic
  auto* geo = app.add_subcommand("geodesic", "Backward minimizer with asymptotic slope v");
  std::vector<double> endpoint;
  double geo_v = 0.0;
  geo->add_option("--endpoint", endpoint, "x,t")->delimiter(',')->required();
  geo->add_option("--v", geo_v, "Asymptotic slope")->capture_default_str();

  // busemann
  auto* bus = app.add_subcommand("busemann", "Busemann function between two points");
  std::vector<double> p1, p2;
  double bus_v = 0.0;
  std::size_t bus_replicas = 1;
  bus->add_option("--p1", p1, "x,t")->delimiter(',')->required();
  bus->add_option("--p2", p2, "x,t")->delimiter(',')->required();
  bus->add_option("--v", bus_v, "Asymptotic slope")->capture_default_str();
  bus->add_option("--replicas", bus_replicas, "Number of fields; >1 derives seeds from --seed")
      ->capture_default_str();

  // profile
  auto* pro = app.add_subcommand("profile", "Global potential and velocity on an interval");
  double pro_v = 0.0, pro_t = 0.0, pro_a = -5.0, pro_b = 5.0;
  std::size_t pro_resolution = 101;
  pro->add_option("--v", pro_v, "Asymptotic slope")->capture_default_str();
  pro->add_option("--t", pro_t, "Time")->capture_default_str();
  pro->add_option("--a", pro_a, "Left end")->capture_default_str();
  pro->add_option("--b", pro_b, "Right end")->capture_default_str();
  pro->add_option("--resolution", pro_resolution, "Number of abscissas")->capture_default_str();

  // experiments
  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiments over replicas");
  exp->require_subcommand(1);
  std::size_t replicas = 100;
  auto add_replicas = [&](CLI::App* sub, std::size_t def) {
    sub->add_option("--replicas", replicas, "Number of replicas")->default_val(def);
  };

  auto* shape = exp->add_subcommand("shape", "Shape function estimates");
  double shape_t = 100.0;
  std::vector<double> shape_v{-1.0, -0.5, 0.0, 0.5, 1.0};
  shape->add_option("--t", shape_t, "Duration")->capture_default_str();
  shape->add_option("--v", shape_v, "Slopes")->delimiter(',')->capture_default_str();
  add_replicas(shape, 200);

  auto* conc = exp->add_subcommand("concentration", "Fluctuations of the point-to-point action");
  std::vector<double> conc_t{25.0, 50.0, 100.0, 200.0};
  std::size_t batches = 5;
  conc->add_option("--times", conc_t, "Durations")->delimiter(',')->capture_default_str();
  conc->add_option("--batches", batches, "Batches for the median ratio")->capture_default_str();
  add_replicas(conc, 200);

  auto* inc = exp->add_subcommand("increment", "Mean Busemann increment over a unit step");
  double inc_v = 0.0;
  inc->add_option("--v", inc_v, "Asymptotic slope")->capture_default_str();
  add_replicas(inc, 440);

  auto* coal = exp->add_subcommand("coalescence", "Coalescence of backward minimizers");
  double coal_v = 0.0;
  std::vector<double> separations{1.0};
  coal->add_option("--v", coal_v, "Asymptotic slope")->capture_default_str();
  coal->add_option("--separations", separations, "Endpoint distances")->delimiter(',')
      ->capture_default_str();
  add_replicas(coal, 200);

  auto* att = exp->add_subcommand("attraction", "Pullback attraction towards the global solution");
  std::string att_w = "0 0 ; ; 0";
  double att_v = 0.0, att_R = 5.0;
  std::vector<double> att_s{-50.0, -100.0, -200.0, -500.0};
  std::size_t att_grid = 201;
  att->add_option("--W", att_w, "Initial potential literal")->capture_default_str();
  att->add_option("--v", att_v, "Asymptotic slope")->capture_default_str();
  att->add_option("--s", att_s, "Start times")->delimiter(',')->capture_default_str();
  att->add_option("--R", att_R, "Half-width of the region")->capture_default_str();
  att->add_option("--grid", att_grid, "Grid points on the region")->capture_default_str();
  add_replicas(att, 100);

  auto* str = exp->add_subcommand("straightness", "Deviation of minimizers from their chords");
  double str_v = 0.0, delta = 0.2;
  std::vector<double> str_T{32.0, 64.0, 128.0, 256.0};
  str->add_option("--v", str_v, "Slope")->capture_default_str();
  str->add_option("--delta", delta, "Exponent")->capture_default_str();
  str->add_option("--T-list", str_T, "Durations")->delimiter(',')->capture_default_str();
  add_replicas(str, 100);

  for (CLI::App* sub : {gen, act, evo, geo, bus, pro, exp}) sub->fallthrough();
  for (CLI::App* sub : {shape, conc, inc, coal, att, str}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    auto experiment_output = [&](const EstimateReport& report) {
      const std::string csv = output_path(c.out, report.experiment + ".csv");
      if (!csv.empty()) {
        auto f = open_output(csv);
        write_report_csv(f, report);
      }
      const std::string js = output_path(c.json_out, report.experiment + ".json");
      if (!js.empty()) {
        std::ostringstream s;
        write_report_json(s, report);
        auto j = ordered_json::parse(s.str());
        j["config"] = ordered_json::parse(app.config_to_str(true, false));
        auto f = open_output(js);
        f << j.dump(2) << '\n';
      }
      instances = report.instances;
      skipped = report.skipped;
      std::ostringstream line;
      line << "experiment=" << report.experiment << " instances=" << report.instances
           << " skipped=" << report.skipped;
      for (const auto& e : report.estimates) {
        line << " [" << e.parameter << "]=" << fmt(e.estimate) << "+-" << fmt(e.se);
      }
      summary = line.str();
    };
    auto require_seeded = [&] {
      if (!c.field_in.empty()) {
        throw Error(ErrorKind::invalid_parameter, "experiments sample their own fields; drop --field-in");
      }
    };

    if (*gen) {
      if (window.size() != 4) {
        throw Error(ErrorKind::invalid_parameter, "--window needs x_min,x_max,t_min,t_max");
      }
      const Window w{window[0], window[1], window[2], window[3]};
      const PointField field = generate(c.seed, c.intensity, w);
      std::string path = field_out.empty() ? c.out : field_out;
      path = output_path(path, "field.txt");
      if (path.empty()) {
        write_field(out, field);
        return 0;
      }
      auto f = open_output(path);
      write_field(f, field);
      summary = "points=" + std::to_string(field.size()) + " file=" + path;
    } else if (*act) {
      SourceHolder src(c);
      const auto a = to_point(from, "--from"), b = to_point(to, "--to");
      const auto m = min_action(*src, a, b, c.corridor({}));
      const std::string path = output_path(c.out, "action.csv");
      if (!path.empty()) {
        auto f = open_output(path);
        f << "t,x\n" << fmt(a.t) << ',' << fmt(a.x) << '\n';
        for (const auto& p : m.vertices) f << fmt(p.t) << ',' << fmt(p.x) << '\n';
        f << fmt(b.t) << ',' << fmt(b.x) << '\n';
      }
      summary = "total=" + fmt(m.action.total) + " kinetic=" + fmt(m.action.kinetic) +
                " visited=" + std::to_string(m.action.visited);
    } else if (*evo) {
      SourceHolder src(c);
      const auto w = PiecewiseLinearPotential::parse(w_literal);
      if (xs.empty()) {
        if (resolution < 2) throw Error(ErrorKind::invalid_parameter, "resolution must be >= 2");
        xs = linspace(evo_a, evo_b, resolution);
      }
      const auto prof =
          apply_cocycle(*src, PiecewiseQuadraticPotential(w), evo_s, evo_t, xs, c.corridor({}));
      const std::string path = output_path(c.out, "evolve.csv");
      if (!path.empty()) {
        auto f = open_output(path);
        write_profile_csv(f, prof.x, prof.potential, prof.velocity, prof.ystar);
      }
      summary = "t=" + fmt(prof.t) + " abscissas=" + std::to_string(prof.x.size()) +
                " shocks=" + std::to_string(prof.shocks.size());
    } else if (*geo) {
      SourceHolder src(c);
      const auto e = to_point(endpoint, "--endpoint");
      const auto m = backward_minimizer(*src, e, geo_v, c.horizon());
      instances = 1;
      skipped = m.stabilized ? 0 : 1;
      const std::string path = output_path(c.out, "geodesic.csv");
      if (!path.empty()) {
        auto f = open_output(path);
        f << "# endpoint=" << fmt(e.x) << ',' << fmt(e.t) << " v=" << fmt(geo_v)
          << " T=" << fmt(m.horizon_T) << " stabilized=" << (m.stabilized ? "true" : "false")
          << '\n';
        f << "t,x\n" << fmt(e.t) << ',' << fmt(e.x) << '\n';
        for (const auto& p : m.vertices) f << fmt(p.t) << ',' << fmt(p.x) << '\n';
        f << fmt(m.anchor.t) << ',' << fmt(m.anchor.x) << '\n';
      }
      summary = "T=" + fmt(m.horizon_T) + " vertices=" + std::to_string(m.vertices.size()) +
                " stable_until=" + fmt(m.stable_until) +
                " stabilized=" + (m.stabilized ? "true" : "false");
    } else if (*bus) {
      const auto a = to_point(p1, "--p1"), b = to_point(p2, "--p2");
      if (bus_replicas == 0) throw Error(ErrorKind::invalid_parameter, "replicas must be positive");
      if (bus_replicas > 1) require_seeded();
      const auto h = c.horizon();
      std::vector<BusemannValue> vals(bus_replicas);
      std::vector<std::uint64_t> seeds(bus_replicas, c.seed);
      if (bus_replicas > 1) {
        for (std::size_t i = 0; i < bus_replicas; ++i) seeds[i] = derive_seed(c.seed, i);
      }
      if (bus_replicas == 1) {
        SourceHolder src(c);
        vals[0] = busemann(*src, bus_v, a, b, h);
      } else {
        const ReplicaPlan plan = c.plan(bus_replicas);
        parallel_for(bus_replicas, plan.threads, [&](std::size_t i) {
          PoissonFieldSource src(seeds[i], c.intensity);
          vals[i] = busemann(src, bus_v, a, b, h);
        });
      }
      const std::string path = output_path(c.out, "busemann.csv");
      std::size_t exact = 0;
      for (const auto& v : vals) exact += v.status == BusemannStatus::exact;
      if (!path.empty()) {
        auto f = open_output(path);
        f << "seed,v,p1_x,p1_t,p2_x,p2_t,value,t_c,status\n";
        for (std::size_t i = 0; i < vals.size(); ++i) {
          const auto& v = vals[i];
          f << seeds[i] << ',' << fmt(v.v) << ',' << fmt(v.p1.x) << ',' << fmt(v.p1.t) << ','
            << fmt(v.p2.x) << ',' << fmt(v.p2.t) << ',' << fmt(v.value) << ','
            << fmt(v.coalescence_time) << ',' << to_string(v.status) << '\n';
        }
      }
      instances = vals.size();
      skipped = vals.size() - exact;
      if (vals.size() == 1) {
        summary = "value=" + fmt(vals[0].value) + " t_c=" + fmt(vals[0].coalescence_time) +
                  " status=" + to_string(vals[0].status);
      } else {
        summary = "exact=" + std::to_string(exact) + " of " + std::to_string(vals.size());
      }
    } else if (*pro) {
      SourceHolder src(c);
      if (pro_resolution < 2) throw Error(ErrorKind::invalid_parameter, "resolution must be >= 2");
      const auto fan = backward_fan(*src, pro_v, pro_t, pro_a, pro_b, c.horizon());
      const auto x = linspace(pro_a, pro_b, pro_resolution);
      std::vector<double> pot, vel, gen_x;
      const double base = fan.potential(pro_a);
      std::size_t d = 0;
      for (double xi : x) {
        pot.push_back(fan.potential(xi) - base);
        vel.push_back(fan.potential.slope(xi));
        while (d + 1 < fan.domains.size() && xi >= fan.domains[d].hi) ++d;
        const auto& g = fan.domains[d].generator;
        gen_x.push_back(g ? g->x : std::nan(""));
      }
      const std::string path = output_path(c.out, "profile.csv");
      if (!path.empty()) {
        auto f = open_output(path);
        write_profile_csv(f, x, pot, vel, gen_x);
      }
      instances = 1;
      skipped = fan.stabilized ? 0 : 1;
      summary = "T=" + fmt(fan.horizon_T) + " domains=" + std::to_string(fan.domains.size()) +
                " stabilized=" + (fan.stabilized ? "true" : "false");
    } else if (*shape) {
      require_seeded();
      experiment_output(estimate_shape(c.plan(replicas), shape_t, shape_v, c.corridor({})));
    } else if (*conc) {
      require_seeded();
      experiment_output(concentration_scan(c.plan(replicas), conc_t, batches, c.corridor({})));
    } else if (*inc) {
      require_seeded();
      experiment_output(mean_busemann_increment(c.plan(replicas), inc_v, c.horizon()));
    } else if (*coal) {
      require_seeded();
      experiment_output(coalescence_statistics(c.plan(replicas), coal_v, separations, c.horizon()));
    } else if (*att) {
      require_seeded();
      const auto w = PiecewiseLinearPotential::parse(att_w);
      experiment_output(attraction_experiment(c.plan(replicas), w, att_v, att_s, att_R,
                                              c.horizon({.T_max = 1024.0}), c.corridor({0.5, 8.0, 6}),
                                              att_grid));
    } else if (*str) {
      require_seeded();
      experiment_output(
          straightness_scan(c.plan(replicas), str_v, delta, str_T, c.corridor({0.5, 8.0, 6})));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }

  out << summary << '\n';
  if (instances > 0 && 2 * skipped > instances) return 3;
  return 0;
}

}  // namespace pburgers
