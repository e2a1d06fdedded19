#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pburgers/action.hpp"
#include "pburgers/backward.hpp"
#include "pburgers/busemann.hpp"
#include "pburgers/error.hpp"
#include "pburgers/experiments.hpp"
#include "pburgers/hopf_lax.hpp"
#include "pburgers/point_field.hpp"
#include "pburgers/rng.hpp"

namespace py = pybind11;
using namespace pburgers;

namespace {

PiecewiseQuadraticPotential as_pq(const PiecewiseLinearPotential& w) {
  return PiecewiseQuadraticPotential(w);
}

py::dict minimizer_dict(const Minimizer& m) {
  py::dict d;
  d["total"] = m.action.total;
  d["kinetic"] = m.action.kinetic;
  d["visited"] = m.action.visited;
  d["vertices"] = m.vertices;
  return d;
}

std::string report_json(const EstimateReport& r) {
  std::ostringstream os;
  write_report_json(os, r);
  return os.str();
}

std::string report_csv(const EstimateReport& r) {
  std::ostringstream os;
  write_report_csv(os, r);
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_pburgers, m) {
  m.doc() = "Burgers dynamics forced by a Poisson point field";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<SpaceTimePoint>(m, "Point")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("t"))
      .def(py::init([](const py::tuple& p) {
        if (p.size() != 2) throw py::value_error("expected (x, t)");
        return SpaceTimePoint{p[0].cast<double>(), p[1].cast<double>()};
      }))
      .def_readwrite("x", &SpaceTimePoint::x)
      .def_readwrite("t", &SpaceTimePoint::t)
      .def(py::self == py::self)
      .def("__iter__", [](const SpaceTimePoint& p) {
        return py::iter(py::make_tuple(p.x, p.t));
      })
      .def("__repr__", [](const SpaceTimePoint& p) {
        return "Point(" + py::repr(py::float_(p.x)).cast<std::string>() + ", " +
               py::repr(py::float_(p.t)).cast<std::string>() + ")";
      });
  py::implicitly_convertible<py::tuple, SpaceTimePoint>();

  py::class_<Window>(m, "Window")
      .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("x_max"),
           py::arg("t_min"), py::arg("t_max"))
      .def_readwrite("x_min", &Window::x_min)
      .def_readwrite("x_max", &Window::x_max)
      .def_readwrite("t_min", &Window::t_min)
      .def_readwrite("t_max", &Window::t_max)
      .def("area", &Window::area);

  py::class_<PointField>(m, "PointField")
      .def_static("from_points", &PointField::from_points, py::arg("window"), py::arg("points"),
                  py::arg("seed") = 0, py::arg("intensity") = 1.0)
      .def_property_readonly("seed", &PointField::seed)
      .def_property_readonly("intensity", &PointField::intensity)
      .def_property_readonly("window", &PointField::window)
      .def_property_readonly("points", &PointField::points)
      .def_property_readonly("derived", &PointField::derived)
      .def("__len__", &PointField::size)
      .def("to_text", [](const PointField& f) {
        std::ostringstream os;
        write_field(os, f);
        return os.str();
      })
      .def_static("from_text", [](const std::string& s) {
        std::istringstream is(s);
        return read_field(is);
      });

  m.def("generate", &generate, py::arg("seed"), py::arg("intensity"), py::arg("window"));
  m.def("count_in", &count_in, py::arg("field"), py::arg("rect"));
  m.def("shear", &shear, py::arg("field"), py::arg("v"), py::arg("a") = 0.0);
  m.def("time_shift", &time_shift, py::arg("field"), py::arg("tau"));
  m.def("reflect", &reflect, py::arg("field"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

  py::class_<CorridorPolicy>(m, "CorridorPolicy")
      .def(py::init([](double rate, double slack, int widenings) {
             return CorridorPolicy{rate, slack, widenings};
           }),
           py::arg("half_width_rate") = 4.0, py::arg("slack") = 5.0,
           py::arg("max_widenings") = 6)
      .def_readwrite("half_width_rate", &CorridorPolicy::half_width_rate)
      .def_readwrite("slack", &CorridorPolicy::slack)
      .def_readwrite("max_widenings", &CorridorPolicy::max_widenings);

  py::class_<HorizonParams>(m, "HorizonParams")
      .def(py::init([](double T0, double T_max, double fraction, int agreements) {
             HorizonParams h;
             h.T0 = T0;
             h.T_max = T_max;
             h.stability_fraction = fraction;
             h.fan_agreements = agreements;
             return h;
           }),
           py::arg("T0") = 16.0, py::arg("T_max") = 512.0, py::arg("stability_fraction") = 0.5,
           py::arg("fan_agreements") = 2)
      .def_readwrite("T0", &HorizonParams::T0)
      .def_readwrite("T_max", &HorizonParams::T_max)
      .def_readwrite("stability_fraction", &HorizonParams::stability_fraction)
      .def_readwrite("fan_agreements", &HorizonParams::fan_agreements)
      .def_readwrite("corridor", &HorizonParams::corridor);

  // actions
  m.def("polyline_action",
        [](const PathAnchor& a, const std::vector<SpaceTimePoint>& vs, const PathAnchor& b) {
          const auto v = polyline_action(a, vs, b);
          return py::make_tuple(v.total, v.kinetic, v.visited);
        },
        py::arg("start"), py::arg("vertices"), py::arg("end"),
        "(total, kinetic, visited) of the polyline start -> vertices -> end.");
  m.def("min_action",
        [](std::uint64_t seed, const PathAnchor& a, const PathAnchor& b,
           const CorridorPolicy& policy, double intensity) {
          return minimizer_dict(min_action(PoissonFieldSource(seed, intensity), a, b, policy));
        },
        py::arg("seed"), py::arg("start"), py::arg("end"), py::arg("policy") = CorridorPolicy{},
        py::arg("intensity") = 1.0);
  m.def("min_action",
        [](const PointField& field, const PathAnchor& a, const PathAnchor& b,
           const CorridorPolicy& policy) {
          return minimizer_dict(min_action(FixedFieldSource(field), a, b, policy));
        },
        py::arg("field"), py::arg("start"), py::arg("end"), py::arg("policy") = CorridorPolicy{});
  m.def("brute_force_action",
        [](const PointField& field, const PathAnchor& a, const PathAnchor& b) {
          const auto r = brute_force_action(field, a, b);
          std::vector<SpaceTimePoint> vs;
          for (auto i : r.path.vertices) vs.push_back(field.points()[i]);
          py::dict d;
          d["total"] = r.action.total;
          d["kinetic"] = r.action.kinetic;
          d["visited"] = r.action.visited;
          d["vertices"] = vs;
          return d;
        },
        py::arg("field"), py::arg("start"), py::arg("end"));

  // potentials and evolution
  py::class_<PiecewiseLinearPotential>(m, "PiecewiseLinearPotential")
      .def(py::init<double, double, std::vector<double>, std::vector<double>>(),
           py::arg("anchor_x"), py::arg("anchor_value"), py::arg("breakpoints"),
           py::arg("slopes"))
      .def_static("linear", &PiecewiseLinearPotential::linear, py::arg("slope"))
      .def_static("parse", &PiecewiseLinearPotential::parse, py::arg("literal"))
      .def("__call__", &PiecewiseLinearPotential::operator(), py::arg("x"))
      .def("slope", &PiecewiseLinearPotential::slope, py::arg("x"))
      .def_property_readonly("v_minus", &PiecewiseLinearPotential::v_minus)
      .def_property_readonly("v_plus", &PiecewiseLinearPotential::v_plus)
      .def("to_literal", &PiecewiseLinearPotential::to_literal);

  py::class_<Shock>(m, "Shock")
      .def_readonly("x", &Shock::x)
      .def_readonly("jump", &Shock::jump);

  py::class_<EvolvedProfile>(m, "EvolvedProfile")
      .def_readonly("t", &EvolvedProfile::t)
      .def_readonly("x", &EvolvedProfile::x)
      .def_readonly("potential", &EvolvedProfile::potential)
      .def_readonly("velocity", &EvolvedProfile::velocity)
      .def_readonly("ystar", &EvolvedProfile::ystar)
      .def_readonly("generator", &EvolvedProfile::generator)
      .def_readonly("shocks", &EvolvedProfile::shocks);

  m.def("moreau_envelope",
        [](const PiecewiseLinearPotential& w, double q, double tau) {
          const auto r = moreau_envelope(w, q, tau);
          return py::make_tuple(r.value, r.argmin_z);
        },
        py::arg("w"), py::arg("q"), py::arg("tau"));
  m.def("velocity_profile",
        [](std::uint64_t seed, const PiecewiseLinearPotential& w, double s, double t, double a,
           double b, std::size_t resolution, const CorridorPolicy& policy, double intensity) {
          return velocity_profile(PoissonFieldSource(seed, intensity), as_pq(w), s, t, a, b,
                                  resolution, policy);
        },
        py::arg("seed"), py::arg("w"), py::arg("s"), py::arg("t"), py::arg("a"), py::arg("b"),
        py::arg("resolution") = 1001, py::arg("policy") = CorridorPolicy{},
        py::arg("intensity") = 1.0);
  m.def("apply_cocycle",
        [](const PointField& field, const PiecewiseLinearPotential& w, double s, double t,
           const std::vector<double>& xs, const CorridorPolicy& policy) {
          return apply_cocycle(field, as_pq(w), s, t, xs, policy);
        },
        py::arg("field"), py::arg("w"), py::arg("s"), py::arg("t"), py::arg("xs"),
        py::arg("policy") = CorridorPolicy{});

  // backward minimizers and Busemann functions
  py::class_<BackwardMinimizer>(m, "BackwardMinimizer")
      .def_readonly("endpoint", &BackwardMinimizer::endpoint)
      .def_readonly("slope_v", &BackwardMinimizer::slope_v)
      .def_readonly("horizon_T", &BackwardMinimizer::horizon_T)
      .def_readonly("anchor", &BackwardMinimizer::anchor)
      .def_readonly("vertices", &BackwardMinimizer::vertices)
      .def_readonly("stable_until", &BackwardMinimizer::stable_until)
      .def_readonly("stabilized", &BackwardMinimizer::stabilized);

  m.def("backward_minimizer",
        [](std::uint64_t seed, const PathAnchor& endpoint, double v, const HorizonParams& h,
           double intensity) { return backward_minimizer(seed, endpoint, v, h, intensity); },
        py::arg("seed"), py::arg("endpoint"), py::arg("v"), py::arg("horizon") = HorizonParams{},
        py::arg("intensity") = 1.0);
  m.def("coalescence",
        [](const BackwardMinimizer& a, const BackwardMinimizer& b) -> py::object {
          const auto r = coalescence(a, b);
          if (r.status != CoalescenceStatus::coalesced) return py::none();
          return py::cast(*r.point);
        },
        py::arg("m1"), py::arg("m2"), "Coalescence point, or None if not certified.");

  py::class_<BusemannValue>(m, "BusemannValue")
      .def_readonly("p1", &BusemannValue::p1)
      .def_readonly("p2", &BusemannValue::p2)
      .def_readonly("v", &BusemannValue::v)
      .def_readonly("value", &BusemannValue::value)
      .def_readonly("coalescence_time", &BusemannValue::coalescence_time)
      .def_property_readonly("exact", [](const BusemannValue& b) {
        return b.status == BusemannStatus::exact;
      })
      .def_property_readonly("status",
                             [](const BusemannValue& b) { return std::string(to_string(b.status)); });

  m.def("busemann",
        [](std::uint64_t seed, double v, const PathAnchor& p1, const PathAnchor& p2,
           const HorizonParams& h, double intensity) {
          return busemann(PoissonFieldSource(seed, intensity), v, p1, p2, h);
        },
        py::arg("seed"), py::arg("v"), py::arg("p1"), py::arg("p2"),
        py::arg("horizon") = HorizonParams{}, py::arg("intensity") = 1.0);

  py::class_<VelocityDomain>(m, "VelocityDomain")
      .def_readonly("lo", &VelocityDomain::lo)
      .def_readonly("hi", &VelocityDomain::hi)
      .def_readonly("generator", &VelocityDomain::generator)
      .def_readonly("slope", &VelocityDomain::slope)
      .def_readonly("intercept", &VelocityDomain::intercept)
      .def_readonly("unreliable", &VelocityDomain::unreliable);

  py::class_<VelocityProfile>(m, "VelocityProfile")
      .def_readonly("t", &VelocityProfile::t)
      .def_readonly("slope_v", &VelocityProfile::slope_v)
      .def_readonly("horizon_T", &VelocityProfile::horizon_T)
      .def_readonly("stabilized", &VelocityProfile::stabilized)
      .def_readonly("domains", &VelocityProfile::domains)
      .def_readonly("jumps", &VelocityProfile::jumps)
      .def("__call__", &VelocityProfile::operator(), py::arg("x"));

  m.def("global_velocity",
        [](std::uint64_t seed, double v, double t, double a, double b, const HorizonParams& h,
           double intensity) {
          return global_velocity(PoissonFieldSource(seed, intensity), v, t, a, b, h);
        },
        py::arg("seed"), py::arg("v"), py::arg("t"), py::arg("a"), py::arg("b"),
        py::arg("horizon") = HorizonParams{}, py::arg("intensity") = 1.0);
  m.def("check_global_solution",
        [](std::uint64_t seed, double v, double s, double t, double a, double b,
           const HorizonParams& h, double intensity) -> py::object {
          const auto r = check_global_solution(PoissonFieldSource(seed, intensity), v, s, t, a, b, h);
          if (r.skipped) return py::none();
          return py::float_(r.discrepancy);
        },
        py::arg("seed"), py::arg("v"), py::arg("s"), py::arg("t"), py::arg("a"), py::arg("b"),
        py::arg("horizon") = HorizonParams{}, py::arg("intensity") = 1.0,
        "Discrepancy after the constant quotient, or None when skipped.");

  // experiments
  py::class_<ReplicaPlan>(m, "ReplicaPlan")
      .def(py::init([](std::uint64_t master, std::size_t replicas, unsigned threads,
                       double intensity) {
             ReplicaPlan p;
             p.master_seed = master;
             p.replicas = replicas;
             p.threads = threads;
             p.intensity = intensity;
             return p;
           }),
           py::arg("master_seed") = 1, py::arg("replicas") = 100, py::arg("threads") = 1,
           py::arg("intensity") = 1.0)
      .def_readwrite("master_seed", &ReplicaPlan::master_seed)
      .def_readwrite("replicas", &ReplicaPlan::replicas)
      .def_readwrite("threads", &ReplicaPlan::threads)
      .def_readwrite("intensity", &ReplicaPlan::intensity)
      .def("seed", &ReplicaPlan::seed, py::arg("index"));

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("parameter", &Estimate::parameter)
      .def_readonly("estimate", &Estimate::estimate)
      .def_readonly("se", &Estimate::se)
      .def_readonly("n", &Estimate::n)
      .def_readonly("skipped", &Estimate::skipped);

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("experiment", &EstimateReport::experiment)
      .def_readonly("estimates", &EstimateReport::estimates)
      .def_readonly("instances", &EstimateReport::instances)
      .def_readonly("skipped", &EstimateReport::skipped)
      .def_property_readonly("summary",
                             [](const EstimateReport& r) {
                               py::dict d;
                               for (const auto& [k, v] : r.summary) d[py::str(k)] = v;
                               return d;
                             })
      .def("estimate", &EstimateReport::estimate, py::arg("parameter"),
           py::return_value_policy::reference_internal)
      .def("value", &EstimateReport::value, py::arg("name"))
      .def("to_json", &report_json)
      .def("to_csv", &report_csv);

  m.def("estimate_shape", &estimate_shape, py::arg("plan"), py::arg("t"), py::arg("v_list"),
        py::arg("policy") = CorridorPolicy{});
  m.def("concentration_scan", &concentration_scan, py::arg("plan"), py::arg("t_list"),
        py::arg("batches") = 5, py::arg("policy") = CorridorPolicy{});
  m.def("mean_busemann_increment", &mean_busemann_increment, py::arg("plan"), py::arg("v"),
        py::arg("horizon") = HorizonParams{});
  m.def("coalescence_statistics", &coalescence_statistics, py::arg("plan"), py::arg("v"),
        py::arg("separations"), py::arg("horizon") = HorizonParams{});
  m.def("attraction_experiment",
        [](const ReplicaPlan& plan, const PiecewiseLinearPotential& w, double v,
           const std::vector<double>& s_list, double R, std::optional<HorizonParams> h,
           std::size_t grid) {
          HorizonParams horizon;
          horizon.T_max = 1024.0;
          if (h) horizon = *h;
          return attraction_experiment(plan, w, v, s_list, R, horizon, {0.5, 8.0, 6}, grid);
        },
        py::arg("plan"), py::arg("w"), py::arg("v"), py::arg("s_list"), py::arg("R"),
        py::arg("horizon") = py::none(), py::arg("grid") = 201);
  m.def("straightness_scan", &straightness_scan, py::arg("plan"), py::arg("v"), py::arg("delta"),
        py::arg("T_list"), py::arg("policy") = CorridorPolicy{0.5, 8.0, 6});
}
