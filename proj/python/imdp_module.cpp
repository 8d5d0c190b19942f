#include "imdp/abstraction.hpp"
#include "imdp/config.hpp"
#include "imdp/controller.hpp"
#include "imdp/dynamics.hpp"
#include "imdp/explicit_format.hpp"
#include "imdp/intervals.hpp"
#include "imdp/partition.hpp"
#include "imdp/pipeline.hpp"
#include "imdp/robust_mdp.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace imdp;

namespace {

std::vector<std::size_t> region_values(const std::vector<RegionId>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto id : ids) out.push_back(id.value);
  return out;
}

py::dict row_to_dict(const Distribution& row) {
  py::dict d;
  for (const auto& t : row) d[py::int_(t.successor)] = py::make_tuple(t.interval.low, t.interval.high);
  return d;
}

}  // namespace

PYBIND11_MODULE(_imdp, m) {
  m.doc() = "Interval-MDP abstraction and robust controller synthesis for linear stochastic systems";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputOutOfBounds>(m, "InputOutOfBounds", base.ptr());
  py::register_exception<RankDeficient>(m, "RankDeficient", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<InfeasibleIntervals>(m, "InfeasibleIntervals", base.ptr());
  py::register_exception<VacuousAbstraction>(m, "VacuousAbstraction", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Box>(m, "Box")
      .def(py::init<Vector, Vector>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Box::lo)
      .def_readwrite("hi", &Box::hi)
      .def("center", &Box::center)
      .def("contains", &Box::contains, py::arg("x"), py::arg("tol") = 0.0)
      .def("__repr__", [](const Box& b) {
        return "Box(lo=" + py::repr(py::cast(b.lo)).cast<std::string>() +
               ", hi=" + py::repr(py::cast(b.hi)).cast<std::string>() + ")";
      });

  py::class_<NoiseModel>(m, "NoiseModel")
      .def_static("gaussian", &NoiseModel::gaussian, py::arg("mean"), py::arg("covariance"))
      .def_static("zero", &NoiseModel::zero, py::arg("n"))
      .def_static("uniform_box", &NoiseModel::uniform_box, py::arg("lo"), py::arg("hi"))
      .def_static("triangular", &NoiseModel::triangular, py::arg("lo"), py::arg("mode"), py::arg("hi"))
      .def_static("mixture", &NoiseModel::mixture, py::arg("components"))
      .def_property_readonly("dim", &NoiseModel::dim)
      .def("sample", [](const NoiseModel& n, std::size_t count, std::uint64_t seed) {
        const auto s = sample_noise_set(n, count, seed);
        Matrix out(static_cast<Eigen::Index>(s.size()), n.dim());
        for (std::size_t i = 0; i < s.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = s[i].transpose();
        return out;
      }, py::arg("count"), py::arg("seed") = 0);

  py::class_<LinearSystem>(m, "LinearSystem")
      .def(py::init<Matrix, Matrix, Vector, Box, NoiseModel>(), py::arg("A"), py::arg("B"),
           py::arg("q"), py::arg("input_set"), py::arg("noise"))
      .def_property_readonly("A", &LinearSystem::A)
      .def_property_readonly("B", &LinearSystem::B)
      .def_property_readonly("B_pinv", &LinearSystem::B_pinv)
      .def_property_readonly("q", &LinearSystem::q)
      .def_property_readonly("input_set", &LinearSystem::input_set)
      .def_property_readonly("state_dim", &LinearSystem::state_dim)
      .def_property_readonly("input_dim", &LinearSystem::input_dim)
      .def_property_readonly("rank_B", &LinearSystem::rank_B)
      .def("admissible", &LinearSystem::admissible);

  m.def("lift", &lift, py::arg("system"), py::arg("steps"));
  m.def("step_deterministic", &step_deterministic, py::arg("system"), py::arg("x"), py::arg("u"));
  m.def("step", [](const LinearSystem& sys, const Vector& x, const Vector& u, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return step(sys, x, u, rng);
  }, py::arg("system"), py::arg("x"), py::arg("u"), py::arg("seed"));
  m.def("input_for_target", &input_for_target, py::arg("system"), py::arg("x"), py::arg("target"));

  py::class_<Partition>(m, "Partition")
      .def(py::init<Box, std::vector<std::size_t>>(), py::arg("domain"), py::arg("counts"))
      .def_property_readonly("size", &Partition::size)
      .def_property_readonly("domain", &Partition::domain)
      .def_property_readonly("counts", &Partition::counts)
      .def("__len__", &Partition::size)
      .def("region_of", [](const Partition& p, const Vector& x) -> std::optional<std::size_t> {
        if (auto r = p.region_of(x)) return r->value;
        return std::nullopt;
      }, py::arg("x"))
      .def("region_box", [](const Partition& p, std::size_t r) { return p.region_box(RegionId{r}); })
      .def("region_vertices", [](const Partition& p, std::size_t r) { return p.region_vertices(RegionId{r}); })
      .def("decode", [](const Partition& p, std::size_t r) { return p.decode(RegionId{r}); })
      .def("encode", [](const Partition& p, const std::vector<std::size_t>& idx) { return p.encode(idx).value; })
      .def("label_regions", [](const Partition& p, const std::vector<Box>& goal, const std::vector<Box>& critical) {
        return p.label_regions(goal, critical);
      }, py::arg("goal"), py::arg("critical"))
      .def("is_goal", [](const Partition& p, std::size_t r) { return p.is_goal(RegionId{r}); })
      .def("is_critical", [](const Partition& p, std::size_t r) { return p.is_critical(RegionId{r}); })
      .def("goal_regions", [](const Partition& p) { return region_values(p.goal_regions()); })
      .def("critical_regions", [](const Partition& p) { return region_values(p.critical_regions()); });

  py::class_<ProbabilityInterval>(m, "ProbabilityInterval")
      .def(py::init([](double lo, double hi) { return ProbabilityInterval{lo, hi}; }))
      .def_readwrite("low", &ProbabilityInterval::low)
      .def_readwrite("high", &ProbabilityInterval::high)
      .def("__repr__", [](const ProbabilityInterval& i) { return format_interval(i); });
  m.def("clopper_pearson", &clopper_pearson, py::arg("k"), py::arg("n"), py::arg("beta"));

  py::class_<AbstractAction>(m, "AbstractAction")
      .def(py::init([](std::size_t id, Vector target) { return AbstractAction{id, std::move(target), {}}; }),
           py::arg("id"), py::arg("target"))
      .def_readonly("id", &AbstractAction::id)
      .def_readonly("target", &AbstractAction::target)
      .def_property_readonly("enabled_in", [](const AbstractAction& a) { return region_values(a.enabled_in); });
  m.def("default_actions", &default_actions, py::arg("partition"));
  m.def("enabled_actions", &enabled_actions, py::arg("system"), py::arg("partition"), py::arg("actions"));

  py::class_<IntervalMDP>(m, "IntervalMDP")
      .def_property_readonly("num_states", &IntervalMDP::num_states)
      .def_property_readonly("num_transitions", &IntervalMDP::num_transitions)
      .def_property_readonly("num_state_action_pairs", &IntervalMDP::num_state_action_pairs)
      .def_readonly("confidence", &IntervalMDP::confidence)
      .def("actions", [](const IntervalMDP& mdp, std::size_t s) {
        std::vector<std::size_t> out;
        for (const auto& c : mdp.choices(s)) out.push_back(c.action);
        return out;
      }, py::arg("state"))
      .def("distribution", [](const IntervalMDP& mdp, std::size_t s, std::size_t a) {
        return row_to_dict(mdp.distribution(s, a));
      }, py::arg("state"), py::arg("action"))
      .def("state_label", [](const IntervalMDP& mdp, std::size_t s) { return state_label(mdp.state(s)); })
      .def("validate", &IntervalMDP::validate)
      .def("__eq__", [](const IntervalMDP& a, const IntervalMDP& b) { return a == b; });

  py::class_<Abstraction>(m, "Abstraction")
      .def_readonly("model", &Abstraction::model)
      .def_readonly("beta_per", &Abstraction::beta_per)
      .def_readonly("num_intervals", &Abstraction::num_intervals)
      .def_property_readonly("goal_state", [](const Abstraction& a) { return a.layout.goal(); })
      .def_property_readonly("unsafe_state", [](const Abstraction& a) { return a.layout.unsafe(); })
      .def_property_readonly("out_state", [](const Abstraction& a) { return a.layout.out(); });

  m.def("build_imdp", [](const LinearSystem& sys, const Partition& p, const std::vector<AbstractAction>& actions,
                         std::size_t samples, double beta, std::uint64_t seed) {
    return build_imdp(sys, p, actions, {samples, beta, seed});
  }, py::arg("system"), py::arg("partition"), py::arg("actions"), py::arg("samples"),
        py::arg("beta"), py::arg("seed") = 0);
  m.def("build_pointmdp", [](const LinearSystem& sys, const Partition& p, const std::vector<AbstractAction>& actions,
                             std::size_t samples, std::uint64_t seed) {
    return build_pointmdp(sys, p, actions, {samples, 0.5, seed});
  }, py::arg("system"), py::arg("partition"), py::arg("actions"), py::arg("samples"), py::arg("seed") = 0);

  m.def("inner_min", [](const std::vector<double>& values, const std::vector<ProbabilityInterval>& iv) {
    const auto r = inner_min(values, iv);
    return py::make_tuple(r.value, r.distribution);
  }, py::arg("values"), py::arg("intervals"));

  py::class_<RobustSolution>(m, "RobustSolution")
      .def_readonly("values", &RobustSolution::values)
      .def_readonly("policy", &RobustSolution::policy)
      .def_readonly("horizon", &RobustSolution::horizon)
      .def_readonly("confidence", &RobustSolution::confidence);
  m.def("robust_value_iteration", &robust_value_iteration, py::arg("model"), py::arg("horizon"));
  m.def("nominal_value_iteration", &nominal_value_iteration, py::arg("model"), py::arg("horizon"));

  m.def("export_explicit", py::overload_cast<const IntervalMDP&, const std::filesystem::path&,
                                             const std::filesystem::path&>(&export_explicit),
        py::arg("model"), py::arg("states_path"), py::arg("transitions_path"));
  m.def("import_explicit", py::overload_cast<const std::filesystem::path&, const std::filesystem::path&>(&import_explicit),
        py::arg("states_path"), py::arg("transitions_path"));

  py::class_<FeedbackController>(m, "FeedbackController")
      .def("__call__", &FeedbackController::operator(), py::arg("x"), py::arg("k"))
      .def("action_at", &FeedbackController::action_at, py::arg("x"), py::arg("k"))
      .def_property_readonly("horizon", &FeedbackController::horizon);
  m.def("refine", &refine, py::arg("solution"), py::arg("partition"), py::arg("actions"), py::arg("system"));
  m.def("certified_bound", &certified_bound, py::arg("solution"), py::arg("partition"), py::arg("x0"));

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("runs", &ValidationReport::runs)
      .def_readonly("successes", &ValidationReport::successes)
      .def_readonly("empirical", &ValidationReport::empirical)
      .def_readonly("empirical_ci", &ValidationReport::empirical_ci)
      .def_readonly("certified", &ValidationReport::certified)
      .def_readonly("confidence", &ValidationReport::confidence)
      .def_readonly("passed", &ValidationReport::pass)
      .def("to_json", [](const ValidationReport& r) { return to_json(r); });
  m.def("validate", [](const LinearSystem& sys, const FeedbackController& ctrl, const RobustSolution& sol,
                       const Vector& x0, int horizon, std::size_t runs, std::uint64_t seed, unsigned workers) {
    ValidationOptions opt;
    opt.runs = runs;
    opt.seed = seed;
    opt.workers = workers;
    py::gil_scoped_release release;
    return validate(sys, ctrl, sol, x0, horizon, opt);
  }, py::arg("system"), py::arg("controller"), py::arg("solution"), py::arg("x0"), py::arg("horizon"),
        py::arg("runs") = 10000, py::arg("seed") = 0, py::arg("workers") = 1);

  // Configuration-level entry points take and return JSON text.
  m.def("preset_names", &preset_names);
  m.def("preset", [](const std::string& name) { return dump_config(preset(name)); }, py::arg("name"));
  m.def("run_pipeline", [](const std::string& config_json, const std::filesystem::path& out) {
    const auto cfg = parse_config(config_json);
    PipelineResult res = [&] {
      py::gil_scoped_release release;
      return run_pipeline(cfg, out);
    }();
    py::dict d;
    d["certified"] = res.report.certified;
    d["empirical"] = res.report.empirical;
    d["runs"] = res.report.runs;
    d["passed"] = res.report.pass;
    d["states"] = res.abstraction.model.num_states();
    d["transitions"] = res.abstraction.model.num_transitions();
    d["abstraction_seconds"] = res.timings.abstraction;
    d["solving_seconds"] = res.timings.solving;
    d["validation_seconds"] = res.timings.validation;
    return d;
  }, py::arg("config_json"), py::arg("out"));
  m.def("run_sweep", [](const std::string& config_json) {
    const auto cfg = parse_config(config_json);
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_sweep(cfg, build_problem(cfg));
    }
    py::list out;
    for (const auto& r : rows) {
      py::dict d;
      d["N"] = r.samples;
      d["repetition"] = r.repetition;
      d["model"] = r.model;
      d["certified"] = r.certified;
      d["empirical"] = r.empirical;
      d["states"] = r.states;
      d["transitions"] = r.transitions;
      out.append(d);
    }
    return out;
  }, py::arg("config_json"));
}
