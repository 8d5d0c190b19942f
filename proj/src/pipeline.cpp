#include "imdp/pipeline.hpp"

#include "imdp/explicit_format.hpp"
#include "imdp/rng.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace imdp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

AbstractionConfig abstraction_config(const ExperimentConfig& c, std::size_t samples,
                                     std::uint64_t seed) {
  return {samples, c.abstraction.beta, seed};
}

}  // namespace

Problem build_problem(const ExperimentConfig& config) {
  LinearSystem sys = lift(make_system(config.system), config.system.lift_steps);
  Partition part = Partition(Box{config.partition.lo, config.partition.hi}, config.partition.counts)
                       .label_regions(config.partition.goal, config.partition.critical);
  auto actions = enabled_actions(sys, part, default_actions(part));
  return {std::move(sys), std::move(part), std::move(actions)};
}

PipelineResult run_pipeline(const ExperimentConfig& config, const Problem& problem) {
  PipelineResult result;
  auto t0 = Clock::now();
  result.abstraction =
      build_imdp(problem.system, problem.partition, problem.actions,
                 abstraction_config(config, config.abstraction.samples, config.abstraction.seed));
  result.timings.abstraction = seconds_since(t0);

  t0 = Clock::now();
  result.solution = robust_value_iteration(result.abstraction.model, config.objective.horizon);
  result.timings.solving = seconds_since(t0);

  t0 = Clock::now();
  const auto ctrl = refine(result.solution, problem.partition, problem.actions, problem.system);
  result.report = validate(problem.system, ctrl, result.solution, config.objective.x0,
                           config.objective.horizon,
                           {config.validation.runs, config.validation.seed, config.workers,
                            config.validation.traces});
  result.timings.validation = seconds_since(t0);
  return result;
}

namespace {

std::string timings_json(const StageTimings& t, std::size_t transitions) {
  nlohmann::ordered_json j;
  j["abstraction_seconds"] = t.abstraction;
  j["solving_seconds"] = t.solving;
  j["validation_seconds"] = t.validation;
  j["transitions"] = transitions;
  return j.dump(2) + "\n";
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const Problem problem = build_problem(config);
  PipelineResult result = run_pipeline(config, problem);
  const auto& model = result.abstraction.model;

  export_explicit(model, out / "model.sta", out / "model.tra");
  write_file(out / "solution.csv", solution_csv(result.solution));
  write_file(out / "validation.json", to_json(result.report) + "\n");
  write_file(out / "traces.csv", traces_csv(result.report.traces));

  std::size_t enabled_pairs = 0;
  for (const auto& a : problem.actions) enabled_pairs += a.enabled_in.size();
  nlohmann::ordered_json summary;
  summary["name"] = config.name;
  summary["regions"] = problem.partition.size();
  summary["states"] = model.num_states();
  summary["state_action_pairs"] = model.num_state_action_pairs();
  summary["enabled_pairs"] = enabled_pairs;
  summary["transitions"] = model.num_transitions();
  summary["samples"] = config.abstraction.samples;
  summary["beta"] = config.abstraction.beta;
  summary["beta_per_interval"] = result.abstraction.beta_per;
  summary["horizon"] = config.objective.horizon;
  summary["certified"] = result.report.certified;
  summary["confidence"] = result.report.confidence;
  summary["runs"] = result.report.runs;
  summary["successes"] = result.report.successes;
  summary["empirical"] = result.report.empirical;
  summary["pass"] = result.report.pass;
  write_file(out / "summary.json", summary.dump(2) + "\n");
  write_file(out / "timings.json", timings_json(result.timings, model.num_transitions()));
  return result;
}

Abstraction export_model(const ExperimentConfig& config, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const Problem problem = build_problem(config);
  Abstraction abs =
      build_imdp(problem.system, problem.partition, problem.actions,
                 abstraction_config(config, config.abstraction.samples, config.abstraction.seed));
  export_explicit(abs.model, out / "model.sta", out / "model.tra");
  return abs;
}

ValidationReport revalidate(const ExperimentConfig& config, const std::filesystem::path& out) {
  const Problem problem = build_problem(config);
  const RobustSolution solution = parse_solution_csv(read_file(out / "solution.csv"));
  const auto ctrl = refine(solution, problem.partition, problem.actions, problem.system);
  ValidationReport report =
      validate(problem.system, ctrl, solution, config.objective.x0, solution.horizon,
               {config.validation.runs, config.validation.seed, config.workers, 0});
  write_file(out / "validation.json", to_json(report) + "\n");
  return report;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const Problem& problem) {
  std::vector<std::size_t> sweep = config.abstraction.sweep;
  if (sweep.empty()) sweep.push_back(config.abstraction.samples);
  const std::size_t reps = config.validation.repetitions;
  const std::size_t cells = sweep.size() * reps;
  std::vector<SweepRow> rows(cells * 2);

  auto run_cell = [&](std::size_t cell) {
    const std::size_t ni = cell / reps;
    const std::size_t rep = cell % reps;
    const std::size_t samples = sweep[ni];
    try {
      const std::uint64_t abs_seed = derive_seed(config.abstraction.seed, cell);
      const std::uint64_t val_seed = derive_seed(config.validation.seed, cell);
      auto t0 = Clock::now();
      auto counts = count_all_successors(problem.system, problem.partition, problem.actions,
                                         abstraction_config(config, samples, abs_seed));
      const double counting = seconds_since(t0);
      for (int m = 0; m < 2; ++m) {
        SweepRow& row = rows[2 * cell + static_cast<std::size_t>(m)];
        row.samples = samples;
        row.repetition = rep;
        row.model = m == 0 ? "imdp" : "mdp";
        t0 = Clock::now();
        Abstraction abs =
            m == 0 ? assemble_imdp(problem.partition, problem.actions, counts, samples,
                                   config.abstraction.beta)
                   : assemble_point_mdp(problem.partition, problem.actions, counts, samples);
        row.timings.abstraction = counting + seconds_since(t0);
        t0 = Clock::now();
        const RobustSolution sol = m == 0
                                       ? robust_value_iteration(abs.model, config.objective.horizon)
                                       : nominal_value_iteration(abs.model, config.objective.horizon);
        row.timings.solving = seconds_since(t0);
        t0 = Clock::now();
        const auto ctrl = refine(sol, problem.partition, problem.actions, problem.system);
        const auto report = validate(problem.system, ctrl, sol, config.objective.x0,
                                     config.objective.horizon, {config.validation.runs, val_seed, 1, 0});
        row.timings.validation = seconds_since(t0);
        row.certified = report.certified;
        row.empirical = report.empirical;
        row.empirical_ci = report.empirical_ci;
        row.states = abs.model.num_states();
        row.transitions = abs.model.num_transitions();
      }
    } catch (const Error& e) {
      throw Error("sweep cell (N=" + std::to_string(samples) + ", repetition " +
                  std::to_string(rep) + "): " + e.what());
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, cells);
  if (workers == 1) {
    for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t cell = next++; cell < cells; cell = next++) {
          try {
            run_cell(cell);
          } catch (const std::exception& e) {
            std::lock_guard lock(error_mutex);
            if (first_error.empty()) first_error = e.what();
          }
        }
      });
    }
  }
  if (!first_error.empty()) throw Error(first_error);
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const auto rows = run_sweep(config, build_problem(config));
  write_file(out / "sweep.csv", sweep_csv(rows));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "N,repetition,model,certified,empirical,empirical_ci_low,empirical_ci_high,states,"
         "transitions,abstraction_seconds,solving_seconds,validation_seconds\n";
  for (const auto& r : rows) {
    out << r.samples << ',' << r.repetition << ',' << r.model << ',' << format_double(r.certified)
        << ',' << format_double(r.empirical) << ',' << format_double(r.empirical_ci.low) << ','
        << format_double(r.empirical_ci.high) << ',' << r.states << ',' << r.transitions << ','
        << format_double(r.timings.abstraction) << ',' << format_double(r.timings.solving) << ','
        << format_double(r.timings.validation) << '\n';
  }
  return out.str();
}

std::string solution_csv(const RobustSolution& solution) {
  std::ostringstream out;
  out << "# horizon=" << solution.horizon << " confidence=" << format_double(solution.confidence)
      << '\n';
  out << "step,state,value,action\n";
  for (std::size_t k = 0; k < solution.values.size(); ++k) {
    const Vector& v = solution.values[k];
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      out << k << ',' << s << ',' << format_double(v[s]) << ',';
      if (k < solution.policy.size()) {
        if (const auto a = solution.policy[k][static_cast<std::size_t>(s)]) out << *a;
      }
      out << '\n';
    }
  }
  return out.str();
}

RobustSolution parse_solution_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  RobustSolution sol;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw FormatError("solution.csv line " + std::to_string(lineno) + ": " + what);
  };
  struct Entry {
    std::size_t step, state;
    double value;
    std::optional<std::size_t> action;
  };
  std::vector<Entry> entries;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "horizon") sol.horizon = std::stoi(value);
        if (key == "confidence") sol.confidence = std::stod(value);
      }
      continue;
    }
    if (!have_header) {
      if (line != "step,state,value,action") fail("unexpected header");
      have_header = true;
      continue;
    }
    std::array<std::string, 4> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto comma = line.find(',', start);
      if ((comma == std::string::npos) != (i == 3)) fail("expected 4 fields");
      f[i] = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      start = comma + 1;
    }
    try {
      Entry e{std::stoul(f[0]), std::stoul(f[1]), std::stod(f[2]), std::nullopt};
      if (!f[3].empty()) e.action = std::stoul(f[3]);
      entries.push_back(e);
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
  if (sol.horizon < 1) throw FormatError("solution.csv: missing horizon");
  const auto K = static_cast<std::size_t>(sol.horizon);
  std::size_t states = 0;
  for (const auto& e : entries) states = std::max(states, e.state + 1);
  sol.values.assign(K + 1, Vector::Zero(static_cast<Eigen::Index>(states)));
  sol.policy.assign(K, std::vector<std::optional<std::size_t>>(states));
  for (const auto& e : entries) {
    if (e.step > K) throw FormatError("solution.csv: step beyond horizon");
    sol.values[e.step][static_cast<Eigen::Index>(e.state)] = e.value;
    if (e.step < K) sol.policy[e.step][e.state] = e.action;
  }
  return sol;
}

std::string traces_csv(const std::vector<Trace>& traces) {
  std::ostringstream out;
  Eigen::Index n = 0, p = 0;
  for (const auto& t : traces) {
    if (!t.states.empty()) n = t.states.front().size();
    if (!t.inputs.empty()) p = t.inputs.front().size();
  }
  out << "run,step";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  for (Eigen::Index i = 0; i < p; ++i) out << ",u" << i;
  out << ",outcome\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto& t = traces[r];
    const char* outcome = t.outcome.kind == Outcome::Kind::reached_goal   ? "goal"
                          : t.outcome.kind == Outcome::Kind::hit_critical ? "critical"
                                                                          : "timeout";
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      out << r << ',' << k;
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(t.states[k][i]);
      for (Eigen::Index i = 0; i < p; ++i) {
        out << ',';
        if (k < t.inputs.size()) out << format_double(t.inputs[k][i]);
      }
      out << ',' << (k + 1 == t.states.size() ? outcome : "") << '\n';
    }
  }
  return out.str();
}

}  // namespace imdp
