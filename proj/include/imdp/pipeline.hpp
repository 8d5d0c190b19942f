#pragma once

#include "imdp/abstraction.hpp"
#include "imdp/config.hpp"
#include "imdp/controller.hpp"
#include "imdp/dynamics.hpp"
#include "imdp/partition.hpp"
#include "imdp/robust_mdp.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace imdp {

/// Lifted system, labeled partition and actions with enabled sets.
struct Problem {
  LinearSystem system;
  Partition partition;
  std::vector<AbstractAction> actions;
};

Problem build_problem(const ExperimentConfig& config);

struct StageTimings {
  double abstraction = 0.0;  // seconds
  double solving = 0.0;
  double validation = 0.0;
};

struct PipelineResult {
  Abstraction abstraction;
  RobustSolution solution;
  ValidationReport report;
  StageTimings timings;
};

/// Abstraction -> robust solution -> controller -> Monte Carlo validation.
PipelineResult run_pipeline(const ExperimentConfig& config, const Problem& problem);

/// run_pipeline plus artifacts in `out`: model.sta, model.tra, solution.csv,
/// validation.json, traces.csv, summary.json and timings.json. Everything
/// except timings.json is a deterministic function of the configuration.
PipelineResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out);

/// Builds the iMDP and writes only model.sta / model.tra.
Abstraction export_model(const ExperimentConfig& config, const std::filesystem::path& out);

/// Re-validates the controller stored in out/solution.csv and rewrites
/// out/validation.json.
ValidationReport revalidate(const ExperimentConfig& config, const std::filesystem::path& out);

struct SweepRow {
  std::size_t samples = 0;
  std::size_t repetition = 0;
  std::string model;  // "imdp" or "mdp"
  double certified = 0.0;
  double empirical = 0.0;
  ProbabilityInterval empirical_ci;
  std::size_t states = 0;
  std::size_t transitions = 0;
  StageTimings timings;
};

/// For every N in the sweep and every repetition: one shared set of counts,
/// an iMDP and a point-estimate MDP, both solved and validated. Rows are
/// ordered by (N, repetition, imdp before mdp).
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const Problem& problem);
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::filesystem::path& out);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string solution_csv(const RobustSolution& solution);
RobustSolution parse_solution_csv(const std::string& text);
std::string traces_csv(const std::vector<Trace>& traces);

}  // namespace imdp
