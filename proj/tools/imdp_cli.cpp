// imdp-synth: abstraction-based controller synthesis pipeline.

#include "imdp/config.hpp"
#include "imdp/explicit_format.hpp"
#include "imdp/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
};

imdp::ExperimentConfig load(const Overrides& o) {
  imdp::ExperimentConfig c = imdp::load_config(o.config);
  if (o.seed) {
    c.abstraction.seed = *o.seed;
    c.validation.seed = *o.seed;
  }
  if (o.workers) c.workers = *o.workers;
  if (!o.out.empty()) c.output = o.out;
  imdp::validate_config(c);
  return c;
}

void add_common(CLI::App* cmd, Overrides& o, bool need_config = true) {
  auto* opt = cmd->add_option("--config", o.config, "Experiment configuration (JSON)");
  if (need_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Override abstraction and validation seeds");
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--out", o.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval-MDP abstraction, robust synthesis and validation for linear stochastic systems"};
  app.require_subcommand(1);

  Overrides run_opts, sweep_opts, export_opts, validate_opts, preset_opts;
  auto* run = app.add_subcommand("run", "Abstract, solve, refine and validate one configuration");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "iMDP vs point-MDP comparison over the sample sweep");
  add_common(sweep, sweep_opts);
  auto* exp = app.add_subcommand("export", "Write the explicit-state iMDP files only");
  add_common(exp, export_opts);
  auto* val = app.add_subcommand("validate", "Re-validate the controller stored in --out");
  add_common(val, validate_opts);

  auto* pre = app.add_subcommand("preset", "Write a built-in configuration");
  std::string preset_name;
  pre->add_option("--emit", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(imdp::preset_names()));
  pre->add_option("--out", preset_opts.out, "Write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto c = load(run_opts);
      const auto result = imdp::run_pipeline(c, c.output);
      std::cout << "certified " << imdp::format_double(result.report.certified) << ", empirical "
                << imdp::format_double(result.report.empirical) << " over " << result.report.runs
                << " runs (" << (result.report.pass ? "pass" : "FAIL") << "), outputs in "
                << c.output << '\n';
      std::cout << "timings: abstraction " << result.timings.abstraction << " s, solving "
                << result.timings.solving << " s, validation " << result.timings.validation
                << " s\n";
    } else if (*sweep) {
      const auto c = load(sweep_opts);
      const auto rows = imdp::run_sweep(c, c.output);
      std::cout << imdp::sweep_csv(rows);
    } else if (*exp) {
      const auto c = load(export_opts);
      const auto abs = imdp::export_model(c, c.output);
      std::cout << abs.model.num_states() << " states, " << abs.model.num_transitions()
                << " transitions written to " << c.output << '\n';
    } else if (*val) {
      const auto c = load(validate_opts);
      const auto report = imdp::revalidate(c, c.output);
      std::cout << imdp::to_json(report) << '\n';
    } else if (*pre) {
      const std::string text = imdp::dump_config(imdp::preset(preset_name));
      if (preset_opts.out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(preset_opts.out);
        if (!out) throw imdp::Error("cannot write " + preset_opts.out);
        out << text;
      }
    }
  } catch (const imdp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
