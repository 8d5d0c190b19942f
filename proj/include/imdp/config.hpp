#pragma once

#include "imdp/common.hpp"
#include "imdp/dynamics.hpp"
#include "imdp/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace imdp {

struct NoiseSpec {
  std::string kind = "gaussian";  // gaussian | uniform_box | triangular | mixture
  Vector mean;
  Matrix covariance;
  Vector lo;
  Vector mode;
  Vector hi;
  std::vector<std::pair<double, NoiseSpec>> components;
};

struct SystemSpec {
  Matrix A;
  Matrix B;
  Vector q;
  Vector u_lo;
  Vector u_hi;
  NoiseSpec noise;
  int lift_steps = 1;
};

struct PartitionSpec {
  Vector lo;
  Vector hi;
  std::vector<std::size_t> counts;
  std::vector<Box> goal;
  std::vector<Box> critical;
};

struct AbstractionSpec {
  std::size_t samples = 1000;
  std::vector<std::size_t> sweep;  // strictly increasing; empty for single runs
  double beta = 0.01;
  std::uint64_t seed = 0;
};

struct ObjectiveSpec {
  int horizon = 16;  // in (lifted) abstraction steps
  Vector x0;
};

struct ValidationSpec {
  std::size_t runs = 10000;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t traces = 10;
};

struct ExperimentConfig {
  std::string name;
  SystemSpec system;
  PartitionSpec partition;
  AbstractionSpec abstraction;
  ObjectiveSpec objective;
  ValidationSpec validation;
  std::string output = "out";
  unsigned workers = 1;
};

/// Parses and validates a JSON configuration. Errors are ConfigError with
/// the offending field path, e.g. "partition.goal[0]: ...".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

/// Consistency checks shared by the parser and the presets.
void validate_config(const ExperimentConfig& config);

NoiseModel make_noise(const NoiseSpec& spec);
/// Un-lifted system built from a SystemSpec.
LinearSystem make_system(const SystemSpec& spec);

/// Built-in experiment presets: "double-integrator-2d", "uav-6d".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace imdp
