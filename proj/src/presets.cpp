#include "imdp/config.hpp"

namespace imdp {

namespace {

Matrix block_diag(const Matrix& block, int copies) {
  Matrix out = Matrix::Zero(block.rows() * copies, block.cols() * copies);
  for (int i = 0; i < copies; ++i) {
    out.block(i * block.rows(), i * block.cols(), block.rows(), block.cols()) = block;
  }
  return out;
}

Vector tile(std::initializer_list<double> pattern, int copies) {
  const Vector base = Eigen::Map<const Vector>(pattern.begin(), static_cast<Eigen::Index>(pattern.size()));
  return base.replicate(copies, 1);
}

Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  return {Eigen::Map<const Vector>(lo.begin(), static_cast<Eigen::Index>(lo.size())),
          Eigen::Map<const Vector>(hi.begin(), static_cast<Eigen::Index>(hi.size()))};
}

ExperimentConfig double_integrator(bool triangular) {
  ExperimentConfig c;
  c.name = triangular ? "double-integrator-2d-triangular" : "double-integrator-2d";
  c.system.A = (Matrix(2, 2) << 1, 1, 0, 1).finished();
  c.system.B = (Matrix(2, 1) << 0.5, 1).finished();
  c.system.q = Vector::Zero(2);
  c.system.u_lo = Vector::Constant(1, -4.0);
  c.system.u_hi = Vector::Constant(1, 4.0);
  c.system.lift_steps = 2;
  if (triangular) {
    c.system.noise.kind = "triangular";
    c.system.noise.lo = Vector::Constant(2, -0.8);
    c.system.noise.mode = Vector::Zero(2);
    c.system.noise.hi = Vector::Constant(2, 0.8);
  } else {
    c.system.noise.kind = "gaussian";
    c.system.noise.mean = Vector::Zero(2);
    c.system.noise.covariance = 0.1 * Matrix::Identity(2, 2);
  }
  c.partition.lo = (Vector(2) << -10, -5).finished();
  c.partition.hi = (Vector(2) << 10, 5).finished();
  c.partition.counts = {20, 10};
  c.partition.goal = {box({5, -2}, {8, 2})};
  c.partition.critical = {box({-1, 2}, {1, 5}), box({-1, -5}, {1, -2})};
  c.abstraction.samples = 3200;
  c.abstraction.sweep = {50, 200, 800, 3200};
  c.abstraction.beta = 0.01;
  c.abstraction.seed = 1;
  c.objective.horizon = 10;
  c.objective.x0 = (Vector(2) << -8, 0).finished();
  c.validation = {10000, 20, 2, 10};
  c.output = "out/" + c.name;
  return c;
}

// Three decoupled double-integrator axes, state (px, vx, py, vy, pz, vz).
// The scene geometry, input bounds and noise levels are placeholders.
ExperimentConfig uav(bool high_turbulence) {
  ExperimentConfig c;
  c.name = high_turbulence ? "uav-6d-high" : "uav-6d";
  c.system.A = block_diag((Matrix(2, 2) << 1, 1, 0, 1).finished(), 3);
  c.system.B = block_diag((Matrix(2, 1) << 0.5, 1).finished(), 3);
  c.system.q = Vector::Zero(6);
  c.system.u_lo = Vector::Constant(3, -6.0);
  c.system.u_hi = Vector::Constant(3, 6.0);
  c.system.lift_steps = 2;
  const double sigma = high_turbulence ? 0.3 : 0.1;
  c.system.noise.kind = "gaussian";
  c.system.noise.mean = Vector::Zero(6);
  c.system.noise.covariance = sigma * sigma * Matrix::Identity(6, 6);
  c.partition.lo = tile({-15.0, -2.25}, 3);
  c.partition.hi = tile({9.0, 2.25}, 3);
  c.partition.counts = {8, 2, 8, 2, 8, 2};
  c.partition.goal = {box({6, -2.25, -3, -2.25, -6, -2.25}, {9, 2.25, 3, 2.25, 0, 2.25})};
  c.partition.critical = {box({-6, -2.25, 3, -2.25, -15, -2.25}, {-3, 2.25, 9, 2.25, 9, 2.25}),
                          box({-6, -2.25, -15, -2.25, -15, -2.25}, {-3, 2.25, -3, 2.25, 9, 2.25}),
                          box({0, -2.25, -15, -2.25, 3, -2.25}, {3, 2.25, 9, 2.25, 9, 2.25})};
  c.abstraction.samples = 1600;
  c.abstraction.beta = 0.01;
  c.abstraction.seed = 1;
  c.objective.horizon = 12;
  c.objective.x0 = (Vector(6) << -14, 0, 6, 0, -6, 0).finished();
  c.validation = {1000, 1, 2, 10};
  c.output = "out/" + c.name;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"double-integrator-2d", "double-integrator-2d-triangular", "uav-6d", "uav-6d-high"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "double-integrator-2d") {
    c = double_integrator(false);
  } else if (name == "double-integrator-2d-triangular") {
    c = double_integrator(true);
  } else if (name == "uav-6d") {
    c = uav(false);
  } else if (name == "uav-6d-high") {
    c = uav(true);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  validate_config(c);
  return c;
}

}  // namespace imdp
