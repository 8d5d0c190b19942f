#include "imdp/noise.hpp"

#include <cmath>
#include <numbers>

namespace imdp {

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseModel NoiseModel::gaussian(Vector mean, Matrix covariance) {
  const auto n = mean.size();
  if (n == 0) throw InvalidArgument("gaussian noise: empty mean");
  if (covariance.rows() != n || covariance.cols() != n) {
    throw InvalidArgument("gaussian noise: covariance must be n x n");
  }
  check_finite(mean, "gaussian mean");
  check_finite(covariance, "gaussian covariance");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("gaussian noise: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
  const Vector& lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-10 * scale) {
    throw InvalidArgument("gaussian noise: covariance is not positive semidefinite");
  }
  Matrix factor = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return NoiseModel(Gaussian{std::move(mean), std::move(covariance), std::move(factor)}, n);
}

NoiseModel NoiseModel::zero(Eigen::Index n) {
  return gaussian(Vector::Zero(n), Matrix::Zero(n, n));
}

NoiseModel NoiseModel::uniform_box(Vector lo, Vector hi) {
  const auto n = lo.size();
  if (n == 0 || hi.size() != n) throw InvalidArgument("uniform noise: bad bounds");
  check_finite(lo, "uniform lo");
  check_finite(hi, "uniform hi");
  if ((lo.array() > hi.array()).any()) throw InvalidArgument("uniform noise: lo > hi");
  return NoiseModel(UniformBox{std::move(lo), std::move(hi)}, n);
}

NoiseModel NoiseModel::triangular(Vector lo, Vector mode, Vector hi) {
  const auto n = lo.size();
  if (n == 0 || mode.size() != n || hi.size() != n) {
    throw InvalidArgument("triangular noise: bad bounds");
  }
  check_finite(lo, "triangular lo");
  check_finite(mode, "triangular mode");
  check_finite(hi, "triangular hi");
  if ((lo.array() > mode.array()).any() || (mode.array() > hi.array()).any()) {
    throw InvalidArgument("triangular noise: requires lo <= mode <= hi");
  }
  return NoiseModel(Triangular{std::move(lo), std::move(mode), std::move(hi)}, n);
}

NoiseModel NoiseModel::mixture(std::vector<std::pair<double, NoiseModel>> components) {
  if (components.empty()) throw InvalidArgument("mixture noise: no components");
  const auto n = components.front().second.dim();
  double total = 0.0;
  Mixture mix;
  for (auto& [w, model] : components) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture noise: negative weight");
    if (model.dim() != n) throw InvalidArgument("mixture noise: dimension mismatch");
    total += w;
    mix.components.emplace_back(w, std::make_shared<const NoiseModel>(std::move(model)));
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture noise: weights must sum to 1");
  return NoiseModel(std::move(mix), n);
}

NoiseModel NoiseModel::linear_combination(NoiseModel base, std::vector<Matrix> weights) {
  if (weights.empty()) throw InvalidArgument("linear noise: no terms");
  const auto rows = weights.front().rows();
  for (const auto& w : weights) {
    if (w.cols() != base.dim() || w.rows() != rows) {
      throw InvalidArgument("linear noise: weight shape mismatch");
    }
    check_finite(w, "linear noise weight");
  }
  return NoiseModel(Linear{std::make_shared<const NoiseModel>(std::move(base)), std::move(weights)},
                    rows);
}

namespace {

struct Sampler {
  Rng& rng;
  Eigen::Index n;

  Vector operator()(const NoiseModel::Gaussian& g) const {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = standard_normal(rng);
    return g.mean + g.factor * z;
  }
  Vector operator()(const NoiseModel::UniformBox& u) const {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = u.lo[i] + (u.hi[i] - u.lo[i]) * uniform01(rng);
    return x;
  }
  Vector operator()(const NoiseModel::Triangular& t) const {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = t.lo[i], c = t.mode[i], b = t.hi[i];
      const double u = uniform01(rng);
      if (b == a) {
        x[i] = a;
      } else if (u < (c - a) / (b - a)) {
        x[i] = a + std::sqrt(u * (b - a) * (c - a));
      } else {
        x[i] = b - std::sqrt((1.0 - u) * (b - a) * (b - c));
      }
    }
    return x;
  }
  Vector operator()(const NoiseModel::Mixture& m) const {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (const auto& [w, model] : m.components) {
      acc += w;
      if (u < acc) return model->sample(rng);
    }
    return m.components.back().second->sample(rng);
  }
  Vector operator()(const NoiseModel::Linear& l) const {
    Vector x = Vector::Zero(n);
    for (const auto& w : l.weights) x += w * l.base->sample(rng);
    return x;
  }
};

}  // namespace

Vector NoiseModel::sample(Rng& rng) const { return std::visit(Sampler{rng, dim_}, kind_); }

}  // namespace imdp
