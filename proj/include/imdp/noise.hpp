#pragma once

#include "imdp/common.hpp"
#include "imdp/rng.hpp"

#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace imdp {

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

/// Standard normal draw (Box-Muller, one value per call).
double standard_normal(Rng& rng);

class NoiseModel;
using NoisePtr = std::shared_ptr<const NoiseModel>;

/// Additive process noise, exposed to the rest of the library only as a
/// seeded sampler. The parameters are kept so configurations can be
/// serialized, but nothing downstream of the sampler reads them.
class NoiseModel {
 public:
  struct Gaussian {
    Vector mean;
    Matrix covariance;
    Matrix factor;  // factor * factor^T == covariance
  };
  struct UniformBox {
    Vector lo;
    Vector hi;
  };
  struct Triangular {
    Vector lo;
    Vector mode;
    Vector hi;
  };
  struct Mixture {
    std::vector<std::pair<double, NoisePtr>> components;
  };
  /// Sum_i weights[i] * eta_i with eta_i drawn i.i.d. from base.
  struct Linear {
    NoisePtr base;
    std::vector<Matrix> weights;
  };

  static NoiseModel gaussian(Vector mean, Matrix covariance);
  static NoiseModel zero(Eigen::Index n);
  static NoiseModel uniform_box(Vector lo, Vector hi);
  static NoiseModel triangular(Vector lo, Vector mode, Vector hi);
  static NoiseModel mixture(std::vector<std::pair<double, NoiseModel>> components);
  static NoiseModel linear_combination(NoiseModel base, std::vector<Matrix> weights);

  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] Vector sample(Rng& rng) const;

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), kind_);
  }

 private:
  using Kind = std::variant<Gaussian, UniformBox, Triangular, Mixture, Linear>;
  NoiseModel(Kind kind, Eigen::Index dim) : kind_(std::move(kind)), dim_(dim) {}

  Kind kind_;
  Eigen::Index dim_;
};

}  // namespace imdp
