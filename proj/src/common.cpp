#include "imdp/common.hpp"

namespace imdp {

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] - tol && x[i] <= hi[i] + tol)) return false;
  }
  return true;
}

bool Box::interior_intersects(const Box& other) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::min(hi[i], other.hi[i]) <= std::max(lo[i], other.lo[i])) return false;
  }
  return true;
}

bool Box::intersects(const Box& other) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::min(hi[i], other.hi[i]) < std::max(lo[i], other.lo[i])) return false;
  }
  return true;
}

bool Box::subset_of(const Box& other) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo[i] < other.lo[i] || hi[i] > other.hi[i]) return false;
  }
  return true;
}

void check_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw InvalidArgument(what + " contains non-finite entries");
}

}  // namespace imdp
