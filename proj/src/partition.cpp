#include "imdp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace imdp {

Partition::Partition(Box domain, std::vector<std::size_t> counts)
    : domain_(std::move(domain)), counts_(std::move(counts)) {
  const auto n = domain_.dim();
  if (n == 0 || domain_.hi.size() != n) throw InvalidArgument("partition: bad domain");
  if (counts_.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("partition: counts must have one entry per dimension");
  }
  check_finite(domain_.lo, "partition lo");
  check_finite(domain_.hi, "partition hi");
  if ((domain_.lo.array() >= domain_.hi.array()).any()) {
    throw InvalidArgument("partition: requires lo < hi in every dimension");
  }
  strides_.assign(counts_.size(), 1);
  for (std::size_t i = counts_.size(); i-- > 0;) {
    if (counts_[i] == 0) throw InvalidArgument("partition: cell counts must be positive");
    strides_[i] = total_;
    total_ *= counts_[i];
  }
  width_ = (domain_.hi - domain_.lo).array() /
           Eigen::Map<const Eigen::Matrix<std::size_t, Eigen::Dynamic, 1>>(counts_.data(), n)
               .cast<double>()
               .array();
  goal_.assign(total_, false);
  critical_.assign(total_, false);
}

void Partition::check_id(RegionId id) const {
  if (id.value >= total_) {
    throw InvalidArgument("invalid region id " + std::to_string(id.value));
  }
}

std::vector<std::size_t> Partition::decode(RegionId id) const {
  check_id(id);
  std::vector<std::size_t> index(counts_.size());
  std::size_t rest = id.value;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    index[i] = rest / strides_[i];
    rest %= strides_[i];
  }
  return index;
}

RegionId Partition::encode(const std::vector<std::size_t>& index) const {
  if (index.size() != counts_.size()) throw InvalidArgument("encode: wrong index length");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (index[i] >= counts_[i]) throw InvalidArgument("encode: index out of range");
    flat += index[i] * strides_[i];
  }
  return RegionId{flat};
}

std::optional<RegionId> Partition::region_of(const Vector& x) const {
  if (x.size() != dim()) throw InvalidArgument("region_of: dimension mismatch");
  std::size_t flat = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double lo = domain_.lo[i];
    const double hi = domain_.hi[i];
    if (!(x[i] >= lo && x[i] <= hi)) return std::nullopt;
    const auto m = counts_[static_cast<std::size_t>(i)];
    auto cell = static_cast<std::size_t>(std::floor((x[i] - lo) / width_[i]));
    cell = std::min(cell, m - 1);
    // Guard against rounding in the division: enforce the half-open bounds
    // computed exactly as region_box computes them.
    if (cell > 0 && x[i] < lo + static_cast<double>(cell) * width_[i]) --cell;
    if (cell + 1 < m && x[i] >= lo + static_cast<double>(cell + 1) * width_[i]) ++cell;
    flat += cell * strides_[static_cast<std::size_t>(i)];
  }
  return RegionId{flat};
}

Box Partition::region_box(RegionId id) const {
  const auto index = decode(id);
  Box box{Vector(dim()), Vector(dim())};
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const auto c = index[static_cast<std::size_t>(i)];
    box.lo[i] = domain_.lo[i] + static_cast<double>(c) * width_[i];
    box.hi[i] = c + 1 == counts_[static_cast<std::size_t>(i)]
                    ? domain_.hi[i]
                    : domain_.lo[i] + static_cast<double>(c + 1) * width_[i];
  }
  return box;
}

std::vector<Vector> Partition::region_vertices(RegionId id) const {
  const Box box = region_box(id);
  const auto n = dim();
  const std::size_t corners = std::size_t{1} << n;
  std::vector<Vector> out;
  out.reserve(corners);
  for (std::size_t mask = 0; mask < corners; ++mask) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool upper = (mask >> (n - 1 - i)) & 1U;
      v[i] = upper ? box.hi[i] : box.lo[i];
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<RegionId> Partition::goal_regions() const {
  std::vector<RegionId> out;
  for (std::size_t r = 0; r < total_; ++r) {
    if (goal_[r]) out.push_back(RegionId{r});
  }
  return out;
}

std::vector<RegionId> Partition::critical_regions() const {
  std::vector<RegionId> out;
  for (std::size_t r = 0; r < total_; ++r) {
    if (critical_[r]) out.push_back(RegionId{r});
  }
  return out;
}

namespace {

bool matches(const Box& cell, const Box& box, LabelMode mode) {
  return mode == LabelMode::contained ? cell.subset_of(box) : cell.interior_intersects(box);
}

}  // namespace

Partition Partition::label_regions(const std::vector<Box>& goal_boxes,
                                   const std::vector<Box>& critical_boxes, LabelMode goal_mode,
                                   LabelMode critical_mode) const {
  for (const auto* list : {&goal_boxes, &critical_boxes}) {
    for (const auto& b : *list) {
      if (b.lo.size() != dim() || b.hi.size() != dim()) {
        throw InvalidArgument("label_regions: box dimension mismatch");
      }
    }
  }
  Partition out = *this;
  for (std::size_t r = 0; r < total_; ++r) {
    const Box cell = region_box(RegionId{r});
    bool crit = false;
    for (const auto& b : critical_boxes) crit = crit || matches(cell, b, critical_mode);
    bool goal = false;
    for (const auto& b : goal_boxes) goal = goal || matches(cell, b, goal_mode);
    out.critical_[r] = crit;
    out.goal_[r] = goal && !crit;
  }
  return out;
}

std::vector<RegionId> Partition::cells_touching(const Box& box) const {
  const auto n = dim();
  std::vector<std::size_t> first(static_cast<std::size_t>(n)), last(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (box.hi[i] < domain_.lo[i] || box.lo[i] > domain_.hi[i]) return {};
    const double a = (std::max(box.lo[i], domain_.lo[i]) - domain_.lo[i]) / width_[i];
    const double b = (std::min(box.hi[i], domain_.hi[i]) - domain_.lo[i]) / width_[i];
    // Widen by one cell on each side against rounding, then filter exactly.
    const auto fa = static_cast<std::size_t>(std::max(0.0, std::floor(a) - 1.0));
    const auto fb = static_cast<std::size_t>(std::max(0.0, std::floor(b) + 1.0));
    first[ui] = std::min(fa, counts_[ui] - 1);
    last[ui] = std::min(fb, counts_[ui] - 1);
  }
  std::vector<RegionId> out;
  std::vector<std::size_t> idx = first;
  while (true) {
    const RegionId id = encode(idx);
    if (region_box(id).intersects(box)) out.push_back(id);
    std::size_t d = static_cast<std::size_t>(n);
    while (d-- > 0) {
      if (idx[d] < last[d]) {
        ++idx[d];
        break;
      }
      idx[d] = first[d];
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace imdp
