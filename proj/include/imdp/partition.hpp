#pragma once

#include "imdp/common.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

namespace imdp {

/// Flat index of a grid cell. Row-major mixed radix with dimension 0 slowest.
struct RegionId {
  std::size_t value = 0;
  friend auto operator<=>(const RegionId&, const RegionId&) = default;
};

enum class LabelMode { contained, intersecting };

/// Uniform hyperrectangular grid over a bounded box with goal and critical
/// labels.
///
/// Cells are half-open [l, u) in every dimension except the last cell of
/// each dimension, which is closed. Every point of the domain therefore
/// belongs to exactly one cell.
class Partition {
 public:
  Partition(Box domain, std::vector<std::size_t> counts);

  [[nodiscard]] Eigen::Index dim() const { return domain_.dim(); }
  [[nodiscard]] std::size_t size() const { return total_; }
  [[nodiscard]] const Box& domain() const { return domain_; }
  [[nodiscard]] const std::vector<std::size_t>& counts() const { return counts_; }
  [[nodiscard]] const Vector& cell_width() const { return width_; }

  [[nodiscard]] std::vector<std::size_t> decode(RegionId id) const;
  [[nodiscard]] RegionId encode(const std::vector<std::size_t>& index) const;

  /// nullopt when x is outside the domain.
  [[nodiscard]] std::optional<RegionId> region_of(const Vector& x) const;
  [[nodiscard]] Box region_box(RegionId id) const;
  /// 2^n corners; corner b takes hi in dimension i when bit (n-1-i) of b is
  /// set, so the list is in lexicographic order of the corner bitmask.
  [[nodiscard]] std::vector<Vector> region_vertices(RegionId id) const;

  [[nodiscard]] bool is_goal(RegionId id) const { return goal_[id.value]; }
  [[nodiscard]] bool is_critical(RegionId id) const { return critical_[id.value]; }
  [[nodiscard]] bool is_labeled(RegionId id) const { return is_goal(id) || is_critical(id); }
  [[nodiscard]] std::vector<RegionId> goal_regions() const;
  [[nodiscard]] std::vector<RegionId> critical_regions() const;

  /// Returns a copy with labels recomputed from the boxes. A cell matching
  /// both a goal and a critical box is labeled critical.
  [[nodiscard]] Partition label_regions(const std::vector<Box>& goal_boxes,
                                        const std::vector<Box>& critical_boxes,
                                        LabelMode goal_mode = LabelMode::contained,
                                        LabelMode critical_mode = LabelMode::intersecting) const;

  /// Indices of the cells whose closed boxes intersect `box` (per-dimension
  /// index ranges, clipped to the grid). Empty when the box misses the domain.
  [[nodiscard]] std::vector<RegionId> cells_touching(const Box& box) const;

 private:
  void check_id(RegionId id) const;

  Box domain_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  Vector width_;
  std::size_t total_ = 1;
  std::vector<bool> goal_;
  std::vector<bool> critical_;
};

}  // namespace imdp
