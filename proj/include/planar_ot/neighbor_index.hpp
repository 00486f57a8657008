#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <ranges>
#include <span>
#include <vector>

#include "planar_ot/geometry.hpp"

namespace planar_ot {

struct DagNode {
  Point point;
  // Position of the point in the list handed to build_index; kNoOrdinal for the root.
  std::size_t ordinal = 0;
  std::vector<std::size_t> parents;   // node ids, all smaller than this node's id
  std::vector<std::size_t> children;  // node ids, all larger
};

/// Points organized in the NE-SW direction. Node 0 is a virtual root lying
/// strictly SW of every point; nodes 1..n hold the points sorted by z = x + y,
/// then by x. A parent of p is a point SW of p that is not SW of any other
/// point SW of p. Other orientations are obtained by reflecting the input.
class DagIndex {
 public:
  static constexpr std::size_t kRoot = 0;
  static constexpr std::size_t kNoOrdinal = std::numeric_limits<std::size_t>::max();

  DagIndex();

  std::size_t size() const { return nodes_.size() - 1; }
  const DagNode& node(std::size_t id) const { return nodes_[id]; }
  const DagNode& root() const { return nodes_.front(); }
  /// The real points in z order (excludes the root).
  std::span<const DagNode> ordered() const { return std::span(nodes_).subspan(1); }
  /// Node id of the point with the given input ordinal.
  std::size_t id_of(std::size_t ordinal) const { return id_of_ordinal_[ordinal]; }

 private:
  friend DagIndex build_index(std::span<const Point> points);

  std::vector<DagNode> nodes_;
  std::vector<std::size_t> id_of_ordinal_;
};

/// Throws DomainError on duplicate points.
DagIndex build_index(std::span<const Point> points);

/// Points NE of `anchor` (non-strict), each once, in nondecreasing z.
inline auto ne_iter(const DagIndex& index, Point anchor) {
  auto all = index.ordered();
  const double z = anchor.x + anchor.y;
  auto first = std::ranges::lower_bound(all, z, {}, [](const DagNode& n) { return n.point.x + n.point.y; });
  return std::ranges::subrange(first, all.end()) |
         std::views::filter([anchor](const DagNode& n) { return is_direction(Direction::ne, anchor, n.point); }) |
         std::views::transform([](const DagNode& n) { return n.point; });
}

}  // namespace planar_ot
