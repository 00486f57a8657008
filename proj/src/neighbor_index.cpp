#include "planar_ot/neighbor_index.hpp"

#include <numeric>
#include <optional>
#include <utility>

namespace planar_ot {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Extremal search over nodes [0, count) that are SW of `p` and, when a box is
// given, lie in the open box lo < q < hi. Ties go to the largest index.
struct Extremes {
  std::optional<std::size_t> max_x;
  std::optional<std::size_t> max_y;
};

Extremes extremes(const std::vector<DagNode>& nodes, std::size_t count, Point p,
                  std::optional<std::pair<Point, Point>> box = std::nullopt) {
  Extremes e;
  for (std::size_t id = 0; id < count; ++id) {
    const Point q = nodes[id].point;
    if (!(q.x <= p.x && q.y <= p.y)) continue;
    if (box) {
      const auto [lo, hi] = *box;
      if (!(q.x > lo.x && q.x < hi.x && q.y > lo.y && q.y < hi.y)) continue;
    }
    if (!e.max_x || q.x >= nodes[*e.max_x].point.x) e.max_x = id;
    if (!e.max_y || q.y >= nodes[*e.max_y].point.y) e.max_y = id;
  }
  return e;
}

}  // namespace

DagIndex::DagIndex() {
  nodes_.push_back(DagNode{{-kInf, -kInf}, kNoOrdinal, {}, {}});
}

DagIndex build_index(std::span<const Point> points) {
  DagIndex index;
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double za = points[a].x + points[a].y;
    const double zb = points[b].x + points[b].y;
    if (za != zb) return za < zb;
    return points[a].x < points[b].x;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (points[order[k]] == points[order[k - 1]]) throw DomainError("build_index: duplicate point");
  }

  auto& nodes = index.nodes_;
  index.id_of_ordinal_.assign(points.size(), DagIndex::kNoOrdinal);
  for (const std::size_t ordinal : order) {
    const std::size_t id = nodes.size();
    const Point p = points[ordinal];
    nodes.push_back(DagNode{p, ordinal, {}, {}});
    index.id_of_ordinal_[ordinal] = id;

    auto link = [&](std::size_t parent) {
      nodes[id].parents.push_back(parent);
      nodes[parent].children.push_back(id);
    };

    // The root is SW of everything, so both searches always succeed.
    const Extremes first = extremes(nodes, id, p);
    std::size_t m1 = *first.max_x;
    std::size_t m2 = *first.max_y;
    link(m1);
    while (m1 != m2) {
      link(m2);
      // Points on the rectangle's closed edges are dominated by m1 or m2.
      const Point lo{nodes[m2].point.x, nodes[m1].point.y};
      const Point hi{nodes[m1].point.x, nodes[m2].point.y};
      const Extremes inner = extremes(nodes, id, p, std::pair{lo, hi});
      if (!inner.max_x) break;
      m1 = *inner.max_x;
      m2 = *inner.max_y;
      link(m1);
    }
  }
  return index;
}

}  // namespace planar_ot
