#include "rh/str_rtree.hpp"

#include "rh/error.hpp"

#include <algorithm>
#include <cmath>

namespace rh {
namespace {

struct Item {
  double x, z;
  std::uint32_t id;
};

// One STR pass: sort by x, cut into vertical slices, sort each slice by z and
// pack runs of `cap` items. Returns the [begin, end) runs over `items`.
std::vector<std::pair<std::size_t, std::size_t>> str_pack(std::vector<Item>& items, std::size_t cap) {
  const std::size_t n = items.size();
  const std::size_t groups = (n + cap - 1) / cap;
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(groups))));
  const std::size_t per_slice = slices * cap;
  auto by_x = [](const Item& a, const Item& b) { return a.x != b.x ? a.x < b.x : a.id < b.id; };
  auto by_z = [](const Item& a, const Item& b) { return a.z != b.z ? a.z < b.z : a.id < b.id; };
  std::sort(items.begin(), items.end(), by_x);
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t s = 0; s < n; s += per_slice) {
    const std::size_t e = std::min(n, s + per_slice);
    std::sort(items.begin() + static_cast<std::ptrdiff_t>(s), items.begin() + static_cast<std::ptrdiff_t>(e), by_z);
    for (std::size_t g = s; g < e; g += cap) runs.emplace_back(g, std::min(e, g + cap));
  }
  return runs;
}

}  // namespace

StrRTree::StrRTree(std::vector<Point> points, int node_capacity) : points_(std::move(points)) {
  if (node_capacity < 2) throw Error(ErrorCode::InvalidArgument, "R-tree node capacity must be >= 2");
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::InvalidArgument, "R-tree points must be finite");
    }
  }
  if (points_.empty()) return;
  const auto cap = static_cast<std::size_t>(node_capacity);

  std::vector<Item> items(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    items[i] = {points_[i].x, points_[i].z, static_cast<std::uint32_t>(i)};
  }
  std::vector<Node> level;
  for (const auto& [b, e] : str_pack(items, cap)) {
    Node node{{items[b].x, items[b].z, items[b].x, items[b].z}, static_cast<std::uint32_t>(entries_.size()),
              static_cast<std::uint32_t>(e - b)};
    for (std::size_t i = b; i < e; ++i) {
      node.box.x0 = std::min(node.box.x0, items[i].x);
      node.box.x1 = std::max(node.box.x1, items[i].x);
      node.box.z0 = std::min(node.box.z0, items[i].z);
      node.box.z1 = std::max(node.box.z1, items[i].z);
      entries_.push_back(items[i].id);
    }
    level.push_back(node);
  }
  levels_.push_back(std::move(level));

  while (levels_.back().size() > 1) {
    const auto& below = levels_.back();
    std::vector<Item> centers(below.size());
    for (std::size_t i = 0; i < below.size(); ++i) {
      centers[i] = {0.5 * (below[i].box.x0 + below[i].box.x1), 0.5 * (below[i].box.z0 + below[i].box.z1),
                    static_cast<std::uint32_t>(i)};
    }
    // Children of a parent must be contiguous, so the level below is reordered.
    std::vector<Node> reordered;
    std::vector<Node> parents;
    for (const auto& [b, e] : str_pack(centers, cap)) {
      Node parent{below[centers[b].id].box, static_cast<std::uint32_t>(reordered.size()),
                  static_cast<std::uint32_t>(e - b)};
      for (std::size_t i = b; i < e; ++i) {
        const Node& child = below[centers[i].id];
        parent.box.x0 = std::min(parent.box.x0, child.box.x0);
        parent.box.x1 = std::max(parent.box.x1, child.box.x1);
        parent.box.z0 = std::min(parent.box.z0, child.box.z0);
        parent.box.z1 = std::max(parent.box.z1, child.box.z1);
        reordered.push_back(child);
      }
      parents.push_back(parent);
    }
    levels_.back() = std::move(reordered);
    levels_.push_back(std::move(parents));
  }
}

void StrRTree::search(std::size_t level, std::size_t node, const Aabb& box,
                      std::vector<std::size_t>& out) const {
  const Node& n = levels_[level][node];
  if (!n.box.intersects(box)) return;
  if (level == 0) {
    for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
      const Point& p = points_[entries_[i]];
      if (box.contains(p.x, p.z)) out.push_back(entries_[i]);
    }
    return;
  }
  for (std::uint32_t c = n.first; c < n.first + n.count; ++c) search(level - 1, c, box, out);
}

void StrRTree::query(const Aabb& box, std::vector<std::size_t>& out) const {
  out.clear();
  if (levels_.empty()) return;
  const std::size_t top = levels_.size() - 1;
  for (std::size_t i = 0; i < levels_[top].size(); ++i) search(top, i, box, out);
  std::sort(out.begin(), out.end());
}

std::vector<std::size_t> StrRTree::query(const Aabb& box) const {
  std::vector<std::size_t> out;
  query(box, out);
  return out;
}

}  // namespace rh
