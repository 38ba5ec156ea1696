#pragma once

// Static R-tree over 2D points, bulk loaded with Sort-Tile-Recursive packing.

#include <cstdint>
#include <vector>

namespace rh {

struct Aabb {
  double x0 = 0.0, z0 = 0.0, x1 = 0.0, z1 = 0.0;  // closed box

  bool contains(double x, double z) const { return x >= x0 && x <= x1 && z >= z0 && z <= z1; }
  bool intersects(const Aabb& o) const { return x0 <= o.x1 && o.x0 <= x1 && z0 <= o.z1 && o.z0 <= z1; }
};

class StrRTree {
 public:
  struct Point {
    double x = 0.0;
    double z = 0.0;
  };

  StrRTree() = default;
  explicit StrRTree(std::vector<Point> points, int node_capacity = 16);

  // Indices of all points inside the box, ascending.
  std::vector<std::size_t> query(const Aabb& box) const;
  void query(const Aabb& box, std::vector<std::size_t>& out) const;

  std::size_t size() const { return points_.size(); }
  int height() const { return static_cast<int>(levels_.size()); }

 private:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // first child (node in the level below, or entry)
    std::uint32_t count = 0;
  };

  void search(std::size_t level, std::size_t node, const Aabb& box, std::vector<std::size_t>& out) const;

  std::vector<Point> points_;
  std::vector<std::uint32_t> entries_;     // point indices in leaf order
  std::vector<std::vector<Node>> levels_;  // levels_[0] = leaves, back() = root level
};

}  // namespace rh
