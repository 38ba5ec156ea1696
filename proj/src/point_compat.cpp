#include "rh/point_compat.hpp"

#include "rh/error.hpp"
#include "rh/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace rh {

void PcParams::validate() const {
  if (!(phi_deg > 0.0 && phi_deg < 90.0) || !(h_min > 0.0 && h_min < h_max)) {
    throw Error(ErrorCode::InvalidArgument, "point compatibility needs 0 < phi < 90 and 0 < h_min < h_max");
  }
}

bool compatible(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const PcParams& params) {
  const double dh = p1.y() - p2.y();
  if (dh < params.h_min || dh > params.h_max) return false;
  const double r = std::hypot(p2.x() - p1.x(), p2.z() - p1.z());
  return r <= dh / std::tan(deg2rad(params.phi_deg));
}

namespace {

PcResult finish(UnionFind& uf, std::vector<unsigned char> flags) {
  PcResult out;
  out.cluster = canonical_labels(uf, flags, out.cluster_count);
  out.obstacle = std::move(flags);
  return out;
}

struct PixelRect {
  int x0, x1, y0, y1;  // inclusive
};

// Pixel rectangle containing the projection of every point p2 that can be
// compatible with p1 as the lower point.
PixelRect cone_rect(const Eigen::Vector3d& p1, const CameraRig& rig, const PcParams& params) {
  const double reach = params.h_max / std::tan(deg2rad(params.phi_deg));
  const double zlo = p1.z() - reach;
  if (zlo <= 0.0) return {std::numeric_limits<int>::min(), std::numeric_limits<int>::max(),
                          std::numeric_limits<int>::min(), std::numeric_limits<int>::max()};
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double X : {p1.x() - reach, p1.x() + reach}) {
    for (double Y : {p1.y() - params.h_max, p1.y() - params.h_min}) {
      for (double Z : {zlo, p1.z() + reach}) {
        const double x = rig.x0 + rig.fx * X / Z;
        const double y = rig.y0 + rig.fy * Y / Z;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  return {static_cast<int>(std::floor(xmin)) - 1, static_cast<int>(std::ceil(xmax)) + 1,
          static_cast<int>(std::floor(ymin)) - 1, static_cast<int>(std::ceil(ymax)) + 1};
}

}  // namespace

PcResult pc_brute_force(const std::vector<CloudPoint>& cloud, const PcParams& params) {
  params.validate();
  const std::size_t n = cloud.size();
  UnionFind uf(n);
  std::vector<unsigned char> flags(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (compatible(cloud[i].p, cloud[j].p, params) || compatible(cloud[j].p, cloud[i].p, params)) {
        flags[i] = flags[j] = 1;
        uf.unite(i, j);
      }
    }
  }
  return finish(uf, std::move(flags));
}

PcResult pc_detect(const std::vector<CloudPoint>& cloud, const CameraRig& rig, const PcParams& params) {
  params.validate();
  rig.validate();
  const std::size_t n = cloud.size();

  // column -> (row, index), rows ascending
  std::map<int, std::vector<std::pair<int, std::size_t>>> columns;
  for (std::size_t i = 0; i < n; ++i) columns[cloud[i].x].emplace_back(cloud[i].y, i);
  for (auto& [x, col] : columns) std::sort(col.begin(), col.end());

  // Bottom-left to top-right.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cloud[a].x != cloud[b].x) return cloud[a].x < cloud[b].x;
    if (cloud[a].y != cloud[b].y) return cloud[a].y > cloud[b].y;
    return a < b;
  });

  UnionFind uf(n);
  std::vector<unsigned char> flags(n, 0);
  for (const std::size_t i : order) {
    const PixelRect r = cone_rect(cloud[i].p, rig, params);
    for (auto it = columns.lower_bound(r.x0); it != columns.end() && it->first <= r.x1; ++it) {
      const auto& col = it->second;
      auto lo = std::lower_bound(col.begin(), col.end(), std::make_pair(r.y0, std::size_t{0}));
      for (; lo != col.end() && lo->first <= r.y1; ++lo) {
        const std::size_t j = lo->second;
        if (j != i && compatible(cloud[i].p, cloud[j].p, params)) {
          flags[i] = flags[j] = 1;
          uf.unite(i, j);
        }
      }
    }
  }
  return finish(uf, std::move(flags));
}

}  // namespace rh
