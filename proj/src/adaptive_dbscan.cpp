#include "rh/cluster_stixels.hpp"

#include "rh/error.hpp"
#include "rh/union_find.hpp"

#include <algorithm>
#include <cmath>

namespace rh {

void ClusterParams::validate() const {
  if (stixel_width < 1 || !(w0 > 0.0) || !(l0 > 0.0) || !(kappa >= 0.0) || !(sigma_d >= 0.0) ||
      !(minpts0 >= 0.0) || !(k >= 0.0) || !(var_thresh >= 0.0) || min_split_height < 2) {
    throw Error(ErrorCode::InvalidArgument, "bad cluster parameters");
  }
}

bool Neighborhood::contains(double x, double z) const {
  const double dx = x - cx, dz = z - cz;
  const double s = std::sin(angle), c = std::cos(angle);
  const double along = dx * s + dz * c;
  const double across = dx * c - dz * s;
  return std::abs(across) <= half_lateral && std::abs(along) <= half_depth;
}

Aabb Neighborhood::bounds() const {
  const double s = std::abs(std::sin(angle)), c = std::abs(std::cos(angle));
  const double ex = half_lateral * c + half_depth * s;
  const double ez = half_lateral * s + half_depth * c;
  // Slightly grown so rounding in the rotation never drops a contained point.
  const double pad = 1e-9 * (1.0 + std::abs(cx) + std::abs(cz) + ex + ez);
  return {cx - ex - pad, cz - ez - pad, cx + ex + pad, cz + ez + pad};
}

double depth_sigma(double z, const ClusterParams& params, const CameraRig& rig) {
  return z * z * params.sigma_d / (rig.fx * rig.baseline);
}

Neighborhood adaptive_neighborhood(const ObstaclePoint& p, const ClusterParams& params, const CameraRig& rig) {
  const double X = p.p.x(), Z = p.p.z();
  if (!(Z > 0.0)) throw Error(ErrorCode::BehindCamera, "obstacle point must have Z > 0");
  Neighborhood n;
  n.cx = X;
  n.cz = Z;
  n.angle = std::atan2(X, Z);
  n.half_lateral = params.w0;
  n.half_depth = params.l0 + params.kappa * depth_sigma(Z, params, rig);
  n.min_pts = static_cast<int>(std::ceil(params.minpts0 + params.k * rig.fx / Z));
  return n;
}

namespace {

template <typename Neighbors>
std::vector<int> cluster_from_neighbors(const std::vector<ObstaclePoint>& points, const ClusterParams& params,
                                        const CameraRig& rig, Neighbors&& neighbors_of) {
  params.validate();
  rig.validate();
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> nbr(n);
  std::vector<unsigned char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Neighborhood box = adaptive_neighborhood(points[i], params, rig);
    nbr[i] = neighbors_of(box);
    core[i] = static_cast<int>(nbr[i].size()) >= box.min_pts;
  }
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (std::size_t j : nbr[i]) {
      if (core[j]) uf.unite(i, j);
    }
  }
  int count = 0;
  std::vector<int> label = canonical_labels(uf, core, count);
  std::vector<int> border(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (std::size_t j : nbr[i]) {
      if (!core[j] && border[j] < 0) border[j] = label[i];  // first claim is the lowest core index
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) label[i] = border[i];
  }
  return label;
}

}  // namespace

std::vector<int> adaptive_dbscan(const std::vector<ObstaclePoint>& points, const ClusterParams& params,
                                 const CameraRig& rig) {
  std::vector<StrRTree::Point> xz(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) xz[i] = {points[i].p.x(), points[i].p.z()};
  const StrRTree tree(std::move(xz));
  std::vector<std::size_t> candidates;
  return cluster_from_neighbors(points, params, rig, [&](const Neighborhood& box) {
    tree.query(box.bounds(), candidates);
    std::vector<std::size_t> out;
    for (std::size_t j : candidates) {
      if (box.contains(points[j].p.x(), points[j].p.z())) out.push_back(j);
    }
    return out;
  });
}

std::vector<int> dbscan_brute_force(const std::vector<ObstaclePoint>& points, const ClusterParams& params,
                                    const CameraRig& rig) {
  return cluster_from_neighbors(points, params, rig, [&](const Neighborhood& box) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (box.contains(points[j].p.x(), points[j].p.z())) out.push_back(j);
    }
    return out;
  });
}

}  // namespace rh
