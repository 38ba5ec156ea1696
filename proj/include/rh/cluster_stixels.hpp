#pragma once

// Cluster-Stixels: distance-adaptive DBSCAN in the ground plane followed by
// fixed-width column splitting and variance-driven vertical splitting.

#include "rh/geometry.hpp"
#include "rh/raster.hpp"
#include "rh/str_rtree.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace rh {

enum class PointSource { kPht, kFpht, kPc };

const char* to_string(PointSource s);
PointSource parse_point_source(const std::string& name);

struct ObstaclePoint {
  int x = 0;
  int y = 0;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  double d = 0.0;
  PointSource source = PointSource::kFpht;
  int cluster = -1;  // preset partition for PC sources
};

struct ClusterParams {
  int stixel_width = 8;     // px
  double w0 = 0.3;          // lateral half-width, m
  double l0 = 0.3;          // depth half-extent base, m
  double kappa = 3.0;
  double sigma_d = 0.5;     // px
  double minpts0 = 4.0;
  double k = 0.02;          // m
  double var_thresh = 4.0;  // px^2
  int min_split_height = 4; // px

  void validate() const;
};

// Inclusive pixel bounds: columns [u, u + width), rows [v_top, v_bottom].
struct CStix {
  int u = 0;
  int width = 0;
  int v_top = 0;
  int v_bottom = 0;
  double median_disparity = 0.0;
  double z = 0.0;
  int cluster = -1;

  bool operator==(const CStix&) const = default;
};

// Rectangle in (X, Z) aligned with the viewing ray through the point.
struct Neighborhood {
  double cx = 0.0, cz = 0.0;
  double angle = 0.0;         // atan2(X, Z)
  double half_lateral = 0.0;  // w0
  double half_depth = 0.0;    // l0 + kappa * sigma_Z
  int min_pts = 0;

  bool contains(double x, double z) const;
  Aabb bounds() const;
};

double depth_sigma(double z, const ClusterParams& params, const CameraRig& rig);
Neighborhood adaptive_neighborhood(const ObstaclePoint& p, const ClusterParams& params,
                                   const CameraRig& rig);

// Cluster ids 0..k-1 ordered by their smallest core point index, -1 for noise.
// A point is core when its own neighborhood holds at least min_pts points
// (itself included); two cores connect when either lies in the other's
// neighborhood; a border point joins the cluster of the lowest-indexed core
// whose neighborhood contains it.
std::vector<int> adaptive_dbscan(const std::vector<ObstaclePoint>& points, const ClusterParams& params,
                                 const CameraRig& rig);
std::vector<int> dbscan_brute_force(const std::vector<ObstaclePoint>& points, const ClusterParams& params,
                                    const CameraRig& rig);

// Fixed-width column bins starting at the leftmost member column.
std::vector<CStix> split_horizontally(const std::vector<ObstaclePoint>& points,
                                      const std::vector<std::size_t>& members, int width,
                                      const CameraRig& rig, int cluster = -1);

// Halves each stixel at its middle row while the variance of the valid
// disparities inside it exceeds var_thresh and it is at least
// min_split_height rows tall.
std::vector<CStix> split_vertically(const std::vector<CStix>& stixels, const DisparityMap& dmap,
                                    double var_thresh, const CameraRig& rig, int min_split_height = 4);

std::vector<CStix> midlevel_rep(const std::vector<ObstaclePoint>& points, const DisparityMap& dmap,
                                const ClusterParams& params, const CameraRig& rig);

}  // namespace rh
