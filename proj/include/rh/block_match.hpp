#pragma once

#include "rh/geometry.hpp"
#include "rh/raster.hpp"

#include <Eigen/Core>

#include <vector>

namespace rh {

struct BlockMatchConfig {
  int window = 9;        // odd SAD window side
  int d_max = 128;       // largest integer disparity searched
  double lr_tol = 1.0;   // left-right consistency tolerance in px
  int threads = 1;
};

// Winner-take-all SAD matching with parabolic subpixel refinement and a
// left-right consistency check. Pixels whose best cost is tied, whose window
// leaves the image, or that fail the consistency check are invalid (NaN).
DisparityMap block_match(const IntensityImage& left, const IntensityImage& right,
                         const BlockMatchConfig& cfg = {});

struct CloudPoint {
  int x = 0;
  int y = 0;
  float d = 0.0f;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
};

// One triangulated point per valid disparity on the stride lattice.
std::vector<CloudPoint> disparity_to_cloud(const DisparityMap& dmap, const CameraRig& rig,
                                           int stride = 1);

}  // namespace rh
