#pragma once

// Glue shared by the sweep harness and the command line tool.

#include "rh/block_match.hpp"
#include "rh/cluster_stixels.hpp"
#include "rh/hypothesis.hpp"
#include "rh/point_compat.hpp"
#include "rh/raster.hpp"

#include <vector>

namespace rh {

// Repeated 2x2 reduction; factor must be a power of two.
IntensityImage reduce_image(const IntensityImage& img, int factor);
DisparityMap reduce_disparity(const DisparityMap& map, int factor);
CameraRig reduce_rig(const CameraRig& rig, int factor);

// One obstacle point per obstacle patch, at the patch center with the
// obstacle fit's center disparity.
std::vector<ObstaclePoint> obstacle_points(const std::vector<PatchDecision>& decisions,
                                           const std::vector<Verdict>& verdicts, const CameraRig& rig);
std::vector<ObstaclePoint> obstacle_points(const std::vector<PatchDecision>& decisions, const CameraRig& rig);
// Flagged PC points keep their cluster ids.
std::vector<ObstaclePoint> obstacle_points(const std::vector<CloudPoint>& cloud, const PcResult& pc);

}  // namespace rh
