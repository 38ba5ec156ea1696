#pragma once

// Ray-cast stereo renderer for a textured road with box obstacles, plus the
// canonical regression suites.

#include "rh/geometry.hpp"
#include "rh/raster.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rh {

struct BoxObstacle {
  double x = 0.0;       // lateral center, m
  double z = 10.0;      // depth of the box center, m
  double width = 0.5;   // along X
  double height = 0.3;  // above the road
  double depth = 0.3;   // along Z
  std::uint16_t id = 2;
};

// Pitch change of the road profile starting at depth z (positive: uphill).
struct RoadKink {
  double z = 0.0;
  double delta_pitch_deg = 0.0;
};

// Frequencies in cycles per pixel, measured at the depth of the textured
// surface. Road texture is laid out in perspective-normalized coordinates so
// it stays resolvable out to the horizon.
struct TextureBand {
  double lo = 0.02;
  double hi = 0.08;
};

struct SceneSpec {
  std::string name;
  CameraRig rig;
  double camera_height = 1.2;
  double road_pitch_deg = 0.0;
  std::vector<RoadKink> kinks;
  std::vector<BoxObstacle> obstacles;
  std::uint64_t texture_seed = 1;
  std::uint64_t noise_seed = 2;
  TextureBand band;
  double noise_sigma = 2.0;
  double mean_intensity = 2048.0;
  double contrast = 800.0;  // amplitude of each grating is contrast / 4
  double sky_intensity = 1200.0;
  int supersample = 2;
  // Free-space annotation: road within this depth, minus a band around obstacles.
  double free_space_range = 40.0;
  int free_space_margin = 32;  // px
};

struct GroundTruthBundle {
  IntensityImage left;
  IntensityImage right;
  DisparityMap gt_disparity;  // NaN where nothing is hit
  LabelMap labels;
  Mask free_space;  // 1 where labels == kFreeSpace
};

// Height of the road above the level plane through the camera's foot point at depth z.
double road_elevation(const SceneSpec& scene, double z);

// Throws InvalidArgument for invalid rigs, duplicate or reserved obstacle IDs
// and non-positive obstacle sizes.
void validate_scene(const SceneSpec& scene);

GroundTruthBundle render(const SceneSpec& scene, int threads = 1);

// Full-size rig: 2048 x 1024, fx = fy = 2300 px, B = 0.21 m.
CameraRig full_rig();

// "flat_easy" (3 scenes), "far_small" (4), "double_kink" (3).
std::vector<SceneSpec> scene_suite(const std::string& name);
std::vector<std::string> suite_names();

}  // namespace rh
