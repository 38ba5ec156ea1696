#include "rh/hypothesis.hpp"
#include "rh/synth.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace rh;

namespace {

SceneSpec small_scene(std::vector<BoxObstacle> boxes = {}) {
  SceneSpec s;
  s.name = "t";
  s.rig = rh::test::small_rig();
  s.obstacles = std::move(boxes);
  return s;
}

}  // namespace

TEST(Render, EmptyRoadMatchesGroundDisparity) {
  SceneSpec s = small_scene();
  s.free_space_range = 1e9;
  const auto b = render(s);
  const auto& r = s.rig;
  int road = 0;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const float d = b.gt_disparity(x, y);
      if (y <= r.y0) {
        EXPECT_TRUE(std::isnan(d));
        EXPECT_EQ(b.labels(x, y), kUnlabeled);
        continue;
      }
      const double want = r.fx * r.baseline * (y - r.y0) / (r.fy * s.camera_height);
      ASSERT_NEAR(d, want, 1e-5 * want);
      EXPECT_EQ(b.labels(x, y), kFreeSpace);
      EXPECT_EQ(b.free_space(x, y), 1);
      ++road;
    }
  }
  EXPECT_EQ(road, r.width * (r.height - 128));
  for (double v : b.left.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 4095.0);
    EXPECT_EQ(v, std::round(v));
  }
}

TEST(Render, FreeSpaceRangeLimitsAnnotation) {
  SceneSpec s = small_scene();
  s.free_space_range = 20.0;
  const auto b = render(s);
  // road depth at row y is H fy / (y - y0)
  for (int y = 130; y < 256; ++y) {
    const double z = s.camera_height * s.rig.fy / (y - s.rig.y0);
    EXPECT_EQ(b.labels(256, y), z <= 20.0 ? kFreeSpace : kUnlabeled) << y;
  }
}

TEST(Render, BoxLabelsDisparityAndMargin) {
  const BoxObstacle box{0.0, 10.0, 1.0, 0.5, 0.4, 5};
  SceneSpec s = small_scene({box});
  const auto b = render(s);
  const auto& r = s.rig;
  // front face at Z = 9.8 spans X in [-0.5, 0.5], Y in [0.7, 1.2]
  const double zf = 9.8;
  const int u0 = static_cast<int>(std::ceil(r.x0 - 0.5 * r.fx / zf)), u1 = static_cast<int>(std::floor(r.x0 + 0.5 * r.fx / zf));
  const int v0 = static_cast<int>(std::ceil(r.y0 + 0.7 * r.fy / zf));
  const int v1 = static_cast<int>(std::floor(r.y0 + 1.2 * r.fy / zf));
  int face = 0;
  for (int y = v0; y <= v1; ++y) {
    for (int x = u0; x <= u1; ++x) {
      EXPECT_EQ(b.labels(x, y), 5);
      EXPECT_NEAR(b.gt_disparity(x, y), r.fx * r.baseline / zf, 1e-4);
      ++face;
    }
  }
  EXPECT_GT(face, 1000);
  // no free space within the margin of any obstacle pixel
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      EXPECT_EQ(b.free_space(x, y), b.labels(x, y) == kFreeSpace ? 1 : 0);
      if (b.labels(x, y) != kFreeSpace) continue;
      const bool near_box = x >= u0 - 32 && x <= u1 + 32 && y >= v0 - 32 && y <= v1 + 32;
      EXPECT_FALSE(near_box) << x << "," << y;
    }
  }
}

TEST(Render, Deterministic) {
  SceneSpec s = small_scene({{0.3, 12.0, 0.5, 0.3, 0.3, 2}});
  const auto a = render(s, 1);
  const auto b = render(s, 3);
  EXPECT_TRUE(a.left == b.left);
  EXPECT_TRUE(a.right == b.right);
  EXPECT_TRUE(a.labels == b.labels);
  for (std::size_t i = 0; i < a.gt_disparity.size(); ++i) {
    const float u = a.gt_disparity.data()[i], v = b.gt_disparity.data()[i];
    EXPECT_TRUE((std::isnan(u) && std::isnan(v)) || u == v);
  }
  s.noise_seed += 1;
  const auto c = render(s, 1);
  EXPECT_FALSE(a.left == c.left);
  EXPECT_TRUE(a.labels == c.labels);
}

TEST(Render, PhotoConsistentRoad) {
  SceneSpec s = small_scene();
  s.noise_sigma = 0.0;
  const auto b = render(s);
  double sq = 0.0;
  int n = 0;
  std::vector<double> diff;
  for (int y = 140; y < s.rig.height; ++y) {
    for (int x = 40; x < s.rig.width; ++x) {
      const double xr = x - b.gt_disparity(x, y);
      if (xr < 1.0) continue;
      const double e = sample_2d(b.right, xr, y, Interpolation::kCubic).value - b.left(x, y);
      sq += e * e;
      ++n;
      diff.push_back(std::abs(bilinear_sample(b.right, xr, y) - b.left(x, y)));
    }
  }
  EXPECT_LT(std::sqrt(sq / n), 1.0);
  // bilinear is coarser but still far below the texture contrast
  std::sort(diff.begin(), diff.end());
  EXPECT_LT(diff[diff.size() / 2], 0.02 * s.contrast);
}

TEST(Render, RoadTexturePassesTextureGate) {
  SceneSpec s = small_scene();
  const auto b = render(s);
  DetectorConfig cfg;
  cfg.stride = 10;
  const auto grid = make_patch_grid(s.rig.width, s.rig.height, 15, 15, cfg.stride);
  const auto decisions = detect_frame(b.left, b.right, b.gt_disparity, grid, s.rig, cfg, Method::kFpht);
  int road = 0, textured = 0;
  for (const auto& d : decisions) {
    if (d.patch.y_begin() < 150 || d.fit_f.pixels == 0) continue;
    ++road;
    textured += texture_score(d.fit_f) >= cfg.lambda_min;
  }
  ASSERT_GT(road, 300);
  EXPECT_GE(textured, 0.95 * road);
}

TEST(Road, ElevationWithKinks) {
  SceneSpec s = small_scene();
  EXPECT_EQ(road_elevation(s, 30.0), 0.0);
  s.kinks = {{15.0, 4.0}, {25.0, -4.0}};
  EXPECT_EQ(road_elevation(s, 10.0), 0.0);
  EXPECT_NEAR(road_elevation(s, 20.0), 5.0 * std::tan(deg2rad(4.0)), 1e-12);
  EXPECT_NEAR(road_elevation(s, 40.0), 10.0 * std::tan(deg2rad(4.0)), 1e-12);
}

TEST(Scene, Validation) {
  EXPECT_NO_THROW(validate_scene(small_scene({{0, 10, 1, 1, 1, 2}, {1, 12, 1, 1, 1, 3}})));
  EXPECT_THROW(validate_scene(small_scene({{0, 10, 1, 1, 1, 2}, {1, 12, 1, 1, 1, 2}})), Error);
  EXPECT_THROW(validate_scene(small_scene({{0, 10, 1, 1, 1, 1}})), Error);
  EXPECT_THROW(validate_scene(small_scene({{0, 10, 0, 1, 1, 2}})), Error);
  SceneSpec bad = small_scene();
  bad.rig.fx = 0.0;
  EXPECT_THROW(validate_scene(bad), Error);
}

TEST(Suites, SizesAndSmallObstacle) {
  EXPECT_EQ(scene_suite("flat_easy").size(), 3u);
  EXPECT_EQ(scene_suite("far_small").size(), 4u);
  EXPECT_EQ(scene_suite("double_kink").size(), 3u);
  EXPECT_THROW(scene_suite("nope"), Error);
  bool five_cm_at_20m = false;
  for (const auto& s : scene_suite("far_small")) {
    EXPECT_EQ(s.rig.width, 2048);
    EXPECT_EQ(s.rig.fx, 2300.0);
    validate_scene(s);
    for (const auto& o : s.obstacles) five_cm_at_20m |= o.height == 0.05 && o.z == 20.0;
  }
  EXPECT_TRUE(five_cm_at_20m);
  for (const auto& s : scene_suite("double_kink")) EXPECT_EQ(s.kinks.size(), 2u);
}
