#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include "rh/geometry.hpp"
#include "rh/raster.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace rh::test {

inline CameraRig full_rig() { return {2300.0, 2300.0, 1023.5, 511.5, 0.21, 2048, 1024}; }
inline CameraRig small_rig() { return {575.0, 575.0, 255.5, 127.5, 0.21, 512, 256}; }

// Line through the plane's disparities along the patch column, found by
// intersecting each pixel ray with the plane and least-squares fitting
// d against ybar.
inline DisparityLine projection_fit(const Plane3D& plane, const CameraRig& rig, const PatchSpec& patch) {
  Eigen::MatrixXd A(patch.h, 2);
  Eigen::VectorXd d(patch.h);
  for (int i = 0; i < patch.h; ++i) {
    const double y = patch.y_begin() + i;
    const Eigen::Vector3d ray((patch.xc - rig.x0) / rig.fx, (y - rig.y0) / rig.fy, 1.0);
    const double z = -plane.D / plane.normal.dot(ray);
    A(i, 0) = (patch.yc - y) / (0.5 * patch.h);
    A(i, 1) = 1.0;
    d(i) = rig.fx * rig.baseline / z;
  }
  const Eigen::Vector2d ab = A.colPivHouseholderQr().solve(d);
  return {ab(0), ab(1)};
}

// Smooth random image: a few low-frequency gratings on a mid-gray level.
inline IntensityImage smooth_image(int w, int h, std::uint32_t seed, double amp = 600.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> f(0.02, 0.09), ph(0.0, 2.0 * kPi), ang(0.0, kPi);
  struct G {
    double kx, ky, phase;
  };
  std::vector<G> g;
  for (int i = 0; i < 5; ++i) {
    const double fr = f(rng), a = ang(rng);
    g.push_back({2.0 * kPi * fr * std::cos(a), 2.0 * kPi * fr * std::sin(a), ph(rng)});
  }
  IntensityImage img(w, h, 0.0, 4095);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 2048.0;
      for (const auto& q : g) v += amp / 5.0 * std::sin(q.kx * x + q.ky * y + q.phase);
      img(x, y) = v;
    }
  }
  return img;
}

// Right view of a fronto-parallel surface with disparity d: Ir(x) = Il(x + d),
// evaluated from the same analytic texture.
template <typename Fn>
IntensityImage render_fn(int w, int h, Fn&& fn) {
  IntensityImage img(w, h, 0.0, 4095);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img(x, y) = fn(static_cast<double>(x), static_cast<double>(y));
  }
  return img;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rh_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rh::test
