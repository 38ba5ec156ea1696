#include "rh/error.hpp"
#include "rh/geometry.hpp"
#include "rh/hypothesis.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rh;
using rh::test::full_rig;
using rh::test::projection_fit;

namespace {

PatchSpec center_patch(const CameraRig& rig, int yc, int h = 15) {
  return {static_cast<int>(rig.x0), yc, 15, h};
}

bool throws_code(ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// Nearest point of the closed wedge polygon, from its three boundary pieces.
DisparityLine nearest_in_wedge(const DisparityLine& p, const FeasibleWedge& w) {
  const Eigen::Vector2d q(p.a, p.b);
  const Eigen::Vector2d lo(w.c_lo * w.b_min, w.b_min), hi(w.c_hi * w.b_min, w.b_min);
  auto on_segment = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d d = b - a;
    const double t = std::clamp((q - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return Eigen::Vector2d(a + t * d);
  };
  auto on_ray = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& dir) {
    const double t = std::max(0.0, (q - a).dot(dir) / dir.squaredNorm());
    return Eigen::Vector2d(a + t * dir);
  };
  const Eigen::Vector2d cands[3] = {on_segment(lo, hi), on_ray(lo, {w.c_lo, 1.0}), on_ray(hi, {w.c_hi, 1.0})};
  Eigen::Vector2d best = cands[0];
  for (const auto& c : cands) {
    if ((c - q).norm() < (best - q).norm()) best = c;
  }
  return {best.x(), best.y()};
}

}  // namespace

TEST(PlaneToLine, FrontoParallelAtTenMeters) {
  const CameraRig rig = full_rig();
  const PatchSpec patch = center_patch(rig, 700);
  const auto line = plane_to_disparity_line(Plane3D::fronto_parallel(10.0), rig, patch);
  const auto oracle = projection_fit(Plane3D::fronto_parallel(10.0), rig, patch);
  EXPECT_NEAR(line.a, 0.0, 1e-12);
  EXPECT_NEAR(line.b, 48.3, 1e-9);
  EXPECT_NEAR(line.b, oracle.b, 1e-9);
}

TEST(PlaneToLine, GroundPlaneSlope) {
  const CameraRig rig = full_rig();
  for (int h : {7, 15, 31}) {
    const PatchSpec patch = center_patch(rig, 800, h);
    const auto line = plane_to_disparity_line(Plane3D::ground(1.2), rig, patch);
    const auto oracle = projection_fit(Plane3D::ground(1.2), rig, patch);
    EXPECT_NEAR(line.a, -(h / 2.0) * 0.175, 1e-9);
    EXPECT_NEAR(line.a, oracle.a, 1e-9);
    EXPECT_NEAR(line.b, oracle.b, 1e-9);
  }
}

TEST(PlaneToLine, ZeroVerticalNormalGivesZeroSlope) {
  const CameraRig rig = full_rig();
  const Plane3D p{{0.0, 0.0, -1.0}, 23.0};
  EXPECT_EQ(plane_to_disparity_line(p, rig, center_patch(rig, 300)).a, 0.0);
}

TEST(PlaneToLine, Errors) {
  const CameraRig rig = full_rig();
  const PatchSpec patch = center_patch(rig, 800);
  Plane3D tilted{Eigen::Vector3d(0.1, -1.0, 0.0).normalized(), 1.2};
  EXPECT_TRUE(throws_code(ErrorCode::NonFphtPlane, [&] { plane_to_disparity_line(tilted, rig, patch); }));
  // ground plane seen above the horizon
  EXPECT_TRUE(throws_code(ErrorCode::BehindCamera,
                          [&] { plane_to_disparity_line(Plane3D::ground(1.2), rig, center_patch(rig, 200)); }));
}

TEST(LineToPlane, InverseOfFrontoParallel) {
  const CameraRig rig = full_rig();
  const auto plane = disparity_line_to_plane({0.0, 48.3}, rig, center_patch(rig, 700));
  EXPECT_NEAR(plane.normal.x(), 0.0, 1e-12);
  EXPECT_NEAR(plane.normal.y(), 0.0, 1e-12);
  EXPECT_NEAR(plane.normal.z(), -1.0, 1e-12);
  EXPECT_NEAR(plane.D, 10.0, 1e-9);
}

TEST(LineToPlane, DegenerateOffset) {
  const CameraRig rig = full_rig();
  EXPECT_TRUE(throws_code(ErrorCode::DegenerateLine,
                          [&] { disparity_line_to_plane({0.0, 0.0}, rig, center_patch(rig, 700)); }));
  EXPECT_TRUE(throws_code(ErrorCode::DegenerateLine,
                          [&] { disparity_line_to_plane({0.0, -1e-300}, rig, center_patch(rig, 700)); }));
}

TEST(Duality, RoundTripOnRandomPlanes) {
  const CameraRig rig = full_rig();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pitch(-kPi, kPi), dist(0.5, 80.0);
  std::uniform_int_distribution<int> row(8, rig.height - 9);
  int checked = 0;
  while (checked < 1000) {
    const PatchSpec patch = center_patch(rig, row(rng));
    const Plane3D plane{normal_from_angles(pitch(rng)), dist(rng)};
    DisparityLine line;
    try {
      line = plane_to_disparity_line(plane, rig, patch);
    } catch (const Error&) {
      continue;  // not visible at this patch
    }
    const Plane3D back = disparity_line_to_plane(line, rig, patch);
    EXPECT_LT((back.normal - plane.normal).norm(), 1e-9);
    EXPECT_LT(std::abs(back.D - plane.D) / plane.D, 1e-9);
    const DisparityLine again = plane_to_disparity_line(back, rig, patch);
    EXPECT_LT(std::abs(again.a - line.a), 1e-9 * (1.0 + std::abs(line.a)));
    EXPECT_LT(std::abs(again.b - line.b), 1e-9 * line.b);
    ++checked;
  }
}

TEST(Duality, HomographyMatchesRowWarp) {
  const CameraRig rig = full_rig();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pitch(-1.5, 0.3), dist(1.0, 40.0);
  std::uniform_int_distribution<int> row(600, 1000), col(20, 2020);
  int checked = 0;
  while (checked < 200) {
    const PatchSpec patch{col(rng), row(rng), 15, 15};
    const Plane3D plane{normal_from_angles(pitch(rng)), dist(rng)};
    DisparityLine line;
    try {
      line = plane_to_disparity_line(plane, rig, patch);
    } catch (const Error&) {
      continue;
    }
    const Eigen::Matrix3d H = homography_from_plane(plane, rig);
    for (int y = patch.y_begin(); y < patch.y_end(); ++y) {
      for (int x = patch.x_begin(); x < patch.x_end(); ++x) {
        const Eigen::Vector2d h = apply_homography(H, x, y);
        const Eigen::Vector2d r = fpht_warp(x, y, line, patch);
        ASSERT_LT((h - r).norm(), 1e-6);
      }
    }
    ++checked;
  }
}

TEST(Homography, PlaneAtInfinityIsIdentity) {
  const Eigen::Matrix3d H = homography_from_plane({{0.0, 0.0, -1.0}, 1e15}, full_rig());
  EXPECT_LT((H - Eigen::Matrix3d::Identity()).norm(), 1e-9);
}

TEST(Homography, FrontoParallelIsShift) {
  const CameraRig rig = full_rig();
  const Eigen::Matrix3d H = homography_from_plane(Plane3D::fronto_parallel(10.0), rig);
  for (auto [x, y] : {std::pair{100.0, 50.0}, {1500.0, 900.0}, {1023.5, 511.5}}) {
    const auto p = apply_homography(H, x, y);
    EXPECT_NEAR(x - p.x(), rig.fx * rig.baseline / 10.0, 1e-9);
    EXPECT_NEAR(p.y(), y, 1e-9);
  }
}

TEST(Homography, GroundPreservesRows) {
  const CameraRig rig = full_rig();
  const Eigen::Matrix3d H = homography_from_plane(Plane3D::ground(1.2), rig);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(0, 2047), uy(520, 1023);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng), y = uy(rng);
    EXPECT_NEAR(apply_homography(H, x, y).y(), y, 1e-9);
  }
}

TEST(Wedge, FreeSpaceContainsPitchedRoads) {
  const CameraRig rig = full_rig();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pitch(-deg2rad(25.0), deg2rad(25.0)), height(0.5, 3.0);
  std::uniform_int_distribution<int> row(560, 1010);
  for (int i = 0; i < 500; ++i) {
    const PatchSpec patch = center_patch(rig, row(rng));
    const Plane3D plane{normal_from_angles(pitch(rng)), height(rng)};
    DisparityLine line;
    try {
      line = plane_to_disparity_line(plane, rig, patch);
    } catch (const Error&) {
      continue;
    }
    if (line.b < 1e-2) continue;
    const auto wedge = wedge_for_hypothesis(Plane3D::ground(1.2), deg2rad(25.0), rig, patch);
    EXPECT_TRUE(wedge.contains(line, 1e-9)) << "pitch " << rad2deg(pitch_of(plane.normal));
  }
}

TEST(Wedge, ConstantsMatchRotatedNormals) {
  const CameraRig rig = full_rig();
  for (int yc : {700, 850, 1000}) {
    const PatchSpec patch = center_patch(rig, yc);
    const double phi = deg2rad(3.0);
    const auto wedge = wedge_for_hypothesis(Plane3D::ground(1.2), phi, rig, patch);
    const auto lo = projection_fit({normal_from_angles(-phi), 1.0}, rig, patch);
    const auto hi = projection_fit({normal_from_angles(phi), 1.0}, rig, patch);
    EXPECT_NEAR(wedge.c_hi, lo.a / lo.b, 1e-9);
    EXPECT_NEAR(wedge.c_lo, hi.a / hi.b, 1e-9);
    EXPECT_LT(wedge.c_lo, wedge.c_hi);
  }
}

TEST(Wedge, ZeroDeviationCollapses) {
  const CameraRig rig = full_rig();
  const auto wedge = wedge_for_hypothesis(Plane3D::ground(1.2), 0.0, rig, center_patch(rig, 800));
  EXPECT_NEAR(wedge.c_lo, wedge.c_hi, 1e-15);
  const auto tiny = wedge_for_hypothesis(Plane3D::ground(1.2), 1e-9, rig, center_patch(rig, 800));
  EXPECT_NEAR(tiny.c_lo, tiny.c_hi, 1e-9);
}

TEST(Wedge, ObstacleSymmetricAtPrincipalRow) {
  CameraRig rig = full_rig();
  rig.y0 = 511.0;
  const PatchSpec patch = center_patch(rig, 511);
  const auto wedge = wedge_for_hypothesis(Plane3D::fronto_parallel(10.0), deg2rad(45.0), rig, patch);
  EXPECT_NEAR(wedge.c_lo, -wedge.c_hi, 1e-15);
  // nZ / nY = +-1 on the boundaries: |a / b| = (h / 2) / fy
  EXPECT_NEAR(wedge.c_hi, 7.5 / rig.fy, 1e-15);
}

TEST(Projection, InteriorUnchanged) {
  FeasibleWedge w{-0.1, 0.2, 1e-2};
  const DisparityLine p{0.5, 10.0};
  const auto q = project_onto_wedge(p, w);
  EXPECT_EQ(q.a, p.a);
  EXPECT_EQ(q.b, p.b);
}

TEST(Projection, OntoBAxis) {
  FeasibleWedge w{-1.0, 0.0, 1e-2};
  const auto q = project_onto_wedge({1.0, 1.0}, w);
  EXPECT_NEAR(q.a, 0.0, 1e-15);
  EXPECT_NEAR(q.b, 1.0, 1e-15);
}

TEST(Projection, RandomExteriorPointsAgainstNearestPoint) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> c(-0.5, 0.5), u(-50.0, 50.0);
  int exterior = 0;
  while (exterior < 1000) {
    double c1 = c(rng), c2 = c(rng);
    if (c1 > c2) std::swap(c1, c2);
    const FeasibleWedge w{c1, c2, 0.5};
    const DisparityLine p{u(rng), u(rng)};
    if (w.contains(p, 0.0)) continue;
    ++exterior;
    const auto q = project_onto_wedge(p, w);
    const auto oracle = nearest_in_wedge(p, w);
    EXPECT_TRUE(w.contains(q, 1e-12));
    EXPECT_NEAR(q.a, oracle.a, 1e-9);
    EXPECT_NEAR(q.b, oracle.b, 1e-9);
    const auto twice = project_onto_wedge(q, w);
    EXPECT_NEAR(twice.a, q.a, 1e-12);
    EXPECT_NEAR(twice.b, q.b, 1e-12);
  }
}

TEST(Projection, OpenSideProjectsToFloor) {
  FeasibleWedge w;  // both sides open
  w.b_min = 0.5;
  const auto q = project_onto_wedge({3.0, -2.0}, w);
  EXPECT_EQ(q.a, 3.0);
  EXPECT_EQ(q.b, 0.5);
}

TEST(Triangulate, PrincipalPoint) {
  const CameraRig rig = full_rig();
  const auto p = triangulate(rig.x0, rig.y0, 48.3, rig);
  EXPECT_NEAR(p.x(), 0.0, 1e-12);
  EXPECT_NEAR(p.y(), 0.0, 1e-12);
  EXPECT_NEAR(p.z(), 10.0, 1e-12);
}

TEST(Triangulate, DepthIdentityAndErrors) {
  const CameraRig rig = full_rig();
  for (double z : {0.7, 3.0, 17.5, 120.0}) {
    const double d = rig.fx * rig.baseline / z;
    EXPECT_LT(std::abs(triangulate(10.0, 20.0, d, rig).z() - z) / z, 1e-9);
  }
  EXPECT_TRUE(throws_code(ErrorCode::NonPositiveDisparity, [&] { triangulate(1, 1, 0.0, rig); }));
  EXPECT_TRUE(throws_code(ErrorCode::NonPositiveDisparity, [&] { triangulate(1, 1, -2.0, rig); }));
}

TEST(Triangulate, InvertsProjection) {
  const CameraRig rig = full_rig();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> xy(-5.0, 5.0), z(0.5, 60.0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d P(xy(rng), xy(rng), z(rng));
    const auto pr = project(P, rig);
    EXPECT_LT((triangulate(pr.x, pr.y, pr.d, rig) - P).norm(), 1e-9 * (1.0 + P.norm()));
  }
}

TEST(CameraRig, Validation) {
  CameraRig bad = full_rig();
  bad.baseline = 0.0;
  EXPECT_TRUE(throws_code(ErrorCode::InvalidArgument, [&] { bad.validate(); }));
  EXPECT_NO_THROW(full_rig().validate());
}
