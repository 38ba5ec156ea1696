#pragma once

// Rectified stereo geometry and the duality between planes with no lateral
// normal component and lines in (row, disparity) space.
//
// Conventions: camera frame X right, Y down, Z forward; image rows grow
// downward. A plane is the set of points P with n.P + D = 0, stored with
// D > 0 so the camera lies on the side the normal points to. The road seen
// from a camera at height h is n = (0, -1, 0), D = h.

#include <Eigen/Core>

#include <array>
#include <limits>

namespace rh {

inline constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct CameraRig {
  double fx = 0.0;
  double fy = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double baseline = 0.0;  // meters
  int width = 0;
  int height = 0;

  // Throws InvalidArgument when any of fx, fy, baseline, width, height is not positive.
  void validate() const;

  Eigen::Matrix3d K() const;

  // Rig matching an image reduced by 2x2 box averaging.
  CameraRig downsampled() const;

  double disparity_at_depth(double z) const { return fx * baseline / z; }
};

struct Plane3D {
  Eigen::Vector3d normal{0.0, 0.0, -1.0};
  double D = 1.0;  // meters

  static Plane3D ground(double camera_height) { return {{0.0, -1.0, 0.0}, camera_height}; }
  static Plane3D fronto_parallel(double depth) { return {{0.0, 0.0, -1.0}, depth}; }
};

// d(ybar) = a * ybar + b over a patch, with ybar = (yc - y) / (h / 2).
struct DisparityLine {
  double a = 0.0;
  double b = 0.0;
};

struct PatchSpec {
  int xc = 0;
  int yc = 0;
  int w = 15;
  int h = 15;

  int x_begin() const { return xc - w / 2; }
  int x_end() const { return xc + w / 2 + 1; }
  int y_begin() const { return yc - h / 2; }
  int y_end() const { return yc + h / 2 + 1; }
  int pixel_count() const { return w * h; }
  double ybar(double y) const { return (yc - y) / (0.5 * h); }
  double xbar(double x) const { return (x - xc) / (0.5 * w); }
  bool inside(int width, int height) const {
    return x_begin() >= 0 && y_begin() >= 0 && x_end() <= width && y_end() <= height;
  }
  // Throws InvalidArgument unless w, h >= 3, odd, and the patch lies inside the image.
  void validate(int width, int height) const;
};

// {(a, b) : b >= b_min, c_lo * b <= a <= c_hi * b}. An infinite constant
// means that side of the wedge is open (the hypothesis range reaches the
// plane orientation that contains the patch-center viewing ray).
struct FeasibleWedge {
  double c_lo = -std::numeric_limits<double>::infinity();
  double c_hi = std::numeric_limits<double>::infinity();
  double b_min = 1e-2;

  bool contains(const DisparityLine& line, double tol = 1e-9) const;
};

// Unit normal (0, -cos(pitch), sin(pitch)) rotated by yaw about the Y axis.
// pitch = 0 is level road, pitch = -90 deg faces the camera.
Eigen::Vector3d normal_from_angles(double pitch, double yaw = 0.0);
// Inverse of normal_from_angles for yaw = 0 normals.
double pitch_of(const Eigen::Vector3d& normal);

DisparityLine plane_to_disparity_line(const Plane3D& plane, const CameraRig& rig,
                                      const PatchSpec& patch);
Plane3D disparity_line_to_plane(const DisparityLine& line, const CameraRig& rig,
                                const PatchSpec& patch);

// Slope constant a / b for the plane orientation `pitch` at the patch row.
double wedge_constant(double pitch, const CameraRig& rig, const PatchSpec& patch);

FeasibleWedge wedge_for_hypothesis(const Plane3D& reference, double phi_max,
                                   const CameraRig& rig, const PatchSpec& patch,
                                   double b_min = 1e-2);

DisparityLine project_onto_wedge(const DisparityLine& point, const FeasibleWedge& wedge);

// H = K (R - t n^T / D) K^-1 with R = I and t = (-B, 0, 0).
Eigen::Matrix3d homography_from_plane(const Plane3D& plane, const CameraRig& rig);
Eigen::Vector2d apply_homography(const Eigen::Matrix3d& H, double x, double y);

Eigen::Vector3d triangulate(double x, double y, double d, const CameraRig& rig);

struct Projection {
  double x = 0.0;
  double y = 0.0;
  double d = 0.0;
};
Projection project(const Eigen::Vector3d& point, const CameraRig& rig);

}  // namespace rh
