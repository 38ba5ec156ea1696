#include "rh/geometry.hpp"

#include "rh/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace rh {

void CameraRig::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !(baseline > 0.0) || width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "camera rig requires positive fx, fy, baseline and size");
  }
}

Eigen::Matrix3d CameraRig::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, x0, 0.0, fy, y0, 0.0, 0.0, 1.0;
  return k;
}

CameraRig CameraRig::downsampled() const {
  // Pixel i of the reduced image is centered on full-resolution coordinate 2i + 0.5.
  CameraRig r = *this;
  r.fx = fx / 2.0;
  r.fy = fy / 2.0;
  r.x0 = (x0 - 0.5) / 2.0;
  r.y0 = (y0 - 0.5) / 2.0;
  r.width = width / 2;
  r.height = height / 2;
  return r;
}

void PatchSpec::validate(int width, int height) const {
  if (w < 3 || h < 3 || w % 2 == 0 || h % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "patch size must be odd and >= 3, got " + std::to_string(w) + "x" + std::to_string(h));
  }
  if (!inside(width, height)) {
    throw Error(ErrorCode::OutOfBounds, "patch centered at (" + std::to_string(xc) + ", " +
                                            std::to_string(yc) + ") leaves the image");
  }
}

bool FeasibleWedge::contains(const DisparityLine& line, double tol) const {
  const double scale = 1.0 + std::abs(line.a) + std::abs(line.b);
  if (line.b < b_min - tol * scale) return false;
  if (std::isfinite(c_hi) && line.a > c_hi * line.b + tol * scale) return false;
  if (std::isfinite(c_lo) && line.a < c_lo * line.b - tol * scale) return false;
  return true;
}

Eigen::Vector3d normal_from_angles(double pitch, double yaw) {
  return {std::sin(yaw), -std::cos(yaw) * std::cos(pitch), std::cos(yaw) * std::sin(pitch)};
}

double pitch_of(const Eigen::Vector3d& normal) { return std::atan2(normal.z(), -normal.y()); }

DisparityLine plane_to_disparity_line(const Plane3D& plane, const CameraRig& rig,
                                      const PatchSpec& patch) {
  if (plane.normal.x() != 0.0) {
    throw Error(ErrorCode::NonFphtPlane, "plane has a lateral normal component");
  }
  if (plane.D == 0.0) throw Error(ErrorCode::InvalidArgument, "plane passes through the camera");
  const double ny = plane.normal.y();
  const double nz = plane.normal.z();
  const double k = rig.baseline / plane.D;
  // Disparity along the patch column as a function of the image row y:
  //   d(y) = -(B/D) * (ny * (y - y0) * fx/fy + nz * fx)
  const double per_row = -k * ny * rig.fx / rig.fy;
  const double b = -k * (ny * (patch.yc - rig.y0) * rig.fx / rig.fy + nz * rig.fx);
  if (!(b > 0.0)) {
    throw Error(ErrorCode::BehindCamera, "plane is not in front of the camera at the patch center");
  }
  // ybar runs upward in units of half the patch height.
  return {-0.5 * patch.h * per_row, b};
}

Plane3D disparity_line_to_plane(const DisparityLine& line, const CameraRig& rig,
                                const PatchSpec& patch) {
  if (!(line.b > 0.0) || !std::isfinite(line.a) || !std::isfinite(line.b)) {
    throw Error(ErrorCode::DegenerateLine, "disparity offset must be positive and finite");
  }
  const double per_row = -line.a / (0.5 * patch.h);
  // (u, v) = (ny, nz) / D
  const double u = -per_row * rig.fy / (rig.baseline * rig.fx);
  const double v = -line.b / (rig.baseline * rig.fx) - u * (patch.yc - rig.y0) / rig.fy;
  const double norm = std::hypot(u, v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::DegenerateLine, "disparity line does not describe a finite plane");
  }
  Plane3D plane;
  plane.D = 1.0 / norm;
  plane.normal = Eigen::Vector3d(0.0, u / norm, v / norm);
  return plane;
}

double wedge_constant(double pitch, const CameraRig& rig, const PatchSpec& patch) {
  const double dy = patch.yc - rig.y0;
  const double c = std::cos(pitch);
  const double s = std::sin(pitch);
  return -0.5 * patch.h * c / (dy * c - rig.fy * s);
}

FeasibleWedge wedge_for_hypothesis(const Plane3D& reference, double phi_max, const CameraRig& rig,
                                   const PatchSpec& patch, double b_min) {
  if (!(phi_max >= 0.0) || !(phi_max < kPi / 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "bound angle must lie in [0, 90) degrees");
  }
  if (reference.normal.x() != 0.0) {
    throw Error(ErrorCode::NonFphtPlane, "reference plane has a lateral normal component");
  }
  const double ref = pitch_of(reference.normal);
  // A plane with D > 0 is seen at the patch center iff
  //   g(pitch) = dy cos(pitch) - fy sin(pitch) = R cos(pitch + psi) > 0.
  // a/b decreases monotonically in pitch over that interval and diverges at its ends.
  const double dy = patch.yc - rig.y0;
  const double psi = std::atan2(rig.fy, dy);
  const double center = -psi + 2.0 * kPi * std::round((ref + psi) / (2.0 * kPi));
  const double vis_lo = center - kPi / 2.0;
  const double vis_hi = center + kPi / 2.0;
  const double lo = ref - phi_max;
  const double hi = ref + phi_max;
  if (hi <= vis_lo || lo >= vis_hi) {
    throw Error(ErrorCode::SingularReference, "no plane of the hypothesis is visible at the patch");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  FeasibleWedge wedge;
  wedge.b_min = b_min;
  wedge.c_hi = lo <= vis_lo ? inf : wedge_constant(lo, rig, patch);
  wedge.c_lo = hi >= vis_hi ? -inf : wedge_constant(hi, rig, patch);
  return wedge;
}

namespace {

struct HalfPlane {
  Eigen::Vector2d n;  // n . p <= off
  double off;
};

}  // namespace

DisparityLine project_onto_wedge(const DisparityLine& point, const FeasibleWedge& wedge) {
  if (wedge.contains(point, 0.0)) return point;

  std::array<HalfPlane, 3> planes;
  int count = 0;
  planes[count++] = {{0.0, -1.0}, -wedge.b_min};
  if (std::isfinite(wedge.c_hi)) planes[count++] = {{1.0, -wedge.c_hi}, 0.0};
  if (std::isfinite(wedge.c_lo)) planes[count++] = {{-1.0, wedge.c_lo}, 0.0};

  const Eigen::Vector2d p(point.a, point.b);
  auto feasible = [&](const Eigen::Vector2d& q) {
    const double scale = 1.0 + q.cwiseAbs().sum();
    for (int i = 0; i < count; ++i) {
      if (planes[i].n.dot(q) > planes[i].off + 1e-12 * scale * planes[i].n.norm()) return false;
    }
    return true;
  };

  Eigen::Vector2d best = p;
  double best_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::Vector2d& q) {
    if (!feasible(q)) return;
    const double dist = (q - p).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = q;
    }
  };

  for (int i = 0; i < count; ++i) {
    const auto& hp = planes[i];
    consider(p - (hp.n.dot(p) - hp.off) / hp.n.squaredNorm() * hp.n);
  }
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      Eigen::Matrix2d A;
      A << planes[i].n.transpose(), planes[j].n.transpose();
      const double det = A.determinant();
      if (std::abs(det) < 1e-15) continue;
      consider(A.inverse() * Eigen::Vector2d(planes[i].off, planes[j].off));
    }
  }
  return {best.x(), best.y()};
}

Eigen::Matrix3d homography_from_plane(const Plane3D& plane, const CameraRig& rig) {
  if (plane.D == 0.0) throw Error(ErrorCode::InvalidArgument, "plane passes through the camera");
  const Eigen::Matrix3d K = rig.K();
  const Eigen::Vector3d t(-rig.baseline, 0.0, 0.0);
  const Eigen::Matrix3d M = Eigen::Matrix3d::Identity() - t * plane.normal.transpose() / plane.D;
  return K * M * K.inverse();
}

Eigen::Vector2d apply_homography(const Eigen::Matrix3d& H, double x, double y) {
  const Eigen::Vector3d u = H * Eigen::Vector3d(x, y, 1.0);
  return {u.x() / u.z(), u.y() / u.z()};
}

Eigen::Vector3d triangulate(double x, double y, double d, const CameraRig& rig) {
  if (!(d > 0.0)) throw Error(ErrorCode::NonPositiveDisparity, "cannot triangulate d <= 0");
  const double z = rig.fx * rig.baseline / d;
  return {(x - rig.x0) * z / rig.fx, (y - rig.y0) * z / rig.fy, z};
}

Projection project(const Eigen::Vector3d& point, const CameraRig& rig) {
  if (!(point.z() > 0.0)) throw Error(ErrorCode::BehindCamera, "point is behind the camera");
  return {rig.x0 + rig.fx * point.x() / point.z(), rig.y0 + rig.fy * point.y() / point.z(),
          rig.fx * rig.baseline / point.z()};
}

}  // namespace rh
