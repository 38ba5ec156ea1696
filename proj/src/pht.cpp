#include "rh/error.hpp"
#include "rh/hypothesis.hpp"
#include "lm_detail.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rh {

Plane3D PlaneParams::plane() const {
  return {normal_from_angles(pitch, yaw), 1.0 / inv_depth};
}

PlaneParams PlaneParams::from_plane(const Plane3D& plane) {
  const double norm = plane.normal.norm();
  const Eigen::Vector3d n = plane.normal / norm;
  const double D = plane.D / norm;
  PlaneParams p;
  p.yaw = std::asin(std::clamp(n.x(), -1.0, 1.0));
  p.pitch = std::atan2(n.z(), -n.y());
  p.inv_depth = 1.0 / D;
  return p;
}

PlaneBounds PlaneBounds::around(const Plane3D& reference, double phi_max) {
  const double ref = pitch_of(reference.normal);
  PlaneBounds b;
  b.pitch_lo = ref - phi_max;
  b.pitch_hi = ref + phi_max;
  b.yaw_max = phi_max;
  return b;
}

PlaneParams PlaneBounds::clamp(const PlaneParams& p) const {
  return {std::clamp(p.pitch, pitch_lo, pitch_hi), std::clamp(p.yaw, -yaw_max, yaw_max),
          std::clamp(p.inv_depth, inv_depth_lo, inv_depth_hi)};
}

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct PlaneTerm {
  double left;   // Il
  double warped; // Ir(H x)
  Vec3 grad;     // d Ir(H x) / d theta
};

// d p / d theta for p = n(pitch, yaw) / D.
Mat3 param_jacobian(const PlaneParams& p) {
  const double cp = std::cos(p.pitch), sp = std::sin(p.pitch);
  const double cy = std::cos(p.yaw), sy = std::sin(p.yaw);
  const double q = p.inv_depth;
  Mat3 dp;
  dp.col(0) = q * Vec3(0.0, cy * sp, cy * cp);
  dp.col(1) = q * Vec3(cy, sy * cp, -sy * sp);
  dp.col(2) = normal_from_angles(p.pitch, p.yaw);
  return dp;
}

bool collect_terms(const IntensityImage& left, const IntensityImage& right, const PatchSpec& patch,
                   const PlaneParams& params, const CameraRig& rig, const ResidualOptions& opts,
                   std::vector<PlaneTerm>& terms, std::vector<unsigned char>* used) {
  terms.clear();
  const Mat3 H = homography_from_plane(params.plane(), rig);
  const Vec3 kt = rig.K() * Vec3(-rig.baseline, 0.0, 0.0);
  const Mat3 dp = param_jacobian(params);
  const double xmax = right.width() - 1;
  const double ymax = right.height() - 1;
  int excluded = 0;
  for (int y = patch.y_begin(); y < patch.y_end(); ++y) {
    for (int x = patch.x_begin(); x < patch.x_end(); ++x) {
      const Vec3 xh(x, y, 1.0);
      const Vec3 u = H * xh;
      const double xw = u.x() / u.z();
      const double yw = u.y() / u.z();
      const bool inside = xw >= 0.0 && xw <= xmax && yw >= 0.0 && yw <= ymax;
      if (used) used->push_back(inside ? 1 : 0);
      if (!inside) {
        ++excluded;
        continue;
      }
      const Sample s = sample_2d(right, xw, yw, opts.interpolation);
      // d u / d theta_k = -kt * (dp_k . K^-1 x)
      const Vec3 ray((x - rig.x0) / rig.fx, (y - rig.y0) / rig.fy, 1.0);
      const Vec3 proj = dp.transpose() * ray;
      Vec3 grad;
      for (int k = 0; k < 3; ++k) {
        const Vec3 du = -kt * proj(k);
        const double dxw = (du.x() * u.z() - u.x() * du.z()) / (u.z() * u.z());
        const double dyw = (du.y() * u.z() - u.y() * du.z()) / (u.z() * u.z());
        grad(k) = s.dx * dxw + s.dy * dyw;
      }
      terms.push_back({left(x, y), s.value, grad});
    }
  }
  if (excluded > opts.max_excluded_fraction * patch.pixel_count()) return false;
  if (opts.mean_removal && !terms.empty()) {
    double ml = 0.0, mw = 0.0;
    Vec3 mg = Vec3::Zero();
    for (const auto& t : terms) {
      ml += t.left;
      mw += t.warped;
      mg += t.grad;
    }
    const double n = static_cast<double>(terms.size());
    for (auto& t : terms) {
      t.left -= ml / n;
      t.warped -= mw / n;
      t.grad -= mg / n;
    }
  }
  return true;
}

void check_patch(const IntensityImage& left, const IntensityImage& right, const PatchSpec& patch,
                 const CameraRig& rig) {
  if (!left.same_shape(right)) throw Error(ErrorCode::DimensionMismatch, "stereo pair sizes differ");
  patch.validate(left.width(), left.height());
  rig.validate();
}

// Linear map from p = n / D to the displacement coefficients (c, a, b) of
//   d(x, y) = c * xbar + a * ybar + b
// over the patch, so PHT and FPHT conditioning are measured in the same units.
Mat3 displacement_map(const CameraRig& rig, const PatchSpec& patch) {
  const double B = rig.baseline;
  Mat3 L;
  L << -B * 0.5 * patch.w, 0.0, 0.0,
       0.0, B * rig.fx * 0.5 * patch.h / rig.fy, 0.0,
       -B * (patch.xc - rig.x0), -B * rig.fx * (patch.yc - rig.y0) / rig.fy, -B * rig.fx;
  return L;
}

}  // namespace

Residuals pht_residuals(const IntensityImage& left, const IntensityImage& right,
                        const PatchSpec& patch, const PlaneParams& params, const CameraRig& rig,
                        const ResidualOptions& opts) {
  check_patch(left, right, patch, rig);
  std::vector<PlaneTerm> terms;
  std::vector<unsigned char> used;
  if (!collect_terms(left, right, patch, params, rig, opts, terms, &used)) {
    throw Error(ErrorCode::InsufficientOverlap, "patch warps outside the right image");
  }
  const std::size_t n = used.size();
  Residuals out;
  out.used = used;
  out.r.assign(2 * n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) {
      ++out.excluded;
      continue;
    }
    const auto& t = terms[k++];
    const double f = 0.5 * (t.left + t.warped);
    out.r[i] = t.left - f;
    out.r[n + i] = t.warped - f;
    out.F += out.r[i] * out.r[i] + out.r[n + i] * out.r[n + i];
  }
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> pht_jacobian(const IntensityImage& left,
                                                      const IntensityImage& right,
                                                      const PatchSpec& patch,
                                                      const PlaneParams& params,
                                                      const CameraRig& rig,
                                                      const ResidualOptions& opts) {
  check_patch(left, right, patch, rig);
  std::vector<PlaneTerm> terms;
  std::vector<unsigned char> used;
  if (!collect_terms(left, right, patch, params, rig, opts, terms, &used)) {
    throw Error(ErrorCode::InsufficientOverlap, "patch warps outside the right image");
  }
  const auto n = static_cast<Eigen::Index>(used.size());
  Eigen::Matrix<double, Eigen::Dynamic, 3> J = Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(2 * n, 3);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!used[static_cast<std::size_t>(i)]) continue;
    const Vec3& g = terms[k++].grad;
    J.row(i) = -0.5 * g.transpose();
    J.row(n + i) = 0.5 * g.transpose();
  }
  return J;
}

HypothesisFit pht_fit(const IntensityImage& left, const IntensityImage& right,
                      const PatchSpec& patch, const Plane3D& init, const PlaneBounds& bounds,
                      const CameraRig& rig, const DetectorConfig& cfg) {
  check_patch(left, right, patch, rig);
  const ResidualOptions opts{cfg.interpolation, cfg.mean_removal, cfg.max_excluded_fraction};
  thread_local std::vector<PlaneTerm> terms;

  auto to_params = [](const Vec3& v) { return PlaneParams{v(0), v(1), v(2)}; };
  auto evaluate = [&](const Vec3& v) {
    detail::LmEval<3> e;
    if (!collect_terms(left, right, patch, to_params(v), rig, opts, terms, nullptr)) return e;
    e.ok = true;
    e.F = 0.0;
    for (const auto& t : terms) {
      const double f = 0.5 * (t.left + t.warped);
      const double r1 = t.left - f;
      const double r2 = t.warped - f;
      e.F += r1 * r1 + r2 * r2;
      // rows -g/2 and +g/2
      e.A.noalias() += 0.5 * t.grad * t.grad.transpose();
      e.g.noalias() += 0.5 * t.grad * (r2 - r1);
    }
    e.pixels = static_cast<int>(terms.size());
    return e;
  };
  auto project = [&](const Vec3& v) {
    const PlaneParams c = bounds.clamp(to_params(v));
    return Vec3(c.pitch, c.yaw, c.inv_depth);
  };
  // Largest change of the warped position over the patch corners, in px.
  auto step_norm = [&](const Vec3& a, const Vec3& b) {
    const Mat3 Ha = homography_from_plane(to_params(a).plane(), rig);
    const Mat3 Hb = homography_from_plane(to_params(b).plane(), rig);
    double worst = 0.0;
    for (int cy = 0; cy < 2; ++cy) {
      for (int cx = 0; cx < 2; ++cx) {
        const double x = cx ? patch.x_end() - 1 : patch.x_begin();
        const double y = cy ? patch.y_end() - 1 : patch.y_begin();
        worst = std::max(worst, (apply_homography(Ha, x, y) - apply_homography(Hb, x, y)).norm());
      }
    }
    return worst;
  };

  auto pinned = [&](const Vec3& v, const Vec3& g) {
    const double lo[3] = {bounds.pitch_lo, -bounds.yaw_max, bounds.inv_depth_lo};
    const double hi[3] = {bounds.pitch_hi, bounds.yaw_max, bounds.inv_depth_hi};
    Eigen::Matrix<bool, 3, 1> fixed;
    for (int i = 0; i < 3; ++i) fixed(i) = (v(i) <= lo[i] && g(i) > 0.0) || (v(i) >= hi[i] && g(i) < 0.0);
    return fixed;
  };

  const PlaneParams start = PlaneParams::from_plane(init);
  const auto res = detail::projected_lm<3>(Vec3(start.pitch, start.yaw, start.inv_depth), evaluate,
                                           project, step_norm, pinned, cfg.lm, cfg.record_trace);
  const PlaneParams fitted = to_params(res.params);
  HypothesisFit fit;
  fit.method = Method::kPht;
  fit.plane = fitted.plane();
  const Vec3 coef = displacement_map(rig, patch) * (fit.plane.normal / fit.plane.D);
  fit.line = {coef(1), coef(2)};
  fit.iterations = res.iterations;
  fit.range_scale = left.maxval() / 255.0;
  fit.trace = res.trace;
  if (!res.eval.ok) {
    fit.residual_sum = std::numeric_limits<double>::infinity();
    return fit;
  }
  fit.residual_sum = res.eval.F;
  fit.pixels = res.eval.pixels;
  fit.converged = res.converged;
  // Conditioning in displacement-coefficient units. The stacked residuals
  // carry half the left/right difference each, hence the factor 2.
  const Mat3 T = displacement_map(rig, patch) * param_jacobian(fitted);
  Eigen::FullPivLU<Mat3> lu(T);
  if (lu.isInvertible()) {
    const Mat3 Tinv = lu.inverse();
    const Mat3 A = Tinv.transpose() * (2.0 * res.eval.A) * Tinv;
    fit.min_eigenvalue = detail::min_eigenvalue<3>(Mat3(0.5 * (A + A.transpose())));
  }
  return fit;
}

}  // namespace rh
