#pragma once

// Per-patch obstacle / free-space likelihood ratio tests. Each hypothesis is
// fitted by a projected Levenberg-Marquardt search restricted to the plane
// orientations it admits; the decision compares the two residual sums.
//
// FPHT fits a disparity line (a, b) with the row-aligned warp
//   x' = x - (a * ybar + b), y' = y
// and uses the left image as the reference signal. PHT fits a full plane
// (pitch, yaw, 1/D), warps through the plane-induced homography and takes the
// mean of the left and warped right samples as the reference.

#include "rh/geometry.hpp"
#include "rh/patch_grid.hpp"
#include "rh/raster.hpp"
#include "rh/sampling.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace rh {

enum class Method { kFpht, kPht };
enum class Verdict { kObstacle, kFreeSpace, kNoDecision };

const char* to_string(Method m);
const char* to_string(Verdict v);
Method parse_method(const std::string& name);

struct LmSettings {
  int max_iter = 30;
  double damping_init = 1e-3;
  double step_tol = 1e-4;  // px
  // Also stop once an accepted step lowers F by less than this fraction.
  double f_tol = 1e-2;
};

struct DetectorConfig {
  int patch_w = 15;
  int patch_h = 15;
  int stride = 2;
  int downsample = 1;
  double phi_f = deg2rad(25.0);
  double phi_o = deg2rad(45.0);
  // Threshold on F_f - F_o, in squared intensity units of the left/right
  // difference image.
  double tau = 0.0;
  // Texture gate: smallest Gauss-Newton eigenvalue per patch pixel, expressed
  // for an 8-bit intensity range (scaled by (maxval / 255)^2 at run time).
  double lambda_min = 1.0;
  LmSettings lm;
  bool mean_removal = false;
  Interpolation interpolation = Interpolation::kCubic;
  double max_excluded_fraction = 0.2;
  double min_init_fraction = 0.5;
  double b_min = 1e-2;
  bool record_trace = false;
  int threads = 1;
};

struct HypothesisFit {
  Method method = Method::kFpht;
  DisparityLine line;  // FPHT parameters; for PHT the equivalent line at the patch
  Plane3D plane;       // PHT parameters; for FPHT the plane of `line`
  double residual_sum = 0.0;
  int iterations = 0;
  double min_eigenvalue = 0.0;  // of J^T J in displacement-coefficient units
  int pixels = 0;               // patch pixels that contributed
  double range_scale = 1.0;     // maxval / 255 of the input
  bool converged = false;
  std::vector<double> trace;  // residual sum after each accepted step (when recorded)
};

struct PatchDecision {
  PatchSpec patch;
  Verdict verdict = Verdict::kNoDecision;
  HypothesisFit fit_f;
  HypothesisFit fit_o;
  double statistic = 0.0;  // F_f - F_o
};

// --- FPHT -------------------------------------------------------------------

Eigen::Vector2d fpht_warp(double x, double y, const DisparityLine& line, const PatchSpec& patch);

struct ResidualOptions {
  Interpolation interpolation = Interpolation::kCubic;
  bool mean_removal = false;
  double max_excluded_fraction = 0.2;
};

struct Residuals {
  std::vector<double> r;           // one entry per patch pixel, row-major; 0 where excluded
  std::vector<unsigned char> used;  // 1 where the warped pixel was inside the right image
  double F = 0.0;
  int excluded = 0;
};

// r = Ir(W(x)) - Il(x). Throws InsufficientOverlap when more than
// max_excluded_fraction of the patch warps outside the right image.
Residuals fpht_residuals(const IntensityImage& left, const IntensityImage& right,
                         const PatchSpec& patch, const DisparityLine& line,
                         const ResidualOptions& opts = {});

// Rows d r / d(a, b) aligned with fpht_residuals (zero rows where excluded).
Eigen::Matrix<double, Eigen::Dynamic, 2> fpht_jacobian(const IntensityImage& left,
                                                       const IntensityImage& right,
                                                       const PatchSpec& patch,
                                                       const DisparityLine& line,
                                                       const ResidualOptions& opts = {});

HypothesisFit fpht_fit(const IntensityImage& left, const IntensityImage& right,
                       const PatchSpec& patch, const DisparityLine& init,
                       const FeasibleWedge& wedge, const DetectorConfig& cfg);

// --- PHT --------------------------------------------------------------------

struct PlaneParams {
  double pitch = 0.0;
  double yaw = 0.0;
  double inv_depth = 1.0;  // 1/D

  Plane3D plane() const;
  static PlaneParams from_plane(const Plane3D& plane);
};

struct PlaneBounds {
  double pitch_lo = 0.0;
  double pitch_hi = 0.0;
  double yaw_max = 0.0;
  double inv_depth_lo = 1e-6;
  double inv_depth_hi = 1e3;

  static PlaneBounds around(const Plane3D& reference, double phi_max);
  PlaneParams clamp(const PlaneParams& p) const;
};

// Stacked residuals [Il - f; Ir(H x) - f] with f = (Il + Ir(H x)) / 2.
Residuals pht_residuals(const IntensityImage& left, const IntensityImage& right,
                        const PatchSpec& patch, const PlaneParams& params, const CameraRig& rig,
                        const ResidualOptions& opts = {});

Eigen::Matrix<double, Eigen::Dynamic, 3> pht_jacobian(const IntensityImage& left,
                                                      const IntensityImage& right,
                                                      const PatchSpec& patch,
                                                      const PlaneParams& params,
                                                      const CameraRig& rig,
                                                      const ResidualOptions& opts = {});

HypothesisFit pht_fit(const IntensityImage& left, const IntensityImage& right,
                      const PatchSpec& patch, const Plane3D& init, const PlaneBounds& bounds,
                      const CameraRig& rig, const DetectorConfig& cfg);

// --- decisions --------------------------------------------------------------

// Texture score of a fit: min eigenvalue per pixel in 8-bit intensity units.
double texture_score(const HypothesisFit& fit);

PatchDecision glrt_decide(const HypothesisFit& fit_f, const HypothesisFit& fit_o,
                          const DetectorConfig& cfg);

// Re-evaluates a decision for another threshold or texture gate without refitting.
Verdict reclassify(const PatchDecision& decision, double tau, double lambda_min);

struct PatchInit {
  bool ok = false;
  DisparityLine free_space;
  DisparityLine obstacle;
};

// Free space: least-squares line through the per-row medians of the valid
// disparities. Obstacle: patch median with zero slope.
PatchInit initialize_patch(const DisparityMap& dmap, const PatchSpec& patch, double min_fraction);

std::vector<PatchDecision> detect_frame(const IntensityImage& left, const IntensityImage& right,
                                        const DisparityMap& dmap_init, const PatchGrid& grid,
                                        const CameraRig& rig, const DetectorConfig& cfg,
                                        Method method);

}  // namespace rh
