#pragma once

// Pixel-level ROC rates for patch/point detectors and instance-level
// coverage for stixel output.

#include "rh/block_match.hpp"
#include "rh/cluster_stixels.hpp"
#include "rh/hypothesis.hpp"
#include "rh/point_compat.hpp"
#include "rh/raster.hpp"

#include <cstdint>
#include <vector>

namespace rh {

struct PixelCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  int sub = 1;  // sampling stride on the detector image
  int dwn = 1;  // detector image downsampling factor
  std::uint64_t gt_obstacles = 0;
  std::uint64_t gt_freespace = 0;

  // Frame aggregation; sub and dwn must agree.
  PixelCounts& operator+=(const PixelCounts& o);
};

struct RocPoint {
  double x = 0.0;  // FPR, or FP stixels per frame
  double y = 0.0;  // TPR, or iInt

  bool operator==(const RocPoint&) const = default;
};

// Obstacle predictions at detector resolution. Nonzero mask pixels are
// looked up in the full-resolution labels at (x * dwn, y * dwn): obstacle
// labels count as TP, free space as FP, anything else is ignored.
PixelCounts count_pixels(const Mask& predictions, const LabelMap& labels, int sub, int dwn);

Mask decisions_to_mask(const std::vector<PatchDecision>& decisions, int width, int height);
// Same, with verdicts supplied separately (from reclassify).
Mask decisions_to_mask(const std::vector<PatchDecision>& decisions, const std::vector<Verdict>& verdicts,
                       int width, int height);
Mask points_to_mask(const std::vector<CloudPoint>& cloud, const PcResult& pc, int width, int height);

// TPR = TP Sub^2 Dwn^2 / GT_Obstacles, FPR likewise over free space; both
// clamped to 1. Throws EmptyGroundTruth when either annotated set is empty.
RocPoint pixel_rates(const PixelCounts& c);

// Upper-left convex hull of the points plus the origin, from (0, 0) up to the
// first point of maximal y. Collinear interior points are dropped.
std::vector<RocPoint> upper_left_hull(std::vector<RocPoint> points);
// Upper hull from (0, 0) to (1, 1); rates must lie in [0, 1].
std::vector<RocPoint> roc_hull(const std::vector<RocPoint>& points);
// True when no point lies strictly above the hull polyline.
bool hull_dominates(const std::vector<RocPoint>& hull, const RocPoint& p, double tol = 1e-12);

struct InstanceCoverage {
  std::uint16_t id = 0;
  std::uint64_t itp = 0;
  std::uint64_t ifn = 0;

  double iint() const { return itp + ifn ? static_cast<double>(itp) / static_cast<double>(itp + ifn) : 0.0; }
};

struct InstanceStats {
  std::vector<InstanceCoverage> instances;  // ascending id
  int fp_stixels = 0;
  int stixels = 0;
};

// Stixel boxes are in detector pixels and are scaled by dwn onto the
// full-resolution labels. A stixel is a false positive when the fraction of
// its box on free space exceeds overlap_thresh.
InstanceStats instance_metrics(const std::vector<CStix>& stixels, const LabelMap& labels,
                               const Mask& free_space, double overlap_thresh = 0.5, int dwn = 1);

struct InstanceSummary {
  double iint = 0.0;          // mean over all instances of all frames
  double fp_per_frame = 0.0;
  std::uint64_t instances = 0;
  std::uint64_t fp_stixels = 0;
  std::uint64_t frames = 0;
};

InstanceSummary summarize(const std::vector<InstanceStats>& frames);

}  // namespace rh
