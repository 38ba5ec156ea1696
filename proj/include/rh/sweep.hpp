#pragma once

// Parameter sweeps over a synthetic dataset. Counts are summed over frames
// before rates are formed, and each patch configuration is fitted once per
// frame; lambda_min and tau only re-run the decision.

#include "rh/block_match.hpp"
#include "rh/cluster_stixels.hpp"
#include "rh/hypothesis.hpp"
#include "rh/metrics.hpp"
#include "rh/synth.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rh {

enum class SweepLevel { kPixel, kInstance };
const char* to_string(SweepLevel level);
SweepLevel parse_level(const std::string& name);

struct SweepGrid {
  std::string method = "fpht";  // fpht | pht | pc
  SweepLevel level = SweepLevel::kPixel;
  std::vector<std::pair<int, int>> patches{{15, 15}};  // (w, h)
  std::vector<double> lambda_min{1.0};
  std::vector<double> tau{0.0};
  std::vector<double> pc_phi_deg{45.0};
  std::vector<double> pc_h_min{0.1};
  std::vector<double> pc_h_max{0.5};
  DetectorConfig detector;  // stride, downsample, angles, LM settings
  BlockMatchConfig block_match;
  ClusterParams cluster;
  double overlap_thresh = 0.5;

  void validate() const;
  std::size_t size() const;
};

// One evaluated configuration. Fields that do not apply to the method stay 0.
struct SweepConfig {
  std::string method;
  int patch_w = 0;
  int patch_h = 0;
  int stride = 0;
  int downsample = 1;
  double lambda_min = 0.0;
  double tau = 0.0;
  double phi_deg = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;

  std::string canonical() const;
  bool operator==(const SweepConfig&) const = default;
};

std::uint64_t config_hash(const SweepConfig& c);

struct SweepPoint {
  SweepConfig config;
  PixelCounts counts;        // pixel level
  InstanceSummary instance;  // instance level
  RocPoint point;            // (FPR, TPR) or (FP/frame, iInt)
  bool on_hull = false;
};

struct SweepResult {
  std::string method;
  SweepLevel level = SweepLevel::kPixel;
  std::vector<SweepPoint> points;
  std::vector<RocPoint> hull;
};

// Marks on_hull and fills hull from the points.
void finalize_hull(SweepResult& result);

// The initial disparity for the detectors is block matched at detector resolution.
SweepResult run_sweep(const std::vector<GroundTruthBundle>& dataset, const CameraRig& rig, const SweepGrid& grid,
                      int threads = 1);

}  // namespace rh
