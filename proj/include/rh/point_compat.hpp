#pragma once

// Point Compatibility baseline: two cloud points belong to the same obstacle
// when the upper one lies inside the truncated cone standing on the lower one.

#include "rh/block_match.hpp"
#include "rh/geometry.hpp"

#include <Eigen/Core>

#include <vector>

namespace rh {

struct PcParams {
  double phi_deg = 45.0;  // minimum elevation of the segment p1 -> p2
  double h_min = 0.1;     // m
  double h_max = 0.5;     // m

  void validate() const;
};

struct PcResult {
  std::vector<unsigned char> obstacle;  // per input point
  std::vector<int> cluster;             // -1 unless obstacle; ids ordered by first member
  int cluster_count = 0;
};

// True iff p2 sits h in [h_min, h_max] above p1 (up is -Y) and within the
// cone of half-opening 90 deg - phi, i.e. horizontal distance <= h / tan(phi).
bool compatible(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const PcParams& params);

// Image-space search: each point's cone is projected to a pixel rectangle and
// only points whose pixels fall inside it are tested.
PcResult pc_detect(const std::vector<CloudPoint>& cloud, const CameraRig& rig, const PcParams& params);

// All pairs.
PcResult pc_brute_force(const std::vector<CloudPoint>& cloud, const PcParams& params);

}  // namespace rh
