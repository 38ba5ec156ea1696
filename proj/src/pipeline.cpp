#include "rh/pipeline.hpp"

#include "rh/error.hpp"
#include "rh/sampling.hpp"

#include <algorithm>

namespace rh {
namespace {

int halvings(int factor) {
  if (factor < 1 || (factor & (factor - 1))) {
    throw Error(ErrorCode::InvalidArgument, "downsample factor must be a power of two");
  }
  int n = 0;
  while (factor > 1) {
    factor >>= 1;
    ++n;
  }
  return n;
}

}  // namespace

IntensityImage reduce_image(const IntensityImage& img, int factor) {
  IntensityImage out = img;
  for (int i = halvings(factor); i > 0; --i) out = downsample2(out);
  return out;
}

DisparityMap reduce_disparity(const DisparityMap& map, int factor) {
  DisparityMap out = map;
  for (int i = halvings(factor); i > 0; --i) out = downsample2(out);
  return out;
}

CameraRig reduce_rig(const CameraRig& rig, int factor) {
  CameraRig out = rig;
  for (int i = halvings(factor); i > 0; --i) out = out.downsampled();
  return out;
}

std::vector<ObstaclePoint> obstacle_points(const std::vector<PatchDecision>& decisions,
                                           const std::vector<Verdict>& verdicts, const CameraRig& rig) {
  if (verdicts.size() != decisions.size()) throw Error(ErrorCode::DimensionMismatch, "one verdict per decision");
  std::vector<ObstaclePoint> out;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (verdicts[i] != Verdict::kObstacle) continue;
    const auto& d = decisions[i];
    const double disp = d.fit_o.line.b;
    if (!(disp > 0.0)) continue;
    ObstaclePoint p;
    p.x = d.patch.xc;
    p.y = d.patch.yc;
    p.d = disp;
    p.p = triangulate(p.x, p.y, disp, rig);
    p.source = d.fit_o.method == Method::kPht ? PointSource::kPht : PointSource::kFpht;
    out.push_back(p);
  }
  return out;
}

std::vector<ObstaclePoint> obstacle_points(const std::vector<PatchDecision>& decisions, const CameraRig& rig) {
  std::vector<Verdict> v(decisions.size());
  std::transform(decisions.begin(), decisions.end(), v.begin(), [](const PatchDecision& d) { return d.verdict; });
  return obstacle_points(decisions, v, rig);
}

std::vector<ObstaclePoint> obstacle_points(const std::vector<CloudPoint>& cloud, const PcResult& pc) {
  if (pc.obstacle.size() != cloud.size()) throw Error(ErrorCode::DimensionMismatch, "PC result size mismatch");
  std::vector<ObstaclePoint> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!pc.obstacle[i]) continue;
    ObstaclePoint p;
    p.x = cloud[i].x;
    p.y = cloud[i].y;
    p.d = cloud[i].d;
    p.p = cloud[i].p;
    p.source = PointSource::kPc;
    p.cluster = pc.cluster[i];
    out.push_back(p);
  }
  return out;
}

}  // namespace rh
