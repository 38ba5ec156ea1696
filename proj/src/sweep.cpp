#include "rh/sweep.hpp"

#include "rh/error.hpp"
#include "rh/hash.hpp"
#include "rh/patch_grid.hpp"
#include "rh/pipeline.hpp"
#include "rh/point_compat.hpp"

#include <algorithm>
#include <cstdio>

namespace rh {

const char* to_string(SweepLevel level) { return level == SweepLevel::kInstance ? "instance" : "pixel"; }

SweepLevel parse_level(const std::string& name) {
  if (name == "pixel") return SweepLevel::kPixel;
  if (name == "instance") return SweepLevel::kInstance;
  throw Error(ErrorCode::InvalidArgument, "unknown evaluation level '" + name + "'");
}

void SweepGrid::validate() const {
  if (method != "fpht" && method != "pht" && method != "pc") {
    throw Error(ErrorCode::InvalidArgument, "unknown sweep method '" + method + "'");
  }
  if (method == "pc") {
    if (pc_phi_deg.empty() || pc_h_min.empty() || pc_h_max.empty()) {
      throw Error(ErrorCode::InvalidArgument, "empty PC parameter grid");
    }
  } else if (patches.empty() || lambda_min.empty() || tau.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty detector parameter grid");
  }
  if (detector.stride < 1 || detector.downsample < 1) {
    throw Error(ErrorCode::InvalidArgument, "stride and downsample must be >= 1");
  }
  if (level == SweepLevel::kInstance) cluster.validate();
}

std::size_t SweepGrid::size() const {
  if (method == "pc") return pc_phi_deg.size() * pc_h_min.size() * pc_h_max.size();
  return patches.size() * lambda_min.size() * tau.size();
}

std::string SweepConfig::canonical() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "method=%s;patch_w=%d;patch_h=%d;stride=%d;downsample=%d;lambda_min=%.17g;tau=%.17g;"
                "phi_deg=%.17g;h_min=%.17g;h_max=%.17g",
                method.c_str(), patch_w, patch_h, stride, downsample, lambda_min, tau, phi_deg, h_min, h_max);
  return buf;
}

std::uint64_t config_hash(const SweepConfig& c) { return fnv1a64(c.canonical()); }

void finalize_hull(SweepResult& result) {
  std::vector<RocPoint> pts;
  pts.reserve(result.points.size());
  for (const auto& p : result.points) pts.push_back(p.point);
  result.hull = result.level == SweepLevel::kPixel ? roc_hull(pts) : upper_left_hull(pts);
  for (auto& p : result.points) {
    p.on_hull = std::find(result.hull.begin(), result.hull.end(), p.point) != result.hull.end();
  }
}

namespace {

struct Frame {
  IntensityImage left, right;
  DisparityMap dmap;
  const GroundTruthBundle* gt = nullptr;
};

// Accumulates one configuration over the frames.
struct Accumulator {
  PixelCounts counts;
  std::vector<InstanceStats> instances;
  bool started = false;

  void add_pixels(const PixelCounts& c) {
    if (!started) counts = c;
    else counts += c;
    started = true;
  }
};

SweepPoint finish(const SweepConfig& config, const Accumulator& acc, SweepLevel level) {
  SweepPoint p;
  p.config = config;
  if (level == SweepLevel::kPixel) {
    p.counts = acc.counts;
    p.point = pixel_rates(acc.counts);
  } else {
    p.instance = summarize(acc.instances);
    p.point = {p.instance.fp_per_frame, p.instance.iint};
  }
  return p;
}

}  // namespace

SweepResult run_sweep(const std::vector<GroundTruthBundle>& dataset, const CameraRig& rig, const SweepGrid& grid,
                      int threads) {
  grid.validate();
  if (dataset.empty()) throw Error(ErrorCode::InvalidArgument, "empty sweep dataset");
  rig.validate();
  const int dwn = grid.detector.downsample;
  const int sub = grid.detector.stride;
  const CameraRig drig = reduce_rig(rig, dwn);

  std::vector<Frame> frames(dataset.size());
  BlockMatchConfig bm = grid.block_match;
  bm.threads = threads;
  for (std::size_t f = 0; f < dataset.size(); ++f) {
    const auto& gt = dataset[f];
    if (!gt.left.same_shape(rig.width, rig.height) || !gt.labels.same_shape(gt.left) ||
        !gt.free_space.same_shape(gt.left)) {
      throw Error(ErrorCode::DimensionMismatch, "frame does not match the rig");
    }
    frames[f].left = reduce_image(gt.left, dwn);
    frames[f].right = reduce_image(gt.right, dwn);
    frames[f].dmap = block_match(frames[f].left, frames[f].right, bm);
    frames[f].gt = &gt;
  }

  SweepResult result;
  result.method = grid.method;
  result.level = grid.level;

  if (grid.method == "pc") {
    for (double phi : grid.pc_phi_deg) {
      for (double hmin : grid.pc_h_min) {
        for (double hmax : grid.pc_h_max) {
          const PcParams pc{phi, hmin, hmax};
          pc.validate();
          Accumulator acc;
          for (const auto& fr : frames) {
            const auto cloud = disparity_to_cloud(fr.dmap, drig, sub);
            const PcResult r = pc_detect(cloud, drig, pc);
            if (grid.level == SweepLevel::kPixel) {
              acc.add_pixels(count_pixels(points_to_mask(cloud, r, fr.dmap.width(), fr.dmap.height()),
                                          fr.gt->labels, sub, dwn));
            } else {
              const auto stix = midlevel_rep(obstacle_points(cloud, r), fr.dmap, grid.cluster, drig);
              acc.instances.push_back(
                  instance_metrics(stix, fr.gt->labels, fr.gt->free_space, grid.overlap_thresh, dwn));
            }
          }
          SweepConfig c;
          c.method = "pc";
          c.stride = sub;
          c.downsample = dwn;
          c.phi_deg = phi;
          c.h_min = hmin;
          c.h_max = hmax;
          result.points.push_back(finish(c, acc, grid.level));
        }
      }
    }
    finalize_hull(result);
    return result;
  }

  const Method method = parse_method(grid.method);
  const std::size_t nl = grid.lambda_min.size(), nt = grid.tau.size();
  for (const auto& [pw, ph] : grid.patches) {
    DetectorConfig cfg = grid.detector;
    cfg.patch_w = pw;
    cfg.patch_h = ph;
    cfg.threads = threads;
    cfg.record_trace = false;
    std::vector<Accumulator> acc(nl * nt);
    for (const auto& fr : frames) {
      const PatchGrid pg = make_patch_grid(fr.left.width(), fr.left.height(), pw, ph, sub, dwn);
      const auto decisions = detect_frame(fr.left, fr.right, fr.dmap, pg, drig, cfg, method);
      std::vector<Verdict> verdicts(decisions.size());
      for (std::size_t li = 0; li < nl; ++li) {
        for (std::size_t ti = 0; ti < nt; ++ti) {
          for (std::size_t i = 0; i < decisions.size(); ++i) {
            verdicts[i] = reclassify(decisions[i], grid.tau[ti], grid.lambda_min[li]);
          }
          auto& a = acc[li * nt + ti];
          if (grid.level == SweepLevel::kPixel) {
            a.add_pixels(count_pixels(decisions_to_mask(decisions, verdicts, fr.left.width(), fr.left.height()),
                                      fr.gt->labels, sub, dwn));
          } else {
            const auto stix = midlevel_rep(obstacle_points(decisions, verdicts, drig), fr.dmap, grid.cluster, drig);
            a.instances.push_back(instance_metrics(stix, fr.gt->labels, fr.gt->free_space, grid.overlap_thresh, dwn));
          }
        }
      }
    }
    for (std::size_t li = 0; li < nl; ++li) {
      for (std::size_t ti = 0; ti < nt; ++ti) {
        SweepConfig c;
        c.method = grid.method;
        c.patch_w = pw;
        c.patch_h = ph;
        c.stride = sub;
        c.downsample = dwn;
        c.lambda_min = grid.lambda_min[li];
        c.tau = grid.tau[ti];
        result.points.push_back(finish(c, acc[li * nt + ti], grid.level));
      }
    }
  }
  finalize_hull(result);
  return result;
}

}  // namespace rh
