#include "rh/metrics.hpp"

#include "rh/error.hpp"

#include <algorithm>
#include <map>

namespace rh {

PixelCounts& PixelCounts::operator+=(const PixelCounts& o) {
  if (sub != o.sub || dwn != o.dwn) {
    throw Error(ErrorCode::InvalidArgument, "cannot add pixel counts with different sub/dwn");
  }
  tp += o.tp;
  fp += o.fp;
  gt_obstacles += o.gt_obstacles;
  gt_freespace += o.gt_freespace;
  return *this;
}

PixelCounts count_pixels(const Mask& predictions, const LabelMap& labels, int sub, int dwn) {
  if (sub < 1 || dwn < 1) throw Error(ErrorCode::InvalidArgument, "sub and dwn must be >= 1");
  if (predictions.width() != labels.width() / dwn || predictions.height() != labels.height() / dwn) {
    throw Error(ErrorCode::DimensionMismatch, "prediction grid does not match labels / dwn");
  }
  PixelCounts c;
  c.sub = sub;
  c.dwn = dwn;
  for (std::uint16_t id : labels.data()) {
    if (is_obstacle_label(id)) ++c.gt_obstacles;
    else if (id == kFreeSpace) ++c.gt_freespace;
  }
  for (int y = 0; y < predictions.height(); ++y) {
    for (int x = 0; x < predictions.width(); ++x) {
      if (!predictions(x, y)) continue;
      const std::uint16_t id = labels(x * dwn, y * dwn);
      if (is_obstacle_label(id)) ++c.tp;
      else if (id == kFreeSpace) ++c.fp;
    }
  }
  return c;
}

Mask decisions_to_mask(const std::vector<PatchDecision>& decisions, const std::vector<Verdict>& verdicts,
                       int width, int height) {
  if (verdicts.size() != decisions.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one verdict per decision expected");
  }
  Mask m(width, height, 0);
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (verdicts[i] == Verdict::kObstacle) m.at(decisions[i].patch.xc, decisions[i].patch.yc) = 1;
  }
  return m;
}

Mask decisions_to_mask(const std::vector<PatchDecision>& decisions, int width, int height) {
  std::vector<Verdict> v(decisions.size());
  std::transform(decisions.begin(), decisions.end(), v.begin(), [](const PatchDecision& d) { return d.verdict; });
  return decisions_to_mask(decisions, v, width, height);
}

Mask points_to_mask(const std::vector<CloudPoint>& cloud, const PcResult& pc, int width, int height) {
  if (pc.obstacle.size() != cloud.size()) throw Error(ErrorCode::DimensionMismatch, "PC result size mismatch");
  Mask m(width, height, 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (pc.obstacle[i]) m.at(cloud[i].x, cloud[i].y) = 1;
  }
  return m;
}

RocPoint pixel_rates(const PixelCounts& c) {
  if (c.gt_obstacles == 0 || c.gt_freespace == 0) {
    throw Error(ErrorCode::EmptyGroundTruth, "no annotated obstacle or free-space pixels");
  }
  const double scale = static_cast<double>(c.sub) * c.sub * c.dwn * c.dwn;
  return {std::min(1.0, static_cast<double>(c.fp) * scale / static_cast<double>(c.gt_freespace)),
          std::min(1.0, static_cast<double>(c.tp) * scale / static_cast<double>(c.gt_obstacles))};
}

namespace {

double cross(const RocPoint& o, const RocPoint& a, const RocPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<RocPoint> upper_chain(std::vector<RocPoint> points) {
  points.push_back({0.0, 0.0});
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<RocPoint> hull;
  for (const auto& p : points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

}  // namespace

std::vector<RocPoint> upper_left_hull(std::vector<RocPoint> points) {
  std::vector<RocPoint> hull = upper_chain(std::move(points));
  const auto top = std::max_element(hull.begin(), hull.end(),
                                    [](const RocPoint& a, const RocPoint& b) { return a.y < b.y; });
  hull.erase(top + 1, hull.end());
  return hull;
}

std::vector<RocPoint> roc_hull(const std::vector<RocPoint>& points) {
  std::vector<RocPoint> all = points;
  all.push_back({1.0, 1.0});
  return upper_chain(std::move(all));
}

bool hull_dominates(const std::vector<RocPoint>& hull, const RocPoint& p, double tol) {
  if (hull.empty()) return false;
  if (p.x > hull.back().x) return p.y <= hull.back().y + tol;
  if (p.x < hull.front().x) return p.y <= hull.front().y + tol;
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const RocPoint& a = hull[i];
    const RocPoint& b = hull[i + 1];
    if (p.x < a.x || p.x > b.x) continue;
    if (b.x == a.x) {
      if (p.y <= std::max(a.y, b.y) + tol) return true;
      continue;
    }
    const double yl = a.y + (b.y - a.y) * (p.x - a.x) / (b.x - a.x);
    if (p.y <= yl + tol) return true;
  }
  return false;
}

InstanceStats instance_metrics(const std::vector<CStix>& stixels, const LabelMap& labels, const Mask& free_space,
                               double overlap_thresh, int dwn) {
  if (dwn < 1) throw Error(ErrorCode::InvalidArgument, "dwn must be >= 1");
  if (!labels.same_shape(free_space)) throw Error(ErrorCode::DimensionMismatch, "labels and free space differ");
  const int W = labels.width(), H = labels.height();
  Mask covered(W, H, 0);
  InstanceStats out;
  out.stixels = static_cast<int>(stixels.size());
  for (const auto& s : stixels) {
    const int x0 = s.u * dwn, x1 = (s.u + s.width) * dwn;
    const int y0 = s.v_top * dwn, y1 = (s.v_bottom + 1) * dwn;
    if (s.width < 1 || s.v_bottom < s.v_top || x0 < 0 || y0 < 0 || x1 > W || y1 > H) {
      throw Error(ErrorCode::OutOfBounds, "stixel box outside the image");
    }
    std::uint64_t on_free = 0;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        covered(x, y) = 1;
        on_free += free_space(x, y) != 0;
      }
    }
    const double area = static_cast<double>(x1 - x0) * (y1 - y0);
    if (static_cast<double>(on_free) / area > overlap_thresh) ++out.fp_stixels;
  }
  std::map<std::uint16_t, InstanceCoverage> per_id;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::uint16_t id = labels(x, y);
      if (!is_obstacle_label(id)) continue;
      auto& c = per_id[id];
      c.id = id;
      if (covered(x, y)) ++c.itp;
      else ++c.ifn;
    }
  }
  for (const auto& [id, c] : per_id) out.instances.push_back(c);
  return out;
}

InstanceSummary summarize(const std::vector<InstanceStats>& frames) {
  InstanceSummary s;
  double sum = 0.0;
  for (const auto& f : frames) {
    for (const auto& c : f.instances) sum += c.iint();
    s.instances += f.instances.size();
    s.fp_stixels += static_cast<std::uint64_t>(f.fp_stixels);
  }
  s.frames = frames.size();
  s.iint = s.instances ? sum / static_cast<double>(s.instances) : 0.0;
  s.fp_per_frame = s.frames ? static_cast<double>(s.fp_stixels) / static_cast<double>(s.frames) : 0.0;
  return s;
}

}  // namespace rh
