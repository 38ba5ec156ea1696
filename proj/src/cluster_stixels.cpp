#include "rh/cluster_stixels.hpp"

#include "rh/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rh {

const char* to_string(PointSource s) {
  switch (s) {
    case PointSource::kPht:
      return "pht";
    case PointSource::kPc:
      return "pc";
    case PointSource::kFpht:
      break;
  }
  return "fpht";
}

PointSource parse_point_source(const std::string& name) {
  if (name == "pht") return PointSource::kPht;
  if (name == "fpht") return PointSource::kFpht;
  if (name == "pc") return PointSource::kPc;
  throw Error(ErrorCode::InvalidArgument, "unknown point source '" + name + "'");
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

void set_disparity(CStix& s, const std::vector<double>& d, const CameraRig& rig) {
  if (d.empty()) return;
  s.median_disparity = median_of(d);
  s.z = s.median_disparity > 0.0 ? rig.fx * rig.baseline / s.median_disparity : 0.0;
}

std::vector<double> box_disparities(const CStix& s, const DisparityMap& dmap) {
  std::vector<double> d;
  const int x0 = std::max(0, s.u), x1 = std::min(dmap.width(), s.u + s.width);
  const int y0 = std::max(0, s.v_top), y1 = std::min(dmap.height() - 1, s.v_bottom);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      if (is_valid_disparity(dmap(x, y))) d.push_back(dmap(x, y));
    }
  }
  return d;
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

void split_rec(const CStix& s, const DisparityMap& dmap, double var_thresh, const CameraRig& rig,
               int min_height, std::vector<CStix>& out) {
  const std::vector<double> d = box_disparities(s, dmap);
  const int height = s.v_bottom - s.v_top + 1;
  if (height < min_height || variance(d) <= var_thresh) {
    out.push_back(s);
    return;
  }
  const int mid = s.v_top + (height - 1) / 2;
  CStix top = s, bottom = s;
  top.v_bottom = mid;
  bottom.v_top = mid + 1;
  set_disparity(top, box_disparities(top, dmap), rig);
  set_disparity(bottom, box_disparities(bottom, dmap), rig);
  split_rec(top, dmap, var_thresh, rig, min_height, out);
  split_rec(bottom, dmap, var_thresh, rig, min_height, out);
}

}  // namespace

std::vector<CStix> split_horizontally(const std::vector<ObstaclePoint>& points,
                                      const std::vector<std::size_t>& members, int width,
                                      const CameraRig& rig, int cluster) {
  if (width < 1) throw Error(ErrorCode::InvalidArgument, "stixel width must be >= 1");
  if (members.empty()) return {};
  int xmin = points[members.front()].x, xmax = xmin;
  for (std::size_t i : members) {
    xmin = std::min(xmin, points[i].x);
    xmax = std::max(xmax, points[i].x);
  }
  const int bins = (xmax - xmin) / width + 1;
  std::vector<std::vector<std::size_t>> per_bin(static_cast<std::size_t>(bins));
  for (std::size_t i : members) per_bin[static_cast<std::size_t>((points[i].x - xmin) / width)].push_back(i);

  std::vector<CStix> out;
  for (int b = 0; b < bins; ++b) {
    const auto& bin = per_bin[static_cast<std::size_t>(b)];
    if (bin.empty()) continue;
    CStix s;
    s.u = xmin + b * width;
    s.width = std::min(width, xmax - s.u + 1);
    s.v_top = points[bin.front()].y;
    s.v_bottom = s.v_top;
    std::vector<double> d;
    for (std::size_t i : bin) {
      s.v_top = std::min(s.v_top, points[i].y);
      s.v_bottom = std::max(s.v_bottom, points[i].y);
      d.push_back(points[i].d);
    }
    s.cluster = cluster;
    set_disparity(s, d, rig);
    out.push_back(s);
  }
  return out;
}

std::vector<CStix> split_vertically(const std::vector<CStix>& stixels, const DisparityMap& dmap,
                                    double var_thresh, const CameraRig& rig, int min_split_height) {
  std::vector<CStix> out;
  for (const auto& s : stixels) split_rec(s, dmap, var_thresh, rig, min_split_height, out);
  return out;
}

std::vector<CStix> midlevel_rep(const std::vector<ObstaclePoint>& points, const DisparityMap& dmap,
                                const ClusterParams& params, const CameraRig& rig) {
  params.validate();
  if (points.empty()) return {};

  // PC output is already partitioned; everything else goes through DBSCAN.
  std::vector<std::size_t> clustered;
  std::vector<ObstaclePoint> others;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].source != PointSource::kPc) {
      clustered.push_back(i);
      others.push_back(points[i]);
    }
  }
  std::vector<int> label(points.size(), -1);
  int next = 0;
  if (!others.empty()) {
    const std::vector<int> db = adaptive_dbscan(others, params, rig);
    for (std::size_t k = 0; k < others.size(); ++k) {
      label[clustered[k]] = db[k];
      next = std::max(next, db[k] + 1);
    }
  }
  std::map<int, int> pc_ids;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].source != PointSource::kPc || points[i].cluster < 0) continue;
    auto [it, fresh] = pc_ids.emplace(points[i].cluster, next);
    if (fresh) ++next;
    label[i] = it->second;
  }

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (label[i] >= 0) members[static_cast<std::size_t>(label[i])].push_back(i);
  }

  std::vector<CStix> out;
  for (int c = 0; c < next; ++c) {
    const auto& m = members[static_cast<std::size_t>(c)];
    const auto columns = split_horizontally(points, m, params.stixel_width, rig, c);
    for (const auto& piece : split_vertically(columns, dmap, params.var_thresh, rig, params.min_split_height)) {
      std::vector<double> d;
      for (std::size_t i : m) {
        const auto& p = points[i];
        if (p.x >= piece.u && p.x < piece.u + piece.width && p.y >= piece.v_top && p.y <= piece.v_bottom) {
          d.push_back(p.d);
        }
      }
      if (d.empty()) continue;
      CStix s = piece;
      set_disparity(s, d, rig);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace rh
