#include "rh/block_match.hpp"

#include "rh/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running winner-take-all state for one pixel while disparities are visited
// in increasing order.
struct Wta {
  double best = kInf;
  double before = kInf;  // cost at best_d - 1
  double after = kInf;   // cost at best_d + 1
  double last = kInf;
  int best_d = -1;
  int last_d = -2;
  bool tie = false;

  void update(int d, double cost) {
    if (cost < best) {
      best = cost;
      before = last_d == d - 1 ? last : kInf;
      after = kInf;
      best_d = d;
      tie = false;
    } else {
      if (cost == best) tie = true;
      if (d == best_d + 1) after = cost;
    }
    last = cost;
    last_d = d;
  }

  // Subpixel disparity, or NaN when the minimum is ambiguous.
  double refine() const {
    if (best_d < 0 || tie) return std::numeric_limits<double>::quiet_NaN();
    double offset = 0.0;
    if (std::isfinite(before) && std::isfinite(after)) {
      const double denom = before - 2.0 * best + after;
      if (denom > 0.0) offset = std::clamp(0.5 * (before - after) / denom, -0.5, 0.5);
    }
    return best_d + offset;
  }
};

void match_row(const IntensityImage& left, const IntensityImage& right, const BlockMatchConfig& cfg,
               int y, DisparityMap& out) {
  const int w = left.width();
  const int r = cfg.window / 2;
  std::vector<Wta> lwta(w);
  std::vector<Wta> rwta(w);
  std::vector<double> colsum(w);
  for (int d = 0; d <= cfg.d_max; ++d) {
    if (d + 2 * r >= w) break;
    for (int x = d; x < w; ++x) {
      double s = 0.0;
      for (int j = -r; j <= r; ++j) s += std::abs(left(x, y + j) - right(x - d, y + j));
      colsum[x] = s;
    }
    // Window sums for left pixels x in [d + r, w - r - 1].
    double win = 0.0;
    for (int x = d; x < d + 2 * r + 1; ++x) win += colsum[x];
    for (int x = d + r;; ++x) {
      lwta[x].update(d, win);
      rwta[x - d].update(d, win);
      if (x + r + 1 >= w) break;
      win += colsum[x + r + 1] - colsum[x - r];
    }
  }
  for (int x = r; x < w - r; ++x) {
    const double dl = lwta[x].refine();
    if (!(dl > 0.0)) continue;
    const int xr = static_cast<int>(std::lround(x - dl));
    if (xr < 0 || xr >= w) continue;
    const double dr = rwta[xr].refine();
    if (!std::isfinite(dr) || std::abs(dl - dr) > cfg.lr_tol) continue;
    out(x, y) = static_cast<float>(dl);
  }
}

}  // namespace

DisparityMap block_match(const IntensityImage& left, const IntensityImage& right,
                         const BlockMatchConfig& cfg) {
  if (!left.same_shape(right)) throw Error(ErrorCode::DimensionMismatch, "stereo pair sizes differ");
  if (cfg.window < 1 || cfg.window % 2 == 0 || cfg.d_max < 1 || !(cfg.lr_tol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bad block matching configuration");
  }
  DisparityMap out(left.width(), left.height(), kInvalidDisparity);
  const int r = cfg.window / 2;
  const int rows = std::max(0, left.height() - 2 * r);
  parallel_for(static_cast<std::size_t>(rows), cfg.threads,
               [&](std::size_t i) { match_row(left, right, cfg, static_cast<int>(i) + r, out); });
  return out;
}

std::vector<CloudPoint> disparity_to_cloud(const DisparityMap& dmap, const CameraRig& rig, int stride) {
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  std::vector<CloudPoint> cloud;
  for (int y = 0; y < dmap.height(); y += stride) {
    for (int x = 0; x < dmap.width(); x += stride) {
      const float d = dmap(x, y);
      if (!is_valid_disparity(d)) continue;
      cloud.push_back({x, y, d, triangulate(x, y, d, rig)});
    }
  }
  return cloud;
}

}  // namespace rh
