#include "rh/synth.hpp"

#include "rh/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace rh {
namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

struct Grating {
  double ku, kv;  // 2 pi f (cos, sin)
  double phase;
  double amp;
};

using Texture = std::array<Grating, 8>;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Texture make_texture(const SceneSpec& s, std::uint64_t surface) {
  std::mt19937_64 rng(splitmix(s.texture_seed ^ splitmix(surface)));
  Texture t;
  for (auto& g : t) {
    const double theta = kPi * unit(rng);
    const double f = s.band.lo + (s.band.hi - s.band.lo) * unit(rng);
    g.ku = 2.0 * kPi * f * std::cos(theta);
    g.kv = 2.0 * kPi * f * std::sin(theta);
    g.phase = 2.0 * kPi * unit(rng);
    g.amp = 0.25 * s.contrast;
  }
  return t;
}

double shade(const Texture& t, double u, double v) {
  double sum = 0.0;
  for (const auto& g : t) sum += g.amp * std::sin(g.ku * u + g.kv * v + g.phase);
  return sum;
}

enum Face { kFront, kBack, kLeft, kRight, kTop, kBottom, kFaceCount };

struct Road {
  std::vector<double> z;      // segment starts
  std::vector<double> slope;  // dElevation / dZ
  std::vector<double> elev;   // elevation at segment start

  explicit Road(const SceneSpec& s) {
    std::vector<RoadKink> kinks = s.kinks;
    std::sort(kinks.begin(), kinks.end(), [](const RoadKink& a, const RoadKink& b) { return a.z < b.z; });
    double pitch = s.road_pitch_deg;
    z.push_back(0.0);
    slope.push_back(std::tan(deg2rad(pitch)));
    elev.push_back(0.0);
    for (const auto& k : kinks) {
      if (k.z <= z.back()) continue;
      elev.push_back(elev.back() + slope.back() * (k.z - z.back()));
      pitch += k.delta_pitch_deg;
      z.push_back(k.z);
      slope.push_back(std::tan(deg2rad(pitch)));
    }
  }

  double elevation(double depth) const {
    std::size_t k = 0;
    while (k + 1 < z.size() && depth >= z[k + 1]) ++k;
    return elev[k] + slope[k] * (depth - z[k]);
  }

  // Depth at which the ray Y = t * ry, Z = t meets the road, or kNoHit.
  double intersect(double ry, double h) const {
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double denom = ry + slope[k];
      if (denom <= 0.0) continue;
      const double t = (h - elev[k] + slope[k] * z[k]) / denom;
      const double end = k + 1 < z.size() ? z[k + 1] : kNoHit;
      if (t > 1e-6 && t >= z[k] && t < end) return t;
    }
    return kNoHit;
  }
};

struct Box {
  Eigen::Vector3d lo, hi;
  double scale;  // texture px per meter
  std::uint16_t id;
  std::array<Texture, kFaceCount> tex;
};

struct Hit {
  double z = kNoHit;
  double value = 0.0;
  std::uint16_t label = kUnlabeled;
};

class Scene {
 public:
  explicit Scene(const SceneSpec& s) : spec_(s), road_(s), road_tex_(make_texture(s, 0)) {
    for (const auto& o : s.obstacles) {
      Box b;
      const double ground = s.camera_height - road_.elevation(o.z);
      b.lo = {o.x - 0.5 * o.width, ground - o.height, o.z - 0.5 * o.depth};
      b.hi = {o.x + 0.5 * o.width, ground, o.z + 0.5 * o.depth};
      b.scale = s.rig.fx / o.z;
      b.id = o.id;
      for (int f = 0; f < kFaceCount; ++f) b.tex[f] = make_texture(s, 8u * o.id + static_cast<unsigned>(f));
      boxes_.push_back(b);
    }
  }

  // Ray from (ox, 0, 0) with direction (rx, ry, 1).
  Hit cast(double ox, double rx, double ry) const {
    Hit best;
    const double tr = road_.intersect(ry, spec_.camera_height);
    if (tr < kNoHit) {
      const double X = ox + tr * rx;
      best.z = tr;
      best.value = shade(road_tex_, spec_.rig.fx * X / tr, spec_.rig.fy * spec_.camera_height / tr);
      best.label = tr <= spec_.free_space_range ? kFreeSpace : kUnlabeled;
    }
    const double o[3] = {ox, 0.0, 0.0};
    const double r[3] = {rx, ry, 1.0};
    for (const auto& b : boxes_) {
      double t_in = -kNoHit, t_out = kNoHit;
      int face = -1;
      bool miss = false;
      for (int k = 0; k < 3 && !miss; ++k) {
        if (r[k] == 0.0) {
          miss = o[k] < b.lo[k] || o[k] > b.hi[k];
          continue;
        }
        double t0 = (b.lo[k] - o[k]) / r[k];
        double t1 = (b.hi[k] - o[k]) / r[k];
        int f0 = k == 0 ? kLeft : k == 1 ? kTop : kFront;
        int f1 = k == 0 ? kRight : k == 1 ? kBottom : kBack;
        if (t0 > t1) {
          std::swap(t0, t1);
          std::swap(f0, f1);
        }
        if (t0 > t_in) {
          t_in = t0;
          face = f0;
        }
        t_out = std::min(t_out, t1);
      }
      if (miss || face < 0 || t_in > t_out || t_in <= 1e-6 || t_in >= best.z) continue;
      const double X = o[0] + t_in * r[0], Y = t_in * r[1], Z = t_in;
      double u = 0.0, v = 0.0;
      switch (face) {
        case kFront:
        case kBack:
          u = X;
          v = Y;
          break;
        case kLeft:
        case kRight:
          u = Z;
          v = Y;
          break;
        default:
          u = X;
          v = Z;
      }
      best.z = Z;
      best.value = shade(b.tex[face], b.scale * u, b.scale * v);
      best.label = b.id;
    }
    return best;
  }

 private:
  const SceneSpec& spec_;
  Road road_;
  Texture road_tex_;
  std::vector<Box> boxes_;
};

void add_noise(IntensityImage& img, double sigma, std::uint64_t seed) {
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& v : img.data()) v += noise(rng);
  }
  for (auto& v : img.data()) v = std::clamp(std::round(v), 0.0, static_cast<double>(img.maxval()));
}

// Chebyshev dilation of the obstacle labels by `r` px.
Mask obstacle_band(const LabelMap& labels, int r) {
  const int w = labels.width(), h = labels.height();
  Mask horiz(w, h, 0), out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    int last = -1 << 30;
    for (int x = 0; x < w; ++x) {
      if (is_obstacle_label(labels(x, y))) last = x;
      if (x - last <= r) horiz(x, y) = 1;
    }
    last = 1 << 30;
    for (int x = w - 1; x >= 0; --x) {
      if (is_obstacle_label(labels(x, y))) last = x;
      if (last - x <= r) horiz(x, y) = 1;
    }
  }
  for (int x = 0; x < w; ++x) {
    int last = -1 << 30;
    for (int y = 0; y < h; ++y) {
      if (horiz(x, y)) last = y;
      if (y - last <= r) out(x, y) = 1;
    }
    last = 1 << 30;
    for (int y = h - 1; y >= 0; --y) {
      if (horiz(x, y)) last = y;
      if (last - y <= r) out(x, y) = 1;
    }
  }
  return out;
}

}  // namespace

double road_elevation(const SceneSpec& scene, double z) { return Road(scene).elevation(z); }

void validate_scene(const SceneSpec& scene) {
  scene.rig.validate();
  if (!(scene.camera_height > 0.0)) throw Error(ErrorCode::InvalidArgument, "camera height must be positive");
  if (!(scene.band.lo > 0.0 && scene.band.hi >= scene.band.lo)) {
    throw Error(ErrorCode::InvalidArgument, "bad texture band");
  }
  if (scene.supersample < 1 || scene.noise_sigma < 0.0 || scene.free_space_margin < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad render settings");
  }
  std::set<std::uint16_t> ids;
  for (const auto& o : scene.obstacles) {
    if (o.id < 2 || !ids.insert(o.id).second) {
      throw Error(ErrorCode::InvalidArgument, "obstacle ids must be unique and >= 2");
    }
    if (!(o.width > 0.0 && o.height > 0.0 && o.depth > 0.0 && o.z - 0.5 * o.depth > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "bad obstacle extent");
    }
  }
}

GroundTruthBundle render(const SceneSpec& scene, int threads) {
  validate_scene(scene);
  const CameraRig& rig = scene.rig;
  const int w = rig.width, h = rig.height;
  GroundTruthBundle out;
  out.left = IntensityImage(w, h, 0.0, 4095);
  out.right = IntensityImage(w, h, 0.0, 4095);
  out.gt_disparity = DisparityMap(w, h, kInvalidDisparity);
  out.labels = LabelMap(w, h, kUnlabeled);
  const Scene sc(scene);
  const int ss = scene.supersample;

  parallel_for(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      for (int cam = 0; cam < 2; ++cam) {
        const double ox = cam == 0 ? 0.0 : rig.baseline;
        double acc = 0.0;
        for (int j = 0; j < ss; ++j) {
          for (int i = 0; i < ss; ++i) {
            const double px = x + (i + 0.5) / ss - 0.5;
            const double py = y + (j + 0.5) / ss - 0.5;
            const Hit hit = sc.cast(ox, (px - rig.x0) / rig.fx, (py - rig.y0) / rig.fy);
            acc += hit.z < kNoHit ? scene.mean_intensity + hit.value : scene.sky_intensity;
          }
        }
        (cam == 0 ? out.left : out.right)(x, y) = acc / (ss * ss);
      }
      const Hit c = sc.cast(0.0, (x - rig.x0) / rig.fx, (y - rig.y0) / rig.fy);
      if (c.z < kNoHit) {
        out.gt_disparity(x, y) = static_cast<float>(rig.fx * rig.baseline / c.z);
        out.labels(x, y) = c.label;
      }
    }
  });

  add_noise(out.left, scene.noise_sigma, splitmix(scene.noise_seed));
  add_noise(out.right, scene.noise_sigma, splitmix(scene.noise_seed ^ 0x5bd1e995ULL));

  if (scene.free_space_margin > 0 && !scene.obstacles.empty()) {
    const Mask band = obstacle_band(out.labels, scene.free_space_margin);
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      if (band.data()[i] && out.labels.data()[i] == kFreeSpace) out.labels.data()[i] = kUnlabeled;
    }
  }
  out.free_space = Mask(w, h, 0);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    out.free_space.data()[i] = out.labels.data()[i] == kFreeSpace ? 1 : 0;
  }
  return out;
}

CameraRig full_rig() { return {2300.0, 2300.0, 1023.5, 511.5, 0.21, 2048, 1024}; }

std::vector<std::string> suite_names() { return {"flat_easy", "far_small", "double_kink"}; }

std::vector<SceneSpec> scene_suite(const std::string& name) {
  auto scene = [](const std::string& n, std::uint64_t seed, std::vector<BoxObstacle> boxes) {
    SceneSpec s;
    s.name = n;
    s.rig = full_rig();
    s.texture_seed = seed;
    s.noise_seed = seed * 7919 + 1;
    s.obstacles = std::move(boxes);
    return s;
  };
  std::vector<SceneSpec> out;
  if (name == "flat_easy") {
    out.push_back(scene("flat_easy_0", 11, {{0.0, 10.0, 0.5, 0.3, 0.3, 2}}));
    out.push_back(scene("flat_easy_1", 12, {{-1.0, 15.0, 0.6, 0.5, 0.4, 2}}));
    out.push_back(scene("flat_easy_2", 13, {{-0.8, 8.0, 0.4, 0.3, 0.3, 2}, {1.2, 12.0, 0.5, 0.4, 0.3, 3}}));
  } else if (name == "far_small") {
    out.push_back(scene("far_small_0", 21, {{0.0, 20.0, 0.4, 0.05, 0.2, 2}}));
    out.push_back(scene("far_small_1", 22, {{0.0, 20.0, 0.4, 0.10, 0.2, 2}}));
    out.push_back(scene("far_small_2", 23, {{-1.5, 20.0, 0.4, 0.05, 0.2, 2}, {1.5, 20.0, 0.4, 0.10, 0.2, 3}}));
    out.push_back(scene("far_small_3", 24, {{0.5, 25.0, 0.4, 0.10, 0.2, 2}}));
  } else if (name == "double_kink") {
    const std::vector<RoadKink> kinks{{15.0, 4.0}, {25.0, -4.0}};
    out.push_back(scene("double_kink_0", 31, {{0.0, 12.0, 0.4, 0.15, 0.3, 2}}));
    out.push_back(scene("double_kink_1", 32, {{-0.5, 20.0, 0.5, 0.2, 0.3, 2}}));
    out.push_back(scene("double_kink_2", 33, {{1.0, 30.0, 0.6, 0.3, 0.3, 2}}));
    for (auto& s : out) s.kinks = kinks;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scene suite '" + name + "'");
  }
  return out;
}

}  // namespace rh
