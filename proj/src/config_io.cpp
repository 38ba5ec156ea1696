#include "rh/config_io.hpp"

#include "rh/error.hpp"

#include <fstream>
#include <sstream>

namespace rh {
namespace {

template <typename T>
void take(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad value for '") + key + "': " + e.what());
  }
}

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedHeader, std::string(what) + " must be a JSON object");
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out.flush()) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Json rig_to_json(const CameraRig& rig) {
  return {{"fx", rig.fx},        {"fy", rig.fy},       {"x0", rig.x0},          {"y0", rig.y0},
          {"baseline_m", rig.baseline}, {"width", rig.width}, {"height", rig.height}};
}

CameraRig rig_from_json(const Json& j) {
  require_object(j, "calibration");
  for (const char* key : {"fx", "fy", "x0", "y0", "baseline_m", "width", "height"}) {
    if (!j.contains(key)) throw Error(ErrorCode::MalformedHeader, std::string("calibration lacks '") + key + "'");
  }
  CameraRig r;
  take(j, "fx", r.fx);
  take(j, "fy", r.fy);
  take(j, "x0", r.x0);
  take(j, "y0", r.y0);
  take(j, "baseline_m", r.baseline);
  take(j, "width", r.width);
  take(j, "height", r.height);
  r.validate();
  return r;
}

CameraRig load_calibration(const std::filesystem::path& path) { return rig_from_json(read_json(path)); }

Json detector_to_json(const DetectorConfig& c) {
  return {{"patch_w", c.patch_w},
          {"patch_h", c.patch_h},
          {"stride", c.stride},
          {"downsample", c.downsample},
          {"phi_f_deg", rad2deg(c.phi_f)},
          {"phi_o_deg", rad2deg(c.phi_o)},
          {"tau", c.tau},
          {"lambda_min", c.lambda_min},
          {"mean_removal", c.mean_removal},
          {"interpolation", c.interpolation == Interpolation::kCubic ? "cubic" : "linear"},
          {"max_excluded_fraction", c.max_excluded_fraction},
          {"min_init_fraction", c.min_init_fraction},
          {"b_min", c.b_min},
          {"lm",
           {{"max_iter", c.lm.max_iter},
            {"damping_init", c.lm.damping_init},
            {"step_tol", c.lm.step_tol},
            {"f_tol", c.lm.f_tol}}}};
}

DetectorConfig detector_from_json(const Json& j, DetectorConfig c) {
  require_object(j, "detector config");
  take(j, "patch_w", c.patch_w);
  take(j, "patch_h", c.patch_h);
  take(j, "stride", c.stride);
  take(j, "downsample", c.downsample);
  double deg = rad2deg(c.phi_f);
  take(j, "phi_f_deg", deg);
  c.phi_f = deg2rad(deg);
  deg = rad2deg(c.phi_o);
  take(j, "phi_o_deg", deg);
  c.phi_o = deg2rad(deg);
  take(j, "tau", c.tau);
  take(j, "lambda_min", c.lambda_min);
  take(j, "mean_removal", c.mean_removal);
  std::string interp = c.interpolation == Interpolation::kCubic ? "cubic" : "linear";
  take(j, "interpolation", interp);
  if (interp == "cubic") c.interpolation = Interpolation::kCubic;
  else if (interp == "linear") c.interpolation = Interpolation::kLinear;
  else throw Error(ErrorCode::InvalidArgument, "interpolation must be cubic or linear");
  take(j, "max_excluded_fraction", c.max_excluded_fraction);
  take(j, "min_init_fraction", c.min_init_fraction);
  take(j, "b_min", c.b_min);
  if (j.contains("lm")) {
    const Json& lm = j.at("lm");
    require_object(lm, "lm settings");
    take(lm, "max_iter", c.lm.max_iter);
    take(lm, "damping_init", c.lm.damping_init);
    take(lm, "step_tol", c.lm.step_tol);
    take(lm, "f_tol", c.lm.f_tol);
  }
  return c;
}

Json block_match_to_json(const BlockMatchConfig& c) {
  return {{"window", c.window}, {"d_max", c.d_max}, {"lr_tol", c.lr_tol}};
}

BlockMatchConfig block_match_from_json(const Json& j, BlockMatchConfig c) {
  require_object(j, "block match config");
  take(j, "window", c.window);
  take(j, "d_max", c.d_max);
  take(j, "lr_tol", c.lr_tol);
  return c;
}

Json cluster_to_json(const ClusterParams& p) {
  return {{"stixel_width", p.stixel_width}, {"w0", p.w0},
          {"l0", p.l0},                     {"kappa", p.kappa},
          {"sigma_d", p.sigma_d},           {"minpts0", p.minpts0},
          {"k", p.k},                       {"var_thresh", p.var_thresh},
          {"min_split_height", p.min_split_height}};
}

ClusterParams cluster_from_json(const Json& j, ClusterParams p) {
  require_object(j, "cluster params");
  take(j, "stixel_width", p.stixel_width);
  take(j, "w0", p.w0);
  take(j, "l0", p.l0);
  take(j, "kappa", p.kappa);
  take(j, "sigma_d", p.sigma_d);
  take(j, "minpts0", p.minpts0);
  take(j, "k", p.k);
  take(j, "var_thresh", p.var_thresh);
  take(j, "min_split_height", p.min_split_height);
  return p;
}

Json pc_to_json(const PcParams& p) { return {{"phi_deg", p.phi_deg}, {"h_min", p.h_min}, {"h_max", p.h_max}}; }

PcParams pc_from_json(const Json& j, PcParams p) {
  require_object(j, "PC params");
  take(j, "phi_deg", p.phi_deg);
  take(j, "h_min", p.h_min);
  take(j, "h_max", p.h_max);
  return p;
}

Json scene_to_json(const SceneSpec& s) {
  Json kinks = Json::array();
  for (const auto& k : s.kinks) kinks.push_back({{"z", k.z}, {"delta_pitch_deg", k.delta_pitch_deg}});
  Json boxes = Json::array();
  for (const auto& b : s.obstacles) {
    boxes.push_back({{"id", b.id},
                     {"x", b.x},
                     {"z", b.z},
                     {"width", b.width},
                     {"height", b.height},
                     {"depth", b.depth}});
  }
  return {{"name", s.name},
          {"rig", rig_to_json(s.rig)},
          {"camera_height", s.camera_height},
          {"road_pitch_deg", s.road_pitch_deg},
          {"kinks", kinks},
          {"obstacles", boxes},
          {"texture_seed", s.texture_seed},
          {"noise_seed", s.noise_seed},
          {"band", {{"lo", s.band.lo}, {"hi", s.band.hi}}},
          {"noise_sigma", s.noise_sigma},
          {"mean_intensity", s.mean_intensity},
          {"contrast", s.contrast},
          {"sky_intensity", s.sky_intensity},
          {"supersample", s.supersample},
          {"free_space_range", s.free_space_range},
          {"free_space_margin", s.free_space_margin}};
}

SceneSpec scene_from_json(const Json& j) {
  require_object(j, "scene");
  SceneSpec s;
  take(j, "name", s.name);
  if (!j.contains("rig")) throw Error(ErrorCode::MalformedHeader, "scene lacks 'rig'");
  s.rig = rig_from_json(j.at("rig"));
  take(j, "camera_height", s.camera_height);
  take(j, "road_pitch_deg", s.road_pitch_deg);
  if (j.contains("kinks")) {
    for (const auto& k : j.at("kinks")) {
      RoadKink rk;
      take(k, "z", rk.z);
      take(k, "delta_pitch_deg", rk.delta_pitch_deg);
      s.kinks.push_back(rk);
    }
  }
  if (j.contains("obstacles")) {
    for (const auto& o : j.at("obstacles")) {
      BoxObstacle b;
      take(o, "id", b.id);
      take(o, "x", b.x);
      take(o, "z", b.z);
      take(o, "width", b.width);
      take(o, "height", b.height);
      take(o, "depth", b.depth);
      s.obstacles.push_back(b);
    }
  }
  take(j, "texture_seed", s.texture_seed);
  take(j, "noise_seed", s.noise_seed);
  if (j.contains("band")) {
    take(j.at("band"), "lo", s.band.lo);
    take(j.at("band"), "hi", s.band.hi);
  }
  take(j, "noise_sigma", s.noise_sigma);
  take(j, "mean_intensity", s.mean_intensity);
  take(j, "contrast", s.contrast);
  take(j, "sky_intensity", s.sky_intensity);
  take(j, "supersample", s.supersample);
  take(j, "free_space_range", s.free_space_range);
  take(j, "free_space_margin", s.free_space_margin);
  validate_scene(s);
  return s;
}

Json grid_to_json(const SweepGrid& g) {
  Json patches = Json::array();
  for (const auto& [w, h] : g.patches) patches.push_back({w, h});
  return {{"method", g.method},
          {"level", to_string(g.level)},
          {"patches", patches},
          {"lambda_min", g.lambda_min},
          {"tau", g.tau},
          {"pc_phi_deg", g.pc_phi_deg},
          {"pc_h_min", g.pc_h_min},
          {"pc_h_max", g.pc_h_max},
          {"detector", detector_to_json(g.detector)},
          {"block_match", block_match_to_json(g.block_match)},
          {"cluster", cluster_to_json(g.cluster)},
          {"overlap_thresh", g.overlap_thresh}};
}

SweepGrid grid_from_json(const Json& j) {
  require_object(j, "sweep grid");
  SweepGrid g;
  take(j, "method", g.method);
  std::string level = to_string(g.level);
  take(j, "level", level);
  g.level = parse_level(level);
  if (j.contains("patches")) {
    g.patches.clear();
    for (const auto& p : j.at("patches")) {
      // [w, h] or a single odd size for square patches
      if (p.is_number_integer()) {
        g.patches.emplace_back(p.get<int>(), p.get<int>());
      } else if (p.is_array() && p.size() == 2) {
        g.patches.emplace_back(p[0].get<int>(), p[1].get<int>());
      } else {
        throw Error(ErrorCode::MalformedHeader, "patch entries must be N or [w, h]");
      }
    }
  }
  take(j, "lambda_min", g.lambda_min);
  take(j, "tau", g.tau);
  take(j, "pc_phi_deg", g.pc_phi_deg);
  take(j, "pc_h_min", g.pc_h_min);
  take(j, "pc_h_max", g.pc_h_max);
  if (j.contains("detector")) g.detector = detector_from_json(j.at("detector"), g.detector);
  if (j.contains("block_match")) g.block_match = block_match_from_json(j.at("block_match"), g.block_match);
  if (j.contains("cluster")) g.cluster = cluster_from_json(j.at("cluster"), g.cluster);
  take(j, "overlap_thresh", g.overlap_thresh);
  g.validate();
  return g;
}

}  // namespace rh
