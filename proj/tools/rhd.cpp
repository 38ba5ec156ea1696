// rhd: synthetic scenes, disparity, obstacle detection, stixels, evaluation.
//
// Exit status: 0 ok, 1 usage error, 2 data error.

#include "rh/block_match.hpp"
#include "rh/cluster_stixels.hpp"
#include "rh/config_io.hpp"
#include "rh/csv_io.hpp"
#include "rh/error.hpp"
#include "rh/hypothesis.hpp"
#include "rh/image_io.hpp"
#include "rh/metrics.hpp"
#include "rh/patch_grid.hpp"
#include "rh/pipeline.hpp"
#include "rh/point_compat.hpp"
#include "rh/report.hpp"
#include "rh/sweep.hpp"
#include "rh/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace rh;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

void write_manifest(const fs::path& out, const std::string& command, const Json& config,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  write_json(out / (command + ".manifest.json"), make_manifest(command, config, inputs, outputs, out));
}

// "15" or "15x9" (w x h).
std::pair<int, int> parse_patch(const std::string& s) {
  int w = 0, h = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%dx%d%c", &w, &h, &extra) == 2) return {w, h};
  if (std::sscanf(s.c_str(), "%d%c", &w, &extra) == 1) return {w, w};
  throw UsageError("--patch expects N or WxH, got '" + s + "'");
}

// ---- synth -----------------------------------------------------------------

struct SynthOpts {
  std::string suite;
  std::string scene;
  std::string calib;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

void run_synth(const SynthOpts& o) {
  if (o.suite.empty() == o.scene.empty()) throw UsageError("synth needs exactly one of --suite or --scene");
  std::vector<SceneSpec> scenes;
  std::vector<fs::path> inputs;
  if (!o.suite.empty()) {
    scenes = scene_suite(o.suite);
  } else {
    scenes.push_back(scene_from_json(read_json(o.scene)));
    inputs.emplace_back(o.scene);
  }
  if (!o.calib.empty()) {
    const CameraRig rig = load_calibration(o.calib);
    for (auto& s : scenes) s.rig = rig;
    inputs.emplace_back(o.calib);
  }
  if (o.seed) {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      scenes[i].texture_seed = *o.seed + i;
      scenes[i].noise_seed = scenes[i].texture_seed * 7919 + 1;
    }
  }
  const fs::path out(o.out);
  ensure_dir(out);
  std::vector<fs::path> outputs;
  Json cfg = Json::array();
  for (const auto& s : scenes) {
    const GroundTruthBundle gt = render(s, o.threads);
    const fs::path dir = out / s.name;
    ensure_dir(dir);
    save_pgm(dir / "left.pgm", gt.left);
    save_pgm(dir / "right.pgm", gt.right);
    save_pfm(dir / "gt_disparity.pfm", gt.gt_disparity);
    save_label_pgm(dir / "labels.pgm", gt.labels);
    save_mask_pgm(dir / "free_space.pgm", gt.free_space);
    write_json(dir / "scene.json", scene_to_json(s));
    write_json(dir / "calib.json", rig_to_json(s.rig));
    for (const char* f : {"left.pgm", "right.pgm", "gt_disparity.pfm", "labels.pgm", "free_space.pgm", "scene.json",
                          "calib.json"}) {
      outputs.push_back(dir / f);
    }
    cfg.push_back(scene_to_json(s));
  }
  write_manifest(out, "synth", {{"suite", o.suite}, {"scenes", cfg}}, inputs, outputs);
  std::cout << "rendered " << scenes.size() << " scene(s) into " << out.string() << "\n";
}

// ---- disparity -------------------------------------------------------------

struct DisparityOpts {
  std::string left, right, config, out;
  int window = 0, d_max = 0;
  double lr_tol = -1.0;
  int threads = 1;
};

void run_disparity(const DisparityOpts& o) {
  BlockMatchConfig bm;
  std::vector<fs::path> inputs{o.left, o.right};
  if (!o.config.empty()) {
    bm = block_match_from_json(read_json(o.config), bm);
    inputs.emplace_back(o.config);
  }
  if (o.window > 0) bm.window = o.window;
  if (o.d_max > 0) bm.d_max = o.d_max;
  if (o.lr_tol >= 0.0) bm.lr_tol = o.lr_tol;
  bm.threads = o.threads;
  const IntensityImage left = load_pgm(o.left);
  const IntensityImage right = load_pgm(o.right);
  const DisparityMap d = block_match(left, right, bm);
  const fs::path out(o.out);
  ensure_dir(out);
  save_pfm(out / "disparity.pfm", d);
  write_manifest(out, "disparity", block_match_to_json(bm), inputs, {out / "disparity.pfm"});
}

// ---- detect ----------------------------------------------------------------

struct DetectOpts {
  std::string method = "fpht";
  std::string left, right, disp, calib, config, out;
  std::string patch;
  std::optional<int> stride, downsample;
  std::optional<double> tau, phi_f, phi_o, lambda_min;
  std::optional<double> pc_phi, h_min, h_max;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void run_detect(const DetectOpts& o) {
  std::vector<fs::path> inputs{o.left, o.right, o.disp, o.calib};
  DetectorConfig cfg;
  PcParams pc;
  if (!o.config.empty()) {
    const Json j = read_json(o.config);
    cfg = detector_from_json(j, cfg);
    if (j.contains("pc")) pc = pc_from_json(j.at("pc"), pc);
    inputs.emplace_back(o.config);
  }
  if (!o.patch.empty()) std::tie(cfg.patch_w, cfg.patch_h) = parse_patch(o.patch);
  if (o.stride) cfg.stride = *o.stride;
  if (o.downsample) cfg.downsample = *o.downsample;
  if (o.tau) cfg.tau = *o.tau;
  if (o.phi_f) cfg.phi_f = deg2rad(*o.phi_f);
  if (o.phi_o) cfg.phi_o = deg2rad(*o.phi_o);
  if (o.lambda_min) cfg.lambda_min = *o.lambda_min;
  if (o.pc_phi) pc.phi_deg = *o.pc_phi;
  if (o.h_min) pc.h_min = *o.h_min;
  if (o.h_max) pc.h_max = *o.h_max;
  cfg.threads = o.threads;

  const CameraRig rig = load_calibration(o.calib);
  const IntensityImage left_full = load_pgm(o.left);
  const IntensityImage right_full = load_pgm(o.right);
  const DisparityMap disp_full = load_pfm(o.disp);
  if (!left_full.same_shape(rig.width, rig.height)) {
    throw Error(ErrorCode::DimensionMismatch, "image size does not match the calibration");
  }
  const int dwn = cfg.downsample;
  const CameraRig drig = reduce_rig(rig, dwn);
  const IntensityImage left = reduce_image(left_full, dwn);
  const IntensityImage right = reduce_image(right_full, dwn);
  const DisparityMap disp = reduce_disparity(disp_full, dwn);

  const fs::path out(o.out);
  ensure_dir(out);
  std::vector<fs::path> outputs;
  Json record = {{"method", o.method}, {"detector", detector_to_json(cfg)}};
  if (o.seed) record["seed"] = *o.seed;

  std::vector<ObstaclePoint> points;
  if (o.method == "pc") {
    pc.validate();
    const auto cloud = disparity_to_cloud(disp, drig, cfg.stride);
    const PcResult r = pc_detect(cloud, drig, pc);
    points = obstacle_points(cloud, r);
    record["pc"] = pc_to_json(pc);
  } else {
    const Method m = parse_method(o.method);
    const PatchGrid grid = make_patch_grid(left.width(), left.height(), cfg.patch_w, cfg.patch_h, cfg.stride, dwn);
    const auto decisions = detect_frame(left, right, disp, grid, drig, cfg, m);
    save_table(out / "decisions.csv", decisions, &write_decisions_csv);
    outputs.push_back(out / "decisions.csv");
    points = obstacle_points(decisions, drig);
  }
  save_table(out / "points.csv", points, &write_points_csv);
  outputs.push_back(out / "points.csv");
  write_manifest(out, "detect", record, inputs, outputs);
  std::cout << points.size() << " obstacle point(s)\n";
}

// ---- cstix -----------------------------------------------------------------

struct CstixOpts {
  std::string points, disp, calib, config, out;
  std::optional<int> downsample, stixel_width;
};

void run_cstix(const CstixOpts& o) {
  std::vector<fs::path> inputs{o.points, o.disp, o.calib};
  ClusterParams cp;
  if (!o.config.empty()) {
    cp = cluster_from_json(read_json(o.config), cp);
    inputs.emplace_back(o.config);
  }
  if (o.stixel_width) cp.stixel_width = *o.stixel_width;
  const int dwn = o.downsample.value_or(1);
  const CameraRig rig = reduce_rig(load_calibration(o.calib), dwn);
  const DisparityMap disp = reduce_disparity(load_pfm(o.disp), dwn);
  const auto points = load_table(o.points, &read_points_csv);
  const auto stixels = midlevel_rep(points, disp, cp, rig);
  const fs::path out(o.out);
  ensure_dir(out);
  save_table(out / "stixels.csv", stixels, &write_stixels_csv);
  write_manifest(out, "cstix", {{"cluster", cluster_to_json(cp)}, {"downsample", dwn}}, inputs,
                 {out / "stixels.csv"});
  std::cout << stixels.size() << " stixel(s)\n";
}

// ---- eval ------------------------------------------------------------------

struct EvalOpts {
  std::string level = "pixel";
  std::vector<std::string> labels, decisions, points, stixels, free_space;
  int stride = 2;
  int downsample = 1;
  double overlap = 0.5;
  std::string out;
};

void run_eval(const EvalOpts& o) {
  const SweepLevel level = parse_level(o.level);
  std::vector<fs::path> inputs;
  Json result;
  if (level == SweepLevel::kPixel) {
    const auto& preds = o.decisions.empty() ? o.points : o.decisions;
    if (o.decisions.empty() == o.points.empty()) throw UsageError("pixel level needs --decisions or --points");
    if (preds.size() != o.labels.size()) throw UsageError("one label map per prediction file");
    PixelCounts total;
    total.sub = o.stride;
    total.dwn = o.downsample;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const LabelMap labels = load_label_pgm(o.labels[i]);
      Mask mask(labels.width() / o.downsample, labels.height() / o.downsample, 0);
      if (!o.decisions.empty()) {
        mask = decisions_to_mask(load_table(preds[i], &read_decisions_csv), mask.width(), mask.height());
      } else {
        for (const auto& p : load_table(preds[i], &read_points_csv)) mask.at(p.x, p.y) = 1;
      }
      total += count_pixels(mask, labels, o.stride, o.downsample);
      inputs.emplace_back(preds[i]);
      inputs.emplace_back(o.labels[i]);
    }
    const RocPoint r = pixel_rates(total);
    result = {{"level", "pixel"},
              {"tp", total.tp},
              {"fp", total.fp},
              {"sub", total.sub},
              {"dwn", total.dwn},
              {"gt_obstacles", total.gt_obstacles},
              {"gt_freespace", total.gt_freespace},
              {"tpr", r.y},
              {"fpr", r.x}};
  } else {
    if (o.stixels.size() != o.labels.size() || o.free_space.size() != o.labels.size()) {
      throw UsageError("instance level needs matching --stixels, --labels and --free-space lists");
    }
    std::vector<InstanceStats> frames;
    for (std::size_t i = 0; i < o.stixels.size(); ++i) {
      frames.push_back(instance_metrics(load_table(o.stixels[i], &read_stixels_csv), load_label_pgm(o.labels[i]),
                                        load_mask_pgm(o.free_space[i]), o.overlap, o.downsample));
      inputs.insert(inputs.end(), {o.stixels[i], o.labels[i], o.free_space[i]});
    }
    const InstanceSummary s = summarize(frames);
    result = {{"level", "instance"},
              {"instances", s.instances},
              {"frames", s.frames},
              {"fp_stixels", s.fp_stixels},
              {"iint", s.iint},
              {"fp_per_frame", s.fp_per_frame},
              {"overlap_thresh", o.overlap},
              {"dwn", o.downsample}};
  }
  std::cout << result.dump(2) << "\n";
  if (!o.out.empty()) {
    const fs::path out(o.out);
    ensure_dir(out);
    write_json(out / "eval.json", result);
    write_manifest(out, "eval", {{"level", o.level}, {"stride", o.stride}, {"downsample", o.downsample},
                                 {"overlap", o.overlap}},
                   inputs, {out / "eval.json"});
  }
}

// ---- sweep / report --------------------------------------------------------

struct SweepOpts {
  std::string grid, calib, out;
  std::vector<std::string> data;
  int threads = 1;
};

void run_sweep_cmd(const SweepOpts& o) {
  if (o.data.empty()) throw UsageError("sweep needs at least one --data scene directory");
  const SweepGrid grid = grid_from_json(read_json(o.grid));
  std::vector<fs::path> inputs{o.grid};
  const fs::path calib = o.calib.empty() ? fs::path(o.data.front()) / "calib.json" : fs::path(o.calib);
  const CameraRig rig = load_calibration(calib);
  inputs.push_back(calib);
  std::vector<GroundTruthBundle> dataset;
  for (const auto& d : o.data) {
    const fs::path dir(d);
    GroundTruthBundle gt;
    gt.left = load_pgm(dir / "left.pgm");
    gt.right = load_pgm(dir / "right.pgm");
    gt.labels = load_label_pgm(dir / "labels.pgm");
    gt.free_space = load_mask_pgm(dir / "free_space.pgm");
    dataset.push_back(std::move(gt));
    for (const char* f : {"left.pgm", "right.pgm", "labels.pgm", "free_space.pgm"}) inputs.push_back(dir / f);
  }
  const SweepResult result = run_sweep(dataset, rig, grid, o.threads);
  const fs::path out(o.out);
  ensure_dir(out);
  emit_report(result, out / "sweep");
  write_manifest(out, "sweep", grid_to_json(grid), inputs, {out / "sweep.csv", out / "sweep.svg"});
  std::cout << result.points.size() << " configuration(s), " << result.hull.size() << " hull vertices\n";
}

struct ReportOpts {
  std::string csv, out;
};

void run_report(const ReportOpts& o) {
  std::ifstream in(o.csv, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + o.csv);
  const SweepResult result = read_sweep_csv(in);
  const fs::path out(o.out);
  ensure_dir(out);
  emit_report(result, out / "report");
  write_manifest(out, "report", Json::object(), {o.csv}, {out / "report.csv", out / "report.svg"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stereo obstacle detection toolkit"};
  app.require_subcommand(1);

  SynthOpts synth;
  auto* c_synth = app.add_subcommand("synth", "render synthetic stereo scenes with ground truth");
  c_synth->add_option("--suite", synth.suite, "flat_easy | far_small | double_kink");
  c_synth->add_option("--scene", synth.scene, "scene JSON");
  c_synth->add_option("--calib", synth.calib, "override the rig");
  c_synth->add_option("--seed", synth.seed, "texture seed of the first scene");
  c_synth->add_option("--out", synth.out)->required();
  c_synth->add_option("--threads", synth.threads);

  DisparityOpts disp;
  auto* c_disp = app.add_subcommand("disparity", "block-matching disparity");
  c_disp->add_option("--left", disp.left)->required();
  c_disp->add_option("--right", disp.right)->required();
  c_disp->add_option("--config", disp.config, "block match JSON");
  c_disp->add_option("--window", disp.window);
  c_disp->add_option("--d-max", disp.d_max);
  c_disp->add_option("--lr-tol", disp.lr_tol);
  c_disp->add_option("--out", disp.out)->required();
  c_disp->add_option("--threads", disp.threads);

  DetectOpts det;
  auto* c_det = app.add_subcommand("detect", "per-patch or point-cloud obstacle detection");
  c_det->add_option("--method", det.method)->check(CLI::IsMember({"fpht", "pht", "pc"}));
  c_det->add_option("--left", det.left)->required();
  c_det->add_option("--right", det.right)->required();
  c_det->add_option("--disp", det.disp)->required();
  c_det->add_option("--calib", det.calib)->required();
  c_det->add_option("--config", det.config, "detector JSON; flags override it");
  c_det->add_option("--patch", det.patch, "N or WxH");
  c_det->add_option("--stride", det.stride);
  c_det->add_option("--downsample", det.downsample);
  c_det->add_option("--tau", det.tau);
  c_det->add_option("--phi-f", det.phi_f, "degrees");
  c_det->add_option("--phi-o", det.phi_o, "degrees");
  c_det->add_option("--lambda-min", det.lambda_min);
  c_det->add_option("--pc-phi", det.pc_phi, "degrees");
  c_det->add_option("--h-min", det.h_min);
  c_det->add_option("--h-max", det.h_max);
  c_det->add_option("--seed", det.seed);
  c_det->add_option("--out", det.out)->required();
  c_det->add_option("--threads", det.threads);

  CstixOpts cs;
  auto* c_cs = app.add_subcommand("cstix", "cluster obstacle points into stixels");
  c_cs->add_option("--points", cs.points)->required();
  c_cs->add_option("--disp", cs.disp)->required();
  c_cs->add_option("--calib", cs.calib)->required();
  c_cs->add_option("--config", cs.config, "cluster JSON");
  c_cs->add_option("--downsample", cs.downsample);
  c_cs->add_option("--stixel-width", cs.stixel_width);
  c_cs->add_option("--out", cs.out)->required();

  EvalOpts ev;
  auto* c_ev = app.add_subcommand("eval", "pixel or instance level metrics");
  c_ev->add_option("--level", ev.level)->check(CLI::IsMember({"pixel", "instance"}));
  c_ev->add_option("--labels", ev.labels)->required();
  c_ev->add_option("--decisions", ev.decisions);
  c_ev->add_option("--points", ev.points);
  c_ev->add_option("--stixels", ev.stixels);
  c_ev->add_option("--free-space", ev.free_space);
  c_ev->add_option("--stride", ev.stride);
  c_ev->add_option("--downsample", ev.downsample);
  c_ev->add_option("--overlap", ev.overlap);
  c_ev->add_option("--out", ev.out);

  SweepOpts sw;
  auto* c_sw = app.add_subcommand("sweep", "parameter sweep over scene directories");
  c_sw->add_option("--grid", sw.grid)->required();
  c_sw->add_option("--data", sw.data)->required();
  c_sw->add_option("--calib", sw.calib);
  c_sw->add_option("--out", sw.out)->required();
  c_sw->add_option("--threads", sw.threads);

  ReportOpts rep;
  auto* c_rep = app.add_subcommand("report", "CSV and SVG from a sweep CSV");
  c_rep->add_option("--csv", rep.csv)->required();
  c_rep->add_option("--out", rep.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*c_synth) run_synth(synth);
    else if (*c_disp) run_disparity(disp);
    else if (*c_det) run_detect(det);
    else if (*c_cs) run_cstix(cs);
    else if (*c_ev) run_eval(ev);
    else if (*c_sw) run_sweep_cmd(sw);
    else if (*c_rep) run_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
