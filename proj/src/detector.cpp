#include "rh/error.hpp"
#include "rh/hypothesis.hpp"
#include "rh/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rh {

const char* to_string(Method m) { return m == Method::kPht ? "pht" : "fpht"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kObstacle:
      return "obstacle";
    case Verdict::kFreeSpace:
      return "free_space";
    case Verdict::kNoDecision:
      break;
  }
  return "no_decision";
}

Method parse_method(const std::string& name) {
  if (name == "fpht") return Method::kFpht;
  if (name == "pht") return Method::kPht;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

double texture_score(const HypothesisFit& fit) {
  if (fit.pixels <= 0) return 0.0;
  return fit.min_eigenvalue / (fit.pixels * fit.range_scale * fit.range_scale);
}

namespace {

bool passes_gate(const HypothesisFit& fit, double lambda_min) {
  return fit.converged && std::isfinite(fit.residual_sum) && texture_score(fit) >= lambda_min;
}

// PHT residuals carry half of the left/right difference twice, so its sums are
// half of the FPHT ones for the same alignment.
double statistic_weight(Method m) { return m == Method::kPht ? 2.0 : 1.0; }

double median(std::vector<float>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

Verdict reclassify(const PatchDecision& decision, double tau, double lambda_min) {
  if (!passes_gate(decision.fit_f, lambda_min) || !passes_gate(decision.fit_o, lambda_min)) {
    return Verdict::kNoDecision;
  }
  return decision.statistic > tau ? Verdict::kObstacle : Verdict::kFreeSpace;
}

PatchDecision glrt_decide(const HypothesisFit& fit_f, const HypothesisFit& fit_o,
                          const DetectorConfig& cfg) {
  PatchDecision out;
  out.fit_f = fit_f;
  out.fit_o = fit_o;
  if (std::isfinite(fit_f.residual_sum) && std::isfinite(fit_o.residual_sum)) {
    out.statistic = statistic_weight(fit_f.method) * (fit_f.residual_sum - fit_o.residual_sum);
  }
  out.verdict = reclassify(out, cfg.tau, cfg.lambda_min);
  return out;
}

PatchInit initialize_patch(const DisparityMap& dmap, const PatchSpec& patch, double min_fraction) {
  PatchInit init;
  if (!patch.inside(dmap.width(), dmap.height())) return init;
  std::vector<float> all;
  std::vector<float> row;
  std::vector<double> ys, ds;
  for (int y = patch.y_begin(); y < patch.y_end(); ++y) {
    row.clear();
    for (int x = patch.x_begin(); x < patch.x_end(); ++x) {
      const float d = dmap(x, y);
      if (is_valid_disparity(d)) row.push_back(d);
    }
    if (row.empty()) continue;
    all.insert(all.end(), row.begin(), row.end());
    ys.push_back(patch.ybar(y));
    ds.push_back(median(row));
  }
  if (all.empty() || all.size() < min_fraction * patch.pixel_count()) return init;
  init.ok = true;
  init.obstacle = {0.0, median(all)};

  const double n = static_cast<double>(ys.size());
  double my = 0.0, md = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    my += ys[i];
    md += ds[i];
  }
  my /= n;
  md /= n;
  double syy = 0.0, syd = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    syy += (ys[i] - my) * (ys[i] - my);
    syd += (ys[i] - my) * (ds[i] - md);
  }
  const double a = syy > 0.0 ? syd / syy : 0.0;
  init.free_space = {a, md - a * my};
  return init;
}

namespace {

PatchDecision decide_patch(const IntensityImage& left, const IntensityImage& right,
                           const DisparityMap& dmap, const PatchSpec& patch, const CameraRig& rig,
                           const DetectorConfig& cfg, Method method) {
  PatchDecision out;
  out.patch = patch;
  out.fit_f.method = out.fit_o.method = method;
  const PatchInit init = initialize_patch(dmap, patch, cfg.min_init_fraction);
  if (!init.ok) return out;

  const Plane3D ground = Plane3D::ground(1.0);
  const Plane3D front = Plane3D::fronto_parallel(1.0);
  FeasibleWedge wf, wo;
  try {
    wf = wedge_for_hypothesis(ground, cfg.phi_f, rig, patch, cfg.b_min);
    wo = wedge_for_hypothesis(front, cfg.phi_o, rig, patch, cfg.b_min);
  } catch (const Error&) {
    return out;  // hypothesis range not visible from this patch
  }
  const DisparityLine init_f = project_onto_wedge(init.free_space, wf);
  const DisparityLine init_o = project_onto_wedge(init.obstacle, wo);

  HypothesisFit fit_f, fit_o;
  if (method == Method::kFpht) {
    fit_f = fpht_fit(left, right, patch, init_f, wf, cfg);
    fit_o = fpht_fit(left, right, patch, init_o, wo, cfg);
    for (HypothesisFit* fit : {&fit_f, &fit_o}) {
      try {
        fit->plane = disparity_line_to_plane(fit->line, rig, patch);
      } catch (const Error&) {
      }
    }
  } else {
    Plane3D pf, po;
    try {
      pf = disparity_line_to_plane(init_f, rig, patch);
      po = disparity_line_to_plane(init_o, rig, patch);
    } catch (const Error&) {
      return out;
    }
    fit_f = pht_fit(left, right, patch, pf, PlaneBounds::around(ground, cfg.phi_f), rig, cfg);
    fit_o = pht_fit(left, right, patch, po, PlaneBounds::around(front, cfg.phi_o), rig, cfg);
  }
  PatchDecision d = glrt_decide(fit_f, fit_o, cfg);
  d.patch = patch;
  return d;
}

}  // namespace

std::vector<PatchDecision> detect_frame(const IntensityImage& left, const IntensityImage& right,
                                        const DisparityMap& dmap_init, const PatchGrid& grid,
                                        const CameraRig& rig, const DetectorConfig& cfg,
                                        Method method) {
  if (!left.same_shape(right) || !left.same_shape(dmap_init)) {
    throw Error(ErrorCode::DimensionMismatch, "images and disparity map differ in size");
  }
  rig.validate();
  std::vector<PatchDecision> out(grid.patches.size());
  parallel_for(grid.patches.size(), cfg.threads, [&](std::size_t i) {
    out[i] = decide_patch(left, right, dmap_init, grid.patches[i], rig, cfg, method);
  });
  return out;
}

}  // namespace rh
