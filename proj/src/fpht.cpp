#include "rh/error.hpp"
#include "rh/hypothesis.hpp"
#include "lm_detail.hpp"

#include <cmath>

namespace rh {
namespace {

struct PixelTerm {
  double r;
  double da;
  double db;
};

// Warps every patch pixel and collects the residual and its derivatives for
// the pixels that land inside the right image. Returns false when too many
// pixels leave the image.
bool collect_terms(const IntensityImage& left, const IntensityImage& right, const PatchSpec& patch,
                   const DisparityLine& line, const ResidualOptions& opts,
                   std::vector<PixelTerm>& terms, std::vector<unsigned char>* used) {
  terms.clear();
  int excluded = 0;
  const double xmax = right.width() - 1;
  for (int y = patch.y_begin(); y < patch.y_end(); ++y) {
    const double ybar = patch.ybar(y);
    const double shift = line.a * ybar + line.b;
    const auto lrow = left.row(y);
    for (int x = patch.x_begin(); x < patch.x_end(); ++x) {
      const double xw = x - shift;
      const bool inside = xw >= 0.0 && xw <= xmax;
      if (used) used->push_back(inside ? 1 : 0);
      if (!inside) {
        ++excluded;
        continue;
      }
      const Sample s = sample_row(right, y, xw, opts.interpolation);
      terms.push_back({s.value - lrow[x], -ybar * s.dx, -s.dx});
    }
  }
  if (excluded > opts.max_excluded_fraction * patch.pixel_count()) return false;
  if (opts.mean_removal && !terms.empty()) {
    PixelTerm mean{0.0, 0.0, 0.0};
    for (const auto& t : terms) {
      mean.r += t.r;
      mean.da += t.da;
      mean.db += t.db;
    }
    const double n = static_cast<double>(terms.size());
    for (auto& t : terms) {
      t.r -= mean.r / n;
      t.da -= mean.da / n;
      t.db -= mean.db / n;
    }
  }
  return true;
}

void check_patch(const IntensityImage& left, const IntensityImage& right, const PatchSpec& patch) {
  if (!left.same_shape(right)) throw Error(ErrorCode::DimensionMismatch, "stereo pair sizes differ");
  patch.validate(left.width(), left.height());
}

}  // namespace

Eigen::Vector2d fpht_warp(double x, double y, const DisparityLine& line, const PatchSpec& patch) {
  return {x - (line.a * patch.ybar(y) + line.b), y};
}

Residuals fpht_residuals(const IntensityImage& left, const IntensityImage& right,
                         const PatchSpec& patch, const DisparityLine& line,
                         const ResidualOptions& opts) {
  check_patch(left, right, patch);
  std::vector<PixelTerm> terms;
  Residuals out;
  if (!collect_terms(left, right, patch, line, opts, terms, &out.used)) {
    throw Error(ErrorCode::InsufficientOverlap, "patch warps outside the right image");
  }
  out.r.assign(out.used.size(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < out.used.size(); ++i) {
    if (!out.used[i]) {
      ++out.excluded;
      continue;
    }
    out.r[i] = terms[k++].r;
    out.F += out.r[i] * out.r[i];
  }
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> fpht_jacobian(const IntensityImage& left,
                                                       const IntensityImage& right,
                                                       const PatchSpec& patch,
                                                       const DisparityLine& line,
                                                       const ResidualOptions& opts) {
  check_patch(left, right, patch);
  std::vector<PixelTerm> terms;
  std::vector<unsigned char> used;
  if (!collect_terms(left, right, patch, line, opts, terms, &used)) {
    throw Error(ErrorCode::InsufficientOverlap, "patch warps outside the right image");
  }
  Eigen::Matrix<double, Eigen::Dynamic, 2> J = Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(
      static_cast<Eigen::Index>(used.size()), 2);
  std::size_t k = 0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) continue;
    J(static_cast<Eigen::Index>(i), 0) = terms[k].da;
    J(static_cast<Eigen::Index>(i), 1) = terms[k].db;
    ++k;
  }
  return J;
}

HypothesisFit fpht_fit(const IntensityImage& left, const IntensityImage& right,
                       const PatchSpec& patch, const DisparityLine& init,
                       const FeasibleWedge& wedge, const DetectorConfig& cfg) {
  check_patch(left, right, patch);
  const ResidualOptions opts{cfg.interpolation, cfg.mean_removal, cfg.max_excluded_fraction};
  thread_local std::vector<PixelTerm> terms;

  using Vec = Eigen::Vector2d;
  auto evaluate = [&](const Vec& p) {
    detail::LmEval<2> e;
    if (!collect_terms(left, right, patch, {p(0), p(1)}, opts, terms, nullptr)) return e;
    e.ok = true;
    e.F = 0.0;
    for (const auto& t : terms) {
      e.F += t.r * t.r;
      e.A(0, 0) += t.da * t.da;
      e.A(0, 1) += t.da * t.db;
      e.A(1, 1) += t.db * t.db;
      e.g(0) += t.da * t.r;
      e.g(1) += t.db * t.r;
    }
    e.A(1, 0) = e.A(0, 1);
    e.pixels = static_cast<int>(terms.size());
    return e;
  };
  auto project = [&](const Vec& p) {
    const DisparityLine q = project_onto_wedge({p(0), p(1)}, wedge);
    return Vec(q.a, q.b);
  };
  auto step_norm = [](const Vec& a, const Vec& b) { return (a - b).norm(); };

  const auto res = detail::projected_lm<2>(Vec(init.a, init.b), evaluate, project, step_norm, cfg.lm,
                                           cfg.record_trace);
  HypothesisFit fit;
  fit.method = Method::kFpht;
  fit.line = {res.params(0), res.params(1)};
  fit.iterations = res.iterations;
  fit.range_scale = left.maxval() / 255.0;
  fit.trace = res.trace;
  if (!res.eval.ok) {
    fit.residual_sum = std::numeric_limits<double>::infinity();
    fit.converged = false;
    return fit;
  }
  fit.residual_sum = res.eval.F;
  fit.min_eigenvalue = detail::min_eigenvalue<2>(res.eval.A);
  fit.pixels = res.eval.pixels;
  fit.converged = res.converged;
  return fit;
}

}  // namespace rh
