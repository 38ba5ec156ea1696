#pragma once

#include "rh/raster.hpp"

#include <algorithm>
#include <cmath>

namespace rh {

enum class Interpolation {
  kLinear,  // bilinear; derivative is piecewise constant
  kCubic,   // Catmull-Rom; C1, derivative at integer positions equals the central difference
};

struct Sample {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

// Bilinear interpolation at (x, y) in [0, width-1] x [0, height-1]; throws OutOfBounds otherwise.
double bilinear_sample(const IntensityImage& img, double x, double y);

namespace detail {

struct CubicWeights {
  double w[4];
  double dw[4];
};

inline CubicWeights catmull_rom(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {{-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0, -1.5 * t3 + 2.0 * t2 + 0.5 * t,
           0.5 * t3 - 0.5 * t2},
          {-1.5 * t2 + 2.0 * t - 0.5, 4.5 * t2 - 5.0 * t, -4.5 * t2 + 4.0 * t + 0.5, 1.5 * t2 - t}};
}

// Split a coordinate into a base index in [0, n-2] and a fraction in [0, 1].
inline int split(double x, int n, double& t) {
  int i = static_cast<int>(std::floor(x));
  i = std::clamp(i, 0, n - 2);
  t = x - i;
  return i;
}

}  // namespace detail

// Sample along image row y at subpixel column x (caller guarantees 0 <= x <= width-1).
inline Sample sample_row(const IntensityImage& img, int y, double x, Interpolation mode) {
  const int n = img.width();
  const auto row = img.row(y);
  double t = 0.0;
  const int i = detail::split(x, n, t);
  if (mode == Interpolation::kLinear) {
    const double d = row[i + 1] - row[i];
    return {row[i] + t * d, d, 0.0};
  }
  const auto cw = detail::catmull_rom(t);
  const double p0 = row[std::max(i - 1, 0)];
  const double p1 = row[i];
  const double p2 = row[i + 1];
  const double p3 = row[std::min(i + 2, n - 1)];
  return {cw.w[0] * p0 + cw.w[1] * p1 + cw.w[2] * p2 + cw.w[3] * p3,
          cw.dw[0] * p0 + cw.dw[1] * p1 + cw.dw[2] * p2 + cw.dw[3] * p3, 0.0};
}

// 2D sample with gradient at (x, y) (caller guarantees the point is inside the image).
inline Sample sample_2d(const IntensityImage& img, double x, double y, Interpolation mode) {
  const int w = img.width();
  const int h = img.height();
  double tx = 0.0;
  double ty = 0.0;
  const int ix = detail::split(x, w, tx);
  const int iy = detail::split(y, h, ty);
  if (mode == Interpolation::kLinear) {
    const double a = img(ix, iy);
    const double b = img(ix + 1, iy);
    const double c = img(ix, iy + 1);
    const double d = img(ix + 1, iy + 1);
    const double top = (1.0 - tx) * a + tx * b;
    const double bottom = (1.0 - tx) * c + tx * d;
    return {(1.0 - ty) * top + ty * bottom, (1.0 - ty) * (b - a) + ty * (d - c), bottom - top};
  }
  const auto cx = detail::catmull_rom(tx);
  const auto cy = detail::catmull_rom(ty);
  Sample s;
  for (int j = 0; j < 4; ++j) {
    const int yy = std::clamp(iy - 1 + j, 0, h - 1);
    const auto row = img.row(yy);
    double v = 0.0;
    double dv = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double p = row[std::clamp(ix - 1 + k, 0, w - 1)];
      v += cx.w[k] * p;
      dv += cx.dw[k] * p;
    }
    s.value += cy.w[j] * v;
    s.dx += cy.w[j] * dv;
    s.dy += cy.dw[j] * v;
  }
  return s;
}

// 2x2 box average; throws OddDimensions for odd sizes.
IntensityImage downsample2(const IntensityImage& img);
// Halves disparities and averages the valid entries of each 2x2 block.
DisparityMap downsample2(const DisparityMap& map);

}  // namespace rh
