#include "rh/sampling.hpp"

namespace rh {

double bilinear_sample(const IntensityImage& img, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0) || x > img.width() - 1 || y > img.height() - 1 || img.width() < 1 ||
      img.height() < 1) {
    throw Error(ErrorCode::OutOfBounds, "bilinear sample outside the image");
  }
  if (img.width() == 1 || img.height() == 1) {
    // Degenerate axes collapse to linear interpolation along the other one.
    const int ix = std::min(static_cast<int>(x), img.width() - 1);
    const int iy = std::min(static_cast<int>(y), img.height() - 1);
    const int jx = std::min(ix + 1, img.width() - 1);
    const int jy = std::min(iy + 1, img.height() - 1);
    const double tx = x - ix;
    const double ty = y - iy;
    const double top = img(ix, iy) + tx * (img(jx, iy) - img(ix, iy));
    const double bottom = img(ix, jy) + tx * (img(jx, jy) - img(ix, jy));
    return top + ty * (bottom - top);
  }
  return sample_2d(img, x, y, Interpolation::kLinear).value;
}

IntensityImage downsample2(const IntensityImage& img) {
  if (img.width() % 2 != 0 || img.height() % 2 != 0) {
    throw Error(ErrorCode::OddDimensions, "downsampling requires even dimensions");
  }
  IntensityImage out(img.width() / 2, img.height() / 2, 0.0, img.maxval());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out(x, y) = 0.25 * (img(2 * x, 2 * y) + img(2 * x + 1, 2 * y) + img(2 * x, 2 * y + 1) +
                          img(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

DisparityMap downsample2(const DisparityMap& map) {
  if (map.width() % 2 != 0 || map.height() % 2 != 0) {
    throw Error(ErrorCode::OddDimensions, "downsampling requires even dimensions");
  }
  DisparityMap out(map.width() / 2, map.height() / 2, kInvalidDisparity);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      double sum = 0.0;
      int n = 0;
      for (int k = 0; k < 4; ++k) {
        const float d = map(2 * x + (k & 1), 2 * y + (k >> 1));
        if (is_valid_disparity(d)) {
          sum += d;
          ++n;
        }
      }
      if (n > 0) out(x, y) = static_cast<float>(0.5 * sum / n);
    }
  }
  return out;
}

}  // namespace rh
