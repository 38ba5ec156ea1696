#include "rh/patch_grid.hpp"

#include "rh/error.hpp"

namespace rh {

PatchGrid make_patch_grid(int width, int height, int patch_w, int patch_h, int stride,
                          int downsample) {
  if (stride < 1 || downsample < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (patch_w < 3 || patch_h < 3 || patch_w % 2 == 0 || patch_h % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "patch size must be odd and >= 3");
  }
  PatchGrid grid;
  grid.stride = stride;
  grid.downsample = downsample;
  grid.patch_w = patch_w;
  grid.patch_h = patch_h;
  const int rx = patch_w / 2;
  const int ry = patch_h / 2;
  // Centers sit on the stride lattice anchored at pixel (0, 0).
  const int x_first = (rx + stride - 1) / stride * stride;
  const int y_first = (ry + stride - 1) / stride * stride;
  for (int y = y_first; y + ry < height; y += stride) {
    for (int x = x_first; x + rx < width; x += stride) {
      grid.patches.push_back({x, y, patch_w, patch_h});
    }
  }
  return grid;
}

}  // namespace rh
