#pragma once

#include "rh/geometry.hpp"

#include <vector>

namespace rh {

// Patch centers at a fixed stride over the detector image. `downsample` is
// the factor between the detector image and the original frame; both factors
// rescale pixel counts during evaluation.
struct PatchGrid {
  int stride = 2;
  int downsample = 1;
  int patch_w = 15;
  int patch_h = 15;
  std::vector<PatchSpec> patches;  // row-major
};

// Every center whose patch lies fully inside a width x height image.
PatchGrid make_patch_grid(int width, int height, int patch_w, int patch_h, int stride,
                          int downsample = 1);

}  // namespace rh
