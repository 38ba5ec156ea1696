#pragma once

#include "rh/raster.hpp"

#include <filesystem>

namespace rh {

// Binary PGM (P5). maxval < 256 stores one byte per sample, otherwise two
// big-endian bytes.
IntensityImage load_pgm(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const IntensityImage& image);

// Label maps travel as 16-bit PGM.
LabelMap load_label_pgm(const std::filesystem::path& path);
void save_label_pgm(const std::filesystem::path& path, const LabelMap& labels);

Mask load_mask_pgm(const std::filesystem::path& path);
void save_mask_pgm(const std::filesystem::path& path, const Mask& mask);

// Single-channel PFM ("Pf"); rows are stored bottom-up and the sign of the
// scale field selects the byte order. Invalid disparities are NaN.
DisparityMap load_pfm(const std::filesystem::path& path);
void save_pfm(const std::filesystem::path& path, const DisparityMap& map);

}  // namespace rh
