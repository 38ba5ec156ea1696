#pragma once

// CSV tables passed between CLI stages, and run manifests. Floating point
// columns are written with 17 significant digits so they read back exactly.

#include "rh/cluster_stixels.hpp"
#include "rh/config_io.hpp"
#include "rh/error.hpp"
#include "rh/hypothesis.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rh {

void write_decisions_csv(std::ostream& out, const std::vector<PatchDecision>& decisions);
// Restores patch, verdict, statistic and the fields reclassify needs.
std::vector<PatchDecision> read_decisions_csv(std::istream& in);

void write_points_csv(std::ostream& out, const std::vector<ObstaclePoint>& points);
std::vector<ObstaclePoint> read_points_csv(std::istream& in);

void write_stixels_csv(std::ostream& out, const std::vector<CStix>& stixels);
std::vector<CStix> read_stixels_csv(std::istream& in);

// FNV-1a of the file contents, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

// Records the command, its configuration and seeds, and the hashes of every
// input and output file. Outputs are listed relative to the run directory.
Json make_manifest(const std::string& command, const Json& config,
                   const std::vector<std::filesystem::path>& inputs,
                   const std::vector<std::filesystem::path>& outputs, const std::filesystem::path& run_dir);

// IoFailure when the file cannot be opened.
template <typename T>
void save_table(const std::filesystem::path& path, const T& rows, void (*writer)(std::ostream&, const T&)) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  writer(out, rows);
  if (!out.flush()) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

template <typename T>
T load_table(const std::filesystem::path& path, T (*reader)(std::istream&)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return reader(in);
}

}  // namespace rh
