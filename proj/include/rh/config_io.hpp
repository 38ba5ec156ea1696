#pragma once

// JSON forms of the rig, scenes, detector settings and sweep grids. Readers
// start from the given defaults and override only the keys present.

#include "rh/block_match.hpp"
#include "rh/cluster_stixels.hpp"
#include "rh/geometry.hpp"
#include "rh/hypothesis.hpp"
#include "rh/point_compat.hpp"
#include "rh/sweep.hpp"
#include "rh/synth.hpp"

#include <json.hpp>

#include <filesystem>

namespace rh {

using Json = nlohmann::ordered_json;

// Throws IoFailure when unreadable and MalformedHeader when not valid JSON.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

// {"fx", "fy", "x0", "y0", "baseline_m", "width", "height"}
Json rig_to_json(const CameraRig& rig);
CameraRig rig_from_json(const Json& j);
CameraRig load_calibration(const std::filesystem::path& path);

Json detector_to_json(const DetectorConfig& cfg);
DetectorConfig detector_from_json(const Json& j, DetectorConfig base = {});

Json block_match_to_json(const BlockMatchConfig& cfg);
BlockMatchConfig block_match_from_json(const Json& j, BlockMatchConfig base = {});

Json cluster_to_json(const ClusterParams& p);
ClusterParams cluster_from_json(const Json& j, ClusterParams base = {});

Json pc_to_json(const PcParams& p);
PcParams pc_from_json(const Json& j, PcParams base = {});

Json scene_to_json(const SceneSpec& s);
SceneSpec scene_from_json(const Json& j);

Json grid_to_json(const SweepGrid& g);
SweepGrid grid_from_json(const Json& j);

}  // namespace rh
