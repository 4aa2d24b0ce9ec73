#pragma once

// Per-scene configuration (one JSON file per deployed sensor) and dataset
// manifests.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "occupancy/forge.hpp"
#include "occupancy/geometry.hpp"
#include "occupancy/temporal.hpp"

namespace occupancy {

enum class FilterOrder {
  threshold_first,  ///< count filter sees counts at the selected threshold
  filter_first,     ///< count filter sees raw fused counts; threshold chosen on accepted frames
};

struct SceneConfig {
  OmniCameraModel camera;
  std::vector<ProviderSpec> providers;
  std::vector<InterlacingKernel> kernels = default_kernels();
  std::vector<ScalePlan> scale_plans;
  double fps = 15.0;
  double nms_threshold = 0.4;
  double score_threshold = 0.5;
  std::size_t filter_window = 15;
  std::size_t filter_tolerance = 0;
  FilterOrder filter_order = FilterOrder::threshold_first;
  PoseBoxRule pose_rule;
  int count_cadence = 1;                  ///< emit a count every n-th frame
  std::optional<std::size_t> count_plan;  ///< detect on reconstructed frames of this plan
  std::filesystem::path map_cache;        ///< empty = build maps in memory only

  void validate() const;
  const ProviderSpec& provider(const std::string& name) const;
};

/// Throws invalid-config (bad content) or io-error (unreadable file). Relative
/// paths inside the file resolve against its directory.
SceneConfig load_scene_config(const std::filesystem::path& path);
void save_scene_config(const SceneConfig& config, const std::filesystem::path& path);

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<std::filesystem::path> frames;  ///< absolute, in capture order
  std::optional<std::filesystem::path> ground_truth;
  std::string split;
};

/// Accepts a manifest.json, a directory holding one, or a plain directory of
/// frame files (sorted by name). Throws io-error naming the first missing frame.
DatasetManifest load_dataset(const std::filesystem::path& path);
void save_dataset_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Loads frame `i` of the manifest with its index and timestamp stamped in.
Image load_frame(const DatasetManifest& manifest, std::size_t i, double fps);

/// Fragment maps for one provider, reusing OMAP sidecars under cache_dir when
/// their layout matches and writing them otherwise.
std::vector<FragmentMap> maps_for(const OmniCameraModel& camera, const UnwarpConfig& unwarp,
                                  const std::filesystem::path& cache_dir,
                                  const std::string& tag);

}  // namespace occupancy
