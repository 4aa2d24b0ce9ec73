#include "occupancy/config.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "occupancy/error.hpp"
#include "occupancy/image_io.hpp"

namespace occupancy {
namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void SceneConfig::validate() const {
  camera.validate();
  if (!(fps > 0.0)) throw Error(ErrorCode::invalid_config, "fps must be positive");
  if (!(nms_threshold >= 0.0 && nms_threshold <= 1.0)) {
    throw Error(ErrorCode::invalid_config, "nms_threshold must lie in [0, 1]");
  }
  if (filter_window == 0) throw Error(ErrorCode::invalid_config, "count_filter.window must be >= 1");
  if (count_cadence < 1) throw Error(ErrorCode::invalid_config, "count.cadence must be >= 1");
  for (const auto& p : providers) p.validate();
  for (const auto& k : kernels) k.validate();
  for (const auto& plan : scale_plans) plan.validate();
  if (count_plan && *count_plan >= scale_plans.size()) {
    throw Error(ErrorCode::invalid_config, "count.plan indexes a missing scale plan");
  }
}

const ProviderSpec& SceneConfig::provider(const std::string& name) const {
  if (providers.empty()) throw Error(ErrorCode::invalid_config, "config lists no providers");
  if (name.empty()) return providers.front();
  auto it = std::find_if(providers.begin(), providers.end(),
                         [&](const ProviderSpec& p) { return p.name == name; });
  if (it == providers.end()) throw Error(ErrorCode::invalid_config, "no provider named '" + name + "'");
  return *it;
}

namespace {

ScalePlan::Mode mode_from_string(const std::string& s) {
  if (s == "linear") return ScalePlan::Mode::linear;
  if (s == "interlaced") return ScalePlan::Mode::interlaced;
  throw Error(ErrorCode::invalid_config, "unknown scale plan mode '" + s + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

}  // namespace

SceneConfig load_scene_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  SceneConfig cfg;
  try {
    const json j = json::parse(in);
    const json& cam = j.at("camera");
    cfg.camera.image_width = cam.at("width").get<int>();
    cfg.camera.image_height = cam.at("height").get<int>();
    cfg.camera.center_x = cam.value("center_x", (cfg.camera.image_width - 1) / 2.0);
    cfg.camera.center_y = cam.value("center_y", (cfg.camera.image_height - 1) / 2.0);
    cfg.camera.radius_outer = cam.at("radius_outer").get<double>();
    cfg.camera.radius_inner = cam.value("radius_inner", 0.0);

    if (j.contains("kernel_file")) {
      cfg.kernels = load_kernels(resolve(base, j["kernel_file"].get<std::string>()));
    }
    if (j.contains("kernels")) {
      for (const auto& k : j["kernels"]) {
        InterlacingKernel kernel;
        kernel.name = k.at("name").get<std::string>();
        const auto cells = k.at("cells").get<std::vector<std::vector<int>>>();
        if (cells.size() != 2 || cells[0].size() != 2 || cells[1].size() != 2) {
          throw Error(ErrorCode::invalid_config, "kernel '" + kernel.name + "' must be 2x2");
        }
        kernel.cells = {{{cells[0][0], cells[0][1]}, {cells[1][0], cells[1][1]}}};
        kernel.t = k.value("t", 1);
        auto same = std::find_if(cfg.kernels.begin(), cfg.kernels.end(),
                                 [&](const auto& e) { return e.name == kernel.name; });
        if (same != cfg.kernels.end()) {
          *same = kernel;
        } else {
          cfg.kernels.push_back(kernel);
        }
      }
    }

    for (const auto& p : j.value("providers", json::array())) {
      ProviderSpec spec;
      spec.name = p.at("name").get<std::string>();
      spec.kind = provider_kind_from_string(p.value("kind", std::string("boxes")));
      spec.command = p.at("command").get<std::string>();
      spec.timeout_seconds = p.value("timeout", 10.0);
      spec.workers = p.value("workers", 1);
      spec.unwarp.k = p.value("k", 3);
      const json u = p.value("unwarp", json::object());
      spec.unwarp.overlap = u.value("overlap", 0.10);
      spec.unwarp.y_b = u.value("y_b", 1.0);
      spec.unwarp.fragment_width = u.value("fragment_width", 0);
      spec.unwarp.fragment_height = u.value("fragment_height", 0);
      cfg.providers.push_back(std::move(spec));
    }

    for (const auto& p : j.value("scale_plans", json::array())) {
      ScalePlan plan;
      plan.net_res = p.at("net_res").get<int>();
      plan.scale_res = p.at("scale_res").get<int>();
      plan.mode = mode_from_string(p.value("mode", std::string("linear")));
      if (plan.mode == ScalePlan::Mode::interlaced) {
        plan.kernel = find_kernel(cfg.kernels, p.at("kernel").get<std::string>());
        if (p.contains("t")) plan.kernel.t = p["t"].get<int>();
      }
      cfg.scale_plans.push_back(plan);
    }

    cfg.fps = j.value("fps", 15.0);
    cfg.nms_threshold = j.value("nms_threshold", 0.4);
    cfg.score_threshold = j.value("score_threshold", 0.5);
    const json cf = j.value("count_filter", json::object());
    cfg.filter_window = cf.value("window", std::size_t{15});
    cfg.filter_tolerance = cf.value("tolerance", std::size_t{0});
    const std::string order = cf.value("order", std::string("threshold-first"));
    if (order == "threshold-first") {
      cfg.filter_order = FilterOrder::threshold_first;
    } else if (order == "filter-first") {
      cfg.filter_order = FilterOrder::filter_first;
    } else {
      throw Error(ErrorCode::invalid_config, "count_filter.order must be threshold-first or filter-first");
    }
    const json pr = j.value("pose_rule", json::object());
    cfg.pose_rule.min_confidence = pr.value("min_confidence", 0.1);
    cfg.pose_rule.expansion = pr.value("expansion", 0.1);
    const json cnt = j.value("count", json::object());
    cfg.count_cadence = cnt.value("cadence", 1);
    if (cnt.contains("plan") && !cnt["plan"].is_null()) cfg.count_plan = cnt["plan"].get<std::size_t>();
    cfg.map_cache = resolve(base, j.value("map_cache", std::string()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, "config " + path.string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

void save_scene_config(const SceneConfig& cfg, const fs::path& path) {
  ordered_json j;
  j["camera"] = {{"width", cfg.camera.image_width},     {"height", cfg.camera.image_height},
                 {"center_x", cfg.camera.center_x},     {"center_y", cfg.camera.center_y},
                 {"radius_inner", cfg.camera.radius_inner}, {"radius_outer", cfg.camera.radius_outer}};
  j["providers"] = ordered_json::array();
  for (const auto& p : cfg.providers) {
    j["providers"].push_back({{"name", p.name},
                              {"kind", to_string(p.kind)},
                              {"command", p.command},
                              {"k", p.unwarp.k},
                              {"timeout", p.timeout_seconds},
                              {"workers", p.workers},
                              {"unwarp", {{"overlap", p.unwarp.overlap},
                                          {"y_b", p.unwarp.y_b},
                                          {"fragment_width", p.unwarp.fragment_width},
                                          {"fragment_height", p.unwarp.fragment_height}}}});
  }
  j["kernels"] = ordered_json::array();
  for (const auto& k : cfg.kernels) {
    j["kernels"].push_back({{"name", k.name},
                            {"cells", {{k.cells[0][0], k.cells[0][1]}, {k.cells[1][0], k.cells[1][1]}}},
                            {"t", k.t}});
  }
  j["scale_plans"] = ordered_json::array();
  for (const auto& p : cfg.scale_plans) {
    ordered_json jp = {{"net_res", p.net_res},
                       {"scale_res", p.scale_res},
                       {"mode", p.mode == ScalePlan::Mode::linear ? "linear" : "interlaced"}};
    if (p.mode == ScalePlan::Mode::interlaced) {
      jp["kernel"] = p.kernel.name;
      jp["t"] = p.kernel.t;
    }
    j["scale_plans"].push_back(std::move(jp));
  }
  j["fps"] = cfg.fps;
  j["nms_threshold"] = cfg.nms_threshold;
  j["score_threshold"] = cfg.score_threshold;
  j["count_filter"] = {{"window", cfg.filter_window},
                       {"tolerance", cfg.filter_tolerance},
                       {"order", cfg.filter_order == FilterOrder::threshold_first ? "threshold-first"
                                                                                   : "filter-first"}};
  j["pose_rule"] = {{"min_confidence", cfg.pose_rule.min_confidence},
                    {"expansion", cfg.pose_rule.expansion}};
  j["count"] = {{"cadence", cfg.count_cadence}};
  if (cfg.count_plan) j["count"]["plan"] = *cfg.count_plan;
  if (!cfg.map_cache.empty()) j["map_cache"] = cfg.map_cache.string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

DatasetManifest load_dataset(const fs::path& path) {
  DatasetManifest m;
  fs::path manifest_file;
  if (fs::is_directory(path)) {
    if (fs::exists(path / "manifest.json")) {
      manifest_file = path / "manifest.json";
    } else {
      m.root = fs::absolute(path);
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && is_frame_file(entry.path())) {
          m.frames.push_back(fs::absolute(entry.path()));
        }
      }
      std::sort(m.frames.begin(), m.frames.end());
      return m;
    }
  } else if (fs::is_regular_file(path)) {
    manifest_file = path;
  } else {
    throw Error(ErrorCode::io_error, "dataset " + path.string() + " does not exist");
  }

  std::ifstream in(manifest_file);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + manifest_file.string());
  const fs::path base = fs::absolute(manifest_file).parent_path();
  try {
    const json j = json::parse(in);
    m.root = resolve(base, j.value("root", std::string(".")));
    for (const auto& f : j.at("frames")) m.frames.push_back(resolve(m.root, f.get<std::string>()));
    if (j.contains("ground_truth")) m.ground_truth = resolve(m.root, j["ground_truth"].get<std::string>());
    m.split = j.value("split", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, "manifest " + manifest_file.string() + ": " + e.what());
  }
  for (const auto& f : m.frames) {
    if (!fs::exists(f)) throw Error(ErrorCode::io_error, "missing frame file " + f.string());
  }
  return m;
}

void save_dataset_manifest(const DatasetManifest& m, const fs::path& path) {
  ordered_json j;
  j["root"] = ".";
  j["frames"] = ordered_json::array();
  for (const auto& f : m.frames) j["frames"].push_back(f.lexically_relative(m.root).string());
  if (m.ground_truth) j["ground_truth"] = m.ground_truth->lexically_relative(m.root).string();
  if (!m.split.empty()) j["split"] = m.split;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Image load_frame(const DatasetManifest& m, std::size_t i, double fps) {
  Image img = read_image(m.frames.at(i));
  img.frame_index = static_cast<std::int64_t>(i);
  img.timestamp = static_cast<double>(i) / fps;
  return img;
}

std::vector<FragmentMap> maps_for(const OmniCameraModel& camera, const UnwarpConfig& unwarp,
                                  const fs::path& cache_dir, const std::string& tag) {
  if (cache_dir.empty()) return build_fragment_maps(camera, unwarp);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  std::vector<FragmentMap> maps;
  for (const auto& layout : fragment_layouts(camera, unwarp)) {
    const fs::path file =
        cache_dir / (tag + "_" + std::to_string(layout.fragment_index) + ".omap");
    if (fs::exists(file)) {
      try {
        FragmentMap cached = load_fragment_map(file);
        if (cached.layout() == layout) {
          maps.push_back(std::move(cached));
          continue;
        }
      } catch (const Error&) {
        // stale or foreign sidecar; rebuilt below
      }
    }
    maps.push_back(FragmentMap::from_layout(layout));
    save_fragment_map(maps.back(), file);
  }
  return maps;
}

}  // namespace occupancy
