#pragma once

#include <filesystem>
#include <string>

#include "florin/pipeline.hpp"

namespace florin {

/// YAML rendering of a pipeline configuration. Keys name the pipeline
/// symbols directly: depth, iris.t_iris, iris.w_iris, pupil.t_pupil,
/// pupil.w_pupil, min_voxels, combine, circle_fraction, threads. Windows are
/// half-extents [frames, rows, cols].
std::string config_to_yaml(const PipelineConfig& cfg);

/// Parses config_to_yaml output. Missing keys keep their defaults; unknown
/// keys and out-of-range values are errors.
PipelineConfig config_from_yaml(const std::string& text);

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

/// Parses "HZxHYxHX", e.g. "1x128x128".
Window parse_window(const std::string& text);
std::string to_string(const Window& w);

}  // namespace florin
