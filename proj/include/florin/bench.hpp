#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "florin/io.hpp"
#include "florin/pipeline.hpp"

namespace florin {

struct VideoBench {
    std::string name;
    std::size_t frames = 0;
    double segment_seconds = 0.0;  ///< end-to-end segment_video wall-clock
    double load_seconds = 0.0;     ///< disk I/O, reported separately
    double fps = 0.0;              ///< frames / segment_seconds
    std::size_t failed_blocks = 0;
    StageTimings stages;           ///< summed over blocks
};

struct BenchResult {
    std::vector<VideoBench> videos;
    double mean_fps = 0.0;
    double std_fps = 0.0;  ///< sample standard deviation; 0 for one video
    std::size_t frame_count = 0;
    double load_seconds = 0.0;
    StageTimings stages;
    std::vector<std::string> warnings;  ///< videos skipped on load failure
};

struct BenchOptions {
    std::size_t warmup = 1;       ///< untimed runs per video
    std::size_t frame_limit = 0;  ///< 0 = every frame
};

using FrameLoader = std::function<Volume(const VideoSource&)>;

/// Times segmentation of each in-memory video after `warmup` discarded runs.
VideoBench bench_volume(const std::string& name, const Volume& video, const PipelineConfig& cfg,
                        std::size_t warmup);

/// Loads and benchmarks every video; load failures are skipped and recorded
/// as warnings. FPS covers segmentation only.
BenchResult run_bench(std::span<const VideoSource> videos, const PipelineConfig& cfg, const BenchOptions& opts,
                      const FrameLoader& loader = load_frames);

/// Aggregates per-video results into mean and sample standard deviation.
BenchResult summarize(std::vector<VideoBench> videos, std::vector<std::string> warnings = {});

/// Plain-text table: one row per video, then "mean +/- std" FPS.
std::string format_bench_table(const BenchResult& r);
std::string bench_to_json(const BenchResult& r);

}  // namespace florin
