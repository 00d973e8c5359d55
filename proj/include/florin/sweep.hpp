#pragma once

#include <filesystem>
#include <vector>

#include "florin/io.hpp"
#include "florin/ndnt.hpp"

namespace florin {

struct SweepOptions {
    Window window{1, 128, 128};
    double step = 0.01;
    std::size_t frames = 5;  ///< leading frames of the video to sweep
    MaskFormat format = MaskFormat::Png;
    unsigned threads = 0;
};

struct SweepResult {
    std::vector<double> thresholds;
    std::vector<Mask> masks;
    double compute_seconds = 0.0;  ///< table, statistics and every threshold
    std::filesystem::path manifest;
};

/// Sweeps the threshold grid over the first opts.frames frames of `video`
/// and writes `<output>/manifest.json` plus one mask directory per threshold.
SweepResult run_sweep(const Volume& video, const SweepOptions& opts, const std::filesystem::path& output);

SweepResult run_sweep(const VideoSource& src, const SweepOptions& opts, const std::filesystem::path& output);

/// Directory name used for one threshold, e.g. t_0.3500.
std::string sweep_entry_name(double t);

}  // namespace florin
