#include "florin/sweep.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>


namespace florin {

std::string sweep_entry_name(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t_%.4f", t);
    return buf;
}

SweepResult run_sweep(const Volume& video, const SweepOptions& opts, const std::filesystem::path& output) {
    if (opts.frames < 1) throw FlorinError("sweep: frame count must be >= 1");
    const std::size_t frames = std::min(opts.frames, video.shape().depth);
    const Volume subset = video.slice(0, frames);

    SweepResult r;
    r.thresholds = threshold_grid(opts.step);
    const auto start = std::chrono::steady_clock::now();
    r.masks = ndnt_sweep(subset, opts.window, r.thresholds, opts.threads);
    r.compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(output);
    const Shape& s = subset.shape();
    nlohmann::json manifest;
    manifest["window"] = {opts.window.hz, opts.window.hy, opts.window.hx};
    manifest["step"] = opts.step;
    manifest["frames"] = s.depth;
    manifest["height"] = s.height;
    manifest["width"] = s.width;
    manifest["compute_seconds"] = r.compute_seconds;
    manifest["entries"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
        const std::string name = sweep_entry_name(r.thresholds[i]);
        const auto files = write_masks(r.masks[i], output / name, opts.format);
        nlohmann::json entry;
        entry["t"] = r.thresholds[i];
        entry["dir"] = name;
        entry["foreground_fraction"] =
            static_cast<double>(count_foreground(r.masks[i])) / static_cast<double>(s.voxels());
        entry["files"] = nlohmann::json::array();
        for (const auto& f : files) entry["files"].push_back(name + "/" + f.filename().string());
        manifest["entries"].push_back(std::move(entry));
    }

    r.manifest = output / "manifest.json";
    std::ofstream out(r.manifest, std::ios::trunc);
    if (!out) throw FlorinError("cannot write " + r.manifest.string());
    out << manifest.dump(2) << "\n";
    return r;
}

SweepResult run_sweep(const VideoSource& src, const SweepOptions& opts, const std::filesystem::path& output) {
    VideoSource limited = src;
    if (limited.files.size() > opts.frames) {
        limited.files.resize(opts.frames);
        limited.frame_count = opts.frames;
    }
    return run_sweep(load_frames(limited), opts, output);
}

}  // namespace florin
