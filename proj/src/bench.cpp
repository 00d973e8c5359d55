#include "florin/bench.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace florin {

namespace {

using Clock = std::chrono::steady_clock;

void accumulate(StageTimings& into, const StageTimings& t) {
    into.segmentation += t.segmentation;
    into.identification += t.identification;
    into.reconstruction += t.reconstruction;
}

}  // namespace

VideoBench bench_volume(const std::string& name, const Volume& video, const PipelineConfig& cfg,
                        std::size_t warmup) {
    for (std::size_t i = 0; i < warmup; ++i) (void)segment_video(video, cfg);

    const auto start = Clock::now();
    const VideoResult r = segment_video(video, cfg);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    VideoBench b;
    b.name = name;
    b.frames = video.shape().depth;
    b.segment_seconds = seconds;
    b.fps = seconds > 0.0 ? static_cast<double>(b.frames) / seconds : 0.0;
    for (const auto& report : r.reports) {
        accumulate(b.stages, report.timing);
        if (!report.pupil_found) ++b.failed_blocks;
    }
    return b;
}

BenchResult summarize(std::vector<VideoBench> videos, std::vector<std::string> warnings) {
    BenchResult r;
    r.videos = std::move(videos);
    r.warnings = std::move(warnings);
    if (r.videos.empty()) return r;

    double sum = 0.0;
    for (const auto& v : r.videos) {
        sum += v.fps;
        r.frame_count += v.frames;
        r.load_seconds += v.load_seconds;
        accumulate(r.stages, v.stages);
    }
    const double n = static_cast<double>(r.videos.size());
    r.mean_fps = sum / n;
    if (r.videos.size() > 1) {
        double ss = 0.0;
        for (const auto& v : r.videos) ss += (v.fps - r.mean_fps) * (v.fps - r.mean_fps);
        r.std_fps = std::sqrt(ss / (n - 1.0));
    }
    return r;
}

BenchResult run_bench(std::span<const VideoSource> videos, const PipelineConfig& cfg, const BenchOptions& opts,
                      const FrameLoader& loader) {
    if (videos.empty()) throw FlorinError("bench: no input videos");
    std::vector<VideoBench> results;
    std::vector<std::string> warnings;
    for (VideoSource src : videos) {
        if (opts.frame_limit != 0 && src.files.size() > opts.frame_limit) {
            src.files.resize(opts.frame_limit);
            src.frame_count = opts.frame_limit;
        }
        Volume video;
        const auto load_start = Clock::now();
        try {
            video = loader(src);
        } catch (const std::exception& e) {
            warnings.push_back("skipped " + src.directory.string() + ": " + e.what());
            continue;
        }
        const double load_seconds = std::chrono::duration<double>(Clock::now() - load_start).count();
        if (opts.frame_limit != 0 && video.shape().depth > opts.frame_limit) {
            video = video.slice(0, opts.frame_limit);
        }
        VideoBench b = bench_volume(src.directory.filename().string(), video, cfg, opts.warmup);
        b.load_seconds = load_seconds;
        results.push_back(std::move(b));
    }
    return summarize(std::move(results), std::move(warnings));
}

std::string format_bench_table(const BenchResult& r) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %8s %10s %10s %9s %7s\n", "video", "frames", "segment_s", "load_s", "fps",
                  "failed");
    out << line;
    for (const auto& v : r.videos) {
        std::snprintf(line, sizeof line, "%-32s %8zu %10.3f %10.3f %9.2f %7zu\n", v.name.c_str(), v.frames,
                      v.segment_seconds, v.load_seconds, v.fps, v.failed_blocks);
        out << line;
    }
    std::snprintf(line, sizeof line, "average per-video FPS: %.2f +/- %.2f over %zu video(s), %zu frames\n",
                  r.mean_fps, r.std_fps, r.videos.size(), r.frame_count);
    out << line;
    std::snprintf(line, sizeof line, "stage seconds: segmentation %.3f, identification %.3f, reconstruction %.3f\n",
                  r.stages.segmentation, r.stages.identification, r.stages.reconstruction);
    out << line;
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::string bench_to_json(const BenchResult& r) {
    const auto stages = [](const StageTimings& t) {
        return nlohmann::json{{"segmentation", t.segmentation},
                              {"identification", t.identification},
                              {"reconstruction", t.reconstruction}};
    };
    nlohmann::json j;
    j["mean_fps"] = r.mean_fps;
    j["std_fps"] = r.std_fps;
    j["frame_count"] = r.frame_count;
    j["load_seconds"] = r.load_seconds;
    j["stages"] = stages(r.stages);
    j["warnings"] = r.warnings;
    j["videos"] = nlohmann::json::array();
    for (const auto& v : r.videos) {
        j["videos"].push_back({{"name", v.name},
                               {"frames", v.frames},
                               {"segment_seconds", v.segment_seconds},
                               {"load_seconds", v.load_seconds},
                               {"fps", v.fps},
                               {"failed_blocks", v.failed_blocks},
                               {"stages", stages(v.stages)}});
    }
    return j.dump(2);
}

}  // namespace florin
