// florin: batch segmentation, threshold sweeps, throughput benchmarks and the
// tuner API server.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "florin/bench.hpp"
#include "florin/config.hpp"
#include "florin/io.hpp"
#include "florin/phantom.hpp"
#include "florin/pipeline.hpp"
#include "florin/server.hpp"
#include "florin/sweep.hpp"

namespace fs = std::filesystem;
using namespace florin;

namespace {

std::optional<std::pair<std::size_t, std::size_t>> parse_downsample(const std::string& text) {
    if (text.empty()) return std::nullopt;
    static const std::regex pattern(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) throw FlorinError("--downsample expects WxH, got '" + text + "'");
    // WxH on the command line; (height, width) internally.
    return std::make_pair(std::stoul(m[2].str()), std::stoul(m[1].str()));
}

MaskFormat parse_format(const std::string& s) {
    if (s == "png") return MaskFormat::Png;
    if (s == "pgm") return MaskFormat::Pgm;
    throw FlorinError("--format expects png or pgm");
}

std::vector<fs::path> parse_inputs(const std::string& list) {
    std::vector<fs::path> out;
    if (fs::is_regular_file(list)) {
        std::ifstream in(list);
        for (std::string line; std::getline(in, line);) {
            if (!line.empty() && line.front() != '#') out.emplace_back(line);
        }
        return out;
    }
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

TunerServer* g_server = nullptr;

void handle_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning-free volumetric iris segmentation"};
    app.require_subcommand(1);

    // segment
    auto* segment = app.add_subcommand("segment", "Segment a frame sequence into iris masks");
    std::string seg_input, seg_config, seg_output, seg_downsample, seg_format = "png", seg_report;
    std::size_t seg_frames = 0;
    segment->add_option("--input", seg_input, "Directory of frame_NNNNNN.pgm|png")->required();
    segment->add_option("--config", seg_config, "Pipeline config (YAML)")->required();
    segment->add_option("--output", seg_output, "Mask output directory")->required();
    segment->add_option("--downsample", seg_downsample, "Target size WxH, e.g. 320x240");
    segment->add_option("--format", seg_format, "Mask format: png (1-bit) or pgm (0/255)");
    segment->add_option("--frames", seg_frames, "Only the first N frames (0 = all)");
    segment->add_option("--report", seg_report, "Write per-block reports as JSON");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Threshold sweep over the leading frames of a video");
    std::string sw_input, sw_window = "1x128x128", sw_output, sw_downsample, sw_format = "png";
    double sw_step = 0.01;
    std::size_t sw_frames = 5;
    sweep->add_option("--input", sw_input, "Directory of frames")->required();
    sweep->add_option("--window", sw_window, "Half-extents HZxHYxHX");
    sweep->add_option("--step", sw_step, "Threshold grid spacing in (0, 1]");
    sweep->add_option("--frames", sw_frames, "Number of leading frames");
    sweep->add_option("--output", sw_output, "Sweep artifact directory")->required();
    sweep->add_option("--downsample", sw_downsample, "Target size WxH");
    sweep->add_option("--format", sw_format, "Mask format: png or pgm");

    // bench
    auto* bench = app.add_subcommand("bench", "Per-video segmentation throughput");
    std::string b_inputs, b_config, b_downsample;
    std::size_t b_frame_limit = 0, b_warmup = 1, b_synthetic = 0;
    bool b_json = false;
    bench->add_option("--inputs", b_inputs, "Comma-separated frame directories, or a file listing one per line");
    bench->add_option("--config", b_config, "Pipeline config (YAML); defaults when omitted");
    bench->add_option("--frame-limit", b_frame_limit, "Time only the first N frames of each video");
    bench->add_option("--warmup", b_warmup, "Discarded warmup runs per video");
    bench->add_option("--downsample", b_downsample, "Target size WxH");
    bench->add_option("--synthetic", b_synthetic, "Benchmark an in-memory 240x320 phantom of N frames instead");
    bench->add_flag("--json", b_json, "Emit JSON instead of a table");

    // serve
    auto* serve = app.add_subcommand("serve", "HTTP API for the interactive threshold tuner");
    std::string sv_input, sv_config, sv_host = "127.0.0.1", sv_save_dir = ".", sv_downsample;
    int sv_port = 8080;
    std::size_t sv_frames = 5;
    serve->add_option("--input", sv_input, "Directory of frames")->required();
    serve->add_option("--port", sv_port, "TCP port")->required();
    serve->add_option("--frames", sv_frames, "Leading frames to load (0 = all)");
    serve->add_option("--config", sv_config, "Initial parameters (YAML)");
    serve->add_option("--host", sv_host, "Bind address");
    serve->add_option("--save-dir", sv_save_dir, "Where /api/config/save writes");
    serve->add_option("--downsample", sv_downsample, "Target size WxH");

    // phantom
    auto* phantom = app.add_subcommand("phantom", "Write a synthetic eye video as frames");
    std::string ph_output, ph_format = "png";
    PhantomSpec ph_spec;
    phantom->add_option("--output", ph_output, "Frame directory")->required();
    phantom->add_option("--frames", ph_spec.frames, "Frame count");
    phantom->add_option("--drift", ph_spec.drift_x, "Horizontal motion, pixels per frame");
    phantom->add_option("--noise", ph_spec.noise, "Uniform noise amplitude");
    phantom->add_option("--format", ph_format, "png or pgm");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*segment) {
            const PipelineConfig cfg = load_config(seg_config);
            VideoSource src = probe_video(seg_input, seg_frames);
            src.target = parse_downsample(seg_downsample);
            const Volume video = load_frames(src);
            const VideoResult r = segment_video(video, cfg);
            write_masks(r.mask, seg_output, parse_format(seg_format), src.first_index);
            std::size_t failed = 0;
            nlohmann::json reports = nlohmann::json::array();
            for (const auto& rep : r.reports) {
                failed += rep.pupil_found ? 0 : 1;
                reports.push_back(report_to_json(rep));
            }
            if (!seg_report.empty()) std::ofstream(seg_report) << reports.dump(2) << "\n";
            std::cout << "segmented " << video.shape().depth << " frames in " << r.reports.size() << " blocks ("
                      << failed << " without a pupil) -> " << seg_output << "\n";
        } else if (*sweep) {
            SweepOptions opts;
            opts.window = parse_window(sw_window);
            opts.step = sw_step;
            opts.frames = sw_frames;
            opts.format = parse_format(sw_format);
            VideoSource src = probe_video(sw_input, sw_frames);
            src.target = parse_downsample(sw_downsample);
            const SweepResult r = run_sweep(src, opts, sw_output);
            std::cout << r.thresholds.size() << " thresholds over " << r.masks.front().shape().depth
                      << " frames in " << r.compute_seconds << " s -> " << r.manifest.string() << "\n";
        } else if (*bench) {
            const PipelineConfig cfg = b_config.empty() ? PipelineConfig{} : load_config(b_config);
            BenchResult r;
            if (b_synthetic != 0) {
                PhantomSpec spec;
                spec.frames = b_frame_limit != 0 ? std::min(b_synthetic, b_frame_limit) : b_synthetic;
                spec.noise = 8;
                r = summarize({bench_volume("synthetic", make_eye_phantom(spec), cfg, b_warmup)});
            } else {
                if (b_inputs.empty()) throw FlorinError("bench needs --inputs or --synthetic");
                std::vector<VideoSource> sources;
                std::vector<std::string> warnings;
                const auto target = parse_downsample(b_downsample);
                for (const auto& dir : parse_inputs(b_inputs)) {
                    try {
                        sources.push_back(probe_video(dir, b_frame_limit));
                        sources.back().target = target;
                    } catch (const std::exception& e) {
                        warnings.push_back("skipped " + dir.string() + ": " + e.what());
                    }
                }
                if (!sources.empty()) r = run_bench(sources, cfg, {b_warmup, b_frame_limit});
                r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
            }
            std::cout << (b_json ? bench_to_json(r) + "\n" : format_bench_table(r));
            if (r.videos.empty()) return 1;
        } else if (*serve) {
            const PipelineConfig cfg = sv_config.empty() ? PipelineConfig{} : load_config(sv_config);
            VideoSource src = probe_video(sv_input, sv_frames);
            src.target = parse_downsample(sv_downsample);
            TunerService service(load_frames(src), cfg, sv_save_dir);
            TunerServer server(service);
            const int port = server.bind(sv_host, sv_port);
            g_server = &server;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            std::cout << "serving " << service.subset().shape().depth << " frames on http://" << sv_host << ":"
                      << port << std::endl;
            server.listen();
            g_server = nullptr;
        } else if (*phantom) {
            const auto files = write_frames(make_eye_phantom(ph_spec), ph_output, parse_format(ph_format));
            std::cout << "wrote " << files.size() << " frames to " << ph_output << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
