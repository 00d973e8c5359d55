#include "florin/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "florin/parallel.hpp"

namespace florin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(Combine c) { return c == Combine::Xor ? "xor" : "and_not"; }

Combine parse_combine(const std::string& s) {
    if (s == "xor") return Combine::Xor;
    if (s == "and_not") return Combine::AndNot;
    throw FlorinError("unknown combine mode '" + s + "' (expected xor or and_not)");
}

void PipelineConfig::validate() const {
    if (depth < 1) throw FlorinError("depth must be >= 1");
    if (!(circle_fraction > 0.0 && circle_fraction <= 1.0)) {
        throw FlorinError("circle_fraction must be in (0, 1]");
    }
    threshold_factor(iris.t);
    threshold_factor(pupil.t);
}

std::uint64_t effective_min_voxels(const PipelineConfig& cfg, const Shape& block) {
    if (cfg.min_voxels == 0) return 0;
    const double scaled = static_cast<double>(cfg.min_voxels) * static_cast<double>(block.voxels()) /
                          static_cast<double>(kReferenceBatchVoxels);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(scaled)));
}

BlockResult segment_block(const Volume& block, const PipelineConfig& cfg, const SummedVolumeTable* svt,
                          std::size_t block_index, std::size_t first_frame) {
    cfg.validate();
    const Shape& s = block.shape();
    if (s.depth > cfg.depth) {
        throw FlorinError("block of " + std::to_string(s.depth) + " frames exceeds configured depth " +
                          std::to_string(cfg.depth));
    }

    BlockReport report;
    report.block_index = block_index;
    report.first_frame = first_frame;
    report.frame_count = s.depth;

    // Segmentation: one table serves both thresholds.
    auto start = Clock::now();
    SummedVolumeTable local;
    if (svt == nullptr) {
        local = build_svt(block);
        svt = &local;
    }
    Mask iris = ndnt_threshold(block, cfg.iris, svt, cfg.threads);
    Mask pupil = ndnt_threshold(block, cfg.pupil, svt, cfg.threads);
    report.timing.segmentation = seconds_since(start);

    // Identification.
    start = Clock::now();
    const std::uint64_t floor = effective_min_voxels(cfg, s);
    iris = remove_small(fill_holes(iris), floor, Connectivity::Volumetric26);
    pupil = remove_small(fill_holes(pupil), floor, Connectivity::Volumetric26);
    const Labeling collapsed = label_components(collapse(pupil), Connectivity::Planar8);
    std::optional<ComponentStats> found;
    try {
        found = select_pupil(collapsed.labels, collapsed.components);
    } catch (const NoPupilFound&) {
    }
    report.timing.identification = seconds_since(start);

    // Reconstruction.
    start = Clock::now();
    Mask final_mask(s, 0);
    if (found) {
        final_mask = cfg.combine == Combine::Xor ? mask_xor(iris, pupil) : mask_and_not(iris, pupil);
        const double diameter = cfg.circle_fraction * static_cast<double>(std::min(s.height, s.width));
        const Mask circle = circular_mask(s.height, s.width, found->centroid[1], found->centroid[2], diameter);
        final_mask = apply_circle(final_mask, circle);
        report.pupil_found = true;
        report.pupil = found;
    }
    report.timing.reconstruction = seconds_since(start);

    return {std::move(final_mask), std::move(report)};
}

std::size_t block_count(std::size_t frames, std::size_t depth) {
    if (depth == 0) throw FlorinError("depth must be >= 1");
    return (frames + depth - 1) / depth;
}

VideoResult segment_video(const Volume& video, const PipelineConfig& cfg, const BlockOverride& override) {
    cfg.validate();
    const Shape& s = video.shape();
    const std::size_t blocks = block_count(s.depth, cfg.depth);

    VideoResult result{Mask(s, 0), std::vector<BlockReport>(blocks)};
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(cfg.threads), blocks));

    // Each worker holds at most one block buffer at a time, and writes into
    // the frame range it was handed.
    parallel_for(blocks, workers, [&](std::size_t b) {
        PipelineConfig block_cfg = cfg;
        if (workers > 1) block_cfg.threads = 1;
        if (override) {
            override(b, block_cfg);
            block_cfg.depth = cfg.depth;
        }
        const std::size_t first = b * cfg.depth;
        const std::size_t count = std::min(cfg.depth, s.depth - first);
        BlockResult r = segment_block(video.slice(first, count), block_cfg, nullptr, b, first);
        paste_frames(result.mask, r.mask, first);
        result.reports[b] = std::move(r.report);
    });
    return result;
}

}  // namespace florin
