#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "florin/morphology.hpp"
#include "florin/ndnt.hpp"
#include "florin/volume.hpp"

namespace florin {

enum class Combine { Xor, AndNot };

std::string to_string(Combine c);
Combine parse_combine(const std::string& s);

/// Reference batch that min_voxels is expressed against: 5 frames of 240x320.
inline constexpr std::uint64_t kReferenceBatchVoxels = 5ull * 240 * 320;

struct PipelineConfig {
    std::size_t depth = 5;
    NdntParams iris{0.35, {1, 128, 128}};
    NdntParams pupil{0.85, {1, 128, 128}};
    /// Small-component floor for a reference batch; scaled by block volume.
    std::uint64_t min_voxels = 50;
    Combine combine = Combine::Xor;
    double circle_fraction = 0.5;
    /// Worker count; 0 = one per logical processor.
    unsigned threads = 0;

    void validate() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// min_voxels scaled to a block of the given shape (rounded, at least 1 if
/// min_voxels is nonzero).
std::uint64_t effective_min_voxels(const PipelineConfig& cfg, const Shape& block);

struct StageTimings {
    double segmentation = 0.0;    ///< table build and both thresholds, seconds
    double identification = 0.0;  ///< hole filling, component removal, pupil isolation
    double reconstruction = 0.0;  ///< combine and circular masking

    [[nodiscard]] double total() const noexcept { return segmentation + identification + reconstruction; }
};

struct BlockReport {
    std::size_t block_index = 0;
    std::size_t first_frame = 0;
    std::size_t frame_count = 0;
    bool pupil_found = false;
    std::optional<ComponentStats> pupil;  ///< present iff pupil_found
    StageTimings timing;
};

struct BlockResult {
    Mask mask;
    BlockReport report;
};

/// One pass of the iris pipeline over a block of at most cfg.depth frames.
/// When no pupil is found the mask is all background and the report is
/// flagged. `svt`, when given, must be built from `block`.
BlockResult segment_block(const Volume& block, const PipelineConfig& cfg, const SummedVolumeTable* svt = nullptr,
                          std::size_t block_index = 0, std::size_t first_frame = 0);

/// Adjusts the config of one block before it runs.
using BlockOverride = std::function<void(std::size_t block_index, PipelineConfig& cfg)>;

struct VideoResult {
    Mask mask;
    std::vector<BlockReport> reports;
};

/// Splits the video into consecutive blocks of cfg.depth frames (the last may
/// be shorter), segments each, and stitches the masks back in frame order.
VideoResult segment_video(const Volume& video, const PipelineConfig& cfg, const BlockOverride& override = {});

/// Number of blocks segment_video produces for `frames` frames.
std::size_t block_count(std::size_t frames, std::size_t depth);

}  // namespace florin
