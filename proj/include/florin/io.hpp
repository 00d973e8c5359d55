#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "florin/volume.hpp"

namespace florin {

/// A directory holding a numbered frame sequence `frame_%06d.{pgm,png}`.
struct VideoSource {
    std::filesystem::path directory;
    std::string prefix = "frame";
    std::size_t first_index = 0;
    std::size_t frame_count = 0;
    std::size_t native_height = 0;
    std::size_t native_width = 0;
    /// (height, width) after box downsampling; absent keeps native size.
    std::optional<std::pair<std::size_t, std::size_t>> target;
    /// Files in frame order.
    std::vector<std::filesystem::path> files;
};

/// Scans `directory` for `<prefix>_%06d.pgm|png`, checking the sequence is
/// contiguous and that the first frame is 8-bit grayscale. frame_limit, when
/// nonzero, keeps only the first frame_limit frames.
VideoSource probe_video(const std::filesystem::path& directory, std::size_t frame_limit = 0,
                        const std::string& prefix = "frame");

/// Stacks the frames in order, downsampling each when src.target is set.
/// Throws on mixed shapes (naming the file), non-grayscale or non-8-bit data.
Volume load_frames(const VideoSource& src);

/// Reads masks written by write_masks; any nonzero pixel is foreground.
Mask load_masks(const std::filesystem::path& directory, const std::string& prefix = "mask");

/// Per-frame box-average downsampling with half-up rounding. Throws if the
/// target exceeds the native size on either axis.
Volume downsample(const Volume& v, std::size_t height, std::size_t width);

enum class MaskFormat { Pgm, Png };

/// One file per frame named `<prefix>_%06d.<ext>`, numbered from first_index.
/// PGM masks hold {0, 255}; PNG masks are 1-bit grayscale.
std::vector<std::filesystem::path> write_masks(const Mask& m, const std::filesystem::path& directory,
                                               MaskFormat format, std::size_t first_index = 0,
                                               const std::string& prefix = "mask");

/// Writes every frame of v as 8-bit `frame_%06d.<ext>`.
std::vector<std::filesystem::path> write_frames(const Volume& v, const std::filesystem::path& directory,
                                                MaskFormat format, std::size_t first_index = 0);

struct GrayImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, std::size_t height, std::size_t width,
               std::span<const std::uint8_t> pixels);

GrayImage decode_png(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
GrayImage read_png(const std::filesystem::path& path);

/// 8-bit grayscale PNG, or 1-bit when `binary` is set (pixels must be 0/1).
std::vector<std::uint8_t> encode_png(std::size_t height, std::size_t width, std::span<const std::uint8_t> pixels,
                                     bool binary);
void write_png(const std::filesystem::path& path, std::size_t height, std::size_t width,
               std::span<const std::uint8_t> pixels, bool binary);

/// Frame file name, e.g. frame_000042.png.
std::string frame_file_name(const std::string& prefix, std::size_t index, const std::string& extension);

}  // namespace florin
