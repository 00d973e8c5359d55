#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "florin/volume.hpp"

namespace florin {

/// Per-axis neighborhood half-extents. The neighborhood of voxel v spans
/// v +/- half-extent on each axis, clamped to the volume.
struct Window {
    std::size_t hz = 0;
    std::size_t hy = 0;
    std::size_t hx = 0;

    friend constexpr bool operator==(const Window&, const Window&) = default;
};

struct NdntParams {
    double t = 0.0;  ///< threshold in [0, 1]
    Window window{};

    friend constexpr bool operator==(const NdntParams&, const NdntParams&) = default;
};

struct BoxStats {
    std::uint64_t sum = 0;
    std::uint64_t count = 0;
};

/// Fixed-point scale of the decision rule: a voxel is foreground iff
/// I * count * kThresholdScale <= sum * threshold_factor(t).
inline constexpr std::uint64_t kThresholdScale = 1'000'000;

/// round((1 - t) * kThresholdScale); throws if t is outside [0, 1].
std::uint64_t threshold_factor(double t);

/// 3D integral image: at(z, y, x) is the sum of every source voxel whose
/// indices are all <= (z, y, x). Stored with a zero plane on each low face so
/// box sums need no boundary branches.
class SummedVolumeTable {
public:
    SummedVolumeTable() = default;
    explicit SummedVolumeTable(const Volume& v);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::uint64_t at(std::size_t z, std::size_t y, std::size_t x) const noexcept {
        return padded_[padded_offset(z + 1, y + 1, x + 1)];
    }
    [[nodiscard]] std::uint64_t total() const noexcept { return padded_.back(); }

    /// Sum and voxel count of the box [center - window, center + window]
    /// intersected with the volume. Throws if center is outside the shape.
    [[nodiscard]] BoxStats box_sum(std::size_t z, std::size_t y, std::size_t x, const Window& window) const;

    /// Box sums of every voxel in row (z, y), written to sums; the per-voxel
    /// counts go to counts. Both spans have length width.
    void row_box_sums(std::size_t z, std::size_t y, const Window& window, std::span<std::uint64_t> sums,
                      std::span<std::uint64_t> counts) const noexcept;

private:
    [[nodiscard]] std::size_t padded_offset(std::size_t z, std::size_t y, std::size_t x) const noexcept {
        return (z * (shape_.height + 1) + y) * (shape_.width + 1) + x;
    }

    Shape shape_{};
    std::vector<std::uint64_t> padded_;
};

inline SummedVolumeTable build_svt(const Volume& v) { return SummedVolumeTable(v); }

/// Foreground iff the voxel is at most (1 - t) times its neighborhood mean.
/// `svt`, when given, must have been built from `v`. `threads` = 0 uses every
/// logical processor.
Mask ndnt_threshold(const Volume& v, const NdntParams& p, const SummedVolumeTable* svt = nullptr,
                    unsigned threads = 0);

/// Per-voxel neighborhood statistics for one window, ready to be compared
/// against any number of thresholds.
class NeighborhoodStats {
public:
    NeighborhoodStats(const Volume& v, const SummedVolumeTable& svt, const Window& window, unsigned threads = 0);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] Mask threshold(double t, unsigned threads = 0) const;
    /// Same as calling threshold() for each entry, in input order.
    [[nodiscard]] std::vector<Mask> threshold_all(std::span<const double> thresholds, unsigned threads = 0) const;

private:
    Shape shape_{};
    // Smallest threshold factor for which each voxel is foreground;
    // kThresholdScale + 1 when no t qualifies.
    std::vector<std::uint32_t> critical_;
};

/// Masks for every threshold, sharing one table and one set of neighborhood
/// statistics. result[i] == ndnt_threshold(v, {thresholds[i], window}).
std::vector<Mask> ndnt_sweep(const Volume& v, const Window& window, std::span<const double> thresholds,
                             unsigned threads = 0);

/// Thresholds k * step for k = 0, 1, ... while <= 1, rounded to 1e-9.
std::vector<double> threshold_grid(double step);

}  // namespace florin
