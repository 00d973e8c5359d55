#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "florin/volume.hpp"

namespace florin {

struct LabelTag {};

/// 0 is background; components are numbered 1..K in scan order of their
/// first voxel.
using LabelVolume = Dense<std::uint32_t, LabelTag>;

enum class Connectivity {
    Planar8,       ///< 8-connected within each frame; frames never connect
    Volumetric26,  ///< full 3x3x3 neighborhood
};

struct ComponentStats {
    std::uint32_t label = 0;
    std::uint64_t voxels = 0;
    std::array<std::size_t, 3> bbox_min{};  ///< (z, y, x), inclusive
    std::array<std::size_t, 3> bbox_max{};  ///< (z, y, x), inclusive
    std::array<double, 3> centroid{};       ///< (z, y, x) mean of member coordinates
};

struct Labeling {
    LabelVolume labels;
    /// Sorted by decreasing voxel count, ties by smaller label.
    std::vector<ComponentStats> components;
};

/// Raised by select_pupil when the mask holds no component at all.
class NoPupilFound : public FlorinError {
public:
    NoPupilFound() : FlorinError("no pupil found") {}
};

/// Per-frame fill of background regions not 4-connected to the frame border.
Mask fill_holes(const Mask& m);

Labeling label_components(const Mask& m, Connectivity connectivity);

/// Drops every component with fewer than min_voxels voxels.
Mask remove_small(const Mask& m, std::uint64_t min_voxels, Connectivity connectivity);

/// Logical OR along the frame axis; the result has depth 1.
Mask collapse(const Mask& m);

/// Largest component; ties go to the centroid nearest the frame center, then
/// to the smaller label. Throws NoPupilFound on an empty list.
ComponentStats select_pupil(const LabelVolume& labels, const std::vector<ComponentStats>& stats);

/// Disk of the given diameter centered at (center_y, center_x), sampled at
/// pixel centers and clipped to the frame. Depth 1.
Mask circular_mask(std::size_t height, std::size_t width, double center_y, double center_x, double diameter);

/// Every frame of m ANDed with the depth-1 circle.
Mask apply_circle(const Mask& m, const Mask& circle);

}  // namespace florin
