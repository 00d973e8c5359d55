#pragma once

#include <cstdint>

#include "florin/volume.hpp"

namespace florin {

/// Synthetic NIR-like eye: a dark pupil disk inside a mid-gray iris disk on
/// a bright background, one disk pair per frame.
struct PhantomSpec {
    std::size_t frames = 5;
    std::size_t height = 240;
    std::size_t width = 320;
    double pupil_radius = 30.0;
    double iris_radius = 80.0;
    std::uint8_t pupil_intensity = 20;
    std::uint8_t iris_intensity = 120;
    std::uint8_t background_intensity = 230;
    /// Horizontal pupil/iris motion in pixels per frame, symmetric about the
    /// middle frame.
    double drift_x = 0.0;
    /// Uniform noise amplitude added to every pixel (0 = none).
    unsigned noise = 0;
    std::uint32_t seed = 1;
};

/// (y, x) disk center of frame z.
std::pair<double, double> phantom_center(const PhantomSpec& spec, std::size_t z);

Volume make_eye_phantom(const PhantomSpec& spec);

}  // namespace florin
