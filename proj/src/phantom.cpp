#include "florin/phantom.hpp"

#include <algorithm>
#include <random>

namespace florin {

std::pair<double, double> phantom_center(const PhantomSpec& spec, std::size_t z) {
    const double cy = (static_cast<double>(spec.height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(spec.width) - 1.0) / 2.0;
    const double mid = (static_cast<double>(spec.frames) - 1.0) / 2.0;
    return {cy, cx + spec.drift_x * (static_cast<double>(z) - mid)};
}

Volume make_eye_phantom(const PhantomSpec& spec) {
    Volume v({spec.frames, spec.height, spec.width}, spec.background_intensity);
    const double pupil2 = spec.pupil_radius * spec.pupil_radius;
    const double iris2 = spec.iris_radius * spec.iris_radius;
    std::mt19937 rng(spec.seed);
    std::uniform_int_distribution<int> jitter(-static_cast<int>(spec.noise), static_cast<int>(spec.noise));

    for (std::size_t z = 0; z < spec.frames; ++z) {
        const auto [cy, cx] = phantom_center(spec, z);
        for (std::size_t y = 0; y < spec.height; ++y) {
            for (std::size_t x = 0; x < spec.width; ++x) {
                const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
                const double r2 = dy * dy + dx * dx;
                int value = spec.background_intensity;
                if (r2 <= pupil2) {
                    value = spec.pupil_intensity;
                } else if (r2 <= iris2) {
                    value = spec.iris_intensity;
                }
                if (spec.noise != 0) value += jitter(rng);
                v(z, y, x) = static_cast<std::uint8_t>(std::clamp(value, 0, 255));
            }
        }
    }
    return v;
}

}  // namespace florin
