#include "florin/ndnt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "florin/parallel.hpp"

namespace florin {

namespace {

using u128 = unsigned __int128;

bool needs_wide_compare(const Shape& s) {
    constexpr std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / (255 * kThresholdScale);
    return s.voxels() > limit;
}

inline bool is_foreground(std::uint64_t intensity_count, std::uint64_t sum, std::uint64_t factor, bool wide) {
    if (wide) {
        return static_cast<u128>(intensity_count) * kThresholdScale <= static_cast<u128>(sum) * factor;
    }
    return intensity_count * kThresholdScale <= sum * factor;
}

void validate_threshold(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw FlorinError("threshold " + std::to_string(t) + " outside [0, 1]");
    }
}

}  // namespace

std::uint64_t threshold_factor(double t) {
    validate_threshold(t);
    return static_cast<std::uint64_t>(std::llround((1.0 - t) * static_cast<double>(kThresholdScale)));
}

SummedVolumeTable::SummedVolumeTable(const Volume& v) : shape_(v.shape()) {
    const std::size_t D = shape_.depth, H = shape_.height, W = shape_.width;
    const std::size_t row = W + 1;
    const std::size_t plane = (H + 1) * row;
    padded_.assign((D + 1) * plane, 0);

    auto src = v.data();
    for (std::size_t z = 0; z < D; ++z) {
        for (std::size_t y = 0; y < H; ++y) {
            const std::uint8_t* in = src.data() + shape_.offset(z, y, 0);
            std::uint64_t* out = padded_.data() + padded_offset(z + 1, y + 1, 1);
            const std::uint64_t* up = out - row;                 // (z+1, y,   .)
            const std::uint64_t* back = out - plane;             // (z,   y+1, .)
            const std::uint64_t* back_up = out - plane - row;    // (z,   y,   .)
            std::uint64_t running = 0;
            for (std::size_t x = 0; x < W; ++x) {
                running += in[x];
                out[x] = running + up[x] + back[x] - back_up[x];
            }
        }
    }
}

BoxStats SummedVolumeTable::box_sum(std::size_t z, std::size_t y, std::size_t x, const Window& w) const {
    if (z >= shape_.depth || y >= shape_.height || x >= shape_.width) {
        throw FlorinError("box_sum center (" + std::to_string(z) + ", " + std::to_string(y) + ", " +
                          std::to_string(x) + ") outside " + to_string(shape_));
    }
    // Padded inclusive-exclusive bounds: [lo, hi) in source indices maps to
    // padded corners lo and hi.
    const std::size_t z0 = z - std::min(z, w.hz), z1 = std::min(shape_.depth, z + w.hz + 1);
    const std::size_t y0 = y - std::min(y, w.hy), y1 = std::min(shape_.height, y + w.hy + 1);
    const std::size_t x0 = x - std::min(x, w.hx), x1 = std::min(shape_.width, x + w.hx + 1);

    const auto P = [&](std::size_t a, std::size_t b, std::size_t c) { return padded_[padded_offset(a, b, c)]; };
    const std::uint64_t sum = P(z1, y1, x1) - P(z0, y1, x1) - P(z1, y0, x1) - P(z1, y1, x0) + P(z0, y0, x1) +
                              P(z0, y1, x0) + P(z1, y0, x0) - P(z0, y0, x0);
    return {sum, (z1 - z0) * (y1 - y0) * (x1 - x0)};
}

void SummedVolumeTable::row_box_sums(std::size_t z, std::size_t y, const Window& w, std::span<std::uint64_t> sums,
                                     std::span<std::uint64_t> counts) const noexcept {
    const std::size_t W = shape_.width;
    const std::size_t z0 = z - std::min(z, w.hz), z1 = std::min(shape_.depth, z + w.hz + 1);
    const std::size_t y0 = y - std::min(y, w.hy), y1 = std::min(shape_.height, y + w.hy + 1);
    const std::uint64_t plane_count = (z1 - z0) * (y1 - y0);

    // Column sums of the (z, y) rectangle at each padded x, so the box sum
    // is a difference of two entries.
    const std::uint64_t* a = padded_.data() + padded_offset(z1, y1, 0);
    const std::uint64_t* b = padded_.data() + padded_offset(z0, y1, 0);
    const std::uint64_t* c = padded_.data() + padded_offset(z1, y0, 0);
    const std::uint64_t* d = padded_.data() + padded_offset(z0, y0, 0);
    const auto rect = [&](std::size_t px) { return a[px] - b[px] - c[px] + d[px]; };

    for (std::size_t x = 0; x < W; ++x) {
        const std::size_t x0 = x - std::min(x, w.hx);
        const std::size_t x1 = std::min(W, x + w.hx + 1);
        sums[x] = rect(x1) - rect(x0);
        counts[x] = plane_count * (x1 - x0);
    }
}

Mask ndnt_threshold(const Volume& v, const NdntParams& p, const SummedVolumeTable* svt, unsigned threads) {
    const std::uint64_t factor = threshold_factor(p.t);
    SummedVolumeTable local;
    if (svt == nullptr) {
        local = build_svt(v);
        svt = &local;
    } else if (svt->shape() != v.shape()) {
        throw FlorinError("summed volume table shape " + to_string(svt->shape()) + " does not match volume " +
                          to_string(v.shape()));
    }

    const Shape& s = v.shape();
    const bool wide = needs_wide_compare(s);
    Mask out(s, 0);
    auto in = v.data();
    auto mask = out.data();
    parallel_for(s.depth * s.height, threads, [&](std::size_t r) {
        thread_local std::vector<std::uint64_t> sums, counts;
        sums.resize(s.width);
        counts.resize(s.width);
        const std::size_t z = r / s.height, y = r % s.height;
        svt->row_box_sums(z, y, p.window, sums, counts);
        const std::size_t base = r * s.width;
        for (std::size_t x = 0; x < s.width; ++x) {
            mask[base + x] = is_foreground(in[base + x] * counts[x], sums[x], factor, wide) ? 1 : 0;
        }
    });
    return out;
}

NeighborhoodStats::NeighborhoodStats(const Volume& v, const SummedVolumeTable& svt, const Window& window,
                                     unsigned threads)
    : shape_(v.shape()) {
    if (svt.shape() != v.shape()) {
        throw FlorinError("summed volume table shape " + to_string(svt.shape()) + " does not match volume " +
                          to_string(v.shape()));
    }
    critical_.resize(shape_.voxels());
    auto in = v.data();
    parallel_for(shape_.depth * shape_.height, threads, [&](std::size_t r) {
        const std::size_t z = r / shape_.height, y = r % shape_.height;
        const std::size_t base = r * shape_.width;
        std::vector<std::uint64_t> sums(shape_.width), counts(shape_.width);
        svt.row_box_sums(z, y, window, sums, counts);
        for (std::size_t x = 0; x < shape_.width; ++x) {
            // Foreground iff I*count*SCALE <= sum*factor, i.e. factor >= ceil(I*count*SCALE / sum).
            const auto lhs = static_cast<unsigned __int128>(in[base + x]) * counts[x] * kThresholdScale;
            std::uint64_t need = 0;
            if (lhs != 0) {
                const auto q = (lhs + sums[x] - 1) / sums[x];
                need = q > kThresholdScale ? kThresholdScale + 1 : static_cast<std::uint64_t>(q);
            }
            critical_[base + x] = static_cast<std::uint32_t>(need);
        }
    });
}

Mask NeighborhoodStats::threshold(double t, unsigned threads) const {
    const auto factor = static_cast<std::uint32_t>(threshold_factor(t));
    Mask out(shape_, 0);
    auto mask = out.data();
    constexpr std::size_t chunk = 1 << 16;
    const std::size_t n = mask.size();
    const std::uint32_t* crit = critical_.data();
    parallel_for((n + chunk - 1) / chunk, threads, [&](std::size_t c) {
        const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        std::uint8_t* m = mask.data();
        for (std::size_t i = lo; i < hi; ++i) m[i] = crit[i] <= factor ? 1 : 0;
    });
    return out;
}

std::vector<Mask> NeighborhoodStats::threshold_all(std::span<const double> thresholds, unsigned threads) const {
    std::vector<Mask> out(thresholds.size());
    if (thresholds.size() > 255) {
        parallel_for(thresholds.size(), threads, [&](std::size_t i) { out[i] = threshold(thresholds[i], 1); });
        return out;
    }

    // Rank each voxel by the first (in ascending factor order) threshold it
    // passes; every mask is then a one-byte comparison against that rank.
    std::vector<std::uint32_t> factors;
    for (double t : thresholds) factors.push_back(static_cast<std::uint32_t>(threshold_factor(t)));
    std::vector<std::uint32_t> sorted = factors;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    const std::size_t n = critical_.size();
    constexpr std::size_t chunk = 1 << 16;
    const std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<std::uint8_t> rank(n);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            rank[i] = static_cast<std::uint8_t>(std::lower_bound(sorted.begin(), sorted.end(), critical_[i]) -
                                                sorted.begin());
        }
    });

    std::vector<std::uint8_t> levels;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        out[k] = Mask(shape_, 0);
        levels.push_back(static_cast<std::uint8_t>(std::lower_bound(sorted.begin(), sorted.end(), factors[k]) -
                                                   sorted.begin()));
    }
    // Tiled so each rank chunk stays in cache while every mask is written.
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        const std::uint8_t* src = rank.data();
        for (std::size_t k = 0; k < out.size(); ++k) {
            std::uint8_t* dst = out[k].data().data();
            const std::uint8_t level = levels[k];
            for (std::size_t i = lo; i < hi; ++i) dst[i] = src[i] <= level ? 1 : 0;
        }
    });
    return out;
}

std::vector<Mask> ndnt_sweep(const Volume& v, const Window& window, std::span<const double> thresholds,
                             unsigned threads) {
    if (thresholds.empty()) throw FlorinError("ndnt_sweep: empty threshold list");
    for (double t : thresholds) validate_threshold(t);

    const SummedVolumeTable svt = build_svt(v);
    const NeighborhoodStats stats(v, svt, window, threads);
    return stats.threshold_all(thresholds, threads);
}

std::vector<double> threshold_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw FlorinError("grid step " + std::to_string(step) + " outside (0, 1]");
    }
    const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = std::round(static_cast<double>(k) * step * 1e9) / 1e9;
        grid.push_back(std::min(t, 1.0));
    }
    return grid;
}

}  // namespace florin
