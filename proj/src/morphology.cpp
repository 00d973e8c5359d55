#include "florin/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace florin {

namespace {

class DisjointSet {
public:
    std::uint32_t make() {
        const auto id = static_cast<std::uint32_t>(parent_.size());
        parent_.push_back(id);
        return id;
    }

    std::uint32_t find(std::uint32_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // Smaller root wins so the representative is the earliest label.
        if (a < b) {
            parent_[b] = a;
        } else {
            parent_[a] = b;
        }
    }

    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<std::uint32_t> parent_;
};

struct Offset {
    int dz, dy, dx;
};

// Neighbors that precede a voxel in row-major scan order.
std::vector<Offset> backward_neighbors(Connectivity c) {
    std::vector<Offset> out;
    const int zlo = c == Connectivity::Volumetric26 ? -1 : 0;
    for (int dz = zlo; dz <= 0; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
                out.push_back({dz, dy, dx});
            }
        }
    }
    return out;
}

}  // namespace

Mask fill_holes(const Mask& m) {
    const Shape& s = m.shape();
    const std::size_t H = s.height, W = s.width;
    Mask out = m;
    std::vector<std::uint8_t> reached(s.frame_size());
    std::vector<std::size_t> stack;

    for (std::size_t z = 0; z < s.depth; ++z) {
        auto frame = out.frame(z);
        std::fill(reached.begin(), reached.end(), 0);
        stack.clear();
        const auto seed = [&](std::size_t i) {
            if (!frame[i] && !reached[i]) {
                reached[i] = 1;
                stack.push_back(i);
            }
        };
        for (std::size_t x = 0; x < W; ++x) {
            seed(x);
            seed((H - 1) * W + x);
        }
        for (std::size_t y = 0; y < H; ++y) {
            seed(y * W);
            seed(y * W + W - 1);
        }
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const std::size_t y = i / W, x = i % W;
            if (y > 0) seed(i - W);
            if (y + 1 < H) seed(i + W);
            if (x > 0) seed(i - 1);
            if (x + 1 < W) seed(i + 1);
        }
        for (std::size_t i = 0; i < frame.size(); ++i) {
            if (!reached[i]) frame[i] = 1;
        }
    }
    return out;
}

Labeling label_components(const Mask& m, Connectivity connectivity) {
    const Shape& s = m.shape();
    const auto neighbors = backward_neighbors(connectivity);
    std::vector<std::uint32_t> provisional(s.voxels(), 0);  // 0 = background, else set id + 1
    DisjointSet sets;
    auto in = m.data();

    for (std::size_t z = 0; z < s.depth; ++z) {
        for (std::size_t y = 0; y < s.height; ++y) {
            for (std::size_t x = 0; x < s.width; ++x) {
                const std::size_t i = s.offset(z, y, x);
                if (!in[i]) continue;
                std::uint32_t mine = 0;
                for (const auto& n : neighbors) {
                    const auto nz = static_cast<std::ptrdiff_t>(z) + n.dz;
                    const auto ny = static_cast<std::ptrdiff_t>(y) + n.dy;
                    const auto nx = static_cast<std::ptrdiff_t>(x) + n.dx;
                    if (nz < 0 || ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(s.height) ||
                        nx >= static_cast<std::ptrdiff_t>(s.width)) {
                        continue;
                    }
                    const std::uint32_t other =
                        provisional[s.offset(static_cast<std::size_t>(nz), static_cast<std::size_t>(ny),
                                             static_cast<std::size_t>(nx))];
                    if (other == 0) continue;
                    if (mine == 0) {
                        mine = other;
                    } else if (mine != other) {
                        sets.unite(mine - 1, other - 1);
                    }
                }
                if (mine == 0) {
                    if (sets.size() >= std::numeric_limits<std::uint32_t>::max() - 1) {
                        throw FlorinError("label_components: too many components");
                    }
                    mine = sets.make() + 1;
                }
                provisional[i] = mine;
            }
        }
    }

    // Final labels follow first appearance in scan order; set roots are the
    // smallest provisional id, which is also the earliest-created.
    std::vector<std::uint32_t> final_of_root(sets.size(), 0);
    std::uint32_t next = 0;
    std::vector<ComponentStats> stats;
    std::vector<std::array<double, 3>> coord_sums;
    std::vector<std::uint32_t> labels(s.voxels(), 0);

    for (std::size_t z = 0; z < s.depth; ++z) {
        for (std::size_t y = 0; y < s.height; ++y) {
            for (std::size_t x = 0; x < s.width; ++x) {
                const std::size_t i = s.offset(z, y, x);
                if (provisional[i] == 0) continue;
                const std::uint32_t root = sets.find(provisional[i] - 1);
                std::uint32_t& label = final_of_root[root];
                if (label == 0) {
                    label = ++next;
                    ComponentStats c;
                    c.label = label;
                    c.bbox_min = {z, y, x};
                    c.bbox_max = {z, y, x};
                    stats.push_back(c);
                    coord_sums.push_back({0.0, 0.0, 0.0});
                }
                labels[i] = label;
                auto& c = stats[label - 1];
                ++c.voxels;
                const std::array<std::size_t, 3> p{z, y, x};
                for (int a = 0; a < 3; ++a) {
                    c.bbox_min[a] = std::min(c.bbox_min[a], p[a]);
                    c.bbox_max[a] = std::max(c.bbox_max[a], p[a]);
                    coord_sums[label - 1][a] += static_cast<double>(p[a]);
                }
            }
        }
    }

    for (std::size_t k = 0; k < stats.size(); ++k) {
        for (int a = 0; a < 3; ++a) {
            stats[k].centroid[a] = coord_sums[k][a] / static_cast<double>(stats[k].voxels);
        }
    }
    std::stable_sort(stats.begin(), stats.end(),
                     [](const ComponentStats& a, const ComponentStats& b) { return a.voxels > b.voxels; });

    return {LabelVolume(s, std::move(labels)), std::move(stats)};
}

Mask remove_small(const Mask& m, std::uint64_t min_voxels, Connectivity connectivity) {
    if (min_voxels == 0) return m;
    const auto [labels, stats] = label_components(m, connectivity);
    std::vector<std::uint8_t> keep(stats.size() + 1, 0);
    for (const auto& c : stats) keep[c.label] = c.voxels >= min_voxels ? 1 : 0;

    Mask out(m.shape(), 0);
    auto o = out.data();
    auto l = labels.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = keep[l[i]];
    return out;
}

Mask collapse(const Mask& m) {
    const Shape& s = m.shape();
    Mask out({1, s.height, s.width}, 0);
    auto o = out.data();
    for (std::size_t z = 0; z < s.depth; ++z) {
        auto f = m.frame(z);
        for (std::size_t i = 0; i < o.size(); ++i) o[i] |= f[i];
    }
    return out;
}

ComponentStats select_pupil(const LabelVolume& labels, const std::vector<ComponentStats>& stats) {
    if (stats.empty()) throw NoPupilFound();
    const double cy = (static_cast<double>(labels.shape().height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(labels.shape().width) - 1.0) / 2.0;
    const auto dist2 = [&](const ComponentStats& c) {
        const double dy = c.centroid[1] - cy, dx = c.centroid[2] - cx;
        return dy * dy + dx * dx;
    };
    const auto better = [&](const ComponentStats& a, const ComponentStats& b) {
        if (a.voxels != b.voxels) return a.voxels > b.voxels;
        const double da = dist2(a), db = dist2(b);
        if (da != db) return da < db;
        return a.label < b.label;
    };
    return *std::min_element(stats.begin(), stats.end(), better);
}

Mask circular_mask(std::size_t height, std::size_t width, double center_y, double center_x, double diameter) {
    if (!(diameter > 0.0)) throw FlorinError("circular_mask: diameter must be positive");
    Mask out({1, height, width}, 0);
    const double r2 = (diameter / 2.0) * (diameter / 2.0);
    auto o = out.data();
    for (std::size_t y = 0; y < height; ++y) {
        const double dy = static_cast<double>(y) - center_y;
        for (std::size_t x = 0; x < width; ++x) {
            const double dx = static_cast<double>(x) - center_x;
            o[y * width + x] = (dy * dy + dx * dx <= r2) ? 1 : 0;
        }
    }
    return out;
}

Mask apply_circle(const Mask& m, const Mask& circle) {
    const Shape& s = m.shape();
    const Shape& c = circle.shape();
    if (c.depth != 1 || c.height != s.height || c.width != s.width) {
        throw FlorinError("apply_circle: circle " + to_string(c) + " does not match frames of " + to_string(s));
    }
    Mask out = m;
    auto disk = circle.data();
    for (std::size_t z = 0; z < s.depth; ++z) {
        auto f = out.frame(z);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] &= disk[i];
    }
    return out;
}

}  // namespace florin
