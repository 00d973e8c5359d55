#include "florin/volume.hpp"

#include <algorithm>

namespace florin {

std::string to_string(const Shape& s) {
    return "(" + std::to_string(s.depth) + ", " + std::to_string(s.height) + ", " + std::to_string(s.width) + ")";
}

namespace {

void require_same_shape(const Mask& a, const Mask& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw FlorinError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                          to_string(b.shape()));
    }
}

}  // namespace

Mask mask_xor(const Mask& a, const Mask& b) {
    require_same_shape(a, b, "xor");
    Mask out(a.shape(), 0);
    auto o = out.data();
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = da[i] ^ db[i];
    return out;
}

Mask mask_and_not(const Mask& a, const Mask& b) {
    require_same_shape(a, b, "and_not");
    Mask out(a.shape(), 0);
    auto o = out.data();
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = da[i] & static_cast<std::uint8_t>(db[i] ^ 1);
    return out;
}

bool is_subset(const Mask& sub, const Mask& super) {
    require_same_shape(sub, super, "is_subset");
    auto a = sub.data();
    auto b = super.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

std::size_t count_foreground(const Mask& m) {
    std::size_t n = 0;
    for (auto v : m.data()) n += v;
    return n;
}

void paste_frames(Mask& dst, const Mask& src, std::size_t first) {
    const auto& ds = dst.shape();
    const auto& ss = src.shape();
    if (ss.height != ds.height || ss.width != ds.width || first + ss.depth > ds.depth) {
        throw FlorinError("paste_frames: " + to_string(ss) + " does not fit into " + to_string(ds) + " at frame " +
                          std::to_string(first));
    }
    auto out = dst.data().subspan(first * ds.frame_size(), src.size());
    auto in = src.data();
    std::copy(in.begin(), in.end(), out.begin());
}

}  // namespace florin
