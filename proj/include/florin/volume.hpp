#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace florin {

/// Thrown for any violated shape, range, or parameter contract.
class FlorinError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Shape {
    std::size_t depth = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    [[nodiscard]] constexpr std::size_t voxels() const noexcept { return depth * height * width; }
    [[nodiscard]] constexpr std::size_t frame_size() const noexcept { return height * width; }
    [[nodiscard]] constexpr bool valid() const noexcept { return depth >= 1 && height >= 1 && width >= 1; }

    /// Row-major offset, x fastest.
    [[nodiscard]] constexpr std::size_t offset(std::size_t z, std::size_t y, std::size_t x) const noexcept {
        return (z * height + y) * width + x;
    }

    friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

struct IntensityTag {};
struct MaskTag {};

/// Dense row-major array of T with depth x height x width elements. The tag
/// keeps intensity volumes and binary masks apart at compile time.
template <typename T, typename Tag>
class Dense {
public:
    using value_type = T;

    Dense() = default;

    Dense(Shape shape, T fill) : shape_(shape) {
        if (!shape.valid()) {
            throw FlorinError("zero-sized dimension in shape " + to_string(shape));
        }
        data_.assign(shape.voxels(), fill);
    }

    Dense(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
        if (!shape.valid()) {
            throw FlorinError("zero-sized dimension in shape " + to_string(shape));
        }
        if (data_.size() != shape.voxels()) {
            throw FlorinError("data length " + std::to_string(data_.size()) + " does not match shape " +
                              to_string(shape));
        }
        if constexpr (std::is_same_v<Tag, MaskTag>) {
            for (auto& v : data_) {
                if (v > 1) throw FlorinError("mask element outside {0, 1}");
            }
        }
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<const T> data() const noexcept { return data_; }
    [[nodiscard]] std::span<T> data() noexcept { return data_; }

    [[nodiscard]] T operator()(std::size_t z, std::size_t y, std::size_t x) const noexcept {
        return data_[shape_.offset(z, y, x)];
    }
    T& operator()(std::size_t z, std::size_t y, std::size_t x) noexcept { return data_[shape_.offset(z, y, x)]; }

    [[nodiscard]] std::span<const T> frame(std::size_t z) const noexcept {
        return std::span<const T>(data_).subspan(z * shape_.frame_size(), shape_.frame_size());
    }
    [[nodiscard]] std::span<T> frame(std::size_t z) noexcept {
        return std::span<T>(data_).subspan(z * shape_.frame_size(), shape_.frame_size());
    }

    /// Copy of frames [first, first + count).
    [[nodiscard]] Dense slice(std::size_t first, std::size_t count) const {
        if (count == 0 || first + count > shape_.depth) {
            throw FlorinError("frame slice out of range");
        }
        const auto fs = shape_.frame_size();
        std::vector<T> out(data_.begin() + static_cast<std::ptrdiff_t>(first * fs),
                           data_.begin() + static_cast<std::ptrdiff_t>((first + count) * fs));
        return Dense({count, shape_.height, shape_.width}, std::move(out));
    }

    friend bool operator==(const Dense&, const Dense&) = default;

private:
    Shape shape_{};
    std::vector<T> data_;
};

/// 8-bit grayscale intensities.
using Volume = Dense<std::uint8_t, IntensityTag>;

/// Binary volume; every element is 0 (background) or 1 (foreground). A 2D
/// mask is a Mask with depth 1.
using Mask = Dense<std::uint8_t, MaskTag>;

inline Volume new_volume(Shape shape, std::uint8_t fill) { return Volume(shape, fill); }
inline Mask new_mask(Shape shape, bool foreground = false) { return Mask(shape, foreground ? 1 : 0); }

Mask mask_xor(const Mask& a, const Mask& b);
Mask mask_and_not(const Mask& a, const Mask& b);

/// True if every foreground element of `sub` is foreground in `super`.
bool is_subset(const Mask& sub, const Mask& super);

std::size_t count_foreground(const Mask& m);

/// Frames [first, first + src.depth) of dst are overwritten with src.
void paste_frames(Mask& dst, const Mask& src, std::size_t first);

}  // namespace florin
