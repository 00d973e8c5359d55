#include <gtest/gtest.h>

#include <numeric>

#include "florin/volume.hpp"
#include "oracles.hpp"

namespace florin {
namespace {

TEST(Volume, ZeroFill) {
    const Volume v = new_volume({1, 2, 2}, 0);
    EXPECT_EQ(v.size(), 4u);
    for (auto x : v.data()) EXPECT_EQ(x, 0);
}

TEST(Volume, SaturatedFill) {
    const Volume v = new_volume({3, 4, 5}, 255);
    EXPECT_EQ(v.size(), 60u);
    for (auto x : v.data()) EXPECT_EQ(x, 255);
}

TEST(Volume, FillSum) {
    const Volume v = new_volume({2, 2, 2}, 7);
    EXPECT_EQ(std::accumulate(v.data().begin(), v.data().end(), 0), 56);
}

TEST(Volume, ZeroSizedDimensionIsRejected) {
    EXPECT_THROW(new_volume({0, 2, 2}, 0), FlorinError);
    EXPECT_THROW(new_volume({1, 0, 2}, 0), FlorinError);
    EXPECT_THROW(new_volume({1, 2, 0}, 0), FlorinError);
}

TEST(Volume, DataLengthMustMatchShape) {
    EXPECT_THROW(Volume({1, 2, 2}, std::vector<std::uint8_t>(3)), FlorinError);
}

TEST(Mask, RejectsNonBinaryValues) {
    EXPECT_THROW(Mask({1, 1, 2}, std::vector<std::uint8_t>{0, 2}), FlorinError);
}

TEST(Volume, IndexingIsRowMajorAndBijective) {
    const Shape s{3, 4, 5};
    std::vector<int> hits(s.voxels(), 0);
    for (std::size_t z = 0; z < s.depth; ++z)
        for (std::size_t y = 0; y < s.height; ++y)
            for (std::size_t x = 0; x < s.width; ++x) ++hits[s.offset(z, y, x)];
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_EQ(s.offset(0, 0, 1), 1u);
    EXPECT_EQ(s.offset(0, 1, 0), 5u);
    EXPECT_EQ(s.offset(1, 0, 0), 20u);
}

TEST(Xor, SelfIsEmpty) {
    std::mt19937 rng(3);
    const Mask a = testing::random_mask(rng, {2, 5, 5}, 0.5);
    EXPECT_EQ(count_foreground(mask_xor(a, a)), 0u);
}

TEST(Xor, WithEmptyIsIdentity) {
    const Mask a = new_mask({1, 3, 3}, true);
    EXPECT_EQ(mask_xor(a, new_mask({1, 3, 3})), a);
}

TEST(Xor, SupersetMinusSubsetIsSetDifference) {
    // Handmade 8x8 pair: iris is a filled 6x6 square, pupil its central 2x2.
    Mask iris({1, 8, 8}, 0), pupil({1, 8, 8}, 0);
    for (std::size_t y = 1; y < 7; ++y)
        for (std::size_t x = 1; x < 7; ++x) iris(0, y, x) = 1;
    for (std::size_t y = 3; y < 5; ++y)
        for (std::size_t x = 3; x < 5; ++x) pupil(0, y, x) = 1;
    const Mask r = mask_xor(iris, pupil);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x) {
            const bool expected = iris(0, y, x) && !pupil(0, y, x);
            EXPECT_EQ(r(0, y, x), expected ? 1 : 0) << y << "," << x;
        }
    EXPECT_EQ(count_foreground(r), 32u);
}

TEST(Xor, ShapeMismatchThrows) {
    EXPECT_THROW(mask_xor(new_mask({1, 2, 2}), new_mask({1, 2, 3})), FlorinError);
    EXPECT_THROW(mask_and_not(new_mask({1, 2, 2}), new_mask({2, 2, 2})), FlorinError);
}

TEST(AndNot, EmptyRightIsIdentity) {
    std::mt19937 rng(5);
    const Mask a = testing::random_mask(rng, {1, 4, 4}, 0.5);
    EXPECT_EQ(mask_and_not(a, new_mask({1, 4, 4})), a);
    EXPECT_EQ(count_foreground(mask_and_not(a, a)), 0u);
}

TEST(AndNot, MatchesXorWhenRightIsSubset) {
    std::mt19937 rng(11);
    const Mask a = testing::random_mask(rng, {1, 4, 4}, 0.6);
    Mask b({1, 4, 4}, 0);
    // Take every other foreground voxel of a so b is a subset.
    bool take = true;
    for (std::size_t i = 0; i < 16; ++i) {
        if (a.data()[i]) {
            b.data()[i] = take ? 1 : 0;
            take = !take;
        }
    }
    ASSERT_TRUE(is_subset(b, a));
    const Mask x = mask_xor(a, b), n = mask_and_not(a, b);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(x.data()[i], n.data()[i]);
}

TEST(MaskAlgebra, RandomisedProperties) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Shape s = testing::random_shape(rng, 3, 9, 9);
        const Mask a = testing::random_mask(rng, s, 0.5);
        const Mask b = testing::random_mask(rng, s, 0.5);
        EXPECT_EQ(mask_xor(a, b), mask_xor(b, a));
        const Mask sub = mask_and_not(a, mask_and_not(a, b));  // a AND b, a subset of a
        EXPECT_EQ(mask_xor(a, sub), mask_and_not(a, sub));
    }
}

TEST(Volume, SliceAndPaste) {
    Mask m({4, 2, 2}, 0);
    const Mask ones({2, 2, 2}, 1);
    paste_frames(m, ones, 1);
    EXPECT_EQ(count_foreground(m.slice(1, 2)), 8u);
    EXPECT_EQ(count_foreground(m.slice(0, 1)), 0u);
    EXPECT_THROW(paste_frames(m, ones, 3), FlorinError);
    EXPECT_THROW((void)m.slice(3, 2), FlorinError);
}

}  // namespace
}  // namespace florin
