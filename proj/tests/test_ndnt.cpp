#include <gtest/gtest.h>

#include <chrono>

#include "florin/ndnt.hpp"
#include "oracles.hpp"

namespace florin {
namespace {

TEST(Svt, AllZero) {
    const SummedVolumeTable t = build_svt(new_volume({3, 4, 5}, 0));
    EXPECT_EQ(t.total(), 0u);
    EXPECT_EQ(t.at(2, 3, 4), 0u);
}

TEST(Svt, AllOnesIsProductOfExtents) {
    const SummedVolumeTable t = build_svt(new_volume({4, 4, 4}, 1));
    for (std::size_t z = 0; z < 4; ++z)
        for (std::size_t y = 0; y < 4; ++y)
            for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(t.at(z, y, x), (z + 1) * (y + 1) * (x + 1));
    EXPECT_EQ(t.at(3, 3, 3), 64u);
}

TEST(Svt, MatchesBruteForcePrefixSums) {
    std::mt19937 rng(1);
    const Volume v = testing::random_volume(rng, {3, 4, 5});
    const SummedVolumeTable t = build_svt(v);
    for (std::size_t z = 0; z < 3; ++z)
        for (std::size_t y = 0; y < 4; ++y)
            for (std::size_t x = 0; x < 5; ++x) EXPECT_EQ(t.at(z, y, x), testing::brute_prefix_sum(v, z, y, x));
}

TEST(Svt, NonDecreasingAlongEachAxis) {
    std::mt19937 rng(2);
    const Volume v = testing::random_volume(rng, {4, 6, 7});
    const SummedVolumeTable t = build_svt(v);
    for (std::size_t z = 0; z < 4; ++z)
        for (std::size_t y = 0; y < 6; ++y)
            for (std::size_t x = 0; x < 7; ++x) {
                if (z > 0) EXPECT_LE(t.at(z - 1, y, x), t.at(z, y, x));
                if (y > 0) EXPECT_LE(t.at(z, y - 1, x), t.at(z, y, x));
                if (x > 0) EXPECT_LE(t.at(z, y, x - 1), t.at(z, y, x));
            }
}

TEST(BoxSum, AllOnesSumEqualsCount) {
    const SummedVolumeTable t = build_svt(new_volume({4, 4, 4}, 1));
    for (const Window w : {Window{0, 0, 0}, Window{1, 2, 3}, Window{9, 9, 9}}) {
        const BoxStats b = t.box_sum(2, 1, 3, w);
        EXPECT_EQ(b.sum, b.count);
    }
}

TEST(BoxSum, InteriorCountAndClampedCorner) {
    const SummedVolumeTable t = build_svt(new_volume({4, 4, 4}, 3));
    EXPECT_EQ(t.box_sum(1, 1, 1, {1, 1, 1}).count, 27u);
    EXPECT_EQ(t.box_sum(0, 0, 0, {1, 1, 1}).count, 8u);
    EXPECT_EQ(t.box_sum(0, 0, 0, {1, 1, 1}).sum, 24u);
}

TEST(BoxSum, CenterOutOfBoundsThrows) {
    const SummedVolumeTable t = build_svt(new_volume({2, 2, 2}, 1));
    EXPECT_THROW((void)t.box_sum(2, 0, 0, {}), FlorinError);
    EXPECT_THROW((void)t.box_sum(0, 0, 2, {}), FlorinError);
}

TEST(Ndnt, ZeroVolumeIsAllForeground) {
    const Volume v = new_volume({2, 5, 5}, 0);
    for (double t : {0.0, 0.3, 1.0}) EXPECT_EQ(count_foreground(ndnt_threshold(v, {t, {1, 2, 2}})), v.size());
}

TEST(Ndnt, UniformVolumeHalfThresholdIsAllBackground) {
    const Volume v = new_volume({2, 5, 5}, 100);
    EXPECT_EQ(count_foreground(ndnt_threshold(v, {0.5, {1, 2, 2}})), 0u);
}

TEST(Ndnt, UniformVolumeZeroThresholdIsAllForeground) {
    const Volume v = new_volume({2, 5, 5}, 100);
    EXPECT_EQ(count_foreground(ndnt_threshold(v, {0.0, {1, 2, 2}})), v.size());
}

TEST(Ndnt, DarkBlockOnBrightBackground) {
    // Frozen from a brute-force per-pixel mean: only the 4x4 block at rows
    // and cols 6..9 passes I <= 0.5 * mean.
    Volume v({1, 16, 16}, 200);
    for (std::size_t y = 6; y < 10; ++y)
        for (std::size_t x = 6; x < 10; ++x) v(0, y, x) = 10;
    const Mask m = ndnt_threshold(v, {0.5, {0, 8, 8}});
    for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 16; ++x) {
            const bool dark = y >= 6 && y < 10 && x >= 6 && x < 10;
            EXPECT_EQ(m(0, y, x), dark ? 1 : 0);
        }
}

TEST(Ndnt, InvalidThresholdThrows) {
    const Volume v = new_volume({1, 2, 2}, 1);
    EXPECT_THROW(ndnt_threshold(v, {-0.01, {}}), FlorinError);
    EXPECT_THROW(ndnt_threshold(v, {1.01, {}}), FlorinError);
}

TEST(Ndnt, TableShapeMismatchThrows) {
    const Volume v = new_volume({1, 2, 2}, 1);
    const SummedVolumeTable t = build_svt(new_volume({1, 2, 3}, 1));
    EXPECT_THROW(ndnt_threshold(v, {0.5, {}}, &t), FlorinError);
}

TEST(Ndnt, MatchesNaiveOracle) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const Volume v = testing::random_volume(rng, testing::random_shape(rng, 4, 12, 12));
        const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Window w{std::uniform_int_distribution<std::size_t>(0, 3)(rng),
                       std::uniform_int_distribution<std::size_t>(0, 8)(rng),
                       std::uniform_int_distribution<std::size_t>(0, 8)(rng)};
        ASSERT_EQ(ndnt_threshold(v, {t, w}), testing::naive_ndnt(v, t, w)) << "trial " << trial;
    }
}

TEST(Ndnt, PrecomputedTableGivesSameMask) {
    std::mt19937 rng(8);
    const Volume v = testing::random_volume(rng, {3, 10, 11});
    const SummedVolumeTable t = build_svt(v);
    EXPECT_EQ(ndnt_threshold(v, {0.2, {1, 3, 3}}, &t), ndnt_threshold(v, {0.2, {1, 3, 3}}));
}

TEST(Ndnt, ThreadCountDoesNotChangeResult) {
    std::mt19937 rng(9);
    const Volume v = testing::random_volume(rng, {3, 30, 31});
    EXPECT_EQ(ndnt_threshold(v, {0.3, {1, 5, 5}}, nullptr, 1), ndnt_threshold(v, {0.3, {1, 5, 5}}, nullptr, 4));
}

TEST(Ndnt, DegenerateWindowComparesVoxelAgainstItself) {
    std::mt19937 rng(10);
    const Volume v = testing::random_volume(rng, {2, 6, 6}, 0, 5);
    for (double t : {0.0, 0.4}) {
        const Mask m = ndnt_threshold(v, {t, {0, 0, 0}});
        for (std::size_t i = 0; i < v.size(); ++i) {
            const bool expected = v.data()[i] == 0 || t == 0.0;
            EXPECT_EQ(m.data()[i], expected ? 1 : 0);
        }
    }
}

TEST(Ndnt, TemporalContextChangesTheMask) {
    // Same center frame in both volumes; only the neighbours in time differ.
    Volume dark_context({3, 5, 5}, 100), bright_context({3, 5, 5}, 100);
    for (std::size_t z : {0u, 2u}) {
        for (std::size_t i = 0; i < 25; ++i) {
            dark_context.frame(z)[i] = 10;
            bright_context.frame(z)[i] = 250;
        }
    }
    dark_context(1, 2, 2) = 60;
    bright_context(1, 2, 2) = 60;
    const NdntParams planar{0.3, {0, 2, 2}}, volumetric{0.3, {1, 2, 2}};
    // Planar windows only see frame 1, identical in both volumes.
    EXPECT_EQ(ndnt_threshold(dark_context, planar).frame(1)[12], ndnt_threshold(bright_context, planar).frame(1)[12]);
    EXPECT_NE(ndnt_threshold(dark_context, volumetric), ndnt_threshold(dark_context, planar));
    EXPECT_NE(ndnt_threshold(dark_context, volumetric).frame(1)[12],
              ndnt_threshold(bright_context, volumetric).frame(1)[12]);
}

TEST(Ndnt, ThresholdMonotonicity) {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const Volume v = testing::random_volume(rng, testing::random_shape(rng, 3, 10, 10));
        const Window w{1, 3, 3};
        Mask prev = ndnt_threshold(v, {0.0, w});
        for (int k = 1; k <= 20; ++k) {
            const Mask cur = ndnt_threshold(v, {k * 0.05, w});
            EXPECT_TRUE(is_subset(cur, prev));
            prev = cur;
        }
    }
}

TEST(Sweep, SingleThresholdMatchesDirectCall) {
    std::mt19937 rng(13);
    const Volume v = testing::random_volume(rng, {2, 9, 9});
    const std::vector<double> ts{0.37};
    EXPECT_EQ(ndnt_sweep(v, {1, 2, 2}, ts).front(), ndnt_threshold(v, {0.37, {1, 2, 2}}));
}

TEST(Sweep, NestedDecreasingMasks) {
    std::mt19937 rng(14);
    const Volume v = testing::random_volume(rng, {3, 12, 12});
    const std::vector<double> ts{0.0, 0.5, 1.0};
    const auto masks = ndnt_sweep(v, {1, 4, 4}, ts);
    EXPECT_TRUE(is_subset(masks[2], masks[1]));
    EXPECT_TRUE(is_subset(masks[1], masks[0]));
}

TEST(Sweep, FullGridOnVideoSizedBlockMatchesIndependentCalls) {
    std::mt19937 rng(15);
    const Volume v = testing::random_volume(rng, {5, 240, 320});
    const auto grid = threshold_grid(0.01);
    ASSERT_EQ(grid.size(), 101u);
    const auto masks = ndnt_sweep(v, {1, 128, 128}, grid);
    ASSERT_EQ(masks.size(), 101u);
    std::uniform_int_distribution<std::size_t> pick(0, 100);
    for (int i = 0; i < 5; ++i) {
        const std::size_t k = pick(rng);
        EXPECT_EQ(masks[k], ndnt_threshold(v, {grid[k], {1, 128, 128}})) << "t = " << grid[k];
    }
}

TEST(Sweep, RejectsEmptyAndOutOfRange) {
    const Volume v = new_volume({1, 2, 2}, 1);
    EXPECT_THROW(ndnt_sweep(v, {}, std::vector<double>{}), FlorinError);
    EXPECT_THROW(ndnt_sweep(v, {}, std::vector<double>{0.2, 1.5}), FlorinError);
}

TEST(Sweep, UnsortedDuplicateAndLongListsMatchDirectCalls) {
    std::mt19937 rng(77);
    const Volume v = testing::random_volume(rng, {3, 17, 23});
    const Window w{1, 5, 3};
    std::uniform_real_distribution<double> td(0.0, 1.0);
    for (std::size_t n : {7u, 300u}) {
        std::vector<double> ts;
        for (std::size_t i = 0; i < n; ++i) ts.push_back(i % 5 == 0 ? 0.5 : td(rng));
        ts.push_back(0.0);
        ts.push_back(1.0);
        const auto masks = ndnt_sweep(v, w, ts);
        ASSERT_EQ(masks.size(), ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            ASSERT_EQ(masks[i], ndnt_threshold(v, {ts[i], w})) << "t=" << ts[i];
        }
    }
}

TEST(Grid, StepSizes) {
    EXPECT_EQ(threshold_grid(0.01).size(), 101u);
    EXPECT_DOUBLE_EQ(threshold_grid(0.01).back(), 1.0);
    EXPECT_DOUBLE_EQ(threshold_grid(0.01)[37], 0.37);
    EXPECT_EQ(threshold_grid(1.0), (std::vector<double>{0.0, 1.0}));
    EXPECT_THROW(threshold_grid(0.0), FlorinError);
    EXPECT_THROW(threshold_grid(1.5), FlorinError);
}

TEST(Ndnt, ThresholdFactorRounding) {
    EXPECT_EQ(threshold_factor(0.0), 1'000'000u);
    EXPECT_EQ(threshold_factor(1.0), 0u);
    EXPECT_EQ(threshold_factor(0.85), 150'000u);
}

}  // namespace
}  // namespace florin
