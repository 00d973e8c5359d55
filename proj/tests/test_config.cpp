#include <gtest/gtest.h>

#include "florin/config.hpp"

namespace florin {
namespace {

TEST(ConfigYaml, RoundTripPreservesEveryField) {
    PipelineConfig cfg;
    cfg.depth = 3;
    cfg.iris = {0.27, {1, 64, 64}};
    cfg.pupil = {0.91, {0, 32, 48}};
    cfg.min_voxels = 75;
    cfg.combine = Combine::AndNot;
    cfg.circle_fraction = 0.45;
    cfg.threads = 2;
    EXPECT_EQ(config_from_yaml(config_to_yaml(cfg)), cfg);
}

TEST(ConfigYaml, NamesPipelineSymbols) {
    const std::string text = config_to_yaml(PipelineConfig{});
    for (const char* key : {"depth", "t_iris", "t_pupil", "w_iris", "w_pupil", "min_voxels", "combine",
                            "circle_fraction"}) {
        EXPECT_NE(text.find(key), std::string::npos) << key;
    }
}

TEST(ConfigYaml, MissingKeysKeepDefaults) {
    const PipelineConfig cfg = config_from_yaml("iris:\n  t_iris: 0.4\n");
    EXPECT_DOUBLE_EQ(cfg.iris.t, 0.4);
    EXPECT_EQ(cfg.iris.window, (Window{1, 128, 128}));
    EXPECT_EQ(cfg.depth, 5u);
}

TEST(ConfigYaml, RejectsBadInput) {
    EXPECT_THROW(config_from_yaml("depht: 5\n"), FlorinError);
    EXPECT_THROW(config_from_yaml("iris:\n  t_iris: 1.5\n"), FlorinError);
    EXPECT_THROW(config_from_yaml("pupil:\n  w_pupil: [1, 2]\n"), FlorinError);
    EXPECT_THROW(config_from_yaml("pupil:\n  w_pupil: [1, -2, 3]\n"), FlorinError);
    EXPECT_THROW(config_from_yaml("combine: or\n"), FlorinError);
    EXPECT_THROW(config_from_yaml("depth: [1]\n"), FlorinError);
    EXPECT_THROW(config_from_yaml("- 1\n"), FlorinError);
}

TEST(ConfigFile, SaveLoad) {
    const auto path = std::filesystem::temp_directory_path() / "florin_config_test.yaml";
    PipelineConfig cfg;
    cfg.iris.t = 0.33;
    save_config(cfg, path);
    EXPECT_EQ(load_config(path), cfg);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), FlorinError);
}

TEST(Window, Parse) {
    EXPECT_EQ(parse_window("1x128x128"), (Window{1, 128, 128}));
    EXPECT_EQ(to_string(Window{2, 3, 4}), "2x3x4");
    EXPECT_THROW(parse_window("1x2"), FlorinError);
    EXPECT_THROW(parse_window("ax2x3"), FlorinError);
}

}  // namespace
}  // namespace florin
