#include "florin/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace florin {

namespace {

// Shortest text that reads back to the same double.
std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    std::string text(buf, r.ptr);
    if (text.find_first_of(".e") == std::string::npos) text += ".0";
    return text;
}

void emit_window(YAML::Emitter& out, const char* key, const Window& w) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << w.hz << w.hy << w.hx << YAML::EndSeq;
}

Window read_window(const YAML::Node& node, const std::string& key) {
    if (!node.IsSequence() || node.size() != 3) {
        throw FlorinError("config: " + key + " must be a list of three half-extents [frames, rows, cols]");
    }
    const auto axis = [&](std::size_t i) {
        const auto v = node[i].as<long long>();
        if (v < 0) throw FlorinError("config: " + key + " half-extents must be non-negative");
        return static_cast<std::size_t>(v);
    };
    return {axis(0), axis(1), axis(2)};
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) throw FlorinError("config: unknown key '" + key + "' in " + where);
    }
}

void read_section(const YAML::Node& root, const char* section, const char* t_key, const char* w_key,
                  NdntParams& params) {
    const YAML::Node node = root[section];
    if (!node) return;
    if (!node.IsMap()) throw FlorinError(std::string("config: ") + section + " must be a mapping");
    reject_unknown(node, {t_key, w_key}, section);
    if (node[t_key]) params.t = node[t_key].as<double>();
    if (node[w_key]) params.window = read_window(node[w_key], std::string(section) + "." + w_key);
}

}  // namespace

std::string to_string(const Window& w) {
    return std::to_string(w.hz) + "x" + std::to_string(w.hy) + "x" + std::to_string(w.hx);
}

Window parse_window(const std::string& text) {
    static const std::regex pattern(R"((\d+)x(\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) {
        throw FlorinError("window '" + text + "' is not of the form HZxHYxHX");
    }
    return {std::stoul(m[1].str()), std::stoul(m[2].str()), std::stoul(m[3].str())};
}

std::string config_to_yaml(const PipelineConfig& cfg) {
    YAML::Emitter out;
    out << YAML::Comment("iris segmentation pipeline; windows are half-extents [frames, rows, cols]");
    out << YAML::BeginMap;
    out << YAML::Key << "depth" << YAML::Value << cfg.depth;
    out << YAML::Key << "iris" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t_iris" << YAML::Value << shortest(cfg.iris.t);
    emit_window(out, "w_iris", cfg.iris.window);
    out << YAML::EndMap;
    out << YAML::Key << "pupil" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t_pupil" << YAML::Value << shortest(cfg.pupil.t);
    emit_window(out, "w_pupil", cfg.pupil.window);
    out << YAML::EndMap;
    out << YAML::Key << "min_voxels" << YAML::Value << cfg.min_voxels;
    out << YAML::Key << "combine" << YAML::Value << to_string(cfg.combine);
    out << YAML::Key << "circle_fraction" << YAML::Value << shortest(cfg.circle_fraction);
    out << YAML::Key << "threads" << YAML::Value << cfg.threads;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

PipelineConfig config_from_yaml(const std::string& text) {
    PipelineConfig cfg;
    try {
        const YAML::Node root = YAML::Load(text);
        if (!root.IsMap()) throw FlorinError("config: top level must be a mapping");
        reject_unknown(root, {"depth", "iris", "pupil", "min_voxels", "combine", "circle_fraction", "threads"},
                       "top level");
        if (root["depth"]) cfg.depth = root["depth"].as<std::size_t>();
        read_section(root, "iris", "t_iris", "w_iris", cfg.iris);
        read_section(root, "pupil", "t_pupil", "w_pupil", cfg.pupil);
        if (root["min_voxels"]) cfg.min_voxels = root["min_voxels"].as<std::uint64_t>();
        if (root["combine"]) cfg.combine = parse_combine(root["combine"].as<std::string>());
        if (root["circle_fraction"]) cfg.circle_fraction = root["circle_fraction"].as<double>();
        if (root["threads"]) cfg.threads = root["threads"].as<unsigned>();
    } catch (const YAML::Exception& e) {
        throw FlorinError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FlorinError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_yaml(buf.str());
}

void save_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
    cfg.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FlorinError("cannot write config " + path.string());
    out << config_to_yaml(cfg);
    if (!out) throw FlorinError("write failed for config " + path.string());
}

}  // namespace florin
