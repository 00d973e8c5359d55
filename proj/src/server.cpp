#include "florin/server.hpp"

#include <httplib.h>

#include <regex>

#include "florin/config.hpp"
#include "florin/io.hpp"

namespace florin {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxCachedTables = 256;

HttpReply json_reply(int status, const json& j) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, const std::string& message) { return json_reply(status, {{"error", message}}); }

json window_to_json(const Window& w) { return json::array({w.hz, w.hy, w.hx}); }

Window window_from_json(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 3) throw FlorinError(std::string(key) + " must be [hz, hy, hx]");
    Window w;
    std::size_t* axes[] = {&w.hz, &w.hy, &w.hx};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer() || j[i].get<long long>() < 0) {
            throw FlorinError(std::string(key) + " half-extents must be non-negative integers");
        }
        *axes[i] = j[i].get<std::size_t>();
    }
    return w;
}

template <typename T>
T number_field(const json& j, const char* key) {
    if (!j.is_number()) throw FlorinError(std::string(key) + " must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!j.is_number_integer() || j.get<long long>() < 0) {
            throw FlorinError(std::string(key) + " must be a non-negative integer");
        }
    }
    return j.get<T>();
}

std::string base64(const std::vector<std::uint8_t>& bytes) {
    return httplib::detail::base64_encode(std::string(bytes.begin(), bytes.end()));
}

}  // namespace

json config_to_json(const PipelineConfig& cfg) {
    return {{"depth", cfg.depth},
            {"t_iris", cfg.iris.t},
            {"t_pupil", cfg.pupil.t},
            {"window_iris", window_to_json(cfg.iris.window)},
            {"window_pupil", window_to_json(cfg.pupil.window)},
            {"min_voxels", cfg.min_voxels},
            {"combine", to_string(cfg.combine)},
            {"circle_fraction", cfg.circle_fraction}};
}

PipelineConfig config_from_json(const json& j, const PipelineConfig& base) {
    if (!j.is_object()) throw FlorinError("parameters must be a JSON object");
    PipelineConfig cfg = base;
    if (j.contains("depth")) cfg.depth = number_field<std::size_t>(j["depth"], "depth");
    if (j.contains("t_iris")) cfg.iris.t = number_field<double>(j["t_iris"], "t_iris");
    if (j.contains("t_pupil")) cfg.pupil.t = number_field<double>(j["t_pupil"], "t_pupil");
    if (j.contains("window_iris")) cfg.iris.window = window_from_json(j["window_iris"], "window_iris");
    if (j.contains("window_pupil")) cfg.pupil.window = window_from_json(j["window_pupil"], "window_pupil");
    if (j.contains("min_voxels")) cfg.min_voxels = number_field<std::uint64_t>(j["min_voxels"], "min_voxels");
    if (j.contains("circle_fraction")) {
        cfg.circle_fraction = number_field<double>(j["circle_fraction"], "circle_fraction");
    }
    if (j.contains("combine")) {
        if (!j["combine"].is_string()) throw FlorinError("combine must be a string");
        cfg.combine = parse_combine(j["combine"].get<std::string>());
    }
    cfg.validate();
    return cfg;
}

json report_to_json(const BlockReport& r) {
    json j{{"block_index", r.block_index},
           {"frame_range", {r.first_frame, r.first_frame + r.frame_count}},
           {"pupil_found", r.pupil_found},
           {"timing",
            {{"segmentation", r.timing.segmentation},
             {"identification", r.timing.identification},
             {"reconstruction", r.timing.reconstruction}}}};
    if (r.pupil) {
        const auto& p = *r.pupil;
        j["pupil"] = {{"label", p.label},
                      {"voxels", p.voxels},
                      {"bbox_min", p.bbox_min},
                      {"bbox_max", p.bbox_max},
                      {"centroid", p.centroid}};
    } else {
        j["pupil"] = nullptr;
    }
    return j;
}

TunerService::TunerService(Volume subset, PipelineConfig defaults, std::filesystem::path save_dir)
    : subset_(std::move(subset)), defaults_(std::move(defaults)), save_dir_(std::move(save_dir)) {
    defaults_.validate();
}

HttpReply TunerService::meta() const {
    const Shape& s = subset_.shape();
    return json_reply(200, {{"frames", s.depth},
                            {"height", s.height},
                            {"width", s.width},
                            {"defaults", config_to_json(defaults_)}});
}

HttpReply TunerService::frame(std::size_t index) const {
    const Shape& s = subset_.shape();
    if (index >= s.depth) return error_reply(404, "frame " + std::to_string(index) + " out of range");
    const auto png = encode_png(s.height, s.width, subset_.frame(index), false);
    return {200, "image/png", std::string(png.begin(), png.end())};
}

std::shared_ptr<const SummedVolumeTable> TunerService::table_for(std::size_t first, std::size_t count) {
    const auto key = std::make_pair(first, count);
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto table = std::make_shared<const SummedVolumeTable>(subset_.slice(first, count));
    std::lock_guard lock(cache_mutex_);
    if (cache_.size() >= kMaxCachedTables) cache_.clear();
    return cache_.emplace(key, std::move(table)).first->second;
}

std::size_t TunerService::cached_tables() const {
    std::lock_guard lock(cache_mutex_);
    return cache_.size();
}

VideoResult TunerService::segment_range(std::size_t first, std::size_t last, const PipelineConfig& cfg) {
    cfg.validate();
    if (first >= last || last > subset_.shape().depth) {
        throw FlorinError("frame_range [" + std::to_string(first) + ", " + std::to_string(last) +
                          ") outside loaded subset of " + std::to_string(subset_.shape().depth) + " frames");
    }
    const std::size_t frames = last - first;
    const Shape s{frames, subset_.shape().height, subset_.shape().width};
    VideoResult result{Mask(s, 0), {}};
    // Block boundaries are relative to the range start, as segment_video
    // would place them on the extracted range.
    for (std::size_t b = 0; b < block_count(frames, cfg.depth); ++b) {
        const std::size_t offset = b * cfg.depth;
        const std::size_t count = std::min(cfg.depth, frames - offset);
        const auto table = table_for(first + offset, count);
        BlockResult r = segment_block(subset_.slice(first + offset, count), cfg, table.get(), b, offset);
        paste_frames(result.mask, r.mask, offset);
        result.reports.push_back(std::move(r.report));
    }
    return result;
}

HttpReply TunerService::segment(const std::string& body) {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::exception& e) {
        return error_reply(400, std::string("malformed JSON: ") + e.what());
    }

    PipelineConfig cfg;
    std::size_t first = 0, last = subset_.shape().depth;
    try {
        cfg = config_from_json(request, defaults_);
        if (request.contains("frame_range")) {
            const auto& fr = request["frame_range"];
            if (!fr.is_array() || fr.size() != 2 || !fr[0].is_number_unsigned() || !fr[1].is_number_unsigned()) {
                throw FlorinError("frame_range must be [first, last)");
            }
            first = fr[0].get<std::size_t>();
            last = fr[1].get<std::size_t>();
        }
        if (first >= last || last > subset_.shape().depth) {
            throw FlorinError("frame_range [" + std::to_string(first) + ", " + std::to_string(last) +
                              ") outside loaded subset of " + std::to_string(subset_.shape().depth) + " frames");
        }
    } catch (const std::exception& e) {
        return error_reply(400, e.what());
    }

    VideoResult result;
    try {
        result = segment_range(first, last, cfg);
    } catch (const std::exception& e) {
        return error_reply(422, e.what());
    }

    json reply;
    reply["frame_range"] = {first, last};
    reply["config"] = config_to_json(cfg);
    reply["masks"] = json::array();
    const Shape& s = result.mask.shape();
    for (std::size_t z = 0; z < s.depth; ++z) {
        reply["masks"].push_back(base64(encode_png(s.height, s.width, result.mask.frame(z), true)));
    }
    bool all_found = true;
    json blocks = json::array();
    for (const auto& r : result.reports) {
        all_found = all_found && r.pupil_found;
        blocks.push_back(report_to_json(r));
    }
    reply["report"] = {{"pupil_found", all_found}, {"blocks", std::move(blocks)}};
    if (!all_found) {
        reply["error"] = "no pupil found";
        return json_reply(422, reply);
    }
    return json_reply(200, reply);
}

HttpReply TunerService::save_config(const std::string& body) const {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::exception& e) {
        return error_reply(400, std::string("malformed JSON: ") + e.what());
    }

    PipelineConfig cfg;
    std::string name = "florin_config.yaml";
    try {
        if (!request.is_object() || !request.contains("config")) throw FlorinError("body must contain 'config'");
        cfg = config_from_json(request["config"], defaults_);
        if (request.contains("name")) {
            if (!request["name"].is_string()) throw FlorinError("name must be a string");
            name = request["name"].get<std::string>();
            static const std::regex plain(R"([A-Za-z0-9_.-]+)");
            if (!std::regex_match(name, plain) || name == "." || name == "..") {
                throw FlorinError("name must be a plain file name");
            }
        }
    } catch (const std::exception& e) {
        return error_reply(400, e.what());
    }

    try {
        std::filesystem::create_directories(save_dir_);
        const auto path = std::filesystem::absolute(save_dir_ / name);
        florin::save_config(cfg, path);
        return json_reply(200, {{"path", path.string()}});
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

struct TunerServer::Impl {
    TunerService& service;
    httplib::Server http;

    explicit Impl(TunerService& s) : service(s) {
        const auto send = [](httplib::Response& res, const HttpReply& reply) {
            res.status = reply.status;
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_content(reply.body, reply.content_type);
        };
        http.Get("/api/meta", [this, send](const httplib::Request&, httplib::Response& res) {
            send(res, service.meta());
        });
        http.Get(R"(/api/frame/(\d+))", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, service.frame(std::stoul(req.matches[1].str())));
        });
        http.Post("/api/segment", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, service.segment(req.body));
        });
        http.Post("/api/config/save", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, service.save_config(req.body));
        });
        http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }
};

TunerServer::TunerServer(TunerService& service) : impl_(std::make_unique<Impl>(service)) {}

TunerServer::~TunerServer() { stop(); }

int TunerServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->http.bind_to_any_port(host);
        if (bound < 0) throw FlorinError("cannot bind " + host);
        return bound;
    }
    if (!impl_->http.bind_to_port(host, port)) {
        throw FlorinError("cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void TunerServer::listen() { impl_->http.listen_after_bind(); }

void TunerServer::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace florin
