#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "florin/ndnt.hpp"
#include "florin/pipeline.hpp"

namespace florin {

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// JSON form of the tunable parameters, as used by the segment and
/// config-save endpoints: t_iris, t_pupil, window_iris, window_pupil, depth,
/// combine, min_voxels, circle_fraction.
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Overlays any parameters present in `j` onto `base`. Throws FlorinError on
/// malformed or out-of-range values.
PipelineConfig config_from_json(const nlohmann::json& j, const PipelineConfig& base);

nlohmann::json report_to_json(const BlockReport& r);

/// Request handling for the tuner API over one in-memory frame subset. The
/// summed volume table of every block requested so far is cached, so moving
/// threshold sliders only re-runs the comparisons and morphology.
class TunerService {
public:
    TunerService(Volume subset, PipelineConfig defaults, std::filesystem::path save_dir);

    [[nodiscard]] const Volume& subset() const noexcept { return subset_; }

    HttpReply meta() const;
    HttpReply frame(std::size_t index) const;
    HttpReply segment(const std::string& body);
    HttpReply save_config(const std::string& body) const;

    /// Same masks the CLI would produce for frames [first, last) of the subset.
    VideoResult segment_range(std::size_t first, std::size_t last, const PipelineConfig& cfg);

    [[nodiscard]] std::size_t cached_tables() const;

private:
    std::shared_ptr<const SummedVolumeTable> table_for(std::size_t first, std::size_t count);

    Volume subset_;
    PipelineConfig defaults_;
    std::filesystem::path save_dir_;
    mutable std::mutex cache_mutex_;
    std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const SummedVolumeTable>> cache_;
};

/// Binds the tuner API (GET /api/meta, GET /api/frame/{i}, POST /api/segment,
/// POST /api/config/save) to a socket.
class TunerServer {
public:
    explicit TunerServer(TunerService& service);
    ~TunerServer();
    TunerServer(const TunerServer&) = delete;
    TunerServer& operator=(const TunerServer&) = delete;

    /// Binds host:port (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace florin
