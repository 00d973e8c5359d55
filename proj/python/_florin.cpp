#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "florin/config.hpp"
#include "florin/io.hpp"
#include "florin/morphology.hpp"
#include "florin/ndnt.hpp"
#include "florin/phantom.hpp"
#include "florin/pipeline.hpp"
#include "florin/server.hpp"

namespace py = pybind11;
using namespace florin;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Shape shape_of(const py::array& a) {
    if (a.ndim() == 2) return {1, static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1))};
    if (a.ndim() != 3) throw FlorinError("expected a 2D or 3D array, got " + std::to_string(a.ndim()) + "D");
    return {static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
            static_cast<std::size_t>(a.shape(2))};
}

template <typename D>
D from_numpy(const U8Array& a) {
    const Shape s = shape_of(a);
    std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
    return D(s, std::move(data));
}

Mask mask_from_numpy(const py::array& a) {
    // Any nonzero value is foreground, so bool arrays and 0/255 images work.
    const U8Array u = py::cast<U8Array>(a.attr("astype")("uint8", py::arg("copy") = false));
    const Shape s = shape_of(u);
    std::vector<std::uint8_t> data(s.voxels());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = u.data()[i] ? 1 : 0;
    return Mask(s, std::move(data));
}

template <typename T, typename Tag>
py::array_t<T> to_numpy(const Dense<T, Tag>& d) {
    const Shape& s = d.shape();
    py::array_t<T> out({s.depth, s.height, s.width});
    std::memcpy(out.mutable_data(), d.data().data(), d.size() * sizeof(T));
    return out;
}

Window window_of(const std::array<std::size_t, 3>& w) { return {w[0], w[1], w[2]}; }

Connectivity parse_connectivity(const std::string& c) {
    if (c == "planar8") return Connectivity::Planar8;
    if (c == "volumetric26") return Connectivity::Volumetric26;
    throw FlorinError("connectivity must be 'planar8' or 'volumetric26'");
}

py::dict stats_to_dict(const ComponentStats& c) {
    py::dict d;
    d["label"] = c.label;
    d["voxels"] = c.voxels;
    d["bbox_min"] = py::make_tuple(c.bbox_min[0], c.bbox_min[1], c.bbox_min[2]);
    d["bbox_max"] = py::make_tuple(c.bbox_max[0], c.bbox_max[1], c.bbox_max[2]);
    d["centroid"] = py::make_tuple(c.centroid[0], c.centroid[1], c.centroid[2]);
    return d;
}

PipelineConfig config_from_str(const std::string& text) {
    return config_from_json(nlohmann::json::parse(text), PipelineConfig{});
}

}  // namespace

PYBIND11_MODULE(_florin, m) {
    m.doc() = "Learning-free volumetric iris segmentation";
    const auto base = py::register_exception<FlorinError>(m, "FlorinError", PyExc_ValueError);
    py::register_exception<NoPupilFound>(m, "NoPupilFound", base.ptr());

    m.def(
        "build_svt",
        [](const U8Array& v) {
            const Volume vol = from_numpy<Volume>(v);
            py::gil_scoped_release release;
            const SummedVolumeTable svt = build_svt(vol);
            const Shape& s = vol.shape();
            std::vector<std::uint64_t> out(s.voxels());
            for (std::size_t z = 0; z < s.depth; ++z)
                for (std::size_t y = 0; y < s.height; ++y)
                    for (std::size_t x = 0; x < s.width; ++x) out[s.offset(z, y, x)] = svt.at(z, y, x);
            py::gil_scoped_acquire acquire;
            py::array_t<std::uint64_t> arr({s.depth, s.height, s.width});
            std::memcpy(arr.mutable_data(), out.data(), out.size() * sizeof(std::uint64_t));
            return arr;
        },
        py::arg("volume"), "Inclusive prefix sums: out[z, y, x] = volume[:z+1, :y+1, :x+1].sum().");

    m.def(
        "ndnt_threshold",
        [](const U8Array& v, double t, std::array<std::size_t, 3> window, unsigned threads) {
            const Volume vol = from_numpy<Volume>(v);
            Mask out;
            {
                py::gil_scoped_release release;
                out = ndnt_threshold(vol, {t, window_of(window)}, nullptr, threads);
            }
            return to_numpy(out);
        },
        py::arg("volume"), py::arg("t"), py::arg("window") = std::array<std::size_t, 3>{1, 128, 128},
        py::arg("threads") = 0u, "Dark-foreground mask: I * count <= sum * (1 - t) over the clamped window.");

    m.def(
        "ndnt_sweep",
        [](const U8Array& v, std::vector<double> thresholds, std::array<std::size_t, 3> window, unsigned threads) {
            const Volume vol = from_numpy<Volume>(v);
            std::vector<Mask> masks;
            {
                py::gil_scoped_release release;
                masks = ndnt_sweep(vol, window_of(window), thresholds, threads);
            }
            py::list out;
            for (const auto& mk : masks) out.append(to_numpy(mk));
            return out;
        },
        py::arg("volume"), py::arg("thresholds"), py::arg("window") = std::array<std::size_t, 3>{1, 128, 128},
        py::arg("threads") = 0u);

    m.def("threshold_grid", &threshold_grid, py::arg("step") = 0.01);

    m.def(
        "fill_holes", [](const py::array& mk) { return to_numpy(fill_holes(mask_from_numpy(mk))); },
        py::arg("mask"));

    m.def(
        "label_components",
        [](const py::array& mk, const std::string& connectivity) {
            const Labeling l = label_components(mask_from_numpy(mk), parse_connectivity(connectivity));
            py::list stats;
            for (const auto& c : l.components) stats.append(stats_to_dict(c));
            return py::make_tuple(to_numpy(l.labels), stats);
        },
        py::arg("mask"), py::arg("connectivity") = "volumetric26");

    m.def(
        "segment_video",
        [](const U8Array& v, const std::string& config_json) {
            const Volume vol = from_numpy<Volume>(v);
            const PipelineConfig cfg = config_from_str(config_json);
            VideoResult r;
            {
                py::gil_scoped_release release;
                r = segment_video(vol, cfg);
            }
            nlohmann::json reports = nlohmann::json::array();
            for (const auto& rep : r.reports) reports.push_back(report_to_json(rep));
            return py::make_tuple(to_numpy(r.mask), reports.dump());
        },
        py::arg("video"), py::arg("config_json"));

    m.def("default_config_json", [] { return config_to_json(PipelineConfig{}).dump(); });
    m.def("normalize_config_json",
          [](const std::string& text) { return config_to_json(config_from_str(text)).dump(); });
    m.def(
        "save_config",
        [](const std::string& text, const std::filesystem::path& path) { save_config(config_from_str(text), path); },
        py::arg("config_json"), py::arg("path"));
    m.def(
        "load_config", [](const std::filesystem::path& path) { return config_to_json(load_config(path)).dump(); },
        py::arg("path"));

    m.def(
        "load_frames",
        [](const std::filesystem::path& dir, std::size_t frame_limit,
           std::optional<std::pair<std::size_t, std::size_t>> downsample) {
            VideoSource src = probe_video(dir, frame_limit);
            src.target = downsample;
            return to_numpy(load_frames(src));
        },
        py::arg("directory"), py::arg("frame_limit") = 0, py::arg("downsample") = py::none(),
        "Loads frame_NNNNNN.pgm|png; downsample is (height, width).");

    m.def(
        "write_masks",
        [](const py::array& mk, const std::filesystem::path& dir, const std::string& format,
           std::size_t first_index) {
            if (format != "png" && format != "pgm") throw FlorinError("format must be 'png' or 'pgm'");
            const auto files = write_masks(mask_from_numpy(mk), dir, format == "png" ? MaskFormat::Png : MaskFormat::Pgm,
                                           first_index);
            std::vector<std::string> out;
            for (const auto& f : files) out.push_back(f.string());
            return out;
        },
        py::arg("mask"), py::arg("directory"), py::arg("format") = "png", py::arg("first_index") = 0);

    m.def(
        "make_eye_phantom",
        [](std::size_t frames, std::size_t height, std::size_t width, double pupil_radius, double iris_radius,
           double drift_x, unsigned noise, std::uint32_t seed) {
            PhantomSpec spec;
            spec.frames = frames;
            spec.height = height;
            spec.width = width;
            spec.pupil_radius = pupil_radius;
            spec.iris_radius = iris_radius;
            spec.drift_x = drift_x;
            spec.noise = noise;
            spec.seed = seed;
            return to_numpy(make_eye_phantom(spec));
        },
        py::arg("frames") = 5, py::arg("height") = 240, py::arg("width") = 320, py::arg("pupil_radius") = 30.0,
        py::arg("iris_radius") = 80.0, py::arg("drift_x") = 0.0, py::arg("noise") = 0, py::arg("seed") = 1);
}
