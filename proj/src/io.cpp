#include "florin/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <regex>
#include <sstream>

namespace florin {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FlorinError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FlorinError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FlorinError("write failed for " + path.string());
}

GrayImage read_image(const fs::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm") return read_pgm(path);
    throw FlorinError("unsupported image format: " + path.string());
}

struct PngReadCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length) {
    auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + length > cur->bytes.size()) png_error(png, "unexpected end of PNG data");
    std::memcpy(out, cur->bytes.data() + cur->pos, length);
    cur->pos += length;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

void png_warning_silent(png_structp, png_const_charp) {}

// Skips whitespace and '#' comments in a PGM header.
void skip_pgm_separators(const std::vector<std::uint8_t>& b, std::size_t& pos) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
}

std::size_t read_pgm_number(const std::vector<std::uint8_t>& b, std::size_t& pos, const fs::path& path) {
    skip_pgm_separators(b, pos);
    if (pos >= b.size() || !std::isdigit(b[pos])) throw FlorinError("malformed PGM header in " + path.string());
    std::size_t v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        v = v * 10 + static_cast<std::size_t>(b[pos] - '0');
        if (v > (1u << 30)) throw FlorinError("PGM dimension too large in " + path.string());
        ++pos;
    }
    return v;
}

}  // namespace

std::string frame_file_name(const std::string& prefix, std::size_t index, const std::string& extension) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06zu.", index);
    return prefix + buf + extension;
}

GrayImage read_pgm(const fs::path& path) {
    const auto b = read_file(path);
    if (b.size() < 2 || b[0] != 'P' || b[1] != '5') {
        throw FlorinError("not a binary grayscale PGM (P5): " + path.string());
    }
    std::size_t pos = 2;
    GrayImage img;
    img.width = read_pgm_number(b, pos, path);
    img.height = read_pgm_number(b, pos, path);
    const std::size_t maxval = read_pgm_number(b, pos, path);
    if (maxval != 255) {
        throw FlorinError("PGM maxval " + std::to_string(maxval) + " is not 8-bit (255): " + path.string());
    }
    if (pos >= b.size() || !std::isspace(b[pos])) throw FlorinError("malformed PGM header in " + path.string());
    ++pos;
    const std::size_t n = img.width * img.height;
    if (n == 0 || b.size() - pos < n) throw FlorinError("truncated PGM data in " + path.string());
    img.pixels.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return img;
}

void write_pgm(const fs::path& path, std::size_t height, std::size_t width, std::span<const std::uint8_t> pixels) {
    const std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), pixels.begin(), pixels.end());
    write_file(path, bytes);
}

GrayImage decode_png(std::span<const std::uint8_t> bytes, const std::string& origin) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FlorinError("not a PNG file: " + origin);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
    if (png == nullptr) throw FlorinError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FlorinError("libpng initialisation failed");
    }

    // Everything touched after setjmp lives on the heap so a longjmp cannot
    // leave it in a register-cached state.
    struct DecodeState {
        PngReadCursor cursor;
        GrayImage img;
        std::vector<png_bytep> rows;
        std::string error;
    };
    const auto state = std::make_unique<DecodeState>();
    state->cursor = {bytes, 0};

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FlorinError("corrupt PNG: " + origin);
    }

    png_set_read_fn(png, &state->cursor, png_read_from_span);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    GrayImage& img = state->img;
    if (color != PNG_COLOR_TYPE_GRAY) {
        state->error = "not a single-channel grayscale PNG: " + origin;
    } else if (depth > 8) {
        state->error = "PNG is " + std::to_string(depth) + "-bit, expected 8-bit grayscale: " + origin;
    } else {
        if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_read_update_info(png, info);
        img.width = png_get_image_width(png, info);
        img.height = png_get_image_height(png, info);
        img.pixels.resize(img.width * img.height);
        state->rows.resize(img.height);
        for (std::size_t y = 0; y < img.height; ++y) state->rows[y] = img.pixels.data() + y * img.width;
        png_read_image(png, state->rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (!state->error.empty()) throw FlorinError(state->error);
    return std::move(state->img);
}

GrayImage read_png(const fs::path& path) {
    const auto bytes = read_file(path);
    return decode_png(bytes, path.string());
}

std::vector<std::uint8_t> encode_png(std::size_t height, std::size_t width, std::span<const std::uint8_t> pixels,
                                     bool binary) {
    if (pixels.size() != height * width) throw FlorinError("encode_png: pixel count does not match dimensions");
    std::vector<std::uint8_t> out;

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
    if (png == nullptr) throw FlorinError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw FlorinError("libpng initialisation failed");
    }
    std::vector<png_bytep> rows(height);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FlorinError("PNG encoding failed");
    }

    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), binary ? 1 : 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 1);
    png_write_info(png, info);
    // One byte per pixel in; libpng packs 1-bit rows itself.
    if (binary) png_set_packing(png);
    for (std::size_t y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(pixels.data() + y * width);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_png(const fs::path& path, std::size_t height, std::size_t width, std::span<const std::uint8_t> pixels,
               bool binary) {
    write_file(path, encode_png(height, width, pixels, binary));
}

VideoSource probe_video(const fs::path& directory, std::size_t frame_limit, const std::string& prefix) {
    if (!fs::is_directory(directory)) throw FlorinError("not a directory: " + directory.string());
    const std::regex pattern(prefix + R"(_(\d{6})\.(pgm|png|PGM|PNG))");
    std::map<std::size_t, fs::path> indexed;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        std::smatch match;
        if (!std::regex_match(name, match, pattern)) continue;
        const auto index = static_cast<std::size_t>(std::stoul(match[1].str()));
        if (!indexed.emplace(index, entry.path()).second) {
            throw FlorinError("duplicate frame index " + std::to_string(index) + " in " + directory.string());
        }
    }
    if (indexed.empty()) {
        throw FlorinError("no " + prefix + "_NNNNNN.pgm/png files in " + directory.string());
    }

    VideoSource src;
    src.directory = directory;
    src.prefix = prefix;
    src.first_index = indexed.begin()->first;
    std::size_t expected = src.first_index;
    for (const auto& [index, path] : indexed) {
        if (index != expected) {
            throw FlorinError("frame sequence gap in " + directory.string() + ": missing index " +
                              std::to_string(expected));
        }
        ++expected;
        if (frame_limit != 0 && src.files.size() == frame_limit) break;
        src.files.push_back(path);
    }
    src.frame_count = src.files.size();

    const GrayImage first = read_image(src.files.front());
    src.native_height = first.height;
    src.native_width = first.width;
    return src;
}

Volume load_frames(const VideoSource& src) {
    if (src.files.empty()) throw FlorinError("video source has no frames");
    std::size_t out_h = src.native_height, out_w = src.native_width;
    if (src.target) {
        out_h = src.target->first;
        out_w = src.target->second;
        if (out_h > src.native_height || out_w > src.native_width) {
            throw FlorinError("downsample target " + std::to_string(out_w) + "x" + std::to_string(out_h) +
                              " exceeds native size " + std::to_string(src.native_width) + "x" +
                              std::to_string(src.native_height));
        }
    }

    std::vector<std::uint8_t> data;
    data.reserve(src.files.size() * out_h * out_w);
    for (const auto& path : src.files) {
        GrayImage img = read_image(path);
        if (img.height != src.native_height || img.width != src.native_width) {
            throw FlorinError("frame " + path.string() + " is " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + ", expected " + std::to_string(src.native_width) + "x" +
                              std::to_string(src.native_height));
        }
        if (out_h != img.height || out_w != img.width) {
            Volume frame({1, img.height, img.width}, std::move(img.pixels));
            const Volume small = downsample(frame, out_h, out_w);
            data.insert(data.end(), small.data().begin(), small.data().end());
        } else {
            data.insert(data.end(), img.pixels.begin(), img.pixels.end());
        }
    }
    return Volume({src.files.size(), out_h, out_w}, std::move(data));
}

Mask load_masks(const fs::path& directory, const std::string& prefix) {
    const VideoSource src = probe_video(directory, 0, prefix);
    const Volume raw = load_frames(src);
    std::vector<std::uint8_t> bits(raw.size());
    std::transform(raw.data().begin(), raw.data().end(), bits.begin(),
                   [](std::uint8_t v) -> std::uint8_t { return v != 0 ? 1 : 0; });
    return Mask(raw.shape(), std::move(bits));
}

Volume downsample(const Volume& v, std::size_t height, std::size_t width) {
    const Shape& s = v.shape();
    if (height == 0 || width == 0) throw FlorinError("downsample target must be non-empty");
    if (height > s.height || width > s.width) {
        throw FlorinError("downsample cannot upsample " + to_string(s) + " to " + std::to_string(height) + "x" +
                          std::to_string(width));
    }
    if (height == s.height && width == s.width) return v;

    // Output pixel i covers source rows [i*H/h, (i+1)*H/h).
    const auto bounds = [](std::size_t native, std::size_t target) {
        std::vector<std::size_t> b(target + 1);
        for (std::size_t i = 0; i <= target; ++i) b[i] = i * native / target;
        return b;
    };
    const auto yb = bounds(s.height, height);
    const auto xb = bounds(s.width, width);

    Volume out({s.depth, height, width}, 0);
    for (std::size_t z = 0; z < s.depth; ++z) {
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                std::uint64_t sum = 0;
                for (std::size_t sy = yb[y]; sy < yb[y + 1]; ++sy) {
                    for (std::size_t sx = xb[x]; sx < xb[x + 1]; ++sx) sum += v(z, sy, sx);
                }
                const std::uint64_t n = (yb[y + 1] - yb[y]) * (xb[x + 1] - xb[x]);
                out(z, y, x) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
            }
        }
    }
    return out;
}

std::vector<fs::path> write_masks(const Mask& m, const fs::path& directory, MaskFormat format,
                                  std::size_t first_index, const std::string& prefix) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw FlorinError("cannot create " + directory.string() + ": " + ec.message());

    const Shape& s = m.shape();
    std::vector<fs::path> written;
    std::vector<std::uint8_t> scaled(s.frame_size());
    for (std::size_t z = 0; z < s.depth; ++z) {
        const auto frame = m.frame(z);
        if (format == MaskFormat::Pgm) {
            const fs::path path = directory / frame_file_name(prefix, first_index + z, "pgm");
            std::transform(frame.begin(), frame.end(), scaled.begin(),
                           [](std::uint8_t v) -> std::uint8_t { return v ? 255 : 0; });
            write_pgm(path, s.height, s.width, scaled);
            written.push_back(path);
        } else {
            const fs::path path = directory / frame_file_name(prefix, first_index + z, "png");
            write_png(path, s.height, s.width, frame, true);
            written.push_back(path);
        }
    }
    return written;
}

std::vector<fs::path> write_frames(const Volume& v, const fs::path& directory, MaskFormat format,
                                   std::size_t first_index) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw FlorinError("cannot create " + directory.string() + ": " + ec.message());

    const Shape& s = v.shape();
    std::vector<fs::path> written;
    for (std::size_t z = 0; z < s.depth; ++z) {
        const auto ext = format == MaskFormat::Pgm ? "pgm" : "png";
        const fs::path path = directory / frame_file_name("frame", first_index + z, ext);
        if (format == MaskFormat::Pgm) {
            write_pgm(path, s.height, s.width, v.frame(z));
        } else {
            write_png(path, s.height, s.width, v.frame(z), false);
        }
        written.push_back(path);
    }
    return written;
}

}  // namespace florin
