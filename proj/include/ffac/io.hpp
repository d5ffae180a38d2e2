#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freeform.hpp"
#include "freespace.hpp"
#include "image.hpp"
#include "topology.hpp"

namespace ffac {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw 8-bit pixels with 1 (gray) or 3 (RGB) channels.
struct Pixels8 {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline bool is_png(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline Pixels8 decode_pgm(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 2;
    auto next_token = [&]() -> long {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        int digits = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            if (++digits > 9) throw DecodeError("PGM: header value too large");
        }
        if (digits == 0) throw DecodeError("PGM: malformed header");
        return v;
    };
    const long w = next_token(), h = next_token(), maxval = next_token();
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw DecodeError("PGM: malformed header");
    ++pos;
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw DecodeError("PGM: bad dimensions or maxval");
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * bpp;
    if (bytes.size() - pos < need) throw DecodeError("PGM: truncated pixel data");
    Pixels8 px{static_cast<int>(w), static_cast<int>(h), 1, {}};
    px.data.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (std::size_t i = 0; i < px.data.size(); ++i) {
        const long v = bpp == 1 ? bytes[pos + i] : (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1];
        px.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::min(v, maxval) / maxval));
    }
    return px;
}

struct PngReadSource {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos;
};

inline void png_read_mem(png_structp png, png_bytep out, png_size_t n) {
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->pos + n > src->bytes->size()) png_error(png, "truncated PNG");
    std::memcpy(out, src->bytes->data() + src->pos, n);
    src->pos += n;
}

inline void png_error_throw(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

inline void png_warning_ignore(png_structp, png_const_charp) {}

/// Decodes any PNG to 8-bit gray (channels = 1) or RGB (channels = 3).
inline Pixels8 decode_png(const std::vector<std::uint8_t>& bytes, bool want_rgb) {
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_throw, png_warning_ignore);
    if (!png) throw DecodeError("PNG: out of memory");
    png_infop info = png_create_info_struct(png);
    PngReadSource src{&bytes, 0};
    Pixels8 px;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("PNG: " + (error.empty() ? std::string("decode failed") : error));
    }
    png_set_read_fn(png, &src, png_read_mem);
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    const bool is_gray = (color & PNG_COLOR_MASK_COLOR) == 0;
    if (want_rgb && is_gray) png_set_gray_to_rgb(png);
    if (!want_rgb && !is_gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);
    px.width = static_cast<int>(png_get_image_width(png, info));
    px.height = static_cast<int>(png_get_image_height(png, info));
    px.channels = static_cast<int>(png_get_channels(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    px.data.resize(stride * static_cast<std::size_t>(px.height));
    rows.resize(static_cast<std::size_t>(px.height));
    for (int y = 0; y < px.height; ++y) rows[static_cast<std::size_t>(y)] = px.data.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return px;
}

inline void png_write_mem(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + n);
}

inline void png_flush_noop(png_structp) {}

inline std::vector<std::uint8_t> encode_png(const Pixels8& px) {
    if (px.channels != 1 && px.channels != 3) throw std::invalid_argument("encode_png: 1 or 3 channels");
    std::vector<std::uint8_t> out;
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_throw, png_warning_ignore);
    if (!png) throw std::runtime_error("PNG: out of memory");
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep> rows(static_cast<std::size_t>(px.height));
    const std::size_t stride = static_cast<std::size_t>(px.width) * static_cast<std::size_t>(px.channels);
    for (int y = 0; y < px.height; ++y)
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(px.data.data() + stride * y);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG: " + (error.empty() ? std::string("encode failed") : error));
    }
    png_set_write_fn(png, &out, png_write_mem, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(px.width), static_cast<png_uint_32>(px.height), 8,
                 px.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

inline std::vector<std::uint8_t> encode_pgm(const Pixels8& px) {
    const std::string header = "P5\n" + std::to_string(px.width) + " " + std::to_string(px.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), px.data.begin(), px.data.end());
    return out;
}

inline bool has_extension(const std::filesystem::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

inline void save_pixels(const Pixels8& px, const std::filesystem::path& path) {
    if (has_extension(path, ".pgm")) {
        if (px.channels != 1) throw std::invalid_argument("PGM output needs a gray image");
        write_file(path, encode_pgm(px));
    } else {
        write_file(path, encode_png(px));
    }
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

}  // namespace detail

inline Pixels8 load_pixels(const std::filesystem::path& path, bool rgb = false) {
    const auto bytes = detail::read_file(path);
    if (detail::is_png(bytes)) return detail::decode_png(bytes, rgb);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
        Pixels8 px = detail::decode_pgm(bytes);
        if (rgb) {
            Pixels8 c{px.width, px.height, 3, {}};
            for (auto v : px.data) c.data.insert(c.data.end(), {v, v, v});
            return c;
        }
        return px;
    }
    throw DecodeError("unsupported image format: " + path.string());
}

/// Loads an 8-bit (or 16-bit) PGM P5 or any PNG as luminance in [0,1].
inline GrayImage load_gray(const std::filesystem::path& path) {
    const Pixels8 px = load_pixels(path, false);
    GrayImage img(px.width, px.height);
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = px.data[i] / 255.0;
    return img;
}

/// Saves as 8-bit PGM when the extension is .pgm, 8-bit gray PNG otherwise.
inline void save_gray(const GrayImage& img, const std::filesystem::path& path) {
    Pixels8 px{img.width(), img.height(), 1, {}};
    px.data.reserve(img.size());
    for (double v : img.data()) px.data.push_back(detail::to_byte(v));
    detail::save_pixels(px, path);
}

/// 8-bit mask image, 255 inside.
inline void save_mask(const RegionMask& mask, const std::filesystem::path& path) {
    Pixels8 px{mask.width(), mask.height(), 1, {}};
    px.data.reserve(mask.size());
    for (auto v : mask.data()) px.data.push_back(v ? 255 : 0);
    detail::save_pixels(px, path);
}

/// Any non-zero pixel is inside.
inline RegionMask load_mask(const std::filesystem::path& path) {
    const Pixels8 px = load_pixels(path, false);
    RegionMask m(px.width, px.height, 0);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = px.data[i] ? 1 : 0;
    return m;
}

// ---------------------------------------------------------------------------------------------
// Overlays

namespace detail {

inline std::string base64(const std::vector<std::uint8_t>& in) {
    static constexpr char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < in.size(); i += 3) {
        const std::uint32_t b0 = in[i];
        const std::uint32_t b1 = i + 1 < in.size() ? in[i + 1] : 0;
        const std::uint32_t b2 = i + 2 < in.size() ? in[i + 2] : 0;
        const std::uint32_t v = (b0 << 16) | (b1 << 8) | b2;
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += i + 1 < in.size() ? tbl[(v >> 6) & 63] : '=';
        out += i + 2 < in.size() ? tbl[v & 63] : '=';
    }
    return out;
}

inline std::string svg_number(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

inline Pixels8 gray_pixels(const GrayImage& img) {
    Pixels8 px{img.width(), img.height(), 1, {}};
    for (double v : img.data()) px.data.push_back(to_byte(v));
    return px;
}

}  // namespace detail

/// SVG document: the image embedded as a PNG, then one red <path> per patch. Cubic patches are
/// written as native cubic segments, other degrees as dense polylines.
inline std::string overlay_svg(const GrayImage& img, const std::vector<FreeFormContour>& components) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << img.width() << "\" height=\"" << img.height()
      << "\" viewBox=\"-0.5 -0.5 " << img.width() << ' ' << img.height() << "\">\n";
    s << "<image x=\"-0.5\" y=\"-0.5\" width=\"" << img.width() << "\" height=\"" << img.height()
      << "\" href=\"data:image/png;base64," << detail::base64(detail::encode_png(detail::gray_pixels(img)))
      << "\"/>\n";
    using detail::svg_number;
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
        for (const auto& patch : components[ci].patches()) {
            const auto cp = patch.control();
            s << "<path class=\"c" << ci << "\" fill=\"none\" stroke=\"red\" stroke-width=\"1\" d=\"M "
              << svg_number(cp[0].x) << ' ' << svg_number(cp[0].y);
            if (patch.degree() == 3) {
                s << " C";
                for (std::size_t k = 1; k <= 3; ++k) s << ' ' << svg_number(cp[k].x) << ' ' << svg_number(cp[k].y);
            } else {
                s << " L";
                for (int k = 1; k <= kDenseSamplesPerPatch; ++k) {
                    const Point2 q = eval_de_casteljau(patch, static_cast<double>(k) / kDenseSamplesPerPatch);
                    s << ' ' << svg_number(q.x) << ' ' << svg_number(q.y);
                }
            }
            s << "\"/>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

/// RGB raster of the image with every contour pixel painted red (255,0,0). Curves are sampled
/// at most half a pixel apart and each sample colours its nearest pixel.
inline Pixels8 overlay_pixels(const GrayImage& img, const std::vector<FreeFormContour>& components) {
    Pixels8 px{img.width(), img.height(), 3, {}};
    px.data.reserve(img.size() * 3);
    for (double v : img.data()) {
        const auto b = detail::to_byte(v);
        px.data.insert(px.data.end(), {b, b, b});
    }
    for (const auto& c : components)
        for (const auto& patch : c.patches()) {
            const int steps =
                std::max(8, static_cast<int>(std::ceil(2.0 * patch.control_diameter() * patch.degree())));
            for (int k = 0; k <= steps; ++k) {
                const Point2 q = eval_de_casteljau(patch, static_cast<double>(k) / steps);
                const int x = static_cast<int>(std::lround(q.x)), y = static_cast<int>(std::lround(q.y));
                if (!img.contains(x, y)) continue;
                const std::size_t i = (static_cast<std::size_t>(y) * img.width() + x) * 3;
                px.data[i] = 255;
                px.data[i + 1] = 0;
                px.data[i + 2] = 0;
            }
        }
    return px;
}

/// Writes `<stem>.svg` and `<stem>.png` next to each other.
inline void render_overlay(const GrayImage& img, const std::vector<FreeFormContour>& components,
                           const std::filesystem::path& stem) {
    std::filesystem::path svg = stem, png = stem;
    svg.replace_extension(".svg");
    png.replace_extension(".png");
    const std::string doc = overlay_svg(img, components);
    detail::write_file(svg, std::vector<std::uint8_t>(doc.begin(), doc.end()));
    detail::write_file(png, detail::encode_png(overlay_pixels(img, components)));
}

// ---------------------------------------------------------------------------------------------
// Contour JSON

using json = nlohmann::json;

/// {"degree": d, "patches": [[[x, y], ...], ...]}; doubles round-trip exactly.
inline json contour_to_json(const FreeFormContour& c) {
    json patches = json::array();
    for (const auto& p : c.patches()) {
        json pts = json::array();
        for (const auto& q : p.control()) pts.push_back({q.x, q.y});
        patches.push_back(std::move(pts));
    }
    return {{"degree", c.degree()}, {"patches", std::move(patches)}};
}

inline FreeFormContour contour_from_json(const json& j) {
    try {
        const int d = j.at("degree").get<int>();
        std::vector<BezierPatch> patches;
        for (const auto& pj : j.at("patches")) {
            std::vector<Point2> pts;
            for (const auto& q : pj) {
                if (!q.is_array() || q.size() != 2) throw DecodeError("contour JSON: point must be [x, y]");
                pts.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
            }
            if (static_cast<int>(pts.size()) != d + 1)
                throw DecodeError("contour JSON: patch does not have degree+1 points");
            patches.emplace_back(std::move(pts));
        }
        return FreeFormContour(d, std::move(patches));
    } catch (const json::exception& e) {
        throw DecodeError(std::string("contour JSON: ") + e.what());
    }
}

inline json components_to_json(const ComponentSet& set) {
    json inner = json::array();
    for (const auto& c : set.inner) inner.push_back(contour_to_json(c));
    return {{"outer", contour_to_json(set.outer)}, {"inner", std::move(inner)}, {"flips", set.flips}};
}

inline ComponentSet components_from_json(const json& j) {
    ComponentSet set;
    try {
        set.outer = contour_from_json(j.at("outer"));
        for (const auto& c : j.at("inner")) set.inner.push_back(contour_from_json(c));
        set.flips = j.value("flips", std::size_t{0});
    } catch (const json::exception& e) {
        throw DecodeError(std::string("component JSON: ") + e.what());
    }
    return set;
}

inline void save_json(const json& j, const std::filesystem::path& path) {
    const std::string text = j.dump(2) + "\n";
    detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline json load_json(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw DecodeError("JSON " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// Altitude table

/// CSV with header `x,y,altitude_m`, one measured point per line (current-image coordinates).
inline std::vector<AltitudeSample> parse_altitude_csv(std::istream& in) {
    std::vector<AltitudeSample> out;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            std::string h;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) h += ch;
            if (h != "x,y,altitude_m") throw DecodeError("altitude CSV: expected header x,y,altitude_m");
            header_seen = true;
            continue;
        }
        std::array<double, 3> v{};
        std::stringstream ss(line);
        std::string cell;
        int n = 0;
        while (std::getline(ss, cell, ',')) {
            if (n >= 3) throw DecodeError("altitude CSV line " + std::to_string(lineno) + ": too many fields");
            try {
                std::size_t used = 0;
                v[static_cast<std::size_t>(n)] = std::stod(cell, &used);
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::logic_error&) {
                throw DecodeError("altitude CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            ++n;
        }
        if (n != 3) throw DecodeError("altitude CSV line " + std::to_string(lineno) + ": expected 3 fields");
        out.push_back({{v[0], v[1]}, v[2]});
    }
    if (!header_seen) throw DecodeError("altitude CSV: empty file");
    return out;
}

inline std::vector<AltitudeSample> load_altitude_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DecodeError("cannot open " + path.string());
    return parse_altitude_csv(in);
}

inline void save_altitude_csv(const std::vector<AltitudeSample>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "x,y,altitude_m\n";
    for (const auto& r : rows) out << r.position.x << ',' << r.position.y << ',' << r.altitude << '\n';
}

/// {components: [{id, classified, matched_points, max_altitude}], ...}
inline json freespace_report(const FreeSpaceResult& r) {
    json comps = json::array();
    for (std::size_t i = 0; i < r.reports.size(); ++i)
        comps.push_back({{"id", i},
                         {"classified", to_string(r.reports[i].decision)},
                         {"matched_points", r.reports[i].matched_points},
                         {"max_altitude", r.reports[i].max_altitude}});
    return {{"components", std::move(comps)},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"retained", r.retained_obstacles.size()},
            {"merged", r.merged_components.size()},
            {"free_pixels", mask_count(r.free_space_mask)}};
}

}  // namespace ffac
