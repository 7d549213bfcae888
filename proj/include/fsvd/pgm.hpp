#pragma once

// Binary PGM (P5) read/write for phase maps and intensity maps.
//
// Phase maps are 16-bit, maxval 65535, value v <-> phase 2 pi v / 65536,
// row-major with the origin at the top-left pixel. Samples are big-endian as
// the netpbm format requires.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fsvd/error.hpp"
#include "fsvd/field.hpp"

namespace fsvd::pgm {

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 65535;
    std::vector<std::uint16_t> pixels;  // row-major

    std::uint16_t operator()(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

namespace detail {

inline void skip_space_and_comments(const std::string& buf, std::size_t& pos) {
    while (pos < buf.size()) {
        const char c = buf[pos];
        if (c == '#') {
            while (pos < buf.size() && buf[pos] != '\n' && buf[pos] != '\r') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            ++pos;
        } else {
            break;
        }
    }
}

inline unsigned long read_header_int(const std::string& buf, std::size_t& pos, const char* field) {
    skip_space_and_comments(buf, pos);
    const std::size_t start = pos;
    unsigned long value = 0;
    while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
        value = value * 10 + static_cast<unsigned long>(buf[pos] - '0');
        if (value > 0xFFFFFFFFul) throw FormatError(std::string("PGM header: ") + field + " too large");
        ++pos;
    }
    if (pos == start) throw FormatError(std::string("PGM header: missing or invalid ") + field);
    return value;
}

} // namespace detail

/// Parses a binary P5 image with maxval 1..65535.
inline Image decode(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw FormatError("not a binary PGM (expected magic 'P5')");
    std::size_t pos = 2;
    Image img;
    img.width = detail::read_header_int(bytes, pos, "width");
    img.height = detail::read_header_int(bytes, pos, "height");
    const auto maxval = detail::read_header_int(bytes, pos, "maxval");
    if (img.width == 0 || img.height == 0) throw FormatError("PGM header: zero image dimension");
    if (maxval == 0 || maxval > 65535) throw FormatError("PGM header: maxval must be in 1..65535");
    img.maxval = static_cast<unsigned>(maxval);
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw FormatError("PGM header: missing whitespace before raster");
    ++pos;

    if (img.width > bytes.size() || img.height > bytes.size())
        throw FormatError("PGM header: dimensions exceed file size");
    const std::size_t bpp = img.maxval > 255 ? 2 : 1;
    const std::size_t count = img.width * img.height;
    if (bytes.size() - pos != count * bpp)
        throw FormatError("PGM raster size mismatch: expected " + std::to_string(count * bpp) + " bytes, got " +
                          std::to_string(bytes.size() - pos));
    img.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint16_t v;
        if (bpp == 2) {
            v = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[pos + 2 * i]) << 8) |
                                           static_cast<unsigned char>(bytes[pos + 2 * i + 1]));
        } else {
            v = static_cast<unsigned char>(bytes[pos + i]);
        }
        if (v > img.maxval) throw FormatError("PGM sample exceeds maxval");
        img.pixels[i] = v;
    }
    return img;
}

inline std::string encode(const Image& img) {
    fsvd::detail::require(img.pixels.size() == img.width * img.height, "PGM pixel count mismatch");
    fsvd::detail::require(img.maxval >= 1 && img.maxval <= 65535, "PGM maxval must be in 1..65535");
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                      std::to_string(img.maxval) + "\n";
    const bool wide = img.maxval > 255;
    out.reserve(out.size() + img.pixels.size() * (wide ? 2 : 1));
    for (auto v : img.pixels) {
        if (wide) out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xFF));
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline Image read(const std::string& path) { return decode(read_file(path)); }
inline void write(const std::string& path, const Image& img) { write_file(path, encode(img)); }

inline constexpr double kPhaseLevels = 65536.0;

inline std::uint16_t phase_to_level(double phi) {
    const double v = std::nearbyint(wrap_phase(phi) * (kPhaseLevels / kTwoPi));
    return static_cast<std::uint16_t>(static_cast<long long>(v) % 65536);
}

inline double level_to_phase(std::uint16_t v) { return kTwoPi * static_cast<double>(v) / kPhaseLevels; }

inline Image from_phase(const PhaseHologram& holo) {
    Image img{holo.size(), holo.size(), 65535, {}};
    img.pixels.reserve(holo.phases().size());
    for (double p : holo.phases()) img.pixels.push_back(phase_to_level(p));
    return img;
}

/// Strict phase-map decode: square, maxval 65535, even side.
inline PhaseHologram to_phase(const Image& img, double pixel_pitch = 20e-6) {
    if (img.maxval != 65535) throw FormatError("phase map must have maxval 65535, got " + std::to_string(img.maxval));
    if (img.width != img.height) throw FormatError("phase map must be square");
    if (img.width < 2 || img.width % 2 != 0) throw FormatError("phase map side must be an even number >= 2");
    std::vector<double> phases;
    phases.reserve(img.pixels.size());
    for (auto v : img.pixels) phases.push_back(level_to_phase(v));
    return {img.width, pixel_pitch, std::move(phases)};
}

inline void write_phase(const std::string& path, const PhaseHologram& holo) { write(path, from_phase(holo)); }
inline PhaseHologram read_phase(const std::string& path, double pixel_pitch = 20e-6) {
    return to_phase(read(path), pixel_pitch);
}

/// 16-bit intensity map scaled so the peak maps to 65535. Returns the peak
/// (the normalisation factor); an all-zero grid is written as zeros.
inline double from_intensity(const Grid<double>& intensity, Image& img) {
    double peak = 0.0;
    for (double v : intensity.values()) peak = std::max(peak, v);
    img = Image{intensity.size(), intensity.size(), 65535, {}};
    img.pixels.reserve(intensity.count());
    for (double v : intensity.values())
        img.pixels.push_back(peak > 0 ? static_cast<std::uint16_t>(std::nearbyint(std::clamp(v / peak, 0.0, 1.0) * 65535.0)) : 0);
    return peak;
}

} // namespace fsvd::pgm
