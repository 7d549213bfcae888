#pragma once

// Text file formats: spot lists, voxel clouds, and the image-to-spots
// converter.
//
// Spots file, one spot per line, '#' starts a comment:
//     # vx_px vy_px intensity_rel [focal_f_mm]
//     3 0 1
//     10 12 0.5 80
//
// Cloud file, CSV with a mandatory unit-suffixed header:
//     x_mm,y_mm,z_mm[,weight]

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fsvd/error.hpp"
#include "fsvd/ora.hpp"
#include "fsvd/pgm.hpp"
#include "fsvd/scheduler.hpp"

namespace fsvd::io {

inline constexpr std::string_view kSpotsHeader = "# vx_px vy_px intensity_rel focal_f_mm";

// Shortest decimal that round-trips.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

// Unit-converted quantities go through a scale factor on every read and
// write; 12 significant digits absorb that rounding so rewrites are stable.
inline std::string format_converted(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return {buf, res.ptr};
}

inline double parse_number(std::string_view tok, int line, const char* what) {
    double v = 0;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e || !std::isfinite(v))
        throw FormatError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
    return v;
}

inline int parse_int(std::string_view tok, int line, const char* what) {
    int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw FormatError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

// ---------------------------------------------------------------------------
// Spots

inline std::vector<SpotTarget> parse_spots(const std::string& text) {
    std::vector<SpotTarget> spots;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view body(raw);
        body = body.substr(0, body.find('#'));
        const auto tok = split_ws(body);
        if (tok.empty()) continue;
        if (tok.size() < 3 || tok.size() > 4)
            throw FormatError("expected 'vx vy intensity [focal_f_mm]', got " + std::to_string(tok.size()) + " fields", line);
        SpotTarget s;
        s.vx = parse_int(tok[0], line, "vx");
        s.vy = parse_int(tok[1], line, "vy");
        s.desired_intensity = parse_number(tok[2], line, "intensity");
        if (tok.size() == 4) s.axial_focus_f = parse_number(tok[3], line, "focal length") * 1e-3;
        spots.push_back(s);
    }
    return spots;
}

inline std::string format_spots(const std::vector<SpotTarget>& spots) {
    std::string out(kSpotsHeader);
    out += '\n';
    for (const auto& s : spots) {
        out += std::to_string(s.vx) + ' ' + std::to_string(s.vy) + ' ' + format_number(s.desired_intensity);
        if (s.axial_focus_f) out += ' ' + format_converted(*s.axial_focus_f * 1e3);
        out += '\n';
    }
    return out;
}

inline std::vector<SpotTarget> read_spots(const std::string& path) { return parse_spots(read_text(path)); }

// ---------------------------------------------------------------------------
// Voxel clouds

inline VoxelCloud parse_cloud(const std::string& text, const Bounds3& bounds) {
    VoxelCloud cloud;
    cloud.bounds = bounds;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::size_t columns = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        std::vector<std::string_view> cells;
        std::string_view rest(raw);
        for (;;) {
            const auto comma = rest.find(',');
            auto cell = rest.substr(0, comma);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
            cells.push_back(cell);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (columns == 0) {
            const bool base = cells.size() >= 3 && cells[0] == "x_mm" && cells[1] == "y_mm" && cells[2] == "z_mm";
            if (!base || cells.size() > 4 || (cells.size() == 4 && cells[3] != "weight"))
                throw FormatError("cloud header must be 'x_mm,y_mm,z_mm[,weight]'", line);
            columns = cells.size();
            continue;
        }
        if (cells.size() != columns)
            throw FormatError("expected " + std::to_string(columns) + " columns, got " + std::to_string(cells.size()), line);
        Voxel v;
        v.position.x = parse_number(cells[0], line, "x_mm") * 1e-3;
        v.position.y = parse_number(cells[1], line, "y_mm") * 1e-3;
        v.position.z = parse_number(cells[2], line, "z_mm") * 1e-3;
        if (columns == 4) v.weight = parse_number(cells[3], line, "weight");
        if (!bounds.contains(v.position.x, v.position.y, v.position.z))
            throw DomainError("line " + std::to_string(line) + ": voxel lies outside the workspace");
        if (v.weight < 0) throw DomainError("line " + std::to_string(line) + ": negative weight");
        cloud.points.push_back(v);
    }
    return cloud;
}

inline std::string format_cloud(const VoxelCloud& cloud, bool with_weight = false) {
    std::string out = with_weight ? "x_mm,y_mm,z_mm,weight\n" : "x_mm,y_mm,z_mm\n";
    for (const auto& v : cloud.points) {
        out += format_converted(v.position.x * 1e3) + ',' + format_converted(v.position.y * 1e3) + ',' +
               format_converted(v.position.z * 1e3);
        if (with_weight) out += ',' + format_number(v.weight);
        out += '\n';
    }
    return out;
}

inline VoxelCloud read_cloud(const std::string& path, const Bounds3& bounds) { return parse_cloud(read_text(path), bounds); }

// ---------------------------------------------------------------------------
// Image -> spot array

/// Keeps pixels brighter than threshold * maxval. When more than max_spots
/// remain they are subsampled evenly in raster order. Intensities are the
/// pixel values relative to maxval.
inline std::vector<SpotTarget> image_to_spots(const pgm::Image& img, std::size_t max_spots, double threshold) {
    detail::require(threshold >= 0 && threshold < 1, "threshold must lie in [0, 1)");
    std::vector<SpotTarget> bright;
    const double maxval = static_cast<double>(img.maxval);
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) {
            const double v = static_cast<double>(img(x, y)) / maxval;
            if (v > threshold) bright.push_back({static_cast<int>(x), static_cast<int>(y), v, std::nullopt});
        }
    if (bright.size() <= max_spots) return bright;
    std::vector<SpotTarget> picked;
    picked.reserve(max_spots);
    for (std::size_t i = 0; i < max_spots; ++i) picked.push_back(bright[i * bright.size() / max_spots]);
    return picked;
}

} // namespace fsvd::io
