#pragma once

// Device timing profiles for the scanning hardware and their plain-text
// key = value config format.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fsvd/error.hpp"
#include "fsvd/optics.hpp"

namespace fsvd {

struct Bounds3 {
    double min_x = -5e-3, max_x = 5e-3;
    double min_y = -5e-3, max_y = 5e-3;
    double min_z = -5e-3, max_z = 5e-3;

    bool contains(double x, double y, double z) const {
        return x >= min_x && x <= max_x && y >= min_y && y <= max_y && z >= min_z && z <= max_z;
    }
};

struct DeviceProfile {
    std::string name = "custom";
    double galvano_rate = 1e3;             // Hz, settle-limited repositioning rate
    double galvano_range = 0.17;           // rad, +/- mechanical scan angle
    double galvano_error = 5e-6;           // rad, as printed in the device table
    double galvano_half_field = 5e-3;      // m, lateral half-width reached at full angle
    double slm_response = 0.1;             // s
    bool has_slm = true;
    double slm_efficiency = 0.8;
    double train_efficiency = 0.53;
    double varifocal_response = 2.5e-3;   // s
    double varifocal_min = 45e-3;          // m
    double varifocal_max = 120e-3;         // m
    Bounds3 workspace;
    LaserProfile laser;
    OpticalTrain train;

    double galvano_settle() const { return 1.0 / galvano_rate; }

    void validate() const {
        detail::require(galvano_rate > 0, "galvano rate must be > 0");
        detail::require(galvano_range > 0, "galvano range must be > 0");
        detail::require(galvano_error >= 0, "galvano error must be >= 0");
        detail::require(galvano_half_field > 0, "galvano half field must be > 0");
        detail::require(slm_response > 0, "SLM response must be > 0");
        detail::require(slm_efficiency > 0 && slm_efficiency <= 1, "SLM efficiency must be in (0, 1]");
        detail::require(train_efficiency > 0 && train_efficiency <= 1, "train efficiency must be in (0, 1]");
        detail::require(varifocal_response > 0, "varifocal response must be > 0");
        detail::require(varifocal_min > 0 && varifocal_min < varifocal_max, "varifocal range must satisfy 0 < min < max");
        detail::require(workspace.min_x < workspace.max_x && workspace.min_y < workspace.max_y &&
                            workspace.min_z < workspace.max_z,
                        "workspace bounds must satisfy min < max");
        detail::require(workspace.min_x >= -galvano_half_field && workspace.max_x <= galvano_half_field &&
                            workspace.min_y >= -galvano_half_field && workspace.max_y <= galvano_half_field,
                        "workspace must lie inside the galvano field");
        laser.validate();
        train.validate();
    }
};

// System A: 800 nm, 1 kHz, 2 mJ Ti:sapphire source (30-100 fs), Canon
// galvano, Optotune varifocal lens, LCOS-SLM with a 100 ms response.
inline DeviceProfile system_a_profile() {
    DeviceProfile p;
    p.name = "system_a";
    p.galvano_rate = 1e3;
    p.galvano_range = 0.17;
    p.galvano_error = 5e-6;
    p.slm_response = 0.1;
    p.has_slm = true;
    p.slm_efficiency = 0.8;
    p.train_efficiency = 0.53;
    p.laser = {2e-3, 30e-15, 1e3, 800e-9};
    p.train = {800e-9, 10e-3, 40e-3};
    return p;
}

// System B: 1045 nm, 200 kHz, 50 uJ fibre laser (269 fs), no SLM. The
// scanner is swept continuously, so its repositioning rate is set to the
// pulse rate. The printed galvano error (5 mrad) is a thousand times System
// A's and is stored as printed.
inline DeviceProfile system_b_profile() {
    DeviceProfile p;
    p.name = "system_b";
    p.galvano_rate = 200e3;
    p.galvano_range = 0.35;
    p.galvano_error = 5e-3;
    p.slm_response = 0.1;
    p.has_slm = false;
    p.slm_efficiency = 1.0;
    p.train_efficiency = 0.8;
    p.laser = {50e-6, 269e-15, 200e3, 1045e-9};
    p.train = {1045e-9, 10e-3, 20e-3};
    return p;
}

inline std::vector<std::string> builtin_profile_names() { return {"system_a", "system_b"}; }

inline std::optional<DeviceProfile> builtin_profile(const std::string& name) {
    if (name == "system_a") return system_a_profile();
    if (name == "system_b") return system_b_profile();
    return std::nullopt;
}

namespace detail {

struct ProfileField {
    const char* key;
    std::function<double&(DeviceProfile&)> ref;
};

inline const std::vector<ProfileField>& profile_fields() {
    static const std::vector<ProfileField> fields = {
        {"galvano_rate_hz", [](DeviceProfile& p) -> double& { return p.galvano_rate; }},
        {"galvano_range_rad", [](DeviceProfile& p) -> double& { return p.galvano_range; }},
        {"galvano_error_rad", [](DeviceProfile& p) -> double& { return p.galvano_error; }},
        {"galvano_half_field_m", [](DeviceProfile& p) -> double& { return p.galvano_half_field; }},
        {"slm_response_s", [](DeviceProfile& p) -> double& { return p.slm_response; }},
        {"slm_efficiency", [](DeviceProfile& p) -> double& { return p.slm_efficiency; }},
        {"train_efficiency", [](DeviceProfile& p) -> double& { return p.train_efficiency; }},
        {"varifocal_response_s", [](DeviceProfile& p) -> double& { return p.varifocal_response; }},
        {"varifocal_min_m", [](DeviceProfile& p) -> double& { return p.varifocal_min; }},
        {"varifocal_max_m", [](DeviceProfile& p) -> double& { return p.varifocal_max; }},
        {"workspace_min_x_m", [](DeviceProfile& p) -> double& { return p.workspace.min_x; }},
        {"workspace_max_x_m", [](DeviceProfile& p) -> double& { return p.workspace.max_x; }},
        {"workspace_min_y_m", [](DeviceProfile& p) -> double& { return p.workspace.min_y; }},
        {"workspace_max_y_m", [](DeviceProfile& p) -> double& { return p.workspace.max_y; }},
        {"workspace_min_z_m", [](DeviceProfile& p) -> double& { return p.workspace.min_z; }},
        {"workspace_max_z_m", [](DeviceProfile& p) -> double& { return p.workspace.max_z; }},
        {"laser_pulse_energy_j", [](DeviceProfile& p) -> double& { return p.laser.pulse_energy; }},
        {"laser_pulse_width_s", [](DeviceProfile& p) -> double& { return p.laser.pulse_width; }},
        {"laser_repetition_rate_hz", [](DeviceProfile& p) -> double& { return p.laser.repetition_rate; }},
        {"laser_wavelength_m", [](DeviceProfile& p) -> double& { return p.laser.wavelength; }},
        {"train_beam_width_m", [](DeviceProfile& p) -> double& { return p.train.beam_width_a; }},
        {"train_focal_length_m", [](DeviceProfile& p) -> double& { return p.train.focal_length_r; }},
    };
    return fields;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// Parses a key = value profile. Lines starting with '#' are comments.
/// `base = <builtin>` (first) selects the preset whose values are overridden;
/// without it every key must be present.
inline DeviceProfile parse_profile(const std::string& text) {
    DeviceProfile p;
    std::map<std::string, bool> seen;
    bool have_base = false;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("expected 'key = value'", line_no);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (value.empty()) throw FormatError("missing value for '" + key + "'", line_no);
        if (seen.count(key)) throw FormatError("duplicate key '" + key + "'", line_no);
        seen[key] = true;

        if (key == "base") {
            if (seen.size() != 1) throw FormatError("'base' must be the first key", line_no);
            auto b = builtin_profile(value);
            if (!b) throw FormatError("unknown base profile '" + value + "'", line_no);
            p = *b;
            have_base = true;
        } else if (key == "name") {
            p.name = value;
        } else if (key == "has_slm") {
            if (value != "true" && value != "false") throw FormatError("has_slm must be true or false", line_no);
            p.has_slm = value == "true";
        } else {
            const auto& fields = detail::profile_fields();
            auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return key == f.key; });
            if (it == fields.end()) throw FormatError("unknown key '" + key + "'", line_no);
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size()) throw FormatError("invalid number '" + value + "' for '" + key + "'", line_no);
            it->ref(p) = v;
        }
    }
    if (!have_base) {
        for (const auto& f : detail::profile_fields())
            if (!seen.count(f.key)) throw FormatError(std::string("missing key '") + f.key + "'");
        if (!seen.count("has_slm")) throw FormatError("missing key 'has_slm'");
    }
    p.train.wavelength = p.laser.wavelength;
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw FormatError(std::string("invalid profile: ") + e.what());
    }
    return p;
}

inline std::string format_profile(const DeviceProfile& p) {
    auto num = [](double v) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::ostringstream out;
    out << "# device profile, SI units\n";
    out << "name = " << p.name << "\n";
    out << "has_slm = " << (p.has_slm ? "true" : "false") << "\n";
    DeviceProfile copy = p;
    for (const auto& f : detail::profile_fields()) out << f.key << " = " << num(f.ref(copy)) << "\n";
    return out.str();
}

inline constexpr const char* kPresetDirEnv = "FSVD_PRESET_DIR";

/// Resolves a profile reference: an existing file path, then
/// $FSVD_PRESET_DIR/<name>.conf, then a built-in preset.
inline DeviceProfile load_profile(const std::string& ref) {
    namespace fs = std::filesystem;
    auto from_file = [](const fs::path& path) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_profile(ss.str());
    };
    if (fs::is_regular_file(ref)) return from_file(ref);
    if (const char* dir = std::getenv(kPresetDirEnv); dir && *dir) {
        const fs::path candidate = fs::path(dir) / (ref + ".conf");
        if (fs::is_regular_file(candidate)) return from_file(candidate);
    }
    if (auto b = builtin_profile(ref)) return *b;
    std::string names;
    for (const auto& n : builtin_profile_names()) names += (names.empty() ? "" : ", ") + n;
    throw DomainError("unknown device profile '" + ref + "' (available: " + names + ")");
}

} // namespace fsvd
