#pragma once

// JSON form of frame plans. Field names carry SI unit suffixes.
//
//   {
//     "schema_version": 1,
//     "kind": "frame_plan",
//     "frame_time_s": 0.1, "pulse_period_s": 0.001,
//     "dots_per_pulse": 4, "voxel_count": 400,
//     "holograms": [{"id": 0, "offsets_m": [[dx, dy], ...]}],
//     "slots": [{"time_s": 0.0, "galvano_x_rad": 0.0, "galvano_y_rad": 0.0,
//                "varifocal_f_m": 0.0825, "hologram_id": 0, "voxels": [0, 1, 2, 3]}]
//   }

#include <string>

#include <json.hpp>

#include "fsvd/error.hpp"
#include "fsvd/scheduler.hpp"

namespace fsvd {

using ojson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline ojson plan_to_json(const FramePlan& plan) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "frame_plan";
    j["frame_time_s"] = plan.frame_time;
    j["pulse_period_s"] = plan.pulse_period;
    j["dots_per_pulse"] = plan.dots_per_pulse;
    j["voxel_count"] = plan.voxel_count;
    j["holograms"] = ojson::array();
    for (const auto& h : plan.holograms) {
        ojson offsets = ojson::array();
        for (const auto& [dx, dy] : h.offsets) offsets.push_back({dx, dy});
        j["holograms"].push_back({{"id", h.id}, {"offsets_m", std::move(offsets)}});
    }
    j["slots"] = ojson::array();
    for (const auto& s : plan.slots) {
        j["slots"].push_back({{"time_s", s.time},
                              {"galvano_x_rad", s.galvano.x},
                              {"galvano_y_rad", s.galvano.y},
                              {"varifocal_f_m", s.varifocal_f},
                              {"hologram_id", s.hologram_id},
                              {"voxels", s.voxels}});
    }
    return j;
}

inline FramePlan plan_from_json(const ojson& j) {
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw FormatError("unsupported plan schema_version " + j.at("schema_version").dump());
        if (j.at("kind").get<std::string>() != "frame_plan") throw FormatError("not a frame plan document");
        FramePlan plan;
        plan.frame_time = j.at("frame_time_s").get<double>();
        plan.pulse_period = j.at("pulse_period_s").get<double>();
        plan.dots_per_pulse = j.at("dots_per_pulse").get<long long>();
        plan.voxel_count = j.at("voxel_count").get<std::size_t>();
        for (const auto& h : j.at("holograms")) {
            HologramPattern p;
            p.id = h.at("id").get<int>();
            for (const auto& o : h.at("offsets_m")) {
                if (!o.is_array() || o.size() != 2) throw FormatError("hologram offsets must be [dx, dy] pairs");
                p.offsets.emplace_back(o[0].get<double>(), o[1].get<double>());
            }
            plan.holograms.push_back(std::move(p));
        }
        for (const auto& s : j.at("slots")) {
            PlanSlot slot;
            slot.time = s.at("time_s").get<double>();
            slot.galvano.x = s.at("galvano_x_rad").get<double>();
            slot.galvano.y = s.at("galvano_y_rad").get<double>();
            slot.varifocal_f = s.at("varifocal_f_m").get<double>();
            slot.hologram_id = s.at("hologram_id").get<int>();
            slot.voxels = s.at("voxels").get<std::vector<std::size_t>>();
            plan.slots.push_back(std::move(slot));
        }
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed plan JSON: ") + e.what());
    }
}

inline std::string dump_json(const ojson& j) { return j.dump(2) + "\n"; }

inline ojson parse_json(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

inline FramePlan plan_from_string(const std::string& text) { return plan_from_json(parse_json(text)); }
inline std::string plan_to_string(const FramePlan& plan) { return dump_json(plan_to_json(plan)); }

} // namespace fsvd
