#pragma once

// Pulse-slot frame planning and timing simulation.
//
// A frame plan lists laser pulses ("slots"). Each slot fires one hologram
// pattern of up to N_dot simultaneous voxels, translated into place by the
// galvano mirror, at the focal length set by the varifocal lens. Planning:
//
//  1. bucket voxels into Z layers of one axial spot length;
//  2. order each layer by greedy nearest neighbour on XY (ties to the lowest
//     index), keeping the input order if that is shorter;
//  3. chunk the ordered layer into groups of N_dot; a group's pattern is its
//     XY offsets about the group centroid, and equal patterns share one
//     hologram id;
//  4. time each slot at the earliest instant allowed by the pulse period,
//     galvano settle, SLM response and varifocal response.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fsvd/device.hpp"
#include "fsvd/energy.hpp"
#include "fsvd/error.hpp"
#include "fsvd/optics.hpp"

namespace fsvd {

struct Voxel {
    Position3 position;
    double weight = 1.0;
};

struct VoxelCloud {
    std::vector<Voxel> points;
    Bounds3 bounds;

    void validate() const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i].position;
            detail::require(bounds.contains(p.x, p.y, p.z), "voxel " + std::to_string(i) + " lies outside the workspace");
            detail::require(points[i].weight >= 0, "voxel " + std::to_string(i) + " has a negative weight");
        }
    }
};

struct GalvanoAngles {
    double x = 0;  // rad
    double y = 0;  // rad

    bool operator==(const GalvanoAngles&) const = default;
};

/// Linear small-angle map from workspace XY (m) to mirror angles: the galvano
/// half field maps onto +/- galvano_range.
inline GalvanoAngles xy_to_galvano(double x, double y, const DeviceProfile& profile) {
    const double h = profile.galvano_half_field;
    detail::require(std::abs(x) <= h && std::abs(y) <= h, "position outside the galvano field");
    const double k = profile.galvano_range / h;
    return {x * k, y * k};
}

inline std::pair<double, double> galvano_to_xy(const GalvanoAngles& a, const DeviceProfile& profile) {
    detail::require(std::abs(a.x) <= profile.galvano_range && std::abs(a.y) <= profile.galvano_range,
                    "galvano angle outside the mirror range");
    const double k = profile.galvano_half_field / profile.galvano_range;
    return {a.x * k, a.y * k};
}

struct HologramPattern {
    int id = 0;
    std::vector<std::pair<double, double>> offsets;  // m, about the galvano position

    bool operator==(const HologramPattern&) const = default;
};

struct PlanSlot {
    double time = 0;  // s from frame start
    GalvanoAngles galvano;
    double varifocal_f = 0;  // m
    int hologram_id = 0;
    std::vector<std::size_t> voxels;

    bool operator==(const PlanSlot&) const = default;
};

struct FramePlan {
    double frame_time = 0;          // s
    double pulse_period = 0;        // s
    long long dots_per_pulse = 0;
    std::size_t voxel_count = 0;
    std::vector<HologramPattern> holograms;
    std::vector<PlanSlot> slots;

    // End of the last pulse period.
    double duration() const { return slots.empty() ? 0.0 : slots.back().time + pulse_period; }
    bool operator==(const FramePlan&) const = default;
};

struct PlannerOptions {
    double layer_thickness = 0;   // m; 0 = axial spot length of the profile's optics
    double pattern_quantum = 0;   // m; 0 = lateral spot diameter
    bool allow_hologram_change = false;  // mid-frame SLM updates
};

/// Simultaneous voxels a pulse may address on this hardware; without an
/// SLM only one focus exists.
inline long long addressable_dots_per_pulse(const EnergyBudget& budget, const DeviceProfile& profile) {
    const long long n = dots_per_pulse(budget);
    return profile.has_slm ? n : std::min<long long>(n, 1);
}

namespace detail {

inline double xy_distance(const Position3& a, const Position3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double path_length(const std::vector<Voxel>& pts, const std::vector<std::size_t>& order) {
    double len = 0;
    for (std::size_t i = 1; i < order.size(); ++i) len += xy_distance(pts[order[i - 1]].position, pts[order[i]].position);
    return len;
}

inline std::vector<std::size_t> greedy_order(const std::vector<Voxel>& pts, const std::vector<std::size_t>& members) {
    std::vector<std::size_t> order;
    if (members.empty()) return order;
    order.reserve(members.size());
    std::vector<char> used(members.size(), 0);
    std::size_t cur = 0;  // position in members; members is ascending so this is the lowest index
    used[0] = 1;
    order.push_back(members[0]);
    for (std::size_t step = 1; step < members.size(); ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        const auto& p = pts[members[cur]].position;
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (used[j]) continue;
            const double dx = pts[members[j]].position.x - p.x;
            const double dy = pts[members[j]].position.y - p.y;
            const double d = dx * dx + dy * dy;
            if (d < best) {  // strict: ties keep the lowest index
                best = d;
                best_j = j;
            }
        }
        used[best_j] = 1;
        cur = best_j;
        order.push_back(members[best_j]);
    }
    return order;
}

struct Gap {
    double seconds;
    const char* device;  // binding constraint beyond the pulse period, or "laser"
};

inline Gap required_gap(const PlanSlot& prev, const PlanSlot& next, double period, const DeviceProfile& profile) {
    Gap g{period, "laser"};
    auto consider = [&](bool changed, double t, const char* dev) {
        if (changed && t > g.seconds) g = {t, dev};
    };
    consider(!(prev.galvano == next.galvano), profile.galvano_settle(), "galvano");
    consider(prev.hologram_id != next.hologram_id, profile.slm_response, "slm");
    consider(prev.varifocal_f != next.varifocal_f, profile.varifocal_response, "varifocal");
    return g;
}

inline bool time_geq(double a, double b) { return a >= b * (1.0 - 1e-9); }

} // namespace detail

/// Builds one frame's pulse schedule. Throws InfeasibleError naming the
/// bottleneck device ("laser", "galvano", "slm", "varifocal") when the
/// schedule cannot fit the frame time, including the wrap into the next frame.
inline FramePlan plan_frame(const VoxelCloud& cloud, const DeviceProfile& profile, const EnergyBudget& budget,
                            double frame_time, const PlannerOptions& options = {}) {
    detail::require(frame_time > 0 && std::isfinite(frame_time), "frame time must be > 0");
    profile.validate();
    cloud.validate();

    FramePlan plan;
    plan.frame_time = frame_time;
    plan.pulse_period = profile.laser.pulse_period();
    plan.dots_per_pulse = addressable_dots_per_pulse(budget, profile);
    plan.voxel_count = cloud.points.size();
    if (cloud.points.empty()) return plan;
    if (plan.dots_per_pulse < 1)
        throw InfeasibleError("laser", "pulse energy after losses is below the breakdown threshold; no voxel can ignite");

    const double layer = options.layer_thickness > 0 ? options.layer_thickness : axial_spot_length(profile.train);
    const double quantum = options.pattern_quantum > 0 ? options.pattern_quantum : lateral_spot_diameter(profile.train);
    const auto& ws = profile.workspace;

    std::map<std::int64_t, std::vector<std::size_t>> layers;
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        layers[static_cast<std::int64_t>(std::floor((cloud.points[i].position.z - ws.min_z) / layer))].push_back(i);

    std::map<std::vector<std::pair<std::int64_t, std::int64_t>>, int> pattern_ids;
    const auto n_dot = static_cast<std::size_t>(plan.dots_per_pulse);
    const double z_span = ws.max_z - ws.min_z;

    for (const auto& [layer_index, members] : layers) {
        auto order = detail::greedy_order(cloud.points, members);
        if (detail::path_length(cloud.points, members) < detail::path_length(cloud.points, order)) order = members;

        const double z_centre = std::clamp(ws.min_z + (static_cast<double>(layer_index) + 0.5) * layer, ws.min_z, ws.max_z);
        const double focal = profile.varifocal_min + (z_centre - ws.min_z) / z_span * (profile.varifocal_max - profile.varifocal_min);

        for (std::size_t start = 0; start < order.size(); start += n_dot) {
            const std::size_t end = std::min(order.size(), start + n_dot);
            double cx = 0, cy = 0;
            for (std::size_t k = start; k < end; ++k) {
                cx += cloud.points[order[k]].position.x;
                cy += cloud.points[order[k]].position.y;
            }
            cx /= static_cast<double>(end - start);
            cy /= static_cast<double>(end - start);

            std::vector<std::pair<std::int64_t, std::int64_t>> key;
            std::vector<std::pair<double, double>> offsets;
            for (std::size_t k = start; k < end; ++k) {
                const double dx = cloud.points[order[k]].position.x - cx;
                const double dy = cloud.points[order[k]].position.y - cy;
                key.emplace_back(std::llround(dx / quantum), std::llround(dy / quantum));
                offsets.emplace_back(dx, dy);
            }
            std::sort(key.begin(), key.end());
            auto [it, inserted] = pattern_ids.try_emplace(key, static_cast<int>(plan.holograms.size()));
            if (inserted) {
                std::sort(offsets.begin(), offsets.end());
                plan.holograms.push_back({it->second, std::move(offsets)});
            }

            PlanSlot slot;
            slot.galvano = xy_to_galvano(cx, cy, profile);
            slot.varifocal_f = focal;
            slot.hologram_id = it->second;
            slot.voxels.assign(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
            plan.slots.push_back(std::move(slot));
        }
    }

    // Timing and bottleneck attribution.
    std::map<std::string, double> waited;
    for (std::size_t k = 1; k < plan.slots.size(); ++k) {
        const auto gap = detail::required_gap(plan.slots[k - 1], plan.slots[k], plan.pulse_period, profile);
        plan.slots[k].time = plan.slots[k - 1].time + gap.seconds;
        waited[gap.device] += gap.seconds;
    }
    if (plan.holograms.size() > 1 && !options.allow_hologram_change)
        throw InfeasibleError("slm", "frame needs " + std::to_string(plan.holograms.size()) +
                                         " holograms but mid-frame SLM changes are disabled");

    const auto wrap = detail::required_gap(plan.slots.back(), plan.slots.front(), plan.pulse_period, profile);
    const double needed = plan.slots.back().time + wrap.seconds;
    if (needed > frame_time * (1.0 + 1e-9)) {
        waited[wrap.device] += wrap.seconds;
        std::string bottleneck = "laser";
        double worst = 0;
        for (const auto& [dev, t] : waited)
            if (dev != "laser" && t > worst) {
                worst = t;
                bottleneck = dev;
            }
        throw InfeasibleError(bottleneck, "frame needs " + std::to_string(needed) + " s but frame time is " +
                                              std::to_string(frame_time) + " s (bottleneck: " + bottleneck + ")");
    }
    return plan;
}

/// Checks every plan invariant against the device timing model; returns one
/// message per violation.
inline std::vector<std::string> validate_plan(const FramePlan& plan, const DeviceProfile& profile) {
    std::vector<std::string> v;
    const double period = profile.laser.pulse_period();
    std::vector<int> covered(plan.voxel_count, 0);
    std::map<int, bool> ids;
    for (const auto& h : plan.holograms) ids[h.id] = true;

    for (std::size_t k = 0; k < plan.slots.size(); ++k) {
        const auto& s = plan.slots[k];
        const std::string where = "slot " + std::to_string(k);
        if (s.time < 0) v.push_back(where + ": negative time");
        if (static_cast<long long>(s.voxels.size()) > plan.dots_per_pulse)
            v.push_back(where + ": addresses more voxels than dots per pulse");
        if (s.voxels.empty()) v.push_back(where + ": addresses no voxel");
        if (!ids.count(s.hologram_id)) v.push_back(where + ": unknown hologram id");
        if (std::abs(s.galvano.x) > profile.galvano_range || std::abs(s.galvano.y) > profile.galvano_range)
            v.push_back(where + ": galvano angle out of range");
        if (s.varifocal_f < profile.varifocal_min * (1 - 1e-12) || s.varifocal_f > profile.varifocal_max * (1 + 1e-12))
            v.push_back(where + ": varifocal focal length out of range");
        for (auto idx : s.voxels) {
            if (idx >= plan.voxel_count) v.push_back(where + ": voxel index out of range");
            else ++covered[idx];
        }
        if (k == 0) continue;
        const auto& p = plan.slots[k - 1];
        const double dt = s.time - p.time;
        if (!(dt > 0)) v.push_back(where + ": not strictly after previous slot");
        if (!detail::time_geq(dt, period)) v.push_back(where + ": pulse spacing below laser period");
        if (!(p.galvano == s.galvano) && !detail::time_geq(dt, profile.galvano_settle()))
            v.push_back(where + ": galvano move faster than settle time");
        if (p.hologram_id != s.hologram_id && !detail::time_geq(dt, profile.slm_response))
            v.push_back(where + ": hologram change faster than SLM response");
        if (p.varifocal_f != s.varifocal_f && !detail::time_geq(dt, profile.varifocal_response))
            v.push_back(where + ": varifocal change faster than lens response");
    }
    for (std::size_t i = 0; i < covered.size(); ++i)
        if (covered[i] != 1) v.push_back("voxel " + std::to_string(i) + " covered " + std::to_string(covered[i]) + " times");
    if (!plan.slots.empty()) {
        const auto wrap = detail::required_gap(plan.slots.back(), plan.slots.front(), period, profile);
        if (plan.slots.back().time + wrap.seconds > plan.frame_time * (1.0 + 1e-9))
            v.push_back(std::string("frame does not fit its frame time (wrap limited by ") + wrap.device + ")");
    }
    return v;
}

/// Sum of galvano angle steps across the frame (rad).
inline double galvano_travel(const FramePlan& plan) {
    double t = 0;
    for (std::size_t k = 1; k < plan.slots.size(); ++k)
        t += std::hypot(plan.slots[k].galvano.x - plan.slots[k - 1].galvano.x,
                        plan.slots[k].galvano.y - plan.slots[k - 1].galvano.y);
    return t;
}

// ---------------------------------------------------------------------------
// Simulation

struct TimelineEvent {
    std::size_t frame = 0;
    std::size_t slot = 0;
    double time = 0;  // s from simulation start
    std::size_t dots = 0;
};

struct SimReport {
    double horizon = 0;
    std::size_t pulses = 0;
    std::size_t dots = 0;
    std::size_t frames_started = 0;
    std::size_t frames_completed = 0;
    double dots_per_second = 0;
    double frames_per_second = 0;
    double max_window_dots_per_second = 0;
    double window = 0;
    std::map<std::string, double> busy_time;   // s per device
    std::vector<std::string> violations;
    std::vector<double> voxel_exposure;        // s of irradiation per voxel index
    std::vector<TimelineEvent> timeline;
};

struct SimOptions {
    double window_periods = 100;  // sliding window, in laser periods
    bool record_timeline = true;
};

/// Replays the frame plan back-to-back over [0, horizon) against the timing
/// model. Each pulse counts one laser period of irradiation for each voxel it
/// addresses. Invariant breaches are listed, never thrown.
inline SimReport simulate(const FramePlan& plan, const DeviceProfile& profile, double horizon,
                          const SimOptions& options = {}) {
    detail::require(horizon > 0 && std::isfinite(horizon), "simulation horizon must be > 0");
    profile.validate();
    SimReport r;
    r.horizon = horizon;
    r.violations = validate_plan(plan, profile);
    r.voxel_exposure.assign(plan.voxel_count, 0.0);
    for (const char* dev : {"laser", "galvano", "slm", "varifocal"}) r.busy_time[dev] = 0.0;
    const double period = profile.laser.pulse_period();
    r.window = options.window_periods * period;
    const double limit = horizon * (1.0 - 1e-12);

    std::vector<double> fire_times;
    std::vector<std::size_t> fire_dots;
    const PlanSlot* prev = nullptr;
    if (!plan.slots.empty() && plan.frame_time > 0) {
        for (std::size_t f = 0;; ++f) {
            const double start = static_cast<double>(f) * plan.frame_time;
            if (!(start < limit)) break;
            ++r.frames_started;
            bool complete = true;
            for (std::size_t k = 0; k < plan.slots.size(); ++k) {
                const auto& s = plan.slots[k];
                const double t = start + s.time;
                if (!(t < limit)) {
                    complete = false;
                    break;
                }
                if (prev) {
                    if (!(prev->galvano == s.galvano)) r.busy_time["galvano"] += profile.galvano_settle();
                    if (prev->hologram_id != s.hologram_id) r.busy_time["slm"] += profile.slm_response;
                    if (prev->varifocal_f != s.varifocal_f) r.busy_time["varifocal"] += profile.varifocal_response;
                }
                r.busy_time["laser"] += period;
                ++r.pulses;
                r.dots += s.voxels.size();
                for (auto idx : s.voxels)
                    if (idx < r.voxel_exposure.size()) r.voxel_exposure[idx] += period;
                fire_times.push_back(t);
                fire_dots.push_back(s.voxels.size());
                if (options.record_timeline) r.timeline.push_back({f, k, t, s.voxels.size()});
                prev = &s;
            }
            if (complete) ++r.frames_completed;
        }
    }

    r.dots_per_second = static_cast<double>(r.dots) / horizon;
    r.frames_per_second = static_cast<double>(r.frames_completed) / horizon;

    // Sliding window [t_i, t_i + W): dots may not exceed N_dot * F_rep * W.
    std::size_t j = 0, in_window = 0, worst = 0;
    const double w_eff = r.window * (1.0 - 1e-9);
    for (std::size_t i = 0; i < fire_times.size(); ++i) {
        while (j < fire_times.size() && fire_times[j] < fire_times[i] + w_eff) in_window += fire_dots[j++];
        worst = std::max(worst, in_window);
        in_window -= fire_dots[i];
    }
    r.max_window_dots_per_second = r.window > 0 ? static_cast<double>(worst) / r.window : 0.0;
    const double cap = static_cast<double>(plan.dots_per_pulse) * profile.laser.repetition_rate;
    if (r.max_window_dots_per_second > cap * (1.0 + 1e-9))
        r.violations.push_back("throughput exceeds N_dot * F_rep within a " + std::to_string(r.window) + " s window");
    return r;
}

/// Feeds the per-voxel irradiation of a simulation into the exposure guard
/// (caller holds the guard's single-writer role). Returns the verdicts in
/// voxel order.
inline std::vector<ExposureVerdict> forward_exposure(const SimReport& report, const VoxelCloud& cloud, ExposureGuard& guard) {
    detail::require(report.voxel_exposure.size() == cloud.points.size(), "report and cloud voxel counts differ");
    std::vector<ExposureVerdict> out;
    out.reserve(cloud.points.size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        out.push_back(guard.record_exposure(cloud.points[i].position, report.voxel_exposure[i]));
    return out;
}

} // namespace fsvd
