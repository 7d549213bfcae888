#pragma once

// Pulse-energy accounting and the exposure safety guard.

#include <cmath>
#include <cstdint>
#include <array>
#include <map>
#include <string>
#include <tuple>

#include "fsvd/error.hpp"
#include "fsvd/optics.hpp"

namespace fsvd {

struct EnergyBudget {
    double total_pulse_energy = 2e-3;    // E_tot, J
    double breakdown_threshold = 0.2e-3; // E_lbd, J
    double slm_efficiency = 1.0;
    double train_efficiency = 1.0;

    void validate() const {
        detail::require(total_pulse_energy > 0, "total pulse energy must be > 0");
        detail::require(breakdown_threshold > 0, "breakdown threshold energy must be > 0");
        detail::require(slm_efficiency > 0 && slm_efficiency <= 1, "SLM efficiency must be in (0, 1]");
        detail::require(train_efficiency > 0 && train_efficiency <= 1, "train efficiency must be in (0, 1]");
    }

    double delivered_energy() const { return total_pulse_energy * slm_efficiency * train_efficiency; }
};

struct FrameBudget {
    long long dots_per_pulse = 1;  // N_dot
    double repetition_rate = 1e3;  // F_rep, Hz
    double frame_time = 0.1;       // T_f, s

    void validate() const {
        detail::require(dots_per_pulse >= 1, "dots per pulse must be >= 1");
        detail::require(repetition_rate > 0, "repetition rate must be > 0");
        detail::require(frame_time > 0, "frame time must be > 0");
    }
};

/// Voxels one pulse can ignite: floor(E_tot * efficiencies / E_lbd).
/// A fractional voxel cannot ignite, so the ratio is floored.
inline long long dots_per_pulse(const EnergyBudget& budget) {
    budget.validate();
    const double ratio = budget.delivered_energy() / budget.breakdown_threshold;
    // Absorb representation error so that e.g. 0.9e-3 / 0.45e-3 counts as 2.
    const double n = std::floor(ratio * (1.0 + 1e-12));
    return n < 0 ? 0 : static_cast<long long>(n);
}

/// N_dot * F_rep * T_f.
inline double dots_per_frame(const FrameBudget& frame) {
    frame.validate();
    return static_cast<double>(frame.dots_per_pulse) * frame.repetition_rate * frame.frame_time;
}

/// Laser pulses available in one frame slot: F_rep / frame rate.
inline double per_frame_rate_limit(double repetition_rate, double frame_rate) {
    detail::require(repetition_rate > 0 && frame_rate > 0, "rates must be > 0");
    return repetition_rate / frame_rate;
}

// Measured breakdown pulse energies in air for the two System A pulse widths.
struct BreakdownPreset {
    const char* name;
    Medium medium;
    double pulse_width;  // s
    double energy;       // J
};

inline constexpr std::array<BreakdownPreset, 2> kBreakdownPresets{{
    {"air_30fs", Medium::air, 30e-15, 0.2e-3},
    {"air_100fs", Medium::air, 100e-15, 0.45e-3},
}};

struct BreakdownEstimate {
    double energy = 0;   // J
    std::string source;  // preset name, or "threshold_intensity"
};

/// E_lbd for a medium and pulse width: a measured preset when one matches the
/// pulse width within 1%, otherwise threshold intensity * pulse width * focal area.
inline BreakdownEstimate breakdown_energy(Medium medium, double pulse_width, double focal_area_cm2,
                                          const MediumThresholds& thresholds = {}) {
    detail::require(pulse_width > 0, "pulse width must be > 0");
    for (const auto& p : kBreakdownPresets)
        if (p.medium == medium && std::abs(p.pulse_width - pulse_width) <= 0.01 * p.pulse_width) return {p.energy, p.name};
    detail::require(focal_area_cm2 > 0, "focal area must be > 0");
    return {thresholds(medium) * pulse_width * focal_area_cm2, "threshold_intensity"};
}

// ---------------------------------------------------------------------------
// Exposure guard

enum class ExposureStatus { ok, must_shutoff, limit_exceeded };

struct ExposureVerdict {
    ExposureStatus status = ExposureStatus::ok;
    bool limit_exceeded = false;
    bool must_shutoff = false;
    double shutoff_deadline = 0.0;  // s, valid when must_shutoff
    double accumulated = 0.0;       // s at this cell after the event
};

struct ExposureLimits {
    double max_dwell = 2.0;          // s; accumulated exposure beyond this burns the surface
    double contact_shutoff = 0.017;  // s; one 60 Hz frame
    double cell_size = 6.4e-6;       // m, position quantum (default lateral spot diameter)

    void validate() const {
        detail::require(contact_shutoff > 0, "contact shutoff must be > 0");
        detail::require(max_dwell > contact_shutoff, "max dwell must exceed contact shutoff");
        detail::require(cell_size > 0, "cell size must be > 0");
    }
};

struct Position3 {
    double x = 0, y = 0, z = 0;  // m
};

// Single-writer ledger of accumulated dwell per quantised voxel cell.
class ExposureGuard {
public:
    using Cell = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

    explicit ExposureGuard(ExposureLimits limits = {}) : limits_(limits) { limits_.validate(); }

    const ExposureLimits& limits() const noexcept { return limits_; }

    Cell cell_of(const Position3& p) const {
        auto q = [&](double v) { return static_cast<std::int64_t>(std::floor(v / limits_.cell_size)); };
        return {q(p.x), q(p.y), q(p.z)};
    }

    /// Adds dwell (s) at position. A contact event always demands shutoff
    /// within contact_shutoff; exceeding max_dwell is reported independently.
    /// When both apply, status is limit_exceeded and must_shutoff is still set.
    ExposureVerdict record_exposure(const Position3& position, double dwell, bool contact = false) {
        detail::require(dwell >= 0 && std::isfinite(dwell), "dwell must be finite and >= 0");
        double& acc = ledger_[cell_of(position)];
        acc += dwell;
        total_ += dwell;

        ExposureVerdict v;
        v.accumulated = acc;
        v.limit_exceeded = acc > limits_.max_dwell;
        v.must_shutoff = contact || v.limit_exceeded;
        if (v.must_shutoff) v.shutoff_deadline = limits_.contact_shutoff;
        if (v.limit_exceeded) v.status = ExposureStatus::limit_exceeded;
        else if (contact) v.status = ExposureStatus::must_shutoff;
        return v;
    }

    double accumulated(const Position3& position) const {
        auto it = ledger_.find(cell_of(position));
        return it == ledger_.end() ? 0.0 : it->second;
    }

    double total_exposure() const noexcept { return total_; }
    const std::map<Cell, double>& ledger() const noexcept { return ledger_; }

private:
    ExposureLimits limits_;
    std::map<Cell, double> ledger_;
    double total_ = 0.0;
};

} // namespace fsvd
