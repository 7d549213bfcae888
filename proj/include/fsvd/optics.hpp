#pragma once

// Scalar focal-spot geometry, peak intensity and plasma-threshold checks.
//
// Lengths, times and energies are SI. Areas and intensities use cm^2 and
// W/cm^2 because that is how breakdown thresholds are quoted.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "fsvd/error.hpp"

namespace fsvd {

inline constexpr double kCm2PerM2 = 1.0e4;

struct OpticalTrain {
    double wavelength = 800e-9;     // m
    double beam_width_a = 10e-3;    // m, beam diameter entering the final lens
    double focal_length_r = 40e-3;  // m

    void validate() const {
        detail::require(wavelength > 0 && std::isfinite(wavelength), "wavelength must be > 0");
        detail::require(beam_width_a > 0 && std::isfinite(beam_width_a), "beam width must be > 0");
        detail::require(focal_length_r > 0 && std::isfinite(focal_length_r), "focal length must be > 0");
    }

    // Beam width must pass every declared lens stage aperture.
    void validate(double stage_aperture) const {
        validate();
        detail::require(beam_width_a <= stage_aperture, "beam width exceeds lens stage aperture");
    }
};

struct LaserProfile {
    double pulse_energy = 2e-3;       // J
    double pulse_width = 30e-15;      // s
    double repetition_rate = 1e3;     // Hz
    double wavelength = 800e-9;       // m

    double average_power() const { return pulse_energy * repetition_rate; }
    double pulse_period() const { return 1.0 / repetition_rate; }

    void validate() const {
        detail::require(pulse_energy > 0, "pulse energy must be > 0");
        detail::require(pulse_width > 0, "pulse width must be > 0");
        detail::require(repetition_rate > 0, "repetition rate must be > 0");
        detail::require(wavelength > 0, "wavelength must be > 0");
    }
};

struct FocalSpot {
    double lateral_diameter_wf = 0;  // m
    double axial_length_wd = 0;      // m
    double area_cm2 = 0;
};

/// Diffraction-limited focal diameter perpendicular to the beam: 2 lambda r / a.
inline double lateral_spot_diameter(const OpticalTrain& train) {
    train.validate();
    return 2.0 * train.wavelength * train.focal_length_r / train.beam_width_a;
}

/// Focal length along the beam, 4 lambda (r/a)^2. Follows from a : w_f = r : w_d/2.
inline double axial_spot_length(const OpticalTrain& train) {
    train.validate();
    const double ratio = train.focal_length_r / train.beam_width_a;
    return 4.0 * train.wavelength * ratio * ratio;
}

/// Circular cross-section of diameter wf (m), in cm^2.
inline double focal_area(double wf) {
    detail::require(wf > 0 && std::isfinite(wf), "spot diameter must be > 0");
    const double radius = 0.5 * wf;
    return std::numbers::pi * radius * radius * kCm2PerM2;
}

inline FocalSpot focal_spot(const OpticalTrain& train) {
    FocalSpot spot;
    spot.lateral_diameter_wf = lateral_spot_diameter(train);
    spot.axial_length_wd = axial_spot_length(train);
    spot.area_cm2 = focal_area(spot.lateral_diameter_wf);
    return spot;
}

/// Peak intensity in W/cm^2 of a pulse spread over area_cm2: E / (tau * A).
inline double peak_intensity(const LaserProfile& laser, double area_cm2) {
    detail::require(area_cm2 > 0 && std::isfinite(area_cm2), "focal area must be > 0");
    detail::require(laser.pulse_width > 0, "pulse width must be > 0");
    return laser.pulse_energy / laser.pulse_width / area_cm2;
}

enum class Medium { air, water, fluorescent };

// Breakdown / emission onset per medium, W/cm^2. Air uses the operational
// 1 PW/cm^2 figure; tunnel ionization already sets in around 1e14 W/cm^2.
struct MediumThresholds {
    double air = 1e15;
    double water = 1e12;
    double fluorescent = 1e6;

    double operator()(Medium m) const {
        switch (m) {
        case Medium::air: return air;
        case Medium::water: return water;
        case Medium::fluorescent: return fluorescent;
        }
        throw DomainError("unknown medium");
    }
};

inline constexpr double kAirIonizationOnset = 1e14;  // W/cm^2

inline Medium parse_medium(std::string_view name) {
    if (name == "air") return Medium::air;
    if (name == "water") return Medium::water;
    if (name == "fluorescent") return Medium::fluorescent;
    throw DomainError("unknown medium '" + std::string(name) + "' (expected air, water, fluorescent)");
}

inline std::string_view to_string(Medium m) {
    switch (m) {
    case Medium::air: return "air";
    case Medium::water: return "water";
    case Medium::fluorescent: return "fluorescent";
    }
    return "unknown";
}

inline bool exceeds_plasma_threshold(double intensity, Medium medium,
                                     const MediumThresholds& thresholds = {}) {
    detail::require(intensity >= 0 && !std::isnan(intensity), "intensity must be >= 0");
    return intensity > thresholds(medium);
}

} // namespace fsvd
