#pragma once

// Phase-only hologram synthesis primitives and scalar reconstruction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "fsvd/error.hpp"
#include "fsvd/fft.hpp"
#include "fsvd/field.hpp"

namespace fsvd {

/// Far-field (Fourier-plane) reconstruction of a hologram lit by a unit plane wave.
///
/// U_r(vx, vy) = (1/N) sum_{x,y} exp(i phi_h(x,y)) exp(-i 2pi (x vx + y vy)/N).
/// The 1/N factor makes the transform unitary, so the reconstruction carries
/// the same total energy (N^2) as the hologram plane. Index (0, 0) is DC.
inline ComplexField reconstruct(const PhaseHologram& holo) {
    ComplexField field = ComplexField::from_hologram(holo);
    fft2d(field.values(), field.size(), FftDirection::forward);
    return ComplexField(field.size(), holo.pixel_pitch(), Plane::reconstruction,
                        {field.values().begin(), field.values().end()});
}

inline ComplexField reconstruct(const ComplexField& hologram_field) {
    std::vector<cplx> v(hologram_field.values().begin(), hologram_field.values().end());
    fft2d(v, hologram_field.size(), FftDirection::forward);
    return ComplexField(hologram_field.size(), hologram_field.pixel_pitch(), Plane::reconstruction, std::move(v));
}

/// Linear phase ramp 2pi (cx x + cy y)/N. Integer cycle counts steer the
/// reconstruction into pixel (cx, cy).
inline PhaseHologram blazed_grating(std::size_t n, double cycles_x, double cycles_y,
                                    double pixel_pitch = 20e-6) {
    validate_grid_size(n);
    std::vector<double> phases(n * n);
    const double scale = kTwoPi / static_cast<double>(n);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x)
            phases[y * n + x] = scale * (cycles_x * static_cast<double>(x) + cycles_y * static_cast<double>(y));
    return {n, pixel_pitch, std::move(phases)};
}

/// Quadratic lens phase k (X^2 + Y^2) / (2 f), X and Y measured from the grid
/// centre pixel (n/2, n/2). Negative f gives a diverging lens.
inline PhaseHologram fresnel_lens_phase(std::size_t n, double pixel_pitch, double wavelength, double focal_f) {
    validate_grid_size(n);
    detail::require(focal_f != 0.0 && std::isfinite(focal_f), "focal length must be non-zero");
    detail::require(pixel_pitch > 0 && wavelength > 0, "pixel pitch and wavelength must be > 0");
    const double k = kTwoPi / wavelength;
    const double c = static_cast<double>(n / 2);
    std::vector<double> phases(n * n);
    for (std::size_t y = 0; y < n; ++y) {
        const double Y = (static_cast<double>(y) - c) * pixel_pitch;
        for (std::size_t x = 0; x < n; ++x) {
            const double X = (static_cast<double>(x) - c) * pixel_pitch;
            phases[y * n + x] = k * (X * X + Y * Y) / (2.0 * focal_f);
        }
    }
    return {n, pixel_pitch, std::move(phases)};
}

/// Pixelwise phase sum, wrapped.
inline PhaseHologram add_phases(const PhaseHologram& a, const PhaseHologram& b) {
    detail::require(a.size() == b.size(), "holograms must share geometry");
    std::vector<double> out(a.phases().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.phases()[i] + b.phases()[i];
    return {a.size(), a.pixel_pitch(), std::move(out)};
}

/// Complex amplitude amplitude * exp(i (phase + offset)) on the hologram plane.
inline ComplexField hologram_component(const PhaseHologram& phase, double amplitude = 1.0, double offset = 0.0) {
    ComplexField f(phase.size(), phase.pixel_pitch(), Plane::hologram);
    auto out = f.values();
    auto in = phase.phases();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::polar(amplitude, in[i] + offset);
    return f;
}

/// Sums hologram-plane complex amplitudes and keeps only the phase, as a
/// phase-only modulator would. Pixels whose sum vanishes get phase 0.
inline PhaseHologram superpose(std::span<const ComplexField> components) {
    detail::require(!components.empty(), "superpose needs at least one component");
    const auto n = components.front().size();
    const auto pitch = components.front().pixel_pitch();
    std::vector<cplx> sum(n * n, cplx{0.0, 0.0});
    for (const auto& c : components) {
        detail::require(c.size() == n && c.pixel_pitch() == pitch, "components must share geometry");
        detail::require(c.plane() == Plane::hologram, "components must be on the hologram plane");
        auto v = c.values();
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    }
    std::vector<double> phases(n * n);
    for (std::size_t i = 0; i < sum.size(); ++i) phases[i] = sum[i] == cplx{0.0, 0.0} ? 0.0 : std::arg(sum[i]);
    return {n, pitch, std::move(phases)};
}

/// Single-step Fresnel propagation by the transfer-function method.
///
/// Sign convention matches fresnel_lens_phase: a lens with f > 0 converges at
/// distance f. The transfer function is a pure phase, so energy is preserved.
/// Sampling is adequate for distance <= N * pitch^2 / wavelength.
inline ComplexField fresnel_propagate(const ComplexField& field, double distance, double wavelength, double pixel_pitch) {
    detail::require(distance > 0 && std::isfinite(distance), "propagation distance must be > 0");
    detail::require(wavelength > 0 && pixel_pitch > 0, "wavelength and pixel pitch must be > 0");
    const auto n = field.size();
    std::vector<cplx> v(field.values().begin(), field.values().end());
    fft2d(v, n, FftDirection::forward);

    const double df = 1.0 / (static_cast<double>(n) * pixel_pitch);
    const double coeff = std::numbers::pi * wavelength * distance;
    const double k = kTwoPi / wavelength;
    const cplx carrier = std::polar(1.0, -std::fmod(k * distance, kTwoPi));
    for (std::size_t y = 0; y < n; ++y) {
        const double fy = fft_frequency(y, n) * static_cast<double>(n) * df;
        for (std::size_t x = 0; x < n; ++x) {
            const double fx = fft_frequency(x, n) * static_cast<double>(n) * df;
            v[y * n + x] *= carrier * std::polar(1.0, coeff * (fx * fx + fy * fy));
        }
    }
    fft2d(v, n, FftDirection::inverse);
    return ComplexField(n, pixel_pitch, field.plane(), std::move(v));
}

/// min/max of a set of spot intensities; 1 is perfectly uniform.
inline double uniformity(std::span<const double> intensities) {
    detail::require(!intensities.empty(), "uniformity needs at least one intensity");
    for (double v : intensities) detail::require(v >= 0 && std::isfinite(v), "intensities must be finite and >= 0");
    const auto [lo, hi] = std::minmax_element(intensities.begin(), intensities.end());
    detail::require(*hi > 0, "uniformity undefined when every intensity is zero");
    return *lo / *hi;
}

} // namespace fsvd
