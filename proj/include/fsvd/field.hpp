#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fsvd/error.hpp"
#include "fsvd/fft.hpp"

namespace fsvd {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps an angle into [0, 2pi).
inline double wrap_phase(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0) r += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2pi.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

// Square n x n grid, row-major, origin top-left; element (x, y) is column x, row y.
template <typename T>
class Grid {
public:
    Grid() = default;
    explicit Grid(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}
    Grid(std::size_t n, std::vector<T> data) : n_(n), data_(std::move(data)) {
        detail::require(data_.size() == n_ * n_, "grid data size must be n*n");
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t count() const noexcept { return data_.size(); }

    T& operator()(std::size_t x, std::size_t y) { return data_[y * n_ + x]; }
    const T& operator()(std::size_t x, std::size_t y) const { return data_[y * n_ + x]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

inline void validate_grid_size(std::size_t n) {
    detail::require(n >= 2 && n % 2 == 0, "grid size must be an even number >= 2");
}

struct HologramGeometry {
    std::size_t size_n = 256;
    double pixel_pitch = 20e-6;  // m
    double wavelength = 800e-9;  // m

    void validate() const {
        validate_grid_size(size_n);
        detail::require(pixel_pitch > 0, "pixel pitch must be > 0");
        detail::require(wavelength > 0, "wavelength must be > 0");
    }
};

// Phase-only SLM pattern. Phases are kept wrapped into [0, 2pi).
class PhaseHologram {
public:
    PhaseHologram() = default;

    PhaseHologram(std::size_t n, double pixel_pitch, std::vector<double> phases)
        : pitch_(pixel_pitch), phases_(n, std::move(phases)) {
        validate_grid_size(n);
        detail::require(pixel_pitch > 0, "pixel pitch must be > 0");
        for (auto& p : phases_.values()) {
            detail::require(std::isfinite(p), "phase values must be finite");
            p = wrap_phase(p);
        }
    }

    static PhaseHologram zeros(std::size_t n, double pixel_pitch = 20e-6) {
        return {n, pixel_pitch, std::vector<double>(n * n, 0.0)};
    }

    std::size_t size() const noexcept { return phases_.size(); }
    double pixel_pitch() const noexcept { return pitch_; }
    double operator()(std::size_t x, std::size_t y) const { return phases_(x, y); }
    std::span<const double> phases() const noexcept { return phases_.values(); }

    bool operator==(const PhaseHologram&) const = default;

private:
    double pitch_ = 20e-6;
    Grid<double> phases_;
};

enum class Plane { hologram, reconstruction };

class ComplexField {
public:
    ComplexField() = default;
    ComplexField(std::size_t n, double pixel_pitch, Plane plane, std::vector<cplx> values)
        : pitch_(pixel_pitch), plane_(plane), values_(n, std::move(values)) {
        detail::require(n >= 1, "field size must be >= 1");
    }
    ComplexField(std::size_t n, double pixel_pitch, Plane plane)
        : pitch_(pixel_pitch), plane_(plane), values_(n, cplx{0.0, 0.0}) {}

    // Plane-wave illumination of a phase-only hologram with constant amplitude.
    static ComplexField from_hologram(const PhaseHologram& holo, double amplitude = 1.0) {
        ComplexField f(holo.size(), holo.pixel_pitch(), Plane::hologram);
        auto out = f.values_.values();
        auto in = holo.phases();
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::polar(amplitude, in[i]);
        return f;
    }

    std::size_t size() const noexcept { return values_.size(); }
    double pixel_pitch() const noexcept { return pitch_; }
    Plane plane() const noexcept { return plane_; }

    cplx& operator()(std::size_t x, std::size_t y) { return values_(x, y); }
    const cplx& operator()(std::size_t x, std::size_t y) const { return values_(x, y); }
    std::span<cplx> values() noexcept { return values_.values(); }
    std::span<const cplx> values() const noexcept { return values_.values(); }

    double intensity(std::size_t x, std::size_t y) const { return std::norm(values_(x, y)); }

    Grid<double> intensities() const {
        Grid<double> out(size());
        auto in = values();
        auto o = out.values();
        for (std::size_t i = 0; i < in.size(); ++i) o[i] = std::norm(in[i]);
        return out;
    }

    double total_energy() const {
        double sum = 0.0;
        for (const auto& v : values()) sum += std::norm(v);
        return sum;
    }

private:
    double pitch_ = 20e-6;
    Plane plane_ = Plane::hologram;
    Grid<cplx> values_;
};

// Circular shift that moves index 0 to the grid centre (n/2, n/2).
template <typename T>
Grid<T> fftshift(const Grid<T>& in) {
    const std::size_t n = in.size();
    Grid<T> out(n);
    const std::size_t h = n / 2;
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) out((x + h) % n, (y + h) % n) = in(x, y);
    return out;
}

} // namespace fsvd
