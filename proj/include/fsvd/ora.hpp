#pragma once

// Optimal-rotation-angle (ORA) synthesis of multi-spot phase holograms.
//
// Each target r sits on one reconstruction pixel. Every iteration evaluates
// the target amplitudes U_r = sum_h a_h exp(i(phi_hr + phi_h)) directly
// (O(N^2 * targets), no full-plane transform), adapts per-target weights from
// the achieved intensities, and rotates every hologram pixel by the angle that
// best aligns its contributions with the weighted target phases:
//
//   S1 + i S2 = sum_r w_r a_h exp(i(phi_r - phi_hr - phi_h)),
//   dphi_h    = atan2(S2, S1),
//   w_r      <- w_r (I_r^d / I_r)^alpha.
//
// All pixel rotations of an iteration are computed from the same state and
// applied together, and field sums are reduced per row in a fixed order, so
// the result is bit-identical for any sweep order or worker count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fsvd/cgh.hpp"
#include "fsvd/error.hpp"
#include "fsvd/field.hpp"

namespace fsvd {

struct SpotTarget {
    int vx = 0;
    int vy = 0;
    double desired_intensity = 1.0;      // relative units
    std::optional<double> axial_focus_f; // m, lens term added after optimisation
};

struct OraParams {
    int max_iterations = 100;
    double uniformity_tolerance = 0.02;  // max relative deviation from the scaled desired pattern
    double alpha = 0.2;
    std::uint64_t rng_seed = 0;
    unsigned threads = 1;                // 1 = strict single-threaded mode

    void validate() const {
        detail::require(max_iterations >= 1, "max_iterations must be >= 1");
        detail::require(alpha > 0 && alpha <= 1, "alpha must lie in (0, 1]");
        detail::require(uniformity_tolerance > 0, "uniformity tolerance must be > 0");
        detail::require(threads >= 1, "threads must be >= 1");
    }
};

struct OraReport {
    std::vector<double> objective;           // sum of target intensities, one entry per evaluation
    std::vector<double> target_intensities;  // final |U_r|^2, same order as the targets
    std::vector<double> weights;             // final w_r, normalised to mean 1
    int iterations = 0;                      // phase updates applied
    bool converged = false;
    double max_relative_error = 0.0;
    double scale = 0.0;                      // least-squares fit of achieved onto desired
    double uniformity = 0.0;                 // min/max of achieved intensities
    double efficiency = 0.0;                 // fraction of total energy landing on targets
    bool axial_terms_applied = false;
};

struct OraResult {
    PhaseHologram hologram;
    OraReport report;
};

inline void validate_targets(std::span<const SpotTarget> targets, std::size_t n) {
    detail::require(!targets.empty(), "at least one spot target is required");
    std::set<std::pair<int, int>> seen;
    const int ni = static_cast<int>(n);
    for (const auto& t : targets) {
        const std::string where = "(" + std::to_string(t.vx) + ", " + std::to_string(t.vy) + ")";
        detail::require(t.vx >= 0 && t.vx < ni && t.vy >= 0 && t.vy < ni, "spot " + where + " lies outside the reconstruction grid");
        detail::require(t.desired_intensity > 0 && std::isfinite(t.desired_intensity),
                        "spot " + where + " must have a desired intensity > 0");
        if (t.axial_focus_f) detail::require(*t.axial_focus_f != 0.0, "spot " + where + " has a zero axial focal length");
        detail::require(seen.emplace(t.vx, t.vy).second, "duplicate spot target " + where);
    }
}

// Least-squares scale s minimising sum (I - s I^d)^2, and the worst relative
// deviation max |I - s I^d| / (s I^d).
inline std::pair<double, double> fit_to_desired(std::span<const double> achieved, std::span<const double> desired) {
    double num = 0.0, den = 0.0;
    for (std::size_t r = 0; r < achieved.size(); ++r) {
        num += achieved[r] * desired[r];
        den += desired[r] * desired[r];
    }
    const double s = num / den;
    if (!(s > 0)) return {0.0, std::numeric_limits<double>::infinity()};
    double worst = 0.0;
    for (std::size_t r = 0; r < achieved.size(); ++r)
        worst = std::max(worst, std::abs(achieved[r] - s * desired[r]) / (s * desired[r]));
    return {s, worst};
}

namespace detail {

// Runs fn(row_begin, row_end, worker) over [0, rows) split into contiguous blocks.
template <typename Fn>
void parallel_rows(std::size_t rows, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows)));
    if (workers == 1) {
        fn(std::size_t{0}, rows, 0u);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t b = rows * w / workers;
        const std::size_t e = rows * (w + 1) / workers;
        pool.emplace_back([&fn, b, e, w] { fn(b, e, w); });
    }
    for (auto& t : pool) t.join();
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
inline double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

class OraSolver {
public:
    OraSolver(std::span<const SpotTarget> targets, std::size_t n, const OraParams& params)
        : n_(n), m_(targets.size()), params_(params), twiddle_(n), phase_(n * n), unit_(n * n),
          weights_(m_, 1.0), target_phase_(m_, 0.0), intensity_(m_, 0.0), desired_(m_) {
        for (std::size_t k = 0; k < n; ++k)
            twiddle_[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(n));
        for (std::size_t r = 0; r < m_; ++r) {
            vx_.push_back(static_cast<std::size_t>(targets[r].vx));
            vy_.push_back(static_cast<std::size_t>(targets[r].vy));
            desired_[r] = targets[r].desired_intensity;
        }
        std::mt19937_64 gen(params.rng_seed);
        for (std::size_t h = 0; h < n * n; ++h) set_phase(h, kTwoPi * unit_uniform(gen));
    }

    // exp(i phi_hr) for target r at pixel (x, y): the discrete Fourier kernel.
    cplx kernel(std::size_t r, std::size_t x, std::size_t y) const {
        return twiddle_[(x * vx_[r] + y * vy_[r]) % n_];
    }

    void evaluate() {
        std::vector<cplx> rows(n_ * m_, cplx{});
        parallel_rows(n_, params_.threads, [&](std::size_t yb, std::size_t ye, unsigned) {
            for (std::size_t y = yb; y < ye; ++y) {
                cplx* acc = rows.data() + y * m_;
                for (std::size_t x = 0; x < n_; ++x) {
                    const cplx e = unit_[y * n_ + x];
                    for (std::size_t r = 0; r < m_; ++r) acc[r] += e * kernel(r, x, y);
                }
            }
        });
        const double norm = 1.0 / static_cast<double>(n_);
        for (std::size_t r = 0; r < m_; ++r) {
            cplx u{};
            for (std::size_t y = 0; y < n_; ++y) u += rows[y * m_ + r];
            u *= norm;
            intensity_[r] = std::norm(u);
            target_phase_[r] = std::arg(u);
        }
    }

    void update_weights(double scale) {
        const double floor_i = 1e-300;
        double mean = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            weights_[r] *= std::pow(scale * desired_[r] / std::max(intensity_[r], floor_i), params_.alpha);
            mean += weights_[r];
        }
        mean /= static_cast<double>(m_);
        for (auto& w : weights_) w /= mean;
    }

    // Jacobi-style rotation of every pixel from the current state.
    void rotate_pixels() {
        std::vector<cplx> drive(m_);
        for (std::size_t r = 0; r < m_; ++r) drive[r] = std::polar(weights_[r], target_phase_[r]);
        std::vector<double> next(n_ * n_);
        parallel_rows(n_, params_.threads, [&](std::size_t yb, std::size_t ye, unsigned) {
            for (std::size_t y = yb; y < ye; ++y)
                for (std::size_t x = 0; x < n_; ++x) {
                    const std::size_t h = y * n_ + x;
                    cplx z{};
                    for (std::size_t r = 0; r < m_; ++r) z += drive[r] * std::conj(kernel(r, x, y));
                    const cplx s = z * std::conj(unit_[h]);  // a_h = 1
                    const double s1 = s.real();
                    const double s2 = s.imag();
                    const double delta = (s1 == 0.0 && s2 == 0.0) ? 0.0 : std::atan2(s2, s1);
                    next[h] = phase_[h] + delta;
                }
        });
        for (std::size_t h = 0; h < next.size(); ++h) set_phase(h, next[h]);
    }

    // Final composition with a per-target lens term: each target contributes its
    // weighted, phased grating times exp(i phi_lens).
    void compose_with_lenses(std::span<const SpotTarget> targets, const HologramGeometry& geom) {
        std::vector<PhaseHologram> lenses(m_);
        for (std::size_t r = 0; r < m_; ++r)
            if (targets[r].axial_focus_f)
                lenses[r] = fresnel_lens_phase(n_, geom.pixel_pitch, geom.wavelength, *targets[r].axial_focus_f);
        for (std::size_t y = 0; y < n_; ++y)
            for (std::size_t x = 0; x < n_; ++x) {
                cplx z{};
                for (std::size_t r = 0; r < m_; ++r) {
                    cplx c = std::polar(weights_[r], target_phase_[r]) * std::conj(kernel(r, x, y));
                    if (targets[r].axial_focus_f) c *= std::polar(1.0, lenses[r](x, y));
                    z += c;
                }
                set_phase(y * n_ + x, z == cplx{} ? 0.0 : std::arg(z));
            }
    }

    std::span<const double> intensities() const { return intensity_; }
    std::span<const double> desired() const { return desired_; }
    std::span<const double> weights() const { return weights_; }
    std::vector<double> phases() const { return phase_; }

private:
    void set_phase(std::size_t h, double phi) {
        phase_[h] = wrap_phase(phi);
        unit_[h] = std::polar(1.0, phase_[h]);
    }

    std::size_t n_;
    std::size_t m_;
    OraParams params_;
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> vx_, vy_;
    std::vector<double> phase_;
    std::vector<cplx> unit_;
    std::vector<double> weights_;
    std::vector<double> target_phase_;
    std::vector<double> intensity_;
    std::vector<double> desired_;
};

} // namespace detail

/// Optimises a phase-only hologram whose Fourier reconstruction puts the
/// requested relative intensities on the target pixels.
///
/// Starts from uniformly random phases (seeded) and unit weights. Stops once
/// every target is within uniformity_tolerance of the least-squares-scaled
/// desired pattern and the summed target intensity changed by less than the
/// same relative tolerance, or after max_iterations updates with
/// converged = false.
inline OraResult ora_optimize(std::span<const SpotTarget> targets, const HologramGeometry& geometry,
                              const OraParams& params = {}) {
    geometry.validate();
    params.validate();
    validate_targets(targets, geometry.size_n);

    detail::OraSolver solver(targets, geometry.size_n, params);
    OraReport report;
    for (int iter = 0;; ++iter) {
        solver.evaluate();
        double objective = 0.0;
        for (double v : solver.intensities()) objective += v;
        report.objective.push_back(objective);

        const auto [scale, worst] = fit_to_desired(solver.intensities(), solver.desired());
        report.scale = scale;
        report.max_relative_error = worst;
        report.iterations = iter;
        // A lone target always fits its own scale, so convergence also needs
        // the summed target intensity to have levelled off.
        const bool settled = iter >= 1 &&
            std::abs(objective - report.objective[report.objective.size() - 2]) <= params.uniformity_tolerance * objective;
        if (settled && worst <= params.uniformity_tolerance) {
            report.converged = true;
            break;
        }
        if (iter == params.max_iterations) break;
        solver.update_weights(scale > 0 ? scale : 1.0);
        solver.rotate_pixels();
    }

    report.target_intensities.assign(solver.intensities().begin(), solver.intensities().end());
    report.weights.assign(solver.weights().begin(), solver.weights().end());
    report.uniformity = uniformity(report.target_intensities);
    const double total = static_cast<double>(geometry.size_n * geometry.size_n);
    report.efficiency = report.objective.back() / total;

    const bool axial = std::any_of(targets.begin(), targets.end(), [](const SpotTarget& t) { return t.axial_focus_f.has_value(); });
    if (axial) {
        solver.compose_with_lenses(targets, geometry);
        report.axial_terms_applied = true;
    }
    return {PhaseHologram(geometry.size_n, geometry.pixel_pitch, solver.phases()), std::move(report)};
}

} // namespace fsvd
