#pragma once

// Unitary 2-D discrete Fourier transforms on square row-major grids.
//
// Power-of-two sides use an iterative radix-2 FFT; any other side falls back
// to a separable direct DFT with a precomputed twiddle table, which is what
// the 768x768 SLM geometry needs.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fsvd/error.hpp"

namespace fsvd {

using cplx = std::complex<double>;

enum class FftDirection { forward = -1, inverse = +1 };

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

namespace detail {

inline void fft_radix2(std::span<cplx> a, FftDirection dir) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = static_cast<double>(static_cast<int>(dir));
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // Twiddles per stage from direct evaluation, not recurrence, so the
        // rounding error stays at a few ulps for large n.
        std::vector<cplx> w(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            w[k] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

class DirectDft {
public:
    DirectDft(std::size_t n, FftDirection dir) : n_(n), twiddle_(n), scratch_(n) {
        const double sign = static_cast<double>(static_cast<int>(dir));
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    void operator()(std::span<cplx> a) {
        for (std::size_t k = 0; k < n_; ++k) {
            cplx acc{0.0, 0.0};
            std::size_t idx = 0;
            for (std::size_t j = 0; j < n_; ++j) {
                acc += a[j] * twiddle_[idx];
                idx += k;
                if (idx >= n_) idx -= n_;
            }
            scratch_[k] = acc;
        }
        std::copy(scratch_.begin(), scratch_.end(), a.begin());
    }

private:
    std::size_t n_;
    std::vector<cplx> twiddle_;
    std::vector<cplx> scratch_;
};

} // namespace detail

// In-place 2-D transform of an n x n row-major grid, scaled by 1/n so the
// transform is unitary (sum of |.|^2 preserved).
inline void fft2d(std::span<cplx> data, std::size_t n, FftDirection dir) {
    detail::require(n >= 1 && data.size() == n * n, "fft2d: data size must be n*n");
    const bool fast = is_power_of_two(n);
    std::vector<cplx> column(n);
    detail::DirectDft dft(fast ? 1 : n, dir);

    auto transform = [&](std::span<cplx> line) {
        if (fast) detail::fft_radix2(line, dir);
        else dft(line);
    };

    for (std::size_t y = 0; y < n; ++y) transform(data.subspan(y * n, n));
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) column[y] = data[y * n + x];
        transform(column);
        for (std::size_t y = 0; y < n; ++y) data[y * n + x] = column[y];
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
}

// Frequency of index k on an n-point grid, in cycles per sample, in [-1/2, 1/2).
inline double fft_frequency(std::size_t k, std::size_t n) {
    const auto ki = static_cast<long long>(k);
    const auto ni = static_cast<long long>(n);
    return static_cast<double>(ki < (ni + 1) / 2 ? ki : ki - ni) / static_cast<double>(n);
}

} // namespace fsvd
