#ifndef WCOH_FFT_HPP
#define WCOH_FFT_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wcoh::fft {

using cplx = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) { return std::bit_ceil(n == 0 ? std::size_t{1} : n); }

/// In-place iterative radix-2 transform. Size must be a power of two.
/// The inverse is scaled by 1/N.
inline void transform(std::span<cplx> a, bool inverse = false)
{
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!std::has_single_bit(n)) throw std::invalid_argument("fft size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // twiddles computed directly rather than by repeated multiplication
        std::vector<cplx> w(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            w[k] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < half; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= s;
    }
}

inline std::vector<cplx> forward(std::vector<cplx> a)
{
    transform(a, false);
    return a;
}

inline std::vector<cplx> inverse(std::vector<cplx> a)
{
    transform(a, true);
    return a;
}

} // namespace wcoh::fft

#endif // WCOH_FFT_HPP
