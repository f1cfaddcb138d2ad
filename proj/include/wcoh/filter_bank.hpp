#ifndef WCOH_FILTER_BANK_HPP
#define WCOH_FILTER_BANK_HPP

#include "error.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wcoh {

/// Orthonormal two-channel filter bank defined by its scaling (lowpass)
/// filter; the highpass is the alternating flip g[k] = (-1)^k h[L-1-k].
struct OrthoFilter {
    std::string name;
    std::vector<double> lowpass;

    [[nodiscard]] std::vector<double> highpass() const
    {
        const std::size_t len = lowpass.size();
        std::vector<double> g(len);
        for (std::size_t k = 0; k < len; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[len - 1 - k];
        return g;
    }

    /// Daubechies, three vanishing moments (6 taps).
    static OrthoFilter db3()
    {
        return {"db3",
                {0.33267055295008263, 0.80689150931109257, 0.45987750211849154, -0.13501102001025458,
                 -0.08544127388202666, 0.035226291885709536}};
    }

    static OrthoFilter haar()
    {
        return {"haar", {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0}};
    }
};

namespace detail {

inline std::size_t wrap(std::size_t i, std::size_t n) { return i % n; }

} // namespace detail

/// One periodic analysis step: returns (approximation, detail), each of half length.
inline std::pair<std::vector<double>, std::vector<double>> analysis_step(std::span<const double> x,
                                                                          const OrthoFilter& f)
{
    const std::size_t n = x.size();
    detail::require(n >= 2 && n % 2 == 0, "analysis step needs an even length >= 2");
    const auto& h = f.lowpass;
    const auto g = f.highpass();
    std::vector<double> a(n / 2, 0.0), d(n / 2, 0.0);
    for (std::size_t i = 0; i < n / 2; ++i)
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double v = x[detail::wrap(2 * i + k, n)];
            a[i] += h[k] * v;
            d[i] += g[k] * v;
        }
    return {std::move(a), std::move(d)};
}

/// Inverse of analysis_step (adjoint of the orthogonal periodic bank).
inline std::vector<double> synthesis_step(std::span<const double> a, std::span<const double> d, const OrthoFilter& f)
{
    detail::require(a.size() == d.size() && !a.empty(), "synthesis step needs equal non-empty halves");
    const std::size_t n = 2 * a.size();
    const auto& h = f.lowpass;
    const auto g = f.highpass();
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < h.size(); ++k) {
            const std::size_t m = detail::wrap(2 * i + k, n);
            x[m] += h[k] * a[i] + g[k] * d[i];
        }
    return x;
}

/// Extends x periodically to the next multiple of `block`.
inline std::vector<double> periodic_pad(std::span<const double> x, std::size_t block)
{
    const std::size_t n = x.size();
    const std::size_t padded = (n + block - 1) / block * block;
    std::vector<double> out(padded);
    for (std::size_t i = 0; i < padded; ++i) out[i] = x[i % n];
    return out;
}

/// Multilevel periodic DWT. details[0] is the finest level.
struct Decomposition {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    std::size_t original_length = 0;
    OrthoFilter filter;

    [[nodiscard]] std::size_t levels() const noexcept { return details.size(); }
};

inline Decomposition dwt_forward(std::span<const double> x, std::size_t level,
                                 const OrthoFilter& f = OrthoFilter::db3())
{
    detail::require(level >= 1, "decomposition level must be >= 1");
    const std::size_t block = std::size_t{1} << level;
    detail::require(x.size() >= block, "series shorter than 2^level");
    Decomposition dec;
    dec.original_length = x.size();
    dec.filter = f;
    auto cur = periodic_pad(x, block);
    for (std::size_t l = 0; l < level; ++l) {
        auto [a, d] = analysis_step(cur, f);
        dec.details.push_back(std::move(d));
        cur = std::move(a);
    }
    dec.approx = std::move(cur);
    return dec;
}

inline std::vector<double> dwt_inverse(const Decomposition& dec)
{
    auto cur = dec.approx;
    for (std::size_t l = dec.details.size(); l-- > 0;) cur = synthesis_step(cur, dec.details[l], dec.filter);
    cur.resize(dec.original_length);
    return cur;
}

} // namespace wcoh

#endif // WCOH_FILTER_BANK_HPP
