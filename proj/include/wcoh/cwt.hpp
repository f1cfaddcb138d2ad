#ifndef WCOH_CWT_HPP
#define WCOH_CWT_HPP

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace wcoh {

using cplx = std::complex<double>;

/// Morlet centre frequency.
inline constexpr double kMorletOmega0 = 6.0;

/// Equivalent Fourier period per unit scale for a Morlet of centre frequency omega0.
inline double morlet_fourier_factor(double omega0 = kMorletOmega0)
{
    return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

struct ScaleGrid {
    double s0 = 0.0;
    double dj = 0.0;
    std::size_t num_scales = 0;
    std::vector<double> scales;
    double fourier_factor = 0.0;
    /// Series length the grid was built for.
    std::size_t n_times = 0;
    double dt = 1.0;

    friend bool operator==(const ScaleGrid&, const ScaleGrid&) = default;
};

/// Dyadic scale grid s_j = s0 * 2^(j*dj). Defaults: s0 = 2*dt, dj = 1/12.
inline ScaleGrid make_scale_grid(std::size_t n, double dt, std::optional<double> s0 = {},
                                 std::optional<double> dj = {})
{
    if (n < kMinSeriesLength) throw UsageError("scale grid needs at least 8 samples");
    detail::require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    ScaleGrid g;
    g.s0 = s0.value_or(2.0 * dt);
    g.dj = dj.value_or(1.0 / 12.0);
    detail::require(g.s0 > 0.0 && g.dj > 0.0, "s0 and dj must be positive");
    const double octaves = std::log2(static_cast<double>(n) * dt / g.s0);
    detail::require(octaves >= 0.0, "s0 exceeds the series span");
    // the epsilon keeps exact multiples (e.g. 9 / (1/12) = 108) from rounding down
    g.num_scales = static_cast<std::size_t>(std::floor(octaves / g.dj + 1e-9)) + 1;
    g.scales.resize(g.num_scales);
    for (std::size_t j = 0; j < g.num_scales; ++j)
        g.scales[j] = g.s0 * std::exp2(static_cast<double>(j) * g.dj);
    g.fourier_factor = morlet_fourier_factor();
    g.n_times = n;
    g.dt = dt;
    return g;
}

/// Largest trustworthy scale at each time: the Morlet e-folding time sqrt(2)*s
/// must fit between the sample and the nearer edge.
inline std::vector<double> cone_of_influence(std::size_t n, double dt)
{
    std::vector<double> coi(n);
    for (std::size_t t = 0; t < n; ++t)
        coi[t] = static_cast<double>(std::min(t + 1, n - t)) * dt / std::numbers::sqrt2;
    return coi;
}

struct WaveletField {
    ScaleGrid grid;
    double dt = 1.0;
    std::vector<double> coi;
    /// scale x time; cells above the COI carry kOutsideCoi.
    Grid<cplx> coeffs;

    [[nodiscard]] std::size_t n_times() const noexcept { return coeffs.n_times; }
};

struct CrossSpectrumField {
    Grid<cplx> values;
    bool smoothed = false;
};

namespace detail {

inline void mark_coi(Grid<cplx>& g, const std::vector<double>& coi)
{
    for (std::size_t j = 0; j < g.n_scales(); ++j)
        for (std::size_t t = 0; t < g.n_times; ++t)
            if (g.scales[j] > coi[t]) g.flags[g.index(j, t)] |= kOutsideCoi;
}

} // namespace detail

/// Morlet (omega0 = 6) transform by frequency-domain multiplication. The
/// input is demeaned and zero-padded to a power of two of at least 2n.
inline WaveletField cwt_morlet(std::span<const double> x, double dt, const ScaleGrid& grid)
{
    const std::size_t n = x.size();
    if (n != grid.n_times) throw UsageError("series length does not match scale grid");
    detail::require(dt > 0.0, "dt must be positive");

    const bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const double mean = constant ? x[0] : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const std::size_t npad = fft::next_pow2(2 * n);
    std::vector<cplx> xhat(npad, 0.0);
    for (std::size_t t = 0; t < n; ++t) xhat[t] = x[t] - mean;
    fft::transform(xhat);

    std::vector<double> omega(npad);
    for (std::size_t k = 0; k < npad; ++k) {
        const double kk = k <= npad / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(npad);
        omega[k] = 2.0 * std::numbers::pi * kk / (static_cast<double>(npad) * dt);
    }

    WaveletField out;
    out.grid = grid;
    out.dt = dt;
    out.coi = cone_of_influence(n, dt);
    out.coeffs = Grid<cplx>(grid.scales, n);

    const double norm0 = std::pow(std::numbers::pi, -0.25);
    std::vector<cplx> work(npad);
    for (std::size_t j = 0; j < grid.num_scales; ++j) {
        const double s = grid.scales[j];
        const double amp = norm0 * std::sqrt(2.0 * std::numbers::pi * s / dt);
        for (std::size_t k = 0; k < npad; ++k) {
            if (omega[k] > 0.0) {
                const double arg = s * omega[k] - kMorletOmega0;
                work[k] = xhat[k] * (amp * std::exp(-0.5 * arg * arg));
            } else {
                work[k] = 0.0;
            }
        }
        fft::transform(work, true);
        std::copy_n(work.begin(), n, out.coeffs.values.begin() + static_cast<std::ptrdiff_t>(j * n));
    }
    detail::mark_coi(out.coeffs, out.coi);
    return out;
}

/// Unsmoothed cross spectrum W_a * conj(W_b).
inline CrossSpectrumField cross_spectrum(const WaveletField& a, const WaveletField& b)
{
    if (!(a.grid == b.grid) || a.n_times() != b.n_times()) throw UsageError("cross spectrum: grid mismatch");
    CrossSpectrumField out{a.coeffs, false};
    for (std::size_t i = 0; i < out.values.values.size(); ++i)
        out.values.values[i] = a.coeffs.values[i] * std::conj(b.coeffs.values[i]);
    return out;
}

/// Time-scale smoothing operator: Gaussian in time (std s/dt samples per
/// scale row, truncated at four standard deviations) followed by a
/// 0.6-octave boxcar across scales. Both passes are normalised direct
/// convolutions with nonnegative weights, so weights sum to one at every cell
/// including the edges and positive semi-definite cell matrices stay PSD.
/// One instance can smooth any number of fields on the same grid.
class Smoother {
public:
    static constexpr double kScaleWindowOctaves = 0.6;
    static constexpr double kTruncationSigmas = 4.0;

    Smoother(const ScaleGrid& grid, double dt) : grid_(grid), dt_(dt), n_(grid.n_times)
    {
        detail::require(dt > 0.0, "dt must be positive");
        rows_.resize(grid.num_scales);
        const auto nmax = static_cast<std::ptrdiff_t>(n_) - 1;
        for (std::size_t j = 0; j < grid.num_scales; ++j) {
            auto& row = rows_[j];
            row.radius = std::min(nmax, static_cast<std::ptrdiff_t>(std::ceil(kTruncationSigmas * grid.scales[j] / dt)));
            row.taps.resize(static_cast<std::size_t>(2 * row.radius + 1));
            for (std::ptrdiff_t k = -row.radius; k <= row.radius; ++k)
                row.taps[static_cast<std::size_t>(k + row.radius)] = time_kernel(j, static_cast<double>(k));
            std::vector<double> prefix(row.taps.size() + 1, 0.0);
            for (std::size_t i = 0; i < row.taps.size(); ++i) prefix[i + 1] = prefix[i] + row.taps[i];
            row.norms.resize(n_);
            for (std::size_t t = 0; t < n_; ++t) {
                // contributing lags k = t - u for u in [0, n), clipped to the support
                const auto ti = static_cast<std::ptrdiff_t>(t);
                const auto klo = std::max(-row.radius, ti - nmax);
                const auto khi = std::min(row.radius, ti);
                row.norms[t] = prefix[static_cast<std::size_t>(khi + row.radius + 1)]
                               - prefix[static_cast<std::size_t>(klo + row.radius)];
            }
        }

        const double width = kScaleWindowOctaves / grid.dj;
        const auto reach = static_cast<std::ptrdiff_t>(std::ceil(width / 2.0 + 0.5));
        for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
            const double w = std::clamp(width / 2.0 + 0.5 - std::abs(static_cast<double>(k)), 0.0, 1.0);
            if (w > 0.0) scale_taps_.push_back({k, w});
        }
    }

    [[nodiscard]] const ScaleGrid& grid() const noexcept { return grid_; }

    /// Gaussian time profile used on scale row j (unnormalised, peak 1).
    [[nodiscard]] double time_kernel(std::size_t j, double lag_samples) const
    {
        const double u = lag_samples * dt_ / grid_.scales[j];
        return std::exp(-0.5 * u * u);
    }

    [[nodiscard]] CrossSpectrumField apply(const CrossSpectrumField& f) const
    {
        if (f.smoothed) throw UsageError("field is already smoothed");
        if (f.values.n_times != n_ || f.values.n_scales() != grid_.num_scales)
            throw UsageError("smoothing: grid mismatch");

        const auto n = static_cast<std::ptrdiff_t>(n_);
        std::vector<cplx> timed(f.values.values.size());
        for (std::size_t j = 0; j < grid_.num_scales; ++j) {
            const auto& row = rows_[j];
            const cplx* src = f.values.values.data() + j * n_;
            cplx* dst = timed.data() + j * n_;
            for (std::ptrdiff_t t = 0; t < n; ++t) {
                const auto ulo = std::max<std::ptrdiff_t>(0, t - row.radius);
                const auto uhi = std::min(n - 1, t + row.radius);
                double re = 0.0, im = 0.0;
                for (auto u = ulo; u <= uhi; ++u) {
                    const double w = row.taps[static_cast<std::size_t>(t - u + row.radius)];
                    re += w * src[u].real();
                    im += w * src[u].imag();
                }
                dst[t] = cplx{re, im} / row.norms[static_cast<std::size_t>(t)];
            }
        }

        CrossSpectrumField out{Grid<cplx>(f.values.scales, n_), true};
        out.values.flags = f.values.flags;
        const auto ns = static_cast<std::ptrdiff_t>(grid_.num_scales);
        for (std::ptrdiff_t j = 0; j < ns; ++j) {
            double wsum = 0.0;
            const auto dst = static_cast<std::size_t>(j) * n_;
            for (const auto& [k, w] : scale_taps_) {
                const auto r = j + k;
                if (r < 0 || r >= ns) continue;
                wsum += w;
                const auto src = static_cast<std::size_t>(r) * n_;
                for (std::size_t t = 0; t < n_; ++t) out.values.values[dst + t] += w * timed[src + t];
            }
            for (std::size_t t = 0; t < n_; ++t) out.values.values[dst + t] /= wsum;
        }
        return out;
    }

private:
    struct Row {
        std::ptrdiff_t radius = 0;
        std::vector<double> taps;
        std::vector<double> norms;
    };
    struct Tap {
        std::ptrdiff_t offset;
        double weight;
    };

    ScaleGrid grid_;
    double dt_;
    std::size_t n_;
    std::vector<Row> rows_;
    std::vector<Tap> scale_taps_;
};

inline CrossSpectrumField smooth(const CrossSpectrumField& f, const ScaleGrid& grid, double dt)
{
    return Smoother(grid, dt).apply(f);
}

} // namespace wcoh

#endif // WCOH_CWT_HPP
