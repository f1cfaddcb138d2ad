#ifndef WCOH_DENOISE_HPP
#define WCOH_DENOISE_HPP

#include "error.hpp"
#include "filter_bank.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wcoh {

enum class ThresholdMethod {
    GCV,
    GCVLevel,
    SURE,
    SURELevel,
    SUREShrink,
    Universal,
    UniversalLevel,
    VisuShrink,
    VisuShrinkLevel,
};

inline constexpr std::array<ThresholdMethod, 9> kAllThresholdMethods{
    ThresholdMethod::GCV,        ThresholdMethod::GCVLevel,       ThresholdMethod::SURE,
    ThresholdMethod::SURELevel,  ThresholdMethod::SUREShrink,     ThresholdMethod::Universal,
    ThresholdMethod::UniversalLevel, ThresholdMethod::VisuShrink, ThresholdMethod::VisuShrinkLevel,
};

enum class Shrinkage { hard, soft, garrote };

inline std::string to_string(ThresholdMethod m)
{
    switch (m) {
    case ThresholdMethod::GCV: return "GCV";
    case ThresholdMethod::GCVLevel: return "GCVLevel";
    case ThresholdMethod::SURE: return "SURE";
    case ThresholdMethod::SURELevel: return "SURELevel";
    case ThresholdMethod::SUREShrink: return "SUREShrink";
    case ThresholdMethod::Universal: return "Universal";
    case ThresholdMethod::UniversalLevel: return "UniversalLevel";
    case ThresholdMethod::VisuShrink: return "VisuShrink";
    case ThresholdMethod::VisuShrinkLevel: return "VisuShrinkLevel";
    }
    return "?";
}

inline std::string to_string(Shrinkage r)
{
    switch (r) {
    case Shrinkage::hard: return "hard";
    case Shrinkage::soft: return "soft";
    case Shrinkage::garrote: return "garrote";
    }
    return "?";
}

inline ThresholdMethod parse_threshold_method(std::string_view s)
{
    for (auto m : kAllThresholdMethods)
        if (to_string(m) == s) return m;
    throw UsageError("unknown threshold method '" + std::string(s) + "'");
}

inline Shrinkage parse_shrinkage(std::string_view s)
{
    if (s == "hard") return Shrinkage::hard;
    if (s == "soft") return Shrinkage::soft;
    if (s == "garrote") return Shrinkage::garrote;
    throw UsageError("unknown shrinkage rule '" + std::string(s) + "'");
}

inline bool is_level_method(ThresholdMethod m)
{
    return m == ThresholdMethod::GCVLevel || m == ThresholdMethod::SURELevel || m == ThresholdMethod::SUREShrink
           || m == ThresholdMethod::UniversalLevel || m == ThresholdMethod::VisuShrinkLevel;
}

/// Universal* is conventionally paired with hard shrinkage, VisuShrink* with soft.
inline std::optional<Shrinkage> conventional_rule(ThresholdMethod m)
{
    switch (m) {
    case ThresholdMethod::Universal:
    case ThresholdMethod::UniversalLevel: return Shrinkage::hard;
    case ThresholdMethod::VisuShrink:
    case ThresholdMethod::VisuShrinkLevel: return Shrinkage::soft;
    default: return std::nullopt;
    }
}

/// Median absolute deviation estimate sigma = median(|d|) / 0.6745.
inline double estimate_noise_sigma(std::span<const double> details)
{
    if (details.size() < 8) throw DataError("noise estimate needs at least 8 detail coefficients");
    std::vector<double> a(details.size());
    std::transform(details.begin(), details.end(), a.begin(), [](double v) { return std::abs(v); });
    const std::size_t mid = a.size() / 2;
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
    double med = a[mid];
    if (a.size() % 2 == 0) {
        const double lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
        med = 0.5 * (med + lower);
    }
    return med / 0.6745;
}

inline double universal_threshold(std::size_t n, double sigma)
{
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

/// Threshold minimising Stein's unbiased risk estimate for soft shrinkage,
/// searched over the sorted |w|. Returned in the units of w.
inline double sure_threshold(std::span<const double> w, double sigma)
{
    detail::require(!w.empty(), "SURE needs coefficients");
    if (!(sigma > 0.0)) return 0.0;
    const std::size_t n = w.size();
    std::vector<double> a(n);
    std::transform(w.begin(), w.end(), a.begin(), [&](double v) { return std::abs(v) / sigma; });
    std::sort(a.begin(), a.end());
    double best = std::numeric_limits<double>::infinity(), best_t = a.back(), cum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double t = a[k - 1];
        cum += t * t;
        const double risk = static_cast<double>(n) - 2.0 * static_cast<double>(k) + cum
                            + static_cast<double>(n - k) * t * t;
        if (risk < best) {
            best = risk;
            best_t = t;
        }
    }
    return sigma * best_t;
}

/// SURE with the sparsity test: sparse coefficient sets fall back to the
/// universal threshold; otherwise min(SURE, universal).
inline double sure_hybrid_threshold(std::span<const double> w, double sigma)
{
    detail::require(!w.empty(), "SURE needs coefficients");
    if (!(sigma > 0.0)) return 0.0;
    const auto n = static_cast<double>(w.size());
    double energy = 0.0;
    for (double v : w) energy += (v / sigma) * (v / sigma);
    const double excess = (energy - n) / n;
    const double gate = std::pow(std::log2(n), 1.5) / std::sqrt(n);
    const double uni = universal_threshold(w.size(), sigma);
    if (excess <= gate) return uni;
    return std::min(sure_threshold(w, sigma), uni);
}

/// Generalised cross-validation for soft shrinkage:
/// GCV(t) = N * ||w - soft(w, t)||^2 / N0(t)^2 with N0 the number of zeroed
/// coefficients, minimised over t in sorted |w|.
inline double gcv_threshold(std::span<const double> w)
{
    detail::require(!w.empty(), "GCV needs coefficients");
    const std::size_t n = w.size();
    std::vector<double> a(n);
    std::transform(w.begin(), w.end(), a.begin(), [](double v) { return std::abs(v); });
    std::sort(a.begin(), a.end());
    double best = std::numeric_limits<double>::infinity(), best_t = a.back(), cum = 0.0;
    std::size_t k = 0;
    while (k < n) {
        // ties share one threshold and zero together
        std::size_t e = k;
        while (e < n && a[e] == a[k]) {
            cum += a[e] * a[e];
            ++e;
        }
        const double t = a[k];
        const double resid = cum + static_cast<double>(n - e) * t * t;
        const double score = static_cast<double>(n) * resid / (static_cast<double>(e) * static_cast<double>(e));
        if (score < best) {
            best = score;
            best_t = t;
        }
        k = e;
    }
    return best_t;
}

/// One threshold per detail level (index 0 = finest). Global methods repeat
/// a single value.
struct Thresholds {
    std::vector<double> per_level;
    bool global = true;
    double sigma = 0.0;
};

namespace detail {

inline std::vector<double> all_details(const Decomposition& dec)
{
    std::vector<double> out;
    for (const auto& d : dec.details) out.insert(out.end(), d.begin(), d.end());
    return out;
}

inline double level_sigma(std::span<const double> d, double fallback)
{
    return d.size() >= 8 ? estimate_noise_sigma(d) : fallback;
}

} // namespace detail

inline Thresholds select_threshold(const Decomposition& dec, ThresholdMethod method)
{
    detail::require(!dec.details.empty(), "decomposition has no detail levels");
    const auto all = detail::all_details(dec);
    if (std::all_of(all.begin(), all.end(), [](double v) { return v == 0.0; }))
        throw DataError("degenerate decomposition: all detail coefficients are zero");

    const double sigma = estimate_noise_sigma(dec.details.front().size() >= 8 ? std::span<const double>(dec.details.front())
                                                                               : std::span<const double>(all));
    const std::size_t levels = dec.levels();
    Thresholds th;
    th.sigma = sigma;
    th.global = !is_level_method(method);

    auto global_value = [&]() -> double {
        switch (method) {
        case ThresholdMethod::GCV: return gcv_threshold(all);
        case ThresholdMethod::SURE: return sure_threshold(all, sigma);
        case ThresholdMethod::Universal:
        case ThresholdMethod::VisuShrink: return universal_threshold(dec.original_length, sigma);
        default: return 0.0;
        }
    };

    if (th.global) {
        th.per_level.assign(levels, global_value());
        return th;
    }
    for (const auto& d : dec.details) {
        const double s = detail::level_sigma(d, sigma);
        switch (method) {
        case ThresholdMethod::GCVLevel: th.per_level.push_back(gcv_threshold(d)); break;
        case ThresholdMethod::SURELevel: th.per_level.push_back(sure_threshold(d, s)); break;
        case ThresholdMethod::SUREShrink: th.per_level.push_back(sure_hybrid_threshold(d, sigma)); break;
        case ThresholdMethod::UniversalLevel:
        case ThresholdMethod::VisuShrinkLevel: th.per_level.push_back(universal_threshold(d.size(), s)); break;
        default: break;
        }
    }
    return th;
}

inline double apply_shrinkage(double w, double t, Shrinkage rule)
{
    if (t < 0.0) throw UsageError("threshold must be nonnegative");
    const double a = std::abs(w);
    if (a <= t) return t == 0.0 ? w : 0.0;
    switch (rule) {
    case Shrinkage::hard: return w;
    case Shrinkage::soft: return std::copysign(a - t, w);
    case Shrinkage::garrote: return w - t * t / w;
    }
    return w;
}

/// Decompose with db3 (periodic), shrink every detail level, reconstruct.
/// Approximation coefficients are never thresholded.
inline std::vector<double> denoise(std::span<const double> x, ThresholdMethod method, Shrinkage rule,
                                   std::size_t level, Thresholds* used = nullptr)
{
    detail::require(level >= 1 && (std::size_t{1} << level) <= x.size(), "level must satisfy 1 <= level <= log2(n)");
    auto dec = dwt_forward(x, level);
    const auto all = detail::all_details(dec);
    if (std::all_of(all.begin(), all.end(), [](double v) { return v == 0.0; })) {
        if (used) *used = Thresholds{std::vector<double>(level, 0.0), true, 0.0};
        return {x.begin(), x.end()};
    }
    const auto th = select_threshold(dec, method);
    for (std::size_t l = 0; l < dec.levels(); ++l)
        for (double& w : dec.details[l]) w = apply_shrinkage(w, th.per_level[l], rule);
    if (used) *used = th;
    return dwt_inverse(dec);
}

struct Fidelity {
    double snr = 0.0;  ///< dB
    double psnr = 0.0; ///< dB
    /// Residual is exactly zero; snr/psnr are then meaningless and set to +inf.
    bool identical = false;
};

/// SNR = 10 log10(sum ref^2 / sum res^2), PSNR = 10 log10(n max|ref|^2 / sum res^2).
inline Fidelity fidelity_metrics(std::span<const double> reference, std::span<const double> estimate)
{
    if (reference.size() != estimate.size()) throw UsageError("fidelity: length mismatch");
    double signal = 0.0, resid = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        signal += reference[i] * reference[i];
        const double r = reference[i] - estimate[i];
        resid += r * r;
        peak = std::max(peak, std::abs(reference[i]));
    }
    if (!(signal > 0.0)) throw DataError("fidelity: reference has zero energy");
    if (resid == 0.0)
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), true};
    const auto n = static_cast<double>(reference.size());
    return {10.0 * std::log10(signal / resid), 10.0 * std::log10(n * peak * peak / resid), false};
}

enum class RulePairing {
    /// Universal* use hard and VisuShrink* soft; the rest use the given rule.
    conventional,
    /// Every method uses the given rule.
    uniform,
};

struct DenoiseRow {
    ThresholdMethod method;
    Shrinkage rule;
    Thresholds thresholds;
    Fidelity fidelity;
};

struct DenoiseReport {
    std::vector<DenoiseRow> rows;
    ThresholdMethod winner_snr = ThresholdMethod::SURE;
    ThresholdMethod winner_psnr = ThresholdMethod::SURE;
    Shrinkage rule = Shrinkage::garrote;
    static constexpr std::string_view kConvention =
        "SNR/PSNR score the de-noised series against the original input (higher = gentler de-noising), "
        "not against an unknown clean signal";
};

inline DenoiseReport method_sweep(std::span<const double> x, Shrinkage rule, std::size_t level,
                                  RulePairing pairing = RulePairing::conventional)
{
    DenoiseReport report;
    report.rule = rule;
    double best_snr = -std::numeric_limits<double>::infinity(), best_psnr = best_snr;
    for (auto m : kAllThresholdMethods) {
        const Shrinkage r = pairing == RulePairing::conventional ? conventional_rule(m).value_or(rule) : rule;
        Thresholds th;
        const auto est = denoise(x, m, r, level, &th);
        const auto fid = fidelity_metrics(x, est);
        report.rows.push_back({m, r, th, fid});
        if (fid.snr > best_snr) {
            best_snr = fid.snr;
            report.winner_snr = m;
        }
        if (fid.psnr > best_psnr) {
            best_psnr = fid.psnr;
            report.winner_psnr = m;
        }
    }
    return report;
}

} // namespace wcoh

#endif // WCOH_DENOISE_HPP
