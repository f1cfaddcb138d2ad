#ifndef WCOH_COHERENCE_HPP
#define WCOH_COHERENCE_HPP

#include "cwt.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace wcoh {

/// Minors whose magnitude falls below this are treated as singular.
inline constexpr double kSingularTol = 1e-14;
/// Allowed excursion of |rho_ij| above one from rounding.
inline constexpr double kCoherencyTol = 1e-9;

/// Per-cell Hermitian unit-diagonal matrix of smoothed complex coherencies
/// over a scale x time grid.
class CoherenceField {
public:
    CoherenceField(std::size_t p, std::vector<double> scales, std::size_t n_times, std::vector<cplx> cells,
                   std::vector<std::uint8_t> flags, std::vector<std::string> labels = {})
        : p_(p), scales_(std::move(scales)), n_times_(n_times), cells_(std::move(cells)), flags_(std::move(flags)),
          labels_(std::move(labels))
    {
        detail::require(p_ >= 2, "coherence needs at least two series");
        const std::size_t ncell = scales_.size() * n_times_;
        detail::require(cells_.size() == ncell * p_ * p_, "coherence cell storage has wrong size");
        detail::require(flags_.size() == ncell, "coherence flag storage has wrong size");
        if (labels_.empty())
            for (std::size_t i = 0; i < p_; ++i) labels_.push_back("X" + std::to_string(i + 1));
        detail::require(labels_.size() == p_, "one label per series required");
        validate();
    }

    /// Builds a single-time field from explicit cell matrices (one per scale).
    static CoherenceField from_cells(const std::vector<SmallMatrix>& cells)
    {
        detail::require(!cells.empty(), "no cells");
        const std::size_t p = cells.front().dim();
        std::vector<cplx> data;
        for (const auto& c : cells) {
            detail::require(c.dim() == p, "cell dimension mismatch");
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) data.push_back(c(i, j));
        }
        std::vector<double> scales(cells.size());
        for (std::size_t j = 0; j < scales.size(); ++j) scales[j] = static_cast<double>(j + 1);
        return CoherenceField(p, std::move(scales), 1, std::move(data), std::vector<std::uint8_t>(cells.size(), 0));
    }

    [[nodiscard]] std::size_t p() const noexcept { return p_; }
    [[nodiscard]] const std::vector<double>& scales() const noexcept { return scales_; }
    [[nodiscard]] std::size_t n_scales() const noexcept { return scales_.size(); }
    [[nodiscard]] std::size_t n_times() const noexcept { return n_times_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::uint8_t flag(std::size_t j, std::size_t t) const noexcept { return flags_[j * n_times_ + t]; }

    [[nodiscard]] cplx rho(std::size_t j, std::size_t t, std::size_t a, std::size_t b) const noexcept
    {
        return cells_[((j * n_times_ + t) * p_ + a) * p_ + b];
    }

    [[nodiscard]] SmallMatrix cell(std::size_t j, std::size_t t) const
    {
        SmallMatrix m(p_);
        const cplx* src = cells_.data() + (j * n_times_ + t) * p_ * p_;
        for (std::size_t a = 0; a < p_; ++a)
            for (std::size_t b = 0; b < p_; ++b) m(a, b) = src[a * p_ + b];
        return m;
    }

    /// Empty grid on this field's scale x time layout carrying its flags.
    template <typename T>
    [[nodiscard]] Grid<T> make_grid(T fill = T{}) const
    {
        Grid<T> g(scales_, n_times_, fill);
        g.flags = flags_;
        return g;
    }

private:
    void validate() const
    {
        const std::size_t ncell = scales_.size() * n_times_;
        for (std::size_t c = 0; c < ncell; ++c) {
            const cplx* m = cells_.data() + c * p_ * p_;
            for (std::size_t a = 0; a < p_; ++a) {
                if (m[a * p_ + a] != cplx{1.0, 0.0}) throw DataError("coherence cell diagonal is not exactly one");
                for (std::size_t b = a + 1; b < p_; ++b) {
                    const cplx ab = m[a * p_ + b];
                    if (ab != std::conj(m[b * p_ + a])) throw DataError("coherence cell is not Hermitian");
                    if (!(std::abs(ab) <= 1.0 + kCoherencyTol)) throw DataError("coherency magnitude exceeds one");
                }
            }
        }
    }

    std::size_t p_;
    std::vector<double> scales_;
    std::size_t n_times_;
    std::vector<cplx> cells_;
    std::vector<std::uint8_t> flags_;
    std::vector<std::string> labels_;
};

/// rho_ij = S(W_i W_j*) / sqrt(S(|W_i|^2) S(|W_j|^2)) at every cell. Cells where
/// a smoothed auto-spectrum vanishes are flagged kDegenerate and get zero
/// off-diagonal coherency for that series.
inline CoherenceField coherence_matrix_field(std::span<const WaveletField> fields, const Smoother& smoother,
                                             std::vector<std::string> labels = {})
{
    const std::size_t p = fields.size();
    detail::require(p >= 2, "coherence needs at least two series");
    for (const auto& f : fields)
        if (!(f.grid == smoother.grid()) || !(f.grid == fields[0].grid))
            throw UsageError("coherence: wavelet fields are not on one grid");

    const auto& grid = fields[0].grid;
    const std::size_t n = fields[0].n_times();
    const std::size_t ncell = grid.num_scales * n;

    std::vector<std::vector<double>> auto_spec(p);
    double peak = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const auto s = smoother.apply(cross_spectrum(fields[i], fields[i]));
        auto_spec[i].resize(ncell);
        for (std::size_t c = 0; c < ncell; ++c) {
            auto_spec[i][c] = std::max(0.0, s.values.values[c].real());
            peak = std::max(peak, auto_spec[i][c]);
        }
    }
    const double floor = peak * 1e-20;

    std::vector<cplx> cells(ncell * p * p);
    std::vector<std::uint8_t> flags = fields[0].coeffs.flags;
    std::vector<std::vector<bool>> dead(p, std::vector<bool>(ncell));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t c = 0; c < ncell; ++c)
            if (!(auto_spec[i][c] > floor)) {
                dead[i][c] = true;
                flags[c] |= kDegenerate;
            }

    for (std::size_t c = 0; c < ncell; ++c)
        for (std::size_t i = 0; i < p; ++i) cells[(c * p + i) * p + i] = 1.0;

    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t k = i + 1; k < p; ++k) {
            const auto s = smoother.apply(cross_spectrum(fields[i], fields[k]));
            for (std::size_t c = 0; c < ncell; ++c) {
                cplx r = 0.0;
                if (!dead[i][c] && !dead[k][c]) {
                    r = s.values.values[c] / std::sqrt(auto_spec[i][c] * auto_spec[k][c]);
                    // smoothing keeps each cell PSD up to rounding
                    const double mag = std::abs(r);
                    if (mag > 1.0) r /= mag;
                }
                cells[(c * p + i) * p + k] = r;
                cells[(c * p + k) * p + i] = std::conj(r);
            }
        }
    return CoherenceField(p, grid.scales, n, std::move(cells), std::move(flags), std::move(labels));
}

/// Convenience overload building the smoother from the first field's grid.
inline CoherenceField coherence_matrix_field(std::span<const WaveletField> fields, std::vector<std::string> labels = {})
{
    detail::require(!fields.empty(), "coherence needs at least two series");
    return coherence_matrix_field(fields, Smoother(fields[0].grid, fields[0].dt), std::move(labels));
}

// ---------------------------------------------------------------------------
// Per-cell formulas

struct MultipleCell {
    double value = 0.0; ///< clamped to [0, 1]
    double raw = 0.0;   ///< before clamping
    bool singular = false;
};

/// R^2 = 1 - det(C) / C_11^d with the target moved to position 1.
inline MultipleCell multiple_coherence_cell(const SmallMatrix& c, std::size_t target)
{
    detail::require(c.dim() >= 2, "multiple coherence needs p >= 2");
    detail::require(target < c.dim(), "target index out of range");
    const auto m = c.move_to_front(target);
    const double minor = determinant(m.minor_matrix(0, 0)).real();
    if (std::abs(minor) < kSingularTol) return {1.0, 1.0, true};
    const double raw = 1.0 - determinant(m).real() / minor;
    return {std::clamp(raw, 0.0, 1.0), raw, false};
}

struct FourSeriesExpansion {
    cplx det;      ///< C^d
    cplx minor11;  ///< C_11^d
    double r_sq;   ///< 1 - C^d / C_11^d
};

/// Closed-form four-series expansion of det(C) and its (1,1) minor, written
/// out term by term. Every product of a pair rho_ij rho_ji is |rho_ij|^2.
/// The minor's two triple products are conjugates, so together they equal
/// 2 Re(rho_23 rho_34 rho_42). Conjugating rho_42 alone instead gives a
/// different quantity.
inline FourSeriesExpansion four_series_expansion(const SmallMatrix& c)
{
    if (c.dim() != 4) throw UsageError("four-series expansion needs a 4x4 matrix");
    if (!c.is_hermitian(1e-12)) throw UsageError("four-series expansion needs a Hermitian matrix");
    for (std::size_t i = 0; i < 4; ++i)
        if (std::abs(c(i, i) - 1.0) > 1e-12) throw UsageError("four-series expansion needs a unit diagonal");

    auto r = [&](int i, int j) { return c(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };
    auto R2 = [&](int i, int j) { return std::norm(r(i, j)); };

    const cplx minor11 = 1.0 - R2(2, 3) - R2(2, 4) - R2(3, 4) + r(2, 3) * r(3, 4) * r(4, 2)
                         + r(2, 4) * r(3, 2) * r(4, 3);

    const cplx det = 1.0 - R2(1, 2) - R2(1, 3) - R2(2, 3) - R2(1, 4) - R2(2, 4) - R2(3, 4)
                     + r(1, 2) * r(2, 3) * r(3, 1) + r(1, 3) * r(2, 1) * r(3, 2)
                     + r(1, 2) * r(2, 4) * r(4, 1) + r(1, 4) * r(2, 1) * r(4, 2)
                     + r(2, 3) * r(3, 4) * r(4, 2) + r(2, 4) * r(3, 2) * r(4, 3)
                     + r(1, 4) * r(3, 1) * r(4, 3) + r(1, 3) * r(3, 4) * r(4, 1)
                     + r(1, 4) * r(2, 3) * r(3, 2) * r(4, 1) - r(1, 3) * r(2, 4) * r(3, 2) * r(4, 1)
                     - r(1, 2) * r(2, 3) * r(3, 4) * r(4, 1) - r(1, 4) * r(2, 3) * r(3, 1) * r(4, 2)
                     + r(1, 3) * r(2, 4) * r(3, 1) * r(4, 2) - r(1, 3) * r(2, 1) * r(3, 4) * r(4, 2)
                     - r(1, 2) * r(2, 4) * r(3, 1) * r(4, 3) - r(1, 4) * r(2, 1) * r(3, 2) * r(4, 3)
                     + r(1, 2) * r(2, 1) * r(3, 4) * r(4, 3);

    const double r_sq = std::abs(minor11) < kSingularTol ? 1.0 : 1.0 - (det / minor11).real();
    return {det, minor11, r_sq};
}

struct PartialCell {
    cplx rho{};
    double r_sq = 0.0;
    double phase = 0.0;
    bool degenerate = false;
};

/// Phase in (-pi, pi].
inline double phase_of(cplx z)
{
    const double a = std::atan2(z.imag(), z.real());
    return a <= -std::numbers::pi ? std::numbers::pi : a;
}

/// Complex partial coherency of `target` and `j` given all remaining series:
/// rho = -C_j1^d / sqrt(C_11^d C_jj^d) after moving the target to position 1.
inline PartialCell partial_coherence_cell(const SmallMatrix& c, std::size_t target, std::size_t j)
{
    const std::size_t p = c.dim();
    detail::require(target < p && j < p, "series index out of range");
    detail::require(target != j, "partial coherence needs two distinct series");
    const auto m = c.move_to_front(target);
    const std::size_t jj = j < target ? j + 1 : j;

    const double c11 = determinant(m.minor_matrix(0, 0)).real();
    const double cjj = determinant(m.minor_matrix(jj, jj)).real();
    if (c11 < kSingularTol || cjj < kSingularTol) return {0.0, 0.0, 0.0, true};
    const cplx rho = -cofactor(m, jj, 0) / std::sqrt(c11 * cjj);
    return {rho, std::clamp(std::norm(rho), 0.0, 1.0), phase_of(rho), false};
}

/// 1 - prod_k (1 - r^2_{1k.2..k-1}), each partial taken on the leading k x k
/// block with the target first.
inline MultipleCell multiple_from_partials_cell(const SmallMatrix& c, std::size_t target)
{
    const std::size_t p = c.dim();
    detail::require(p >= 2, "multiple coherence needs p >= 2");
    detail::require(target < p, "target index out of range");
    const auto m = c.move_to_front(target);
    double residual = 1.0;
    for (std::size_t k = 2; k <= p; ++k) {
        const auto part = partial_coherence_cell(m.leading(k), 0, k - 1);
        if (part.degenerate) return {1.0, 1.0, true};
        residual *= 1.0 - std::norm(part.rho);
        if (residual <= 0.0) return {1.0, 1.0 - residual, false};
    }
    const double raw = 1.0 - residual;
    return {std::clamp(raw, 0.0, 1.0), raw, false};
}

// ---------------------------------------------------------------------------
// Grid-level operations

inline RealGrid multiple_coherence(const CoherenceField& cf, std::size_t target)
{
    detail::require(target < cf.p(), "target index out of range");
    auto g = cf.make_grid<double>();
    for (std::size_t j = 0; j < cf.n_scales(); ++j)
        for (std::size_t t = 0; t < cf.n_times(); ++t) {
            const auto v = multiple_coherence_cell(cf.cell(j, t), target);
            g(j, t) = v.value;
            if (v.singular) g.flags[g.index(j, t)] |= kDegenerate;
        }
    return g;
}

struct PartialCoherence {
    Grid<cplx> rho;
    RealGrid r_sq;
    RealGrid phase;
};

inline PartialCoherence partial_coherence(const CoherenceField& cf, std::size_t target, std::size_t j)
{
    detail::require(cf.p() >= 3, "partial coherence needs at least three series");
    detail::require(target < cf.p() && j < cf.p() && target != j, "invalid target/partner pair");
    PartialCoherence out{cf.make_grid<cplx>(), cf.make_grid<double>(), cf.make_grid<double>()};
    for (std::size_t s = 0; s < cf.n_scales(); ++s)
        for (std::size_t t = 0; t < cf.n_times(); ++t) {
            const auto v = partial_coherence_cell(cf.cell(s, t), target, j);
            const auto idx = out.rho.index(s, t);
            out.rho.values[idx] = v.rho;
            out.r_sq.values[idx] = v.r_sq;
            out.phase.values[idx] = v.phase;
            if (v.degenerate) {
                out.rho.flags[idx] |= kDegenerate;
                out.r_sq.flags[idx] |= kDegenerate;
                out.phase.flags[idx] |= kDegenerate;
            }
        }
    return out;
}

inline RealGrid multiple_from_partials(const CoherenceField& cf, std::size_t target)
{
    detail::require(target < cf.p(), "target index out of range");
    auto g = cf.make_grid<double>();
    for (std::size_t j = 0; j < cf.n_scales(); ++j)
        for (std::size_t t = 0; t < cf.n_times(); ++t) {
            const auto v = multiple_from_partials_cell(cf.cell(j, t), target);
            g(j, t) = v.value;
            if (v.singular) g.flags[g.index(j, t)] |= kDegenerate;
        }
    return g;
}

/// |rho_ab|^2 on every cell.
inline RealGrid bivariate_coherence(const CoherenceField& cf, std::size_t a, std::size_t b)
{
    detail::require(a < cf.p() && b < cf.p(), "series index out of range");
    auto g = cf.make_grid<double>();
    for (std::size_t j = 0; j < cf.n_scales(); ++j)
        for (std::size_t t = 0; t < cf.n_times(); ++t) g(j, t) = std::min(1.0, std::norm(cf.rho(j, t, a, b)));
    return g;
}

struct CoherenceResult {
    std::size_t target = 0;
    RealGrid multiple;
    /// Keyed by partner index j != target; empty when p < 3.
    std::map<std::size_t, RealGrid> partial_sq;
    std::map<std::size_t, RealGrid> partial_phase;
};

inline CoherenceResult analyze(const CoherenceField& cf, std::size_t target)
{
    CoherenceResult out;
    out.target = target;
    out.multiple = multiple_coherence(cf, target);
    if (cf.p() >= 3)
        for (std::size_t j = 0; j < cf.p(); ++j) {
            if (j == target) continue;
            auto pc = partial_coherence(cf, target, j);
            out.partial_sq.emplace(j, std::move(pc.r_sq));
            out.partial_phase.emplace(j, std::move(pc.phase));
        }
    return out;
}

} // namespace wcoh

#endif // WCOH_COHERENCE_HPP
