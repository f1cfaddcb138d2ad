#ifndef WCOH_LINALG_HPP
#define WCOH_LINALG_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace wcoh {

/// Small dense square complex matrix, row-major. Sized for per-cell
/// coherence work (p <= 8), not general linear algebra.
class SmallMatrix {
public:
    using value_type = std::complex<double>;

    SmallMatrix() = default;
    explicit SmallMatrix(std::size_t n) : n_(n), a_(n * n) {}

    static SmallMatrix identity(std::size_t n)
    {
        SmallMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    value_type& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    const value_type& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

    /// Copy with row r and column c removed.
    [[nodiscard]] SmallMatrix minor_matrix(std::size_t r, std::size_t c) const
    {
        SmallMatrix m(n_ - 1);
        for (std::size_t i = 0, mi = 0; i < n_; ++i) {
            if (i == r) continue;
            for (std::size_t j = 0, mj = 0; j < n_; ++j) {
                if (j == c) continue;
                m(mi, mj++) = (*this)(i, j);
            }
            ++mi;
        }
        return m;
    }

    /// Leading k x k block.
    [[nodiscard]] SmallMatrix leading(std::size_t k) const
    {
        SmallMatrix m(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    /// Symmetric permutation moving index `first` to position 0, others keep order.
    [[nodiscard]] SmallMatrix move_to_front(std::size_t first) const
    {
        std::vector<std::size_t> order{first};
        for (std::size_t i = 0; i < n_; ++i)
            if (i != first) order.push_back(i);
        SmallMatrix m(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(order[i], order[j]);
        return m;
    }

    [[nodiscard]] bool is_hermitian(double tol) const
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
        return true;
    }

private:
    std::size_t n_ = 0;
    std::vector<value_type> a_;
};

/// Determinant by LU with partial pivoting. An empty matrix has determinant 1.
inline std::complex<double> determinant(SmallMatrix m)
{
    const std::size_t n = m.dim();
    std::complex<double> det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            det = -det;
        }
        det *= m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const auto f = m(i, k) / m(k, k);
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

/// Signed cofactor (-1)^(i+j) det(M without row i and column j).
inline std::complex<double> cofactor(const SmallMatrix& m, std::size_t i, std::size_t j)
{
    const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    return sign * determinant(m.minor_matrix(i, j));
}

} // namespace wcoh

#endif // WCOH_LINALG_HPP
