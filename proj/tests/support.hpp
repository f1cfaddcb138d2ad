#ifndef WCOH_TESTS_SUPPORT_HPP
#define WCOH_TESTS_SUPPORT_HPP

#include <wcoh/grid_io.hpp>
#include <wcoh/linalg.hpp>
#include <wcoh/timeseries.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <numbers>
#include <random>
#include <vector>

namespace testing_support {

using cplx = std::complex<double>;

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
}

inline std::vector<double> sinusoid(std::size_t n, double period, double amplitude = 1.0, double phase = 0.0)
{
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
    return x;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed)
{
    auto x = white_noise(n, seed);
    for (std::size_t t = 1; t < n; ++t) x[t] += x[t - 1];
    return x;
}

/// Hermitian, unit-diagonal, positive semi-definite: the normalised Gram
/// matrix of `rank` random complex vectors.
inline wcoh::SmallMatrix random_coherence_cell(std::size_t p, std::mt19937_64& rng, std::size_t rank = 0)
{
    if (rank == 0) rank = p + 2;
    std::normal_distribution<double> d;
    std::vector<std::vector<cplx>> v(p, std::vector<cplx>(rank));
    for (auto& row : v)
        for (auto& z : row) z = {d(rng), d(rng)};
    wcoh::SmallMatrix m(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < rank; ++k) s += v[i][k] * std::conj(v[j][k]);
            m(i, j) = s;
        }
    std::vector<double> scale(p);
    for (std::size_t i = 0; i < p; ++i) scale[i] = 1.0 / std::sqrt(m(i, i).real());
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) *= scale[i] * scale[j];
    for (std::size_t i = 0; i < p; ++i) {
        m(i, i) = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) m(j, i) = std::conj(m(i, j));
    }
    return m;
}

/// Determinant by Laplace expansion along the first row; independent of the
/// LU routine under test.
inline cplx laplace_det(const std::vector<std::vector<cplx>>& a)
{
    const std::size_t n = a.size();
    if (n == 0) return 1.0;
    if (n == 1) return a[0][0];
    cplx sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<cplx>> sub;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<cplx> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(a[r][k]);
            sub.push_back(std::move(row));
        }
        sum += (c % 2 == 0 ? 1.0 : -1.0) * a[0][c] * laplace_det(sub);
    }
    return sum;
}

inline std::vector<std::vector<cplx>> to_rows(const wcoh::SmallMatrix& m)
{
    std::vector<std::vector<cplx>> a(m.dim(), std::vector<cplx>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) a[i][j] = m(i, j);
    return a;
}

/// Rows/columns `keep` of m, in that order.
inline std::vector<std::vector<cplx>> submatrix(const wcoh::SmallMatrix& m, const std::vector<std::size_t>& keep)
{
    std::vector<std::vector<cplx>> a(keep.size(), std::vector<cplx>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) a[i][j] = m(keep[i], keep[j]);
    return a;
}

inline double energy(const std::vector<double>& x)
{
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

/// Weekday dates from 2010-01-04 on.
inline std::vector<wcoh::Date> business_days(std::size_t n)
{
    std::vector<wcoh::Date> out;
    for (wcoh::Date d{std::chrono::year{2010} / 1 / 4}; out.size() < n; d += std::chrono::days{1}) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
    }
    return out;
}

/// Positive price-like series sharing a common random-walk factor and a
/// period-64 cycle, written as date,<names...>.
inline void write_synthetic_prices(const std::string& path, std::size_t n, std::size_t p, std::uint64_t seed)
{
    const auto common = random_walk(n, seed);
    const auto cycle = sinusoid(n, 64.0, 0.5);
    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) {
        const auto own = random_walk(n, seed + 1 + j);
        const auto eps = white_noise(n, seed + 100 + j, 0.3);
        std::vector<double> c(n);
        for (std::size_t t = 0; t < n; ++t)
            c[t] = 100.0 * static_cast<double>(j + 1) * std::exp(0.01 * (common[t] + 0.5 * own[t] + cycle[t] + eps[t]));
        cols.push_back(std::move(c));
        names.push_back("m" + std::to_string(j + 1));
    }
    wcoh::series_table(wcoh::MultiSeries(business_days(n), names, cols)).save(path);
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Per-process temp root, removed at exit.
inline const std::filesystem::path& scratch_root()
{
    struct Root {
        std::filesystem::path path =
            std::filesystem::temp_directory_path() / ("wcoh_test_" + std::to_string(::getpid()));
        ~Root()
        {
            std::error_code ec;
            std::filesystem::remove_all(path, ec);
        }
    };
    static const Root root;
    return root.path;
}

/// Fresh empty directory under the per-process temp root.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = scratch_root() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Relative paths of every regular file under `root`, sorted.
inline std::vector<std::string> list_files(const std::filesystem::path& root)
{
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.push_back(std::filesystem::relative(e.path(), root).generic_string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace testing_support

#endif // WCOH_TESTS_SUPPORT_HPP
