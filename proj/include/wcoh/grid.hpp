#ifndef WCOH_GRID_HPP
#define WCOH_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wcoh {

/// Per-cell flag bits shared by every scale x time grid.
enum CellFlag : std::uint8_t {
    kCellOk = 0,
    kOutsideCoi = 1u << 0,
    kDegenerate = 1u << 1,
};

/// Row-major scale x time grid of values with a flag byte per cell.
template <typename T>
struct Grid {
    std::vector<double> scales;
    std::size_t n_times = 0;
    std::vector<T> values;
    std::vector<std::uint8_t> flags;

    Grid() = default;
    Grid(std::vector<double> s, std::size_t nt, T fill = T{})
        : scales(std::move(s)), n_times(nt), values(scales.size() * nt, fill), flags(scales.size() * nt, kCellOk)
    {
    }

    [[nodiscard]] std::size_t n_scales() const noexcept { return scales.size(); }
    [[nodiscard]] std::size_t index(std::size_t j, std::size_t t) const noexcept { return j * n_times + t; }
    T& operator()(std::size_t j, std::size_t t) noexcept { return values[index(j, t)]; }
    const T& operator()(std::size_t j, std::size_t t) const noexcept { return values[index(j, t)]; }
    [[nodiscard]] std::uint8_t flag(std::size_t j, std::size_t t) const noexcept { return flags[index(j, t)]; }
    [[nodiscard]] bool in_coi(std::size_t j, std::size_t t) const noexcept { return !(flag(j, t) & kOutsideCoi); }
    [[nodiscard]] bool usable(std::size_t j, std::size_t t) const noexcept { return flag(j, t) == kCellOk; }
};

using RealGrid = Grid<double>;

} // namespace wcoh

#endif // WCOH_GRID_HPP
