#ifndef WCOH_GRID_IO_HPP
#define WCOH_GRID_IO_HPP

#include "error.hpp"
#include "grid.hpp"
#include "timeseries.hpp"

#include <charconv>
#include <complex>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace wcoh {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write output file '" + path + "'");
    return out;
}

/// Long format: one row per cell, scale-major. `value_label` names the value
/// column and should carry its units.
inline void write_grid(std::ostream& out, const RealGrid& g, std::string_view value_label)
{
    out << "scale_dt,time_index," << value_label << ",coi_flag,degenerate_flag\n";
    for (std::size_t j = 0; j < g.n_scales(); ++j)
        for (std::size_t t = 0; t < g.n_times; ++t) {
            const auto f = g.flag(j, t);
            out << format_number(g.scales[j]) << ',' << t << ',' << format_number(g(j, t)) << ','
                << ((f & kOutsideCoi) ? 1 : 0) << ',' << ((f & kDegenerate) ? 1 : 0) << '\n';
        }
}

inline void write_grid(std::ostream& out, const Grid<std::complex<double>>& g, std::string_view value_label)
{
    out << "scale_dt,time_index," << value_label << "_re," << value_label << "_im,coi_flag,degenerate_flag\n";
    for (std::size_t j = 0; j < g.n_scales(); ++j)
        for (std::size_t t = 0; t < g.n_times; ++t) {
            const auto f = g.flag(j, t);
            const auto v = g(j, t);
            out << format_number(g.scales[j]) << ',' << t << ',' << format_number(v.real()) << ','
                << format_number(v.imag()) << ',' << ((f & kOutsideCoi) ? 1 : 0) << ','
                << ((f & kDegenerate) ? 1 : 0) << '\n';
        }
}

template <typename T>
void emit_grid(const Grid<T>& g, const std::string& path, std::string_view value_label)
{
    auto out = open_output(path);
    write_grid(out, g, value_label);
    if (!out) throw DataError("error writing '" + path + "'");
}

namespace detail {

inline double parse_number(std::string_view s)
{
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw DataError("unparseable number '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// Reads a real grid written by write_grid. Rows must be scale-major and
/// complete.
inline RealGrid read_grid(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty grid file");
    if (detail::split(line, ',').size() != 5) throw DataError("grid header must have 5 columns");

    RealGrid g;
    std::size_t max_t = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 5) throw DataError("malformed grid row '" + line + "'");
        const double s = detail::parse_number(f[0]);
        std::size_t t = 0;
        if (!detail::parse_int(f[1], t)) throw DataError("bad time index '" + std::string(f[1]) + "'");
        if (g.scales.empty() || g.scales.back() != s) g.scales.push_back(s);
        max_t = std::max(max_t, t);
        g.values.push_back(detail::parse_number(f[2]));
        std::uint8_t flag = kCellOk;
        if (f[3] == "1") flag |= kOutsideCoi;
        if (f[4] == "1") flag |= kDegenerate;
        g.flags.push_back(flag);
    }
    g.n_times = g.values.empty() ? 0 : max_t + 1;
    if (g.values.size() != g.scales.size() * g.n_times) throw DataError("grid file is not a complete scale x time grid");
    return g;
}

/// Minimal CSV table: a header and rows of preformatted fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// Lines written before the header, each prefixed with "# ".
    std::vector<std::string> notes;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    void write(std::ostream& out) const
    {
        for (const auto& n : notes) out << "# " << n << '\n';
        auto line = [&](const std::vector<std::string>& fields) {
            for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
            out << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
    }

    void save(const std::string& path) const
    {
        auto out = open_output(path);
        write(out);
        if (!out) throw DataError("error writing '" + path + "'");
    }
};

/// date,<name1>,<name2>,... with one row per timestamp.
inline CsvTable series_table(const MultiSeries& ms)
{
    CsvTable t;
    t.header.push_back("date");
    for (const auto& n : ms.names()) t.header.push_back(n);
    for (std::size_t r = 0; r < ms.length(); ++r) {
        std::vector<std::string> row{format_date(ms.timestamps()[r])};
        for (std::size_t c = 0; c < ms.size(); ++c) row.push_back(format_number(ms.values(c)[r]));
        t.add(std::move(row));
    }
    return t;
}

} // namespace wcoh

#endif // WCOH_GRID_IO_HPP
