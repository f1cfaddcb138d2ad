#ifndef WCOH_TIMESERIES_HPP
#define WCOH_TIMESERIES_HPP

#include "error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wcoh {

using Date = std::chrono::sys_days;

/// Shortest series any transform in the library accepts.
inline constexpr std::size_t kMinSeriesLength = 8;
inline constexpr std::size_t kMaxSeriesCount = 8;

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n\"";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out)
{
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end;
}

} // namespace detail

/// Parses "YYYY-MM-DD" or "DD.MM.YYYY". Throws DataError on anything else.
inline Date parse_date(std::string_view text)
{
    text = detail::trim(text);
    int y = 0;
    unsigned m = 0, d = 0;
    bool ok = false;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        ok = detail::parse_int(text.substr(0, 4), y) && detail::parse_int(text.substr(5, 2), m)
             && detail::parse_int(text.substr(8, 2), d);
    } else if (text.size() == 10 && text[2] == '.' && text[5] == '.') {
        ok = detail::parse_int(text.substr(0, 2), d) && detail::parse_int(text.substr(3, 2), m)
             && detail::parse_int(text.substr(6, 4), y);
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ok || !ymd.ok()) throw DataError("unparseable date '" + std::string(text) + "'");
    return Date{ymd};
}

inline std::string format_date(Date date)
{
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

struct TimeSeries {
    std::string name;
    std::vector<Date> timestamps;
    std::vector<double> values;
};

/// p series sharing one daily grid. Calendar gaps are ignored: dt is one
/// observation. Immutable once constructed.
class MultiSeries {
public:
    MultiSeries(std::vector<Date> timestamps, std::vector<std::string> names, std::vector<std::vector<double>> columns)
        : timestamps_(std::move(timestamps)), names_(std::move(names)), columns_(std::move(columns))
    {
        detail::require_data(!columns_.empty() && columns_.size() <= kMaxSeriesCount,
                             "series count must be between 1 and 8");
        detail::require_data(names_.size() == columns_.size(), "one name per series required");
        detail::require_data(timestamps_.size() >= kMinSeriesLength, "fewer than 8 observations");
        for (std::size_t t = 1; t < timestamps_.size(); ++t) {
            if (timestamps_[t] == timestamps_[t - 1]) throw DataError("duplicate timestamp " + format_date(timestamps_[t]));
            detail::require_data(timestamps_[t] > timestamps_[t - 1], "timestamps must be strictly increasing");
        }
        for (const auto& col : columns_) {
            detail::require_data(col.size() == timestamps_.size(), "column length does not match timestamp grid");
            for (double v : col) detail::require_data(std::isfinite(v), "non-finite value in series");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return columns_.size(); }
    [[nodiscard]] std::size_t length() const noexcept { return timestamps_.size(); }
    [[nodiscard]] double dt() const noexcept { return 1.0; }
    [[nodiscard]] const std::vector<Date>& timestamps() const noexcept { return timestamps_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const std::vector<double>& values(std::size_t i) const { return columns_.at(i); }
    [[nodiscard]] const std::vector<std::vector<double>>& columns() const noexcept { return columns_; }

    [[nodiscard]] TimeSeries series(std::size_t i) const { return {names_.at(i), timestamps_, columns_.at(i)}; }

    [[nodiscard]] std::size_t index_of(std::string_view name) const
    {
        const auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) throw UsageError("no series named '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - names_.begin());
    }

    /// Same grid and names, new values.
    [[nodiscard]] MultiSeries with_columns(std::vector<std::vector<double>> columns) const
    {
        return MultiSeries(timestamps_, names_, std::move(columns));
    }

    friend bool operator==(const MultiSeries&, const MultiSeries&) = default;

private:
    std::vector<Date> timestamps_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

struct CsvSchema {
    std::string date_column = "date";
    /// Empty means every non-date column.
    std::vector<std::string> value_columns;
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::size_t rows_kept = 0;
    std::vector<std::string> columns;

    [[nodiscard]] std::string summary() const
    {
        std::ostringstream os;
        os << "rows read: " << rows_read << ", kept: " << rows_kept << ", dropped (incomplete): " << rows_dropped
           << ", series:";
        for (const auto& c : columns) os << ' ' << c;
        return os.str();
    }
};

struct LoadedSeries {
    MultiSeries data;
    LoadReport report;
};

namespace detail {

inline bool is_missing(std::string_view field)
{
    return field.empty() || field == "NA" || field == "na" || field == "NaN" || field == "nan" || field == "null"
           || field == "-";
}

} // namespace detail

/// Comma-separated with a header row. Rows with a missing value in any
/// selected column are dropped and counted.
inline LoadedSeries parse_csv(std::istream& in, const CsvSchema& schema)
{
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input: header row required");
    const auto header = detail::split(line, ',');
    std::vector<std::string> names(header.begin(), header.end());

    const auto date_it = std::find(names.begin(), names.end(), schema.date_column);
    if (date_it == names.end()) throw UsageError("date column '" + schema.date_column + "' not found in header");
    const auto date_idx = static_cast<std::size_t>(date_it - names.begin());

    std::vector<std::size_t> value_idx;
    std::vector<std::string> value_names;
    if (schema.value_columns.empty()) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (i != date_idx) {
                value_idx.push_back(i);
                value_names.push_back(names[i]);
            }
    } else {
        for (const auto& col : schema.value_columns) {
            const auto it = std::find(names.begin(), names.end(), col);
            if (it == names.end()) throw UsageError("value column '" + col + "' not found in header");
            value_idx.push_back(static_cast<std::size_t>(it - names.begin()));
            value_names.push_back(col);
        }
    }
    if (value_idx.empty()) throw UsageError("schema selects no value columns");

    struct Row {
        Date date;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    LoadReport report;
    report.columns = value_names;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        ++report.rows_read;
        const auto fields = detail::split(line, ',');
        if (date_idx >= fields.size() || fields[date_idx].empty()) {
            ++report.rows_dropped;
            continue;
        }
        Row row{parse_date(fields[date_idx]), {}};
        bool complete = true;
        for (auto idx : value_idx) {
            if (idx >= fields.size() || detail::is_missing(fields[idx])) {
                complete = false;
                break;
            }
            double v = 0.0;
            const auto f = fields[idx];
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || p != f.data() + f.size())
                throw DataError("unparseable value '" + std::string(f) + "' on line " + std::to_string(line_no));
            if (!std::isfinite(v)) {
                complete = false;
                break;
            }
            row.values.push_back(v);
        }
        if (!complete) {
            ++report.rows_dropped;
            continue;
        }
        rows.push_back(std::move(row));
    }
    report.rows_kept = rows.size();
    if (rows.size() < kMinSeriesLength)
        throw DataError("fewer than 8 complete rows (" + std::to_string(rows.size()) + ")");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    std::vector<Date> dates;
    std::vector<std::vector<double>> columns(value_idx.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r > 0 && rows[r].date == rows[r - 1].date)
            throw DataError("duplicate timestamp " + format_date(rows[r].date));
        dates.push_back(rows[r].date);
        for (std::size_t c = 0; c < columns.size(); ++c) columns[c].push_back(rows[r].values[c]);
    }
    return {MultiSeries(std::move(dates), std::move(value_names), std::move(columns)), std::move(report)};
}

inline LoadedSeries load_csv(const std::string& path, const CsvSchema& schema)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot read input file '" + path + "'");
    return parse_csv(in, schema);
}

/// Inclusive date range restriction.
inline MultiSeries window(const MultiSeries& ms, Date start, Date end)
{
    detail::require(start <= end, "window start must not be after end");
    const auto& ts = ms.timestamps();
    const auto lo = std::lower_bound(ts.begin(), ts.end(), start);
    const auto hi = std::upper_bound(ts.begin(), ts.end(), end);
    const auto count = static_cast<std::size_t>(hi - lo);
    if (count == 0) throw DataError("empty window");
    if (count < kMinSeriesLength) throw DataError("window shorter than 8 samples");
    const auto first = static_cast<std::size_t>(lo - ts.begin());

    std::vector<std::vector<double>> columns;
    for (const auto& col : ms.columns())
        columns.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(first),
                             col.begin() + static_cast<std::ptrdiff_t>(first + count));
    return MultiSeries(std::vector<Date>(lo, hi), ms.names(), std::move(columns));
}

inline MultiSeries rescale(const MultiSeries& ms, const std::vector<double>& factors)
{
    if (factors.size() != ms.size())
        throw UsageError("factor count mismatch: " + std::to_string(factors.size()) + " factors for "
                         + std::to_string(ms.size()) + " series");
    auto columns = ms.columns();
    for (std::size_t i = 0; i < factors.size(); ++i) {
        detail::require(std::isfinite(factors[i]) && factors[i] > 0.0, "scale factors must be finite and positive");
        for (double& v : columns[i]) v *= factors[i];
    }
    return ms.with_columns(std::move(columns));
}

/// Natural log of every value; all values must be positive.
inline MultiSeries log_transform(const MultiSeries& ms)
{
    auto columns = ms.columns();
    for (auto& col : columns)
        for (double& v : col) {
            detail::require_data(v > 0.0, "log transform requires positive values");
            v = std::log(v);
        }
    return ms.with_columns(std::move(columns));
}

} // namespace wcoh

#endif // WCOH_TIMESERIES_HPP
