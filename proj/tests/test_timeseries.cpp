#include <wcoh/timeseries.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using namespace wcoh;

namespace {

Date ymd(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y} / m / d}; }

/// Weekdays only, starting on `first`.
std::vector<Date> business_days(Date first, std::size_t n)
{
    std::vector<Date> out;
    for (Date d = first; out.size() < n; d += std::chrono::days{1}) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
    }
    return out;
}

std::string make_csv(const std::vector<Date>& dates, std::size_t p)
{
    std::ostringstream os;
    os << "date";
    for (std::size_t j = 0; j < p; ++j) os << ",s" << j;
    os << '\n';
    for (std::size_t r = 0; r < dates.size(); ++r) {
        os << format_date(dates[r]);
        for (std::size_t j = 0; j < p; ++j) os << ',' << 100.0 + static_cast<double>(r) + 0.25 * static_cast<double>(j);
        os << '\n';
    }
    return os.str();
}

MultiSeries parse(const std::string& text, CsvSchema schema = {})
{
    std::istringstream in(text);
    return parse_csv(in, schema).data;
}

MultiSeries ramp(std::size_t n, std::size_t p)
{
    return parse(make_csv(business_days(ymd(2010, 1, 4), n), p));
}

} // namespace

TEST(ParseDate, AcceptsIsoAndDottedForms)
{
    EXPECT_EQ(parse_date("2011-11-14"), ymd(2011, 11, 14));
    EXPECT_EQ(parse_date("14.11.2011"), ymd(2011, 11, 14));
    EXPECT_EQ(format_date(parse_date("16.11.2012")), "2012-11-16");
}

TEST(ParseDate, RejectsMalformedAndImpossibleDates)
{
    EXPECT_THROW(parse_date("2011/11/14"), DataError);
    EXPECT_THROW(parse_date("2011-02-30"), DataError);
    EXPECT_THROW(parse_date("yesterday"), DataError);
}

TEST(LoadCsv, FourColumnsOf1024Rows)
{
    const auto ms = ramp(1024, 4);
    EXPECT_EQ(ms.size(), 4u);
    EXPECT_EQ(ms.length(), 1024u);
    EXPECT_DOUBLE_EQ(ms.dt(), 1.0);
}

TEST(LoadCsv, SingleColumnTenRows)
{
    const auto ms = ramp(10, 1);
    EXPECT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms.length(), 10u);
}

TEST(LoadCsv, DuplicateDateIsAnError)
{
    auto dates = business_days(ymd(2010, 1, 4), 12);
    dates[7] = dates[6];
    try {
        parse(make_csv(dates, 2));
        FAIL() << "expected an error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate timestamp"), std::string::npos);
    }
}

TEST(LoadCsv, DropsIncompleteRowsAndReportsThem)
{
    const std::string text = "date,a,b\n"
                             "2010-01-01,1,2\n2010-01-02,,3\n2010-01-03,4,NA\n2010-01-04,5,6\n2010-01-05,7,8\n"
                             "2010-01-06,9,10\n2010-01-07,11,12\n2010-01-08,13,14\n2010-01-09,15,16\n2010-01-10,17,18\n";
    std::istringstream in(text);
    const auto loaded = parse_csv(in, {});
    EXPECT_EQ(loaded.report.rows_read, 10u);
    EXPECT_EQ(loaded.report.rows_dropped, 2u);
    EXPECT_EQ(loaded.report.rows_kept, 8u);
    EXPECT_EQ(loaded.data.length(), 8u);
    EXPECT_DOUBLE_EQ(loaded.data.values(1)[1], 6.0);
    EXPECT_NE(loaded.report.summary().find("dropped"), std::string::npos);
}

TEST(LoadCsv, SortsRowsByDate)
{
    auto dates = business_days(ymd(2010, 1, 4), 9);
    std::swap(dates[0], dates[8]);
    const auto ms = parse(make_csv(dates, 1));
    for (std::size_t i = 1; i < ms.length(); ++i) EXPECT_LT(ms.timestamps()[i - 1], ms.timestamps()[i]);
    EXPECT_DOUBLE_EQ(ms.values(0).front(), 108.0);
}

TEST(LoadCsv, SelectsNamedColumnsAndCustomDateColumn)
{
    const std::string text = "x,when,y\n" + std::string("1,01.02.2010,10\n2,02.02.2010,20\n3,03.02.2010,30\n")
                             + "4,04.02.2010,40\n5,05.02.2010,50\n6,06.02.2010,60\n7,07.02.2010,70\n8,08.02.2010,80\n";
    const auto ms = parse(text, CsvSchema{"when", {"y"}});
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms.names()[0], "y");
    EXPECT_DOUBLE_EQ(ms.values(0)[2], 30.0);
    EXPECT_THROW(parse(text, CsvSchema{"date", {}}), UsageError);
    EXPECT_THROW(parse(text, CsvSchema{"when", {"z"}}), UsageError);
}

TEST(LoadCsv, ErrorContracts)
{
    EXPECT_THROW(parse(make_csv(business_days(ymd(2010, 1, 4), 7), 2)), DataError);
    EXPECT_THROW(parse("date,a\n2010-13-01,1\n"), DataError);
    EXPECT_THROW(parse("date,a\n2010-01-01,abc\n"), DataError);
    EXPECT_THROW(parse(""), DataError);
    try {
        load_csv("/nonexistent/dir/prices.csv", {});
        FAIL() << "expected an error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/prices.csv"), std::string::npos);
    }
}

TEST(LoadCsv, IdenticalBytesGiveIdenticalSeries)
{
    const auto text = make_csv(business_days(ymd(2010, 1, 4), 64), 3);
    EXPECT_EQ(parse(text), parse(text));
}

TEST(MultiSeries, ConstructorEnforcesInvariants)
{
    const auto dates = business_days(ymd(2010, 1, 4), 8);
    const std::vector<double> col(8, 1.0);
    EXPECT_NO_THROW(MultiSeries(dates, {"a"}, {col}));
    EXPECT_THROW(MultiSeries(dates, std::vector<std::string>(9, "a"), std::vector<std::vector<double>>(9, col)), DataError);
    EXPECT_THROW(MultiSeries(dates, {"a", "b"}, {col, std::vector<double>(7, 1.0)}), DataError);
    EXPECT_THROW(MultiSeries(dates, {"a", "b"}, {col}), DataError);
    auto bad = col;
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(MultiSeries(dates, {"a"}, {bad}), DataError);
    auto dup = dates;
    dup[4] = dup[3];
    EXPECT_THROW(MultiSeries(dup, {"a"}, {col}), DataError);
    EXPECT_THROW(MultiSeries({dates.begin(), dates.begin() + 7}, {"a"}, {std::vector<double>(7, 1.0)}), DataError);
}

TEST(Window, SelectsInclusiveRange)
{
    const auto ms = ramp(1024, 4);
    const auto& ts = ms.timestamps();
    const auto w = window(ms, ts[700], ts[955]);
    EXPECT_EQ(w.length(), 256u);
    EXPECT_EQ(w.timestamps().front(), ts[700]);
    EXPECT_EQ(w.timestamps().back(), ts[955]);
    EXPECT_DOUBLE_EQ(w.values(2)[0], ms.values(2)[700]);
}

TEST(Window, FullRangeIsIdentity)
{
    const auto ms = ramp(100, 2);
    EXPECT_EQ(window(ms, ms.timestamps().front(), ms.timestamps().back()), ms);
    EXPECT_EQ(window(ms, ymd(1990, 1, 1), ymd(2090, 1, 1)), ms);
}

TEST(Window, NestedWindowsEqualInnerWindow)
{
    const auto ms = ramp(300, 2);
    const auto& ts = ms.timestamps();
    const auto outer = window(ms, ts[20], ts[250]);
    EXPECT_EQ(window(outer, ts[50], ts[120]), window(ms, ts[50], ts[120]));
}

TEST(Window, ErrorContracts)
{
    const auto ms = ramp(100, 2);
    try {
        window(ms, ymd(2030, 1, 1), ymd(2031, 1, 1));
        FAIL() << "expected an error";
    } catch (const DataError& e) {
        EXPECT_EQ(std::string(e.what()), "empty window");
    }
    EXPECT_THROW(window(ms, ms.timestamps()[0], ms.timestamps()[6]), DataError);
    EXPECT_THROW(window(ms, ms.timestamps()[10], ms.timestamps()[2]), UsageError);
}

TEST(Rescale, MultipliesEachSeries)
{
    const auto ms = ramp(20, 4);
    const auto r = rescale(ms, {10.0, 2.0, 0.5, 2.0});
    EXPECT_DOUBLE_EQ(r.values(0)[3], 10.0 * ms.values(0)[3]);
    EXPECT_DOUBLE_EQ(r.values(2)[3], 0.5 * ms.values(2)[3]);
    EXPECT_EQ(r.timestamps(), ms.timestamps());
}

TEST(Rescale, UnitFactorsAreIdentity)
{
    const auto ms = ramp(20, 3);
    EXPECT_EQ(rescale(ms, {1.0, 1.0, 1.0}), ms);
}

TEST(Rescale, ReciprocalFactorsInvert)
{
    const auto ms = ramp(50, 3);
    const std::vector<double> f{2.0, 3.0, 7.0};
    const auto back = rescale(rescale(ms, f), {1.0 / 2.0, 1.0 / 3.0, 1.0 / 7.0});
    for (std::size_t j = 0; j < ms.size(); ++j)
        for (std::size_t t = 0; t < ms.length(); ++t)
            EXPECT_NEAR(back.values(j)[t], ms.values(j)[t], 1e-12 * std::abs(ms.values(j)[t]));
}

TEST(Rescale, ErrorContracts)
{
    const auto ms = ramp(20, 2);
    EXPECT_THROW(rescale(ms, {1.0}), UsageError);
    EXPECT_THROW(rescale(ms, {1.0, 0.0}), UsageError);
    EXPECT_THROW(rescale(ms, {1.0, -2.0}), UsageError);
}

TEST(LogTransform, RequiresPositiveValues)
{
    const auto ms = ramp(20, 1);
    EXPECT_NEAR(log_transform(ms).values(0)[0], std::log(100.0), 1e-15);
    EXPECT_THROW(log_transform(ms.with_columns({std::vector<double>(20, -1.0)})), DataError);
}
