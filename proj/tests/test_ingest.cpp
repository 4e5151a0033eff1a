#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mktphase/error.hpp"
#include "mktphase/ingest.hpp"

using namespace mktphase;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MKTPHASE_TEST_DATA;

std::string error_text(auto&& fn, ErrorCategory expected) {
    try {
        fn();
    } catch (const Error& e) {
        CHECK(e.category() == expected);
        return e.what();
    }
    FAIL("no mktphase::Error thrown");
    return {};
}

Date ymd(int y, unsigned m, unsigned d) { return std::chrono::year{y} / m / d; }

// Prices that move every day unless listed in `flat_days` (day t repeats day t-1).
Eigen::RowVectorXd price_path(int n_days, std::initializer_list<int> flat_days, double start = 20.0) {
    Eigen::RowVectorXd p(n_days);
    p(0) = start;
    int k = 0;
    for (int t = 1; t < n_days; ++t) {
        const bool flat = std::find(flat_days.begin(), flat_days.end(), t) != flat_days.end();
        p(t) = flat ? p(t - 1) : p(t - 1) + ((++k % 2) ? 0.01 : -0.02) + 0.005;
    }
    return p;
}

PricePanel panel_of(const std::vector<Eigen::RowVectorXd>& rows) {
    PricePanel p;
    const auto t = rows.front().size();
    p.dates = synthetic_calendar(static_cast<std::size_t>(t));
    p.taxonomy = {"One", "Two"};
    p.prices.resize(static_cast<Eigen::Index>(rows.size()), t);
    p.volumes.setConstant(static_cast<Eigen::Index>(rows.size()), t, 100.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        p.tickers.push_back("F" + std::to_string(i));
        p.sectors.push_back(i % 2);
        p.prices.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    return p;
}

}  // namespace

TEST_CASE("iso dates", "[ingest]") {
    CHECK(parse_iso_date("2001-03-05") == ymd(2001, 3, 5));
    CHECK_FALSE(parse_iso_date("2001-02-30"));
    CHECK_FALSE(parse_iso_date("2001-3-5"));
    CHECK_FALSE(parse_iso_date("20010305"));
    CHECK(format_iso_date(ymd(1987, 1, 2)) == "1987-01-02");

    const auto cal = synthetic_calendar(300, 1990);
    REQUIRE(cal.size() == 300);
    CHECK(cal.front() == ymd(1990, 1, 2));
    CHECK(year_of(cal[251]) == 1990);
    CHECK(year_of(cal[252]) == 1991);
    for (std::size_t t = 1; t < cal.size(); ++t) CHECK(cal[t - 1] < cal[t]);
}

TEST_CASE("aligned fixture loads as N=2, T=3", "[ingest]") {
    const auto p = load_panel(kData / "quotes_small.csv", kData / "sectors_small.csv");
    CHECK(p.n_firms() == 2);
    CHECK(p.n_days() == 3);
    CHECK(p.tickers == std::vector<std::string>{"AAA", "BBB"});
    CHECK(p.taxonomy == std::vector<std::string>{"Energy", "Financials", "Utilities"});
    CHECK(p.sectors == std::vector<std::size_t>{0, 1});
    CHECK(p.prices(1, 2) == 20.75);
    CHECK(p.volumes(0, 1) == 1100);
}

TEST_CASE("dates missing for one ticker are dropped for all", "[ingest]") {
    // Hand intersection: AAA has 03-01, 03-05, 03-06; BBB has all four days.
    const auto p = load_panel(kData / "quotes_gap.csv", kData / "sectors_small.csv");
    REQUIRE(p.n_days() == 3);
    CHECK(p.dates == std::vector<Date>{ymd(2001, 3, 1), ymd(2001, 3, 5), ymd(2001, 3, 6)});
    CHECK(p.prices(0, 2) == 10.20);
    CHECK(p.prices(1, 1) == 20.75);
}

TEST_CASE("load errors", "[ingest]") {
    const auto unmapped = error_text([] { load_panel(kData / "quotes_unmapped.csv", kData / "sectors_small.csv"); },
                                     ErrorCategory::input);
    CHECK_THAT(unmapped, Catch::Matchers::ContainsSubstring("XYZ"));

    const auto bad = error_text([] { load_panel(kData / "quotes_badline.csv", kData / "sectors_small.csv"); },
                                ErrorCategory::parse);
    CHECK_THAT(bad, Catch::Matchers::ContainsSubstring("quotes_badline.csv:3"));

    const auto empty = error_text([] { load_panel(kData / "quotes_empty.csv", kData / "sectors_small.csv"); },
                                  ErrorCategory::parse);
    CHECK_THAT(empty, Catch::Matchers::ContainsSubstring("empty quote file"));

    std::istringstream dup("date,ticker,close,volume\n2001-03-01,A,1,1\n2001-03-01,A,2,1\n");
    CHECK_THAT(error_text([&] { parse_quotes(dup); }, ErrorCategory::parse),
               Catch::Matchers::ContainsSubstring("duplicate"));
    std::istringstream neg("date,ticker,close,volume\n2001-03-01,A,-1,1\n");
    error_text([&] { parse_quotes(neg); }, ErrorCategory::parse);

    std::istringstream map("ticker,sector\nAAA,Energy\n");
    const std::vector<std::string> tax = {"Financials"};
    error_text([&] { parse_sector_map(map, "<m>", {}, tax); }, ErrorCategory::parse);
}

TEST_CASE("staleness measures", "[ingest]") {
    const auto s = staleness(price_path(100, {3, 4, 5, 50}));
    CHECK(s.stale_fraction == 0.04);
    CHECK(s.longest_flat_run == 4);
    const auto none = staleness(price_path(30, {}));
    CHECK(none.stale_fraction == 0.0);
    CHECK(none.longest_flat_run == 1);
}

TEST_CASE("liquidity filter", "[ingest]") {
    SECTION("constant price is removed, moving price kept") {
        const auto p = panel_of({Eigen::RowVectorXd::Constant(50, 12.5), price_path(50, {})});
        const auto r = filter_liquidity_report(p, {0.07, 10});
        CHECK(r.panel.tickers == std::vector<std::string>{"F1"});
        REQUIRE(r.dropped.size() == 1);
        CHECK(r.dropped[0].ticker == "F0");
    }
    SECTION("exactly the firm with an 11-day flat run") {
        // Days 40..50 share one price: 10 repeats, an 11-day run, stale 0.05 < 0.07.
        std::vector<Eigen::RowVectorXd> rows;
        for (int i = 0; i < 5; ++i) rows.push_back(price_path(200, {7, 90}, 10.0 + i));
        rows[3] = price_path(200, {41, 42, 43, 44, 45, 46, 47, 48, 49, 50}, 13.0);
        const auto r = filter_liquidity_report(panel_of(rows), {0.07, 10});
        REQUIRE(r.dropped.size() == 1);
        CHECK(r.dropped[0].ticker == "F3");
        CHECK(r.dropped[0].longest_flat_run == 11);
        CHECK(r.dropped[0].reason == "flat run 11 >= 10");
        CHECK(r.panel.n_firms() == 4);
    }
    SECTION("stale fraction reason") {
        // 12 isolated repeats over 100 days.
        const auto stale = price_path(100, {5, 13, 21, 29, 37, 45, 53, 61, 69, 77, 85, 93});
        const auto r = filter_liquidity_report(panel_of({stale, price_path(100, {})}), {0.07, 10});
        REQUIRE(r.dropped.size() == 1);
        CHECK(r.dropped[0].reason == "stale 0.12 > 0.07");
    }
    SECTION("all removed is an error") {
        const auto p = panel_of({Eigen::RowVectorXd::Constant(50, 1.0), Eigen::RowVectorXd::Constant(50, 2.0)});
        CHECK_THAT(error_text([&] { filter_liquidity(p); }, ErrorCategory::input),
                   Catch::Matchers::ContainsSubstring("empty panel after filtering"));
    }
    SECTION("rule preconditions") {
        const auto p = panel_of({price_path(50, {})});
        error_text([&] { filter_liquidity(p, 0.0, 10); }, ErrorCategory::config);
        error_text([&] { filter_liquidity(p, 1.0, 10); }, ErrorCategory::config);
        error_text([&] { filter_liquidity(p, 0.07, 1); }, ErrorCategory::config);
    }
}

TEST_CASE("liquidity filter is idempotent and preserves survivors", "[ingest]") {
    std::vector<Eigen::RowVectorXd> rows;
    for (int i = 0; i < 12; ++i) {
        std::initializer_list<int> none = {};
        rows.push_back(i % 4 == 0 ? price_path(120, {10, 11, 12, 13, 14, 15, 16, 17, 18, 19}, 5.0 + i)
                                  : i % 4 == 1 ? price_path(120, {3, 9, 27, 33, 51, 60, 71, 80, 99}, 5.0 + i)
                                               : price_path(120, none, 5.0 + i));
    }
    auto p = panel_of(rows);
    for (Eigen::Index i = 0; i < p.volumes.rows(); ++i)
        for (Eigen::Index t = 0; t < p.volumes.cols(); ++t) p.volumes(i, t) = static_cast<double>(1 + i * 1000 + t);
    const auto once = filter_liquidity(p);
    const auto twice = filter_liquidity(once);
    CHECK(once.tickers == twice.tickers);
    CHECK(once.prices == twice.prices);
    CHECK(once.volumes == twice.volumes);
    CHECK(once.n_firms() == 6);
    for (std::size_t k = 0; k < once.n_firms(); ++k) {
        const auto i = static_cast<Eigen::Index>(std::stoi(once.tickers[k].substr(1)));
        CHECK(once.prices.row(static_cast<Eigen::Index>(k)) == p.prices.row(i));
        CHECK(once.volumes.row(static_cast<Eigen::Index>(k)) == p.volumes.row(i));
    }
}

TEST_CASE("annual volume", "[ingest]") {
    SECTION("unit volume over a 252-day year") {
        auto p = panel_of({price_path(504, {})});
        p.volumes.setOnes();
        CHECK(annual_volume(p, 1990)(0) == 252.0);
        CHECK(annual_volume(p, 1991)(0) == 252.0);
        error_text([&] { annual_volume(p, 1995); }, ErrorCategory::input);
    }
    SECTION("hand-summed fixture") {
        const std::vector<Date> dates = {ymd(2000, 12, 28), ymd(2000, 12, 29), ymd(2001, 1, 2), ymd(2001, 1, 3)};
        Eigen::MatrixXd v(3, 4);
        v << 5, 7, 11, 13,
             100, 0, 250, 50,
             1, 2, 3, 4;
        const auto y2000 = annual_volume(dates, v, 2000);
        const auto y2001 = annual_volume(dates, v, 2001);
        CHECK(y2000(0) == 12);
        CHECK(y2000(1) == 100);
        CHECK(y2000(2) == 3);
        CHECK(y2001(0) == 24);
        CHECK(y2001(1) == 300);
        CHECK(y2001(2) == 7);
    }
}

TEST_CASE("panel round trip through files", "[ingest]") {
    auto p = load_panel(kData / "quotes_gap.csv", kData / "sectors_small.csv");
    const auto dir = fs::temp_directory_path() / "mktphase_panel_rt";
    fs::remove_all(dir);
    save_panel(p, dir);
    const auto q = read_panel(dir);
    CHECK(q.tickers == p.tickers);
    CHECK(q.dates == p.dates);
    CHECK(q.taxonomy == p.taxonomy);
    CHECK(q.sectors == p.sectors);
    CHECK(q.prices == p.prices);
    CHECK(q.volumes == p.volumes);

    std::ostringstream quotes, sectors;
    write_quotes(quotes, p);
    write_sector_map(sectors, p);
    std::istringstream qin(quotes.str()), sin(sectors.str());
    const auto records = parse_quotes(qin);
    const auto map = parse_sector_map(sin);
    const auto r = load_panel(records, map);
    CHECK(r.prices == p.prices);
    CHECK(r.taxonomy == p.taxonomy);
    fs::remove_all(dir);
}
