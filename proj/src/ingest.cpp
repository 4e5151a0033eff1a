#include "mktphase/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "mktphase/error.hpp"
#include "mktphase/table.hpp"

namespace mktphase {

namespace {

// Prices are compared for staleness after rounding to this many decimals.
constexpr double kPriceScale = 1e6;

bool parse_number(std::string_view text, double& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

bool parse_int(std::string_view text, int& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

[[noreturn]] void fail_at(const std::string& source, std::size_t line, const std::string& msg) {
    throw Error(ErrorCategory::parse, source + ":" + std::to_string(line) + ": " + msg);
}

bool is_skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::ifstream open_input(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCategory::io, "cannot open " + p.string());
    return in;
}

std::int64_t price_ticks(double price) { return std::llround(price * kPriceScale); }

}  // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::vector<Date> synthetic_calendar(std::size_t n_days, int first_year) {
    using namespace std::chrono;
    std::vector<Date> out;
    out.reserve(n_days);
    int year_num = first_year;
    while (out.size() < n_days) {
        sys_days day{year_month_day{year{year_num}, January, std::chrono::day{2}}};
        int taken = 0;
        while (taken < 252 && out.size() < n_days) {
            const weekday wd{day};
            if (wd != Saturday && wd != Sunday) {
                out.emplace_back(day);
                ++taken;
            }
            day += days{1};
        }
        ++year_num;
    }
    return out;
}

const std::vector<std::string>& gics_sectors() {
    static const std::vector<std::string> sectors = {
        "Consumer Discretionary", "Consumer Staples", "Energy",      "Financials",
        "Health Care",            "Industrials",      "IT",          "Materials",
        "Telecommunication Services", "Utilities"};
    return sectors;
}

PricePanel PricePanel::select_firms(std::span<const std::size_t> rows) const {
    PricePanel out;
    out.dates = dates;
    out.taxonomy = taxonomy;
    out.prices.resize(static_cast<Eigen::Index>(rows.size()), prices.cols());
    out.volumes.resize(static_cast<Eigen::Index>(rows.size()), volumes.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(rows[k]);
        out.tickers.push_back(tickers.at(rows[k]));
        out.sectors.push_back(sectors.at(rows[k]));
        out.prices.row(static_cast<Eigen::Index>(k)) = prices.row(r);
        out.volumes.row(static_cast<Eigen::Index>(k)) = volumes.row(r);
    }
    return out;
}

std::vector<RawQuote> parse_quotes(std::istream& in, const std::string& source, CsvOptions opts) {
    std::vector<RawQuote> out;
    std::set<std::pair<Date, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        if (!header) {
            header = true;
            continue;
        }
        const auto f = split_fields(line, opts.delimiter);
        if (f.size() != 4) fail_at(source, line_no, "expected 4 fields, got " + std::to_string(f.size()));
        RawQuote q;
        const auto date = parse_iso_date(f[0]);
        if (!date) fail_at(source, line_no, "bad date '" + f[0] + "'");
        q.date = *date;
        q.ticker = f[1];
        if (q.ticker.empty()) fail_at(source, line_no, "empty ticker");
        if (!parse_number(f[2], q.price)) fail_at(source, line_no, "bad price '" + f[2] + "'");
        if (!(q.price > 0.0)) fail_at(source, line_no, "price must be positive");
        if (!parse_number(f[3], q.volume)) fail_at(source, line_no, "bad volume '" + f[3] + "'");
        if (q.volume < 0.0) fail_at(source, line_no, "volume must be nonnegative");
        if (!seen.emplace(q.date, q.ticker).second)
            fail_at(source, line_no, "duplicate quote for " + q.ticker + " on " + f[0]);
        out.push_back(std::move(q));
    }
    if (!header) throw Error(ErrorCategory::parse, source + ": empty quote file");
    if (out.empty()) throw Error(ErrorCategory::parse, source + ": no quote records");
    return out;
}

SectorMap parse_sector_map(std::istream& in, const std::string& source, CsvOptions opts,
                           std::optional<std::vector<std::string>> taxonomy) {
    SectorMap map;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    auto declare = [&](const std::string& sector) {
        if (std::find(map.taxonomy.begin(), map.taxonomy.end(), sector) == map.taxonomy.end())
            map.taxonomy.push_back(sector);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        if (!header) {
            header = true;
            continue;
        }
        const auto f = split_fields(line, opts.delimiter);
        if (f.size() != 2) fail_at(source, line_no, "expected 2 fields, got " + std::to_string(f.size()));
        if (f[1].empty()) fail_at(source, line_no, "empty sector name");
        if (taxonomy && std::find(taxonomy->begin(), taxonomy->end(), f[1]) == taxonomy->end())
            fail_at(source, line_no, "sector '" + f[1] + "' not in taxonomy");
        declare(f[1]);
        if (f[0].empty()) continue;
        if (!map.sector_of.emplace(f[0], f[1]).second)
            fail_at(source, line_no, "ticker " + f[0] + " mapped twice");
    }
    if (!header) throw Error(ErrorCategory::parse, source + ": empty sector map");
    if (taxonomy) map.taxonomy = *taxonomy;
    return map;
}

PricePanel load_panel(std::span<const RawQuote> quotes, const SectorMap& sectors) {
    std::map<std::string, std::map<Date, const RawQuote*>> by_ticker;
    for (const auto& q : quotes) by_ticker[q.ticker][q.date] = &q;
    if (by_ticker.empty()) throw Error(ErrorCategory::input, "no quotes");

    PricePanel panel;
    panel.taxonomy = sectors.taxonomy;
    for (const auto& [ticker, rows] : by_ticker) {
        const auto it = sectors.sector_of.find(ticker);
        if (it == sectors.sector_of.end())
            throw Error(ErrorCategory::input, "ticker " + ticker + " missing from sector map");
        const auto s = std::find(panel.taxonomy.begin(), panel.taxonomy.end(), it->second);
        if (s == panel.taxonomy.end())
            throw Error(ErrorCategory::input, "sector '" + it->second + "' of " + ticker +
                                                  " not in taxonomy");
        panel.tickers.push_back(ticker);
        panel.sectors.push_back(static_cast<std::size_t>(s - panel.taxonomy.begin()));
    }

    // Dates present for every ticker, ascending.
    for (const auto& [date, q] : by_ticker.begin()->second) {
        bool everywhere = true;
        for (const auto& [ticker, rows] : by_ticker) {
            if (!rows.contains(date)) {
                everywhere = false;
                break;
            }
        }
        if (everywhere) panel.dates.push_back(date);
    }
    if (panel.dates.empty()) throw Error(ErrorCategory::input, "no date is shared by all tickers");

    const auto n = static_cast<Eigen::Index>(panel.tickers.size());
    const auto t = static_cast<Eigen::Index>(panel.dates.size());
    panel.prices.resize(n, t);
    panel.volumes.resize(n, t);
    Eigen::Index i = 0;
    for (const auto& [ticker, rows] : by_ticker) {
        for (Eigen::Index j = 0; j < t; ++j) {
            const RawQuote* q = rows.at(panel.dates[static_cast<std::size_t>(j)]);
            panel.prices(i, j) = q->price;
            panel.volumes(i, j) = q->volume;
        }
        ++i;
    }
    return panel;
}

PricePanel load_panel(const std::filesystem::path& quotes, const std::filesystem::path& sector_map,
                      CsvOptions opts, std::optional<std::vector<std::string>> taxonomy) {
    auto qin = open_input(quotes);
    const auto records = parse_quotes(qin, quotes.string(), opts);
    auto sin = open_input(sector_map);
    const auto map = parse_sector_map(sin, sector_map.string(), opts, std::move(taxonomy));
    return load_panel(records, map);
}

Staleness staleness(const Eigen::Ref<const Eigen::RowVectorXd>& prices) {
    Staleness s;
    const auto t = prices.size();
    if (t == 0) return s;
    int repeats = 0;
    int run = 1;
    for (Eigen::Index j = 1; j < t; ++j) {
        if (price_ticks(prices(j)) == price_ticks(prices(j - 1))) {
            ++repeats;
            s.longest_flat_run = std::max(s.longest_flat_run, ++run);
        } else {
            run = 1;
        }
    }
    s.stale_fraction = static_cast<double>(repeats) / static_cast<double>(t);
    return s;
}

FilterReport filter_liquidity_report(const PricePanel& panel, LiquidityRule rule) {
    if (!(rule.stale_fraction > 0.0 && rule.stale_fraction < 1.0))
        throw Error(ErrorCategory::config, "stale_fraction must lie in (0, 1)");
    if (rule.max_flat_run < 2) throw Error(ErrorCategory::config, "max_flat_run must be at least 2");

    FilterReport report;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < panel.n_firms(); ++i) {
        const auto s = staleness(panel.prices.row(static_cast<Eigen::Index>(i)));
        std::string reason;
        if (s.stale_fraction > rule.stale_fraction)
            reason = "stale " + format_fixed(s.stale_fraction, 2) + " > " + format_double(rule.stale_fraction);
        if (s.longest_flat_run >= rule.max_flat_run) {
            if (!reason.empty()) reason += "; ";
            reason += "flat run " + std::to_string(s.longest_flat_run) + " >= " +
                      std::to_string(rule.max_flat_run);
        }
        if (reason.empty())
            keep.push_back(i);
        else
            report.dropped.push_back({panel.tickers[i], reason, s.stale_fraction, s.longest_flat_run});
    }
    if (keep.empty()) throw Error(ErrorCategory::input, "empty panel after filtering");
    report.panel = panel.select_firms(keep);
    return report;
}

PricePanel filter_liquidity(const PricePanel& panel, double stale_fraction, int max_flat_run) {
    return filter_liquidity_report(panel, {stale_fraction, max_flat_run}).panel;
}

Eigen::VectorXd annual_volume(std::span<const Date> dates, const Eigen::MatrixXd& volumes, int year) {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(volumes.rows());
    bool any = false;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (year_of(dates[t]) != year) continue;
        total += volumes.col(static_cast<Eigen::Index>(t));
        any = true;
    }
    if (!any) throw Error(ErrorCategory::input, "year " + std::to_string(year) + " outside panel range");
    return total;
}

Eigen::VectorXd annual_volume(const PricePanel& panel, int year) {
    return annual_volume(panel.dates, panel.volumes, year);
}

void write_wide(std::ostream& out, std::span<const Date> dates, std::span<const std::string> tickers,
                const Eigen::MatrixXd& values, std::string_view description, CsvOptions opts) {
    out << "# " << description << '\n' << "date";
    for (const auto& t : tickers) out << opts.delimiter << t;
    out << '\n';
    for (std::size_t j = 0; j < dates.size(); ++j) {
        out << format_iso_date(dates[j]);
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            out << opts.delimiter << format_double(values(i, static_cast<Eigen::Index>(j)));
        out << '\n';
    }
}

void write_sector_map(std::ostream& out, const PricePanel& panel, CsvOptions opts) {
    out << "# sector taxonomy (empty ticker declares a sector) and firm assignments\n"
        << "ticker" << opts.delimiter << "sector\n";
    for (const auto& s : panel.taxonomy) out << opts.delimiter << s << '\n';
    for (std::size_t i = 0; i < panel.n_firms(); ++i)
        out << panel.tickers[i] << opts.delimiter << panel.taxonomy.at(panel.sectors[i]) << '\n';
}

void write_quotes(std::ostream& out, const PricePanel& panel, CsvOptions opts) {
    const char d = opts.delimiter;
    out << "# daily quotes: close [currency units], volume [shares]\n"
        << "date" << d << "ticker" << d << "close" << d << "volume\n";
    for (std::size_t j = 0; j < panel.n_days(); ++j) {
        const auto date = format_iso_date(panel.dates[j]);
        for (std::size_t i = 0; i < panel.n_firms(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            out << date << d << panel.tickers[i] << d << format_double(panel.prices(r, c)) << d
                << format_double(panel.volumes(r, c)) << '\n';
        }
    }
}

WideTable read_wide(std::istream& in, const std::string& source, CsvOptions opts) {
    WideTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        auto f = split_fields(line, opts.delimiter);
        if (!header) {
            if (f.size() < 2 || f[0] != "date") fail_at(source, line_no, "expected header 'date,<ticker>...'");
            table.tickers.assign(f.begin() + 1, f.end());
            header = true;
            continue;
        }
        if (f.size() != table.tickers.size() + 1)
            fail_at(source, line_no, "expected " + std::to_string(table.tickers.size() + 1) + " fields");
        const auto date = parse_iso_date(f[0]);
        if (!date) fail_at(source, line_no, "bad date '" + f[0] + "'");
        if (!table.dates.empty() && !(table.dates.back() < *date))
            fail_at(source, line_no, "dates must be strictly increasing");
        table.dates.push_back(*date);
        std::vector<double> row(table.tickers.size());
        for (std::size_t k = 0; k < row.size(); ++k)
            if (!parse_number(f[k + 1], row[k])) fail_at(source, line_no, "bad number '" + f[k + 1] + "'");
        rows.push_back(std::move(row));
    }
    if (!header) throw Error(ErrorCategory::parse, source + ": empty file");
    table.values.resize(static_cast<Eigen::Index>(table.tickers.size()),
                        static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < table.tickers.size(); ++i)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    return table;
}

void save_panel(const PricePanel& panel, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error(ErrorCategory::io, "cannot write " + (dir / name).string());
        return out;
    };
    auto prices = open("prices.csv");
    write_wide(prices, panel.dates, panel.tickers, panel.prices, "close prices [currency units]");
    auto volumes = open("volumes.csv");
    write_wide(volumes, panel.dates, panel.tickers, panel.volumes, "daily traded volume [shares]");
    auto sectors = open("sectors.csv");
    write_sector_map(sectors, panel);
}

PricePanel read_panel(const std::filesystem::path& dir) {
    auto pin = open_input(dir / "prices.csv");
    auto prices = read_wide(pin, (dir / "prices.csv").string());
    auto vin = open_input(dir / "volumes.csv");
    auto volumes = read_wide(vin, (dir / "volumes.csv").string());
    if (prices.tickers != volumes.tickers || prices.dates != volumes.dates)
        throw Error(ErrorCategory::input, dir.string() + ": prices and volumes disagree on layout");
    auto sin = open_input(dir / "sectors.csv");
    const auto map = parse_sector_map(sin, (dir / "sectors.csv").string());

    PricePanel panel;
    panel.dates = std::move(prices.dates);
    panel.tickers = std::move(prices.tickers);
    panel.prices = std::move(prices.values);
    panel.volumes = std::move(volumes.values);
    panel.taxonomy = map.taxonomy;
    for (const auto& t : panel.tickers) {
        const auto it = map.sector_of.find(t);
        if (it == map.sector_of.end())
            throw Error(ErrorCategory::input, "ticker " + t + " missing from sector map");
        const auto s = std::find(panel.taxonomy.begin(), panel.taxonomy.end(), it->second);
        panel.sectors.push_back(static_cast<std::size_t>(s - panel.taxonomy.begin()));
    }
    if ((panel.prices.array() <= 0.0).any())
        throw Error(ErrorCategory::input, dir.string() + ": nonpositive price");
    return panel;
}

}  // namespace mktphase
