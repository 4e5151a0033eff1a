#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mktphase/date.hpp"

namespace mktphase {

struct RawQuote {
    Date date;
    std::string ticker;
    double price = 0.0;
    double volume = 0.0;
};

/// Ticker to sector assignment plus the declared sector taxonomy. A sector may
/// be declared without members (Utilities in the S&P sample has none).
struct SectorMap {
    std::map<std::string, std::string> sector_of;
    std::vector<std::string> taxonomy;
};

/// Firms x days panel. Row i of `prices`/`volumes` belongs to tickers[i];
/// column t to dates[t]. sectors[i] indexes into `taxonomy`.
struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;
    Eigen::MatrixXd volumes;
    std::vector<std::size_t> sectors;
    std::vector<std::string> taxonomy;

    std::size_t n_firms() const { return tickers.size(); }
    std::size_t n_days() const { return dates.size(); }

    /// Sub-panel over the given firm rows, in the given order.
    PricePanel select_firms(std::span<const std::size_t> rows) const;
};

/// The ten GICS sectors, in the order the default mapping file lists them.
const std::vector<std::string>& gics_sectors();

struct CsvOptions {
    char delimiter = ',';
};

/// Long-format quotes: header row, then date, ticker, close, volume.
std::vector<RawQuote> parse_quotes(std::istream& in, const std::string& source = "<quotes>",
                                   CsvOptions opts = {});

/// Rows of ticker, sector. A row with an empty ticker declares a sector.
/// The taxonomy is every sector in first-appearance order unless `taxonomy`
/// is supplied, in which case every mapped sector must belong to it.
SectorMap parse_sector_map(std::istream& in, const std::string& source = "<sectors>",
                           CsvOptions opts = {},
                           std::optional<std::vector<std::string>> taxonomy = std::nullopt);

/// Aligns quotes onto the intersection of dates shared by all tickers.
PricePanel load_panel(std::span<const RawQuote> quotes, const SectorMap& sectors);

PricePanel load_panel(const std::filesystem::path& quotes, const std::filesystem::path& sector_map,
                      CsvOptions opts = {},
                      std::optional<std::vector<std::string>> taxonomy = std::nullopt);

struct LiquidityRule {
    double stale_fraction = 0.07;
    int max_flat_run = 10;
};

struct DropRecord {
    std::string ticker;
    std::string reason;
    double stale_fraction = 0.0;
    int longest_flat_run = 0;
};

struct FilterReport {
    PricePanel panel;
    std::vector<DropRecord> dropped;
};

/// Fraction of day-to-day price changes that are exact repeats, measured
/// against the number of dates, and the longest run of equal prices in days.
struct Staleness {
    double stale_fraction = 0.0;
    int longest_flat_run = 1;
};

Staleness staleness(const Eigen::Ref<const Eigen::RowVectorXd>& prices);

FilterReport filter_liquidity_report(const PricePanel& panel, LiquidityRule rule = {});

PricePanel filter_liquidity(const PricePanel& panel, double stale_fraction = 0.07,
                            int max_flat_run = 10);

/// Per-firm sum of daily volume over the panel dates falling in `year`.
Eigen::VectorXd annual_volume(const PricePanel& panel, int year);

Eigen::VectorXd annual_volume(std::span<const Date> dates, const Eigen::MatrixXd& volumes, int year);

/// Wide layout: header "date,<ticker>...", one row per date.
void write_wide(std::ostream& out, std::span<const Date> dates,
                std::span<const std::string> tickers, const Eigen::MatrixXd& values,
                std::string_view description, CsvOptions opts = {});

void write_sector_map(std::ostream& out, const PricePanel& panel, CsvOptions opts = {});

/// Long-format quote export, readable by `parse_quotes`.
void write_quotes(std::ostream& out, const PricePanel& panel, CsvOptions opts = {});

struct WideTable {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd values;  // tickers x dates
};

WideTable read_wide(std::istream& in, const std::string& source = "<wide>", CsvOptions opts = {});

/// Writes prices.csv, volumes.csv and sectors.csv into `dir`.
void save_panel(const PricePanel& panel, const std::filesystem::path& dir);

/// Reads a directory written by `save_panel`.
PricePanel read_panel(const std::filesystem::path& dir);

}  // namespace mktphase
