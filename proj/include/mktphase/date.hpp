#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mktphase {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD. Returns nullopt on any deviation from that form.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(const Date& d);

inline int year_of(const Date& d) { return static_cast<int>(d.year()); }

/// Trading calendar for synthetic data: the first 252 weekdays of each
/// calendar year starting at `first_year`, so one year is exactly 252 days.
std::vector<Date> synthetic_calendar(std::size_t n_days, int first_year = 1990);

}  // namespace mktphase
