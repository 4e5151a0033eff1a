#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace mktphase {

/// Shortest decimal string that round-trips to `value`.
std::string format_double(double value);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Delimited output file. The first line is a "# " comment describing the
/// content and units, the second names the columns.
class TableWriter {
public:
    TableWriter(const std::filesystem::path& path, std::string_view description,
                const std::vector<std::string>& columns, char delimiter = ',');

    TableWriter& cell(std::string_view text);
    TableWriter& cell(double value);
    TableWriter& cell(long long value);
    TableWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
    TableWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    void end_row();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    char delimiter_;
    std::size_t n_columns_;
    std::size_t in_row_ = 0;
};

/// Splits one delimited line. No quoting: fields may not contain the delimiter.
std::vector<std::string> split_fields(std::string_view line, char delimiter);

std::string_view trim(std::string_view s);

}  // namespace mktphase
