#include "mktphase/table.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "mktphase/error.hpp"

namespace mktphase {

std::string_view category_name(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::parse: return "parse_error";
        case ErrorCategory::input: return "input_error";
        case ErrorCategory::domain: return "domain_error";
        case ErrorCategory::numerical: return "numerical_error";
        case ErrorCategory::io: return "io_error";
        case ErrorCategory::config: return "config_error";
    }
    return "error";
}

std::string format_double(double value) {
    if (value == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int decimals) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::fixed, decimals);
    if (ec != std::errc{}) return format_double(value);
    return std::string(buf.data(), ptr);
}

TableWriter::TableWriter(const std::filesystem::path& path, std::string_view description,
                         const std::vector<std::string>& columns, char delimiter)
    : out_(path, std::ios::binary), path_(path), delimiter_(delimiter), n_columns_(columns.size()) {
    if (!out_) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
    out_ << "# " << description << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << delimiter_;
        out_ << columns[i];
    }
    out_ << '\n';
}

TableWriter& TableWriter::cell(std::string_view text) {
    if (in_row_++) out_ << delimiter_;
    out_ << text;
    return *this;
}

TableWriter& TableWriter::cell(double value) { return cell(std::string_view(format_double(value))); }

TableWriter& TableWriter::cell(long long value) {
    return cell(std::string_view(std::to_string(value)));
}

void TableWriter::end_row() {
    if (in_row_ != n_columns_)
        throw Error(ErrorCategory::io, path_.string() + ": row has " + std::to_string(in_row_) +
                                           " cells, expected " + std::to_string(n_columns_));
    out_ << '\n';
    in_row_ = 0;
    if (!out_) throw Error(ErrorCategory::io, "write failed: " + path_.string());
}

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace mktphase
