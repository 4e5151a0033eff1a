#include "mktphase/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "mktphase/error.hpp"
#include "mktphase/table.hpp"

namespace mktphase {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    throw Error(ErrorCategory::config, "config key '" + key + "' = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto t = trim(value);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
        bad_value(key, value, "not a number");
    return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto t = trim(value);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        bad_value(key, value, "not a nonnegative integer");
    return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<std::string> read_taxonomy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open taxonomy " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.emplace_back(t);
    }
    if (out.size() < 2) throw Error(ErrorCategory::config, path.string() + ": taxonomy needs at least 2 sectors");
    return out;
}

}  // namespace

KeyValues parse_key_values(std::istream& in, const std::string& source) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCategory::parse, source + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (key.empty()) throw Error(ErrorCategory::parse, source + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw Error(ErrorCategory::parse, source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return kv;
}

std::ptrdiff_t parse_days(const std::string& text) {
    const auto t = trim(text);
    if (t.empty()) throw Error(ErrorCategory::config, "empty day count");
    const bool years = t.back() == 'y';
    const double v = to_double("days", std::string(years ? t.substr(0, t.size() - 1) : t));
    const double days = years ? v * 252.0 : v;
    if (!(days >= 1.0) || (!years && days != std::floor(days)))
        throw Error(ErrorCategory::config, "bad day count '" + text + "'");
    return static_cast<std::ptrdiff_t>(std::llround(days));
}

std::filesystem::path RunConfig::panel_path() const {
    return panel_dir.empty() ? output / "panel" : panel_dir;
}

RunConfig make_config(const KeyValues& kv, const std::filesystem::path& base_dir) {
    RunConfig c;
    std::set<std::string> used;
    auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        used.insert(key);
        return &it->second;
    };

    if (auto v = get("quotes")) c.quotes = resolve(base_dir, *v);
    if (auto v = get("sectors")) c.sectors = resolve(base_dir, *v);
    if (auto v = get("taxonomy")) {
        c.taxonomy = resolve(base_dir, *v);
        c.synth.taxonomy = read_taxonomy(*c.taxonomy);
    }
    if (auto v = get("index")) c.index = resolve(base_dir, *v);
    if (auto v = get("panel_dir")) c.panel_dir = resolve(base_dir, *v);
    if (auto v = get("output")) c.output = resolve(base_dir, *v);
    if (auto v = get("delimiter")) {
        if (*v == "tab")
            c.delimiter = '\t';
        else if (v->size() == 1)
            c.delimiter = (*v)[0];
        else
            bad_value("delimiter", *v, "expected one character or 'tab'");
    }

    if (auto v = get("window")) c.window = parse_days(*v);
    if (auto v = get("step")) c.step = parse_days(*v);
    if (auto v = get("phase_window")) c.phase_window = parse_days(*v);
    if (auto v = get("phase_step")) c.phase_step = parse_days(*v);
    if (auto v = get("smooth")) c.smooth = *v == "0" ? 0 : parse_days(*v);

    if (auto v = get("beta_c")) {
        c.beta_c.clear();
        for (const auto& f : split_fields(*v, ',')) c.beta_c.push_back(to_double("beta_c", f));
    }
    if (auto v = get("stale_fraction")) c.liquidity.stale_fraction = to_double("stale_fraction", *v);
    if (auto v = get("max_flat_run")) c.liquidity.max_flat_run = static_cast<int>(to_unsigned("max_flat_run", *v));
    if (auto v = get("beta_gate")) c.beta_gate = to_double("beta_gate", *v);
    if (auto v = get("permutations")) c.permutations = to_unsigned("permutations", *v);
    if (auto v = get("phase_quantile")) c.phase_quantile = to_double("phase_quantile", *v);
    if (auto v = get("scaling_k")) {
        c.scaling_k.clear();
        for (const auto& f : split_fields(*v, ',')) c.scaling_k.push_back(to_unsigned("scaling_k", f));
    }

    auto& s = c.synth;
    if (auto v = get("n_firms")) s.n_firms = to_unsigned("n_firms", *v);
    if (auto v = get("n_days")) s.n_days = static_cast<std::size_t>(parse_days(*v));
    if (auto v = get("gamma_m")) s.gamma_m = to_double("gamma_m", *v);
    if (auto v = get("gamma")) s.gamma = CouplingSpec::parse(*v);
    if (auto v = get("beta0")) s.beta0 = CouplingSpec::parse(*v);
    if (auto v = get("start_year")) s.start_year = static_cast<int>(to_unsigned("start_year", *v));
    if (auto v = get("planted_sector")) s.planted_sector = *v;
    if (auto v = get("planted_coupling")) s.planted_coupling = to_double("planted_coupling", *v);
    if (auto v = get("planted_volume")) s.planted_volume = to_double("planted_volume", *v);
    if (auto v = get("planted_days")) s.planted_days = static_cast<std::size_t>(parse_days(*v));
    if (auto v = get("daily_volatility")) s.daily_volatility = to_double("daily_volatility", *v);
    if (auto v = get("seed")) c.seed = to_unsigned("seed", *v);

    for (const auto& [key, value] : kv)
        if (!used.contains(key)) throw Error(ErrorCategory::config, "unknown config key '" + key + "'");

    if (c.step < 1 || c.step > c.window)
        throw Error(ErrorCategory::config, "need window >= step >= 1");
    if (c.phase_step < 1 || c.phase_step > c.phase_window)
        throw Error(ErrorCategory::config, "need phase_window >= phase_step >= 1");
    if (s.planted_sector &&
        std::find(s.taxonomy.begin(), s.taxonomy.end(), *s.planted_sector) == s.taxonomy.end())
        throw Error(ErrorCategory::config, "planted_sector '" + *s.planted_sector + "' not in taxonomy");
    return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open config " + path.string());
    auto kv = parse_key_values(in, path.string());
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw Error(ErrorCategory::config, "override '" + o + "' is not key=value");
        kv[std::string(trim(std::string_view(o).substr(0, eq)))] = std::string(trim(std::string_view(o).substr(eq + 1)));
    }
    return make_config(kv, path.parent_path());
}

}  // namespace mktphase
