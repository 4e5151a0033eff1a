#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mktphase/ingest.hpp"
#include "mktphase/phase.hpp"
#include "mktphase/svm.hpp"

namespace mktphase {

/// Raw "key = value" pairs; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");

/// A day count: plain integer days, or "<x>y" years at 252 days per year.
std::ptrdiff_t parse_days(const std::string& text);

/// Synthetic market recipe. With a planted sector, firms in that sector get
/// their market coupling multiplied by `planted_coupling` and their volume by
/// `planted_volume` during the first `planted_days` days.
struct SynthConfig {
    std::size_t n_firms = 100;
    std::size_t n_days = 2520;
    double gamma_m = 1.0;
    CouplingSpec gamma = CouplingSpec::parse("uniform(0.5,1.5)");
    CouplingSpec beta0 = CouplingSpec::parse("constant(1)");
    int start_year = 1990;
    std::vector<std::string> taxonomy = gics_sectors();
    std::optional<std::string> planted_sector;
    double planted_coupling = 1.5;
    double planted_volume = 3.0;
    std::size_t planted_days = 0;
    double daily_volatility = 0.015;
};

struct RunConfig {
    std::filesystem::path quotes;
    std::filesystem::path sectors;
    std::optional<std::filesystem::path> taxonomy;
    std::optional<std::filesystem::path> index;
    std::filesystem::path panel_dir;
    std::filesystem::path output = "out";
    char delimiter = ',';

    std::ptrdiff_t window = 7 * 252;
    std::ptrdiff_t step = 252;
    std::ptrdiff_t phase_window = 5 * 252;
    std::ptrdiff_t phase_step = 252;
    std::ptrdiff_t smooth = 252;

    std::vector<double> beta_c = {1.3, 1.39};
    LiquidityRule liquidity;
    double beta_gate = 1.0;
    std::size_t permutations = 100;
    double phase_quantile = 0.95;
    std::vector<std::size_t> scaling_k = {1, 2, 3, 4, 6, 8, 12};

    SynthConfig synth;
    std::uint64_t seed = 1;

    /// Panel directory written by ingest and read by the analysis commands.
    std::filesystem::path panel_path() const;
};

/// Builds a config from key/value pairs; relative paths resolve against
/// `base_dir`. Unknown keys are rejected.
RunConfig make_config(const KeyValues& kv, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace mktphase
