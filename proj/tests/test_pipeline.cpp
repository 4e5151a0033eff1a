#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mktphase/error.hpp"
#include "mktphase/pipeline.hpp"

using namespace mktphase;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MKTPHASE_TEST_DATA;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunConfig small_config(const fs::path& out) {
    auto cfg = make_config({{"n_firms", "30"}, {"n_days", "1260"}, {"window", "504"}, {"step", "252"},
                            {"phase_window", "504"}, {"phase_step", "252"}, {"scaling_k", "1,2,4"},
                            {"planted_sector", "Energy"}, {"planted_days", "630"}, {"seed", "11"}});
    cfg.output = out;
    cfg.quotes = out / "quotes.csv";
    cfg.sectors = out / "sectors.csv";
    return cfg;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string category_message(auto&& fn, ErrorCategory expected) {
    try {
        fn();
    } catch (const Error& e) {
        CHECK(e.category() == expected);
        return e.what();
    }
    FAIL("no mktphase::Error thrown");
    return {};
}

}  // namespace

TEST_CASE("synth, ingest, analyze, scaling and phase close end to end", "[pipeline]") {
    TempDir tmp("mktphase_pipeline_e2e");
    const auto cfg = small_config(tmp.path);
    const auto synth = run_synth(cfg);
    CHECK(synth.n_firms() == 30);
    CHECK(fs::exists(cfg.quotes));
    CHECK(fs::exists(cfg.sectors));

    const auto ingest = run_ingest(cfg);
    CHECK(ingest.dropped.empty());
    CHECK(ingest.panel.n_firms() == 30);
    // Header plus column line only: zero drops.
    std::ifstream report(tmp.path / "filter_report.csv");
    int lines = 0;
    for (std::string l; std::getline(report, l);) ++lines;
    CHECK(lines == 2);

    const auto analyze = run_analyze(cfg);
    CHECK(analyze.all_bounds_hold);
    // 1259 returns: centres 252, 504, 756.
    CHECK(analyze.windows.size() == 3);
    const auto meta = read_file(tmp.path / "analyze" / "metadata.csv");
    CHECK_THAT(meta, Catch::Matchers::ContainsSubstring("delta_bound_checks,pass"));
    CHECK_THAT(meta, Catch::Matchers::ContainsSubstring("r_norm,"));
    CHECK_THAT(meta, Catch::Matchers::ContainsSubstring("version,"));

    const auto scaling = run_scaling(cfg);
    REQUIRE(scaling.points.size() == 3);
    CHECK(scaling.lambda0_fit.exponent > 0.8);
    CHECK(fs::exists(tmp.path / "scaling" / "fits.csv"));

    const auto phase = run_phase(cfg);
    REQUIRE(phase.size() == 3);
    const std::vector<std::string> tax = ingest.panel.taxonomy;
    CHECK(phase[0].label(tax) == "ordered:Energy");

    for (const auto& entry : fs::recursive_directory_iterator(tmp.path)) {
        if (!entry.is_regular_file()) continue;
        INFO(entry.path().string());
        CHECK(first_line(entry.path()).rfind("# ", 0) == 0);
    }
}

TEST_CASE("repeat runs are byte identical", "[pipeline]") {
    TempDir a("mktphase_pipeline_a"), b("mktphase_pipeline_b");
    for (const auto* dir : {&a, &b}) {
        const auto cfg = small_config(dir->path);
        run_synth(cfg);
        run_ingest(cfg);
        run_analyze(cfg);
        run_phase(cfg);
    }
    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a.path)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), a.path);
        INFO(rel.string());
        REQUIRE(fs::exists(b.path / rel));
        CHECK(read_file(entry.path()) == read_file(b.path / rel));
        ++files;
    }
    CHECK(files > 10);
}

TEST_CASE("ingest reports an illiquid firm", "[pipeline]") {
    TempDir tmp("mktphase_pipeline_illiquid");
    PricePanel p;
    p.dates = synthetic_calendar(100);
    p.tickers = {"LIQ", "STALE"};
    p.sectors = {0, 1};
    p.taxonomy = {"Energy", "IT"};
    p.prices.resize(2, 100);
    p.volumes.setConstant(2, 100, 1000);
    for (int t = 0; t < 100; ++t) {
        p.prices(0, t) = 50.0 + 0.01 * t + (t % 2 ? 0.5 : 0.0);
        // 12 isolated repeated prices.
        p.prices(1, t) = t > 0 && t % 8 == 5 ? p.prices(1, t - 1) : 20.0 + 0.03 * t;
    }
    {
        std::ofstream q(tmp.path / "quotes.csv");
        write_quotes(q, p);
        std::ofstream s(tmp.path / "sectors.csv");
        write_sector_map(s, p);
    }
    auto cfg = make_config({});
    cfg.output = tmp.path / "out";
    cfg.quotes = tmp.path / "quotes.csv";
    cfg.sectors = tmp.path / "sectors.csv";
    const auto res = run_ingest(cfg);
    REQUIRE(res.dropped.size() == 1);
    CHECK(res.dropped[0].ticker == "STALE");
    CHECK(res.dropped[0].reason == "stale 0.12 > 0.07");
    CHECK_THAT(read_file(cfg.output / "filter_report.csv"), Catch::Matchers::ContainsSubstring("STALE"));
}

TEST_CASE("pipeline errors carry context", "[pipeline]") {
    TempDir tmp("mktphase_pipeline_errors");
    auto cfg = make_config({});
    cfg.output = tmp.path;
    cfg.sectors = kData / "sectors_small.csv";

    cfg.quotes = kData / "quotes_empty.csv";
    category_message([&] { run_ingest(cfg); }, ErrorCategory::parse);

    cfg.quotes = tmp.path / "nope.csv";
    CHECK_THAT(category_message([&] { run_ingest(cfg); }, ErrorCategory::io),
               Catch::Matchers::ContainsSubstring("nope.csv"));

    category_message([&] { run_analyze(cfg); }, ErrorCategory::io);

    // Grid wider than the 3-day fixture panel.
    cfg.quotes = kData / "quotes_small.csv";
    run_ingest(cfg);
    CHECK_THAT(category_message([&] { run_analyze(cfg); }, ErrorCategory::input),
               Catch::Matchers::ContainsSubstring("window [0, 1764)"));
}
