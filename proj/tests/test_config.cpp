#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mktphase/config.hpp"
#include "mktphase/error.hpp"
#include "mktphase/table.hpp"

using namespace mktphase;
namespace fs = std::filesystem;

namespace {

ErrorCategory category_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.category();
    }
    FAIL("no mktphase::Error thrown");
    return ErrorCategory::io;
}

}  // namespace

TEST_CASE("key = value parsing", "[config]") {
    std::istringstream in("# run\nwindow = 7y  # seven years\n\nstep=252\nquotes = a b.csv\n");
    const auto kv = parse_key_values(in);
    CHECK(kv.size() == 3);
    CHECK(kv.at("window") == "7y");
    CHECK(kv.at("step") == "252");
    CHECK(kv.at("quotes") == "a b.csv");

    std::istringstream dup("a = 1\na = 2\n");
    CHECK(category_of([&] { parse_key_values(dup); }) == ErrorCategory::parse);
    std::istringstream bad("just words\n");
    CHECK(category_of([&] { parse_key_values(bad); }) == ErrorCategory::parse);
}

TEST_CASE("day counts", "[config]") {
    CHECK(parse_days("252") == 252);
    CHECK(parse_days("7y") == 1764);
    CHECK(parse_days("0.5y") == 126);
    CHECK(category_of([] { parse_days("12.5"); }) == ErrorCategory::config);
    CHECK(category_of([] { parse_days("0"); }) == ErrorCategory::config);
    CHECK(category_of([] { parse_days("y"); }) == ErrorCategory::config);
}

TEST_CASE("config defaults and overrides", "[config]") {
    const auto c = make_config({});
    CHECK(c.window == 1764);
    CHECK(c.step == 252);
    CHECK(c.beta_c == std::vector<double>{1.3, 1.39});
    CHECK(c.liquidity.stale_fraction == 0.07);
    CHECK(c.liquidity.max_flat_run == 10);
    CHECK(c.panel_path() == fs::path("out") / "panel");

    const auto d = make_config({{"window", "4y"}, {"step", "21"}, {"beta_c", "1.1, 1.2"},
                                {"scaling_k", "1,2,4"}, {"quotes", "q.csv"}, {"delimiter", "tab"}},
                               "/data");
    CHECK(d.window == 1008);
    CHECK(d.step == 21);
    CHECK(d.beta_c == std::vector<double>{1.1, 1.2});
    CHECK(d.scaling_k == std::vector<std::size_t>{1, 2, 4});
    CHECK(d.quotes == fs::path("/data/q.csv"));
    CHECK(d.delimiter == '\t');
}

TEST_CASE("config rejects bad input", "[config]") {
    CHECK(category_of([] { make_config({{"windw", "5"}}); }) == ErrorCategory::config);
    CHECK(category_of([] { make_config({{"window", "100"}, {"step", "200"}}); }) == ErrorCategory::config);
    CHECK(category_of([] { make_config({{"beta_gate", "one"}}); }) == ErrorCategory::config);
    CHECK(category_of([] { make_config({{"planted_sector", "Bananas"}}); }) == ErrorCategory::config);
    CHECK(category_of([] { make_config({{"gamma", "normal(0,1)"}}); }) == ErrorCategory::config);
}

TEST_CASE("config file with taxonomy and overrides", "[config]") {
    const auto dir = fs::temp_directory_path() / "mktphase_config_test";
    fs::create_directories(dir);
    {
        std::ofstream(dir / "tax.txt") << "# sectors\nAlpha\nBeta\nGamma\n";
        std::ofstream(dir / "run.cfg") << "taxonomy = tax.txt\noutput = res\nplanted_sector = Beta\n";
    }
    const auto c = load_config(dir / "run.cfg", {"seed=99", "output = other"});
    CHECK(c.synth.taxonomy == std::vector<std::string>{"Alpha", "Beta", "Gamma"});
    CHECK(c.seed == 99);
    CHECK(c.output == dir / "other");
    CHECK(category_of([&] { load_config(dir / "missing.cfg"); }) == ErrorCategory::io);
    fs::remove_all(dir);
}

TEST_CASE("number formatting round-trips", "[config]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_fixed(1.23456, 2) == "1.23");
}

TEST_CASE("table writer enforces the header", "[config]") {
    const auto path = fs::temp_directory_path() / "mktphase_table_test.csv";
    {
        TableWriter w(path, "demo [units]", {"a", "b"});
        w.cell("x").cell(1.5).end_row();
        w.cell(3).cell(0.25).end_row();
        w.cell("only one");
        CHECK(category_of([&] { w.end_row(); }) == ErrorCategory::io);
    }
    std::ifstream in(path);
    std::string l1, l2, l3, l4;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    std::getline(in, l4);
    CHECK(l1 == "# demo [units]");
    CHECK(l2 == "a,b");
    CHECK(l3 == "x,1.5");
    CHECK(l4 == "3,0.25");
    fs::remove(path);
    CHECK(split_fields(" a , b,,c ", ',') == std::vector<std::string>{"a", "b", "", "c"});
}
