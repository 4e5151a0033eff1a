#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mktphase/error.hpp"
#include "mktphase/pipeline.hpp"
#include "mktphase/table.hpp"

using namespace mktphase;

namespace {

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::parse: return 3;
        case ErrorCategory::input: return 4;
        case ErrorCategory::domain: return 5;
        case ErrorCategory::numerical: return 6;
        case ErrorCategory::io: return 7;
        case ErrorCategory::config: return 8;
    }
    return 1;
}

RunConfig configure(const std::string& path, const std::vector<std::string>& overrides) {
    if (!path.empty()) return load_config(path, overrides);
    KeyValues kv;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw Error(ErrorCategory::config, "override '" + o + "' is not key=value");
        kv[std::string(trim(std::string_view(o).substr(0, eq)))] = std::string(trim(std::string_view(o).substr(eq + 1)));
    }
    return make_config(kv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Market-mode spectral analysis of equity price panels"};
    app.set_version_flag("--version", MKTPHASE_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool quiet = false;
    app.add_option("-c,--config", config_path, "key = value configuration file");
    app.add_option("-s,--set", overrides, "override a config key (key=value), repeatable");
    app.add_flag("-q,--quiet", quiet, "no summary on stdout");

    auto* ingest = app.add_subcommand("ingest", "parse quotes, align dates, apply the liquidity filter");
    auto* analyze = app.add_subcommand("analyze", "rolling-window spectra, betas, pseudo indices, bound checks");
    auto* scaling = app.add_subcommand("scaling", "size-dependence of lambda0, delta^2 and sigma_beta");
    auto* phase = app.add_subcommand("phase", "sector order parameter and phase labels");
    auto* synth = app.add_subcommand("synth", "write a synthetic market in ingest format");
    for (auto* sub : {ingest, analyze, scaling, phase, synth}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = configure(config_path, overrides);
        if (ingest->parsed()) {
            const auto res = run_ingest(cfg);
            if (!quiet)
                std::printf("ingest: %zu firms x %zu days kept, %zu dropped -> %s\n", res.panel.n_firms(),
                            res.panel.n_days(), res.dropped.size(), cfg.panel_path().string().c_str());
        } else if (analyze->parsed()) {
            const auto res = run_analyze(cfg);
            if (!quiet)
                std::printf("analyze: %zu windows over %zu firms, r_norm %s, delta bound %s\n", res.windows.size(),
                            res.returns.n_firms(), format_double(res.returns.r_norm).c_str(),
                            res.all_bounds_hold ? "holds" : "VIOLATED");
            if (!res.all_bounds_hold) return 2;
        } else if (scaling->parsed()) {
            const auto res = run_scaling(cfg);
            if (!quiet) {
                for (const auto& p : res.points)
                    std::printf("k=%zu N=%zu lambda0=%s delta_sq=%s sigma_beta=%s\n", p.k, p.n_sub,
                                format_double(p.lambda0_mean).c_str(), format_double(p.delta_sq_mean).c_str(),
                                format_double(p.sigma_beta_mean).c_str());
                if (res.points.size() >= 3)
                    std::printf("slopes: lambda0 %s, delta_sq %s, sigma_beta %s\n",
                                format_fixed(res.lambda0_fit.exponent, 3).c_str(),
                                format_fixed(res.delta_sq_fit.exponent, 3).c_str(),
                                format_fixed(res.sigma_beta_fit.exponent, 3).c_str());
            }
        } else if (phase->parsed()) {
            const auto windows = run_phase(cfg);
            if (!quiet) {
                const auto taxonomy = read_panel(cfg.panel_path()).taxonomy;
                for (const auto& w : windows)
                    std::printf("%s %s (threshold %s)\n", format_iso_date(w.center_date).c_str(),
                                w.label(taxonomy).c_str(), format_fixed(w.threshold, 4).c_str());
            }
        } else if (synth->parsed()) {
            const auto panel = run_synth(cfg);
            if (!quiet)
                std::printf("synth: %zu firms x %zu days -> %s\n", panel.n_firms(), panel.n_days(),
                            cfg.output.string().c_str());
        }
    } catch (const Error& e) {
        std::cerr << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
