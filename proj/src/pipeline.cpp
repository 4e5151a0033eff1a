#include "mktphase/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "mktphase/error.hpp"
#include "mktphase/random.hpp"
#include "mktphase/table.hpp"

namespace mktphase {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& p, const char* key) {
    if (p.empty()) throw Error(ErrorCategory::config, std::string("config key '") + key + "' is required");
    if (!fs::exists(p)) throw Error(ErrorCategory::io, std::string(key) + " file not found: " + p.string());
}

PricePanel load_clean_panel(const RunConfig& cfg) {
    const auto dir = cfg.panel_path();
    if (!fs::exists(dir / "prices.csv"))
        throw Error(ErrorCategory::io, "no cleaned panel in " + dir.string() + " (run ingest first)");
    return read_panel(dir);
}

std::string window_context(const ReturnPanel& r, const WindowSpec& w) {
    const auto c = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(w.center, 0, static_cast<std::ptrdiff_t>(r.n_obs()) - 1));
    return "window centred at day " + std::to_string(w.center) + " (" + format_iso_date(r.dates[c]) + ")";
}

std::map<Date, double> read_index(const fs::path& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open index " + path.string());
    std::map<Date, double> out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        const auto f = split_fields(t, delimiter);
        const auto d = f.size() == 2 ? parse_iso_date(f[0]) : std::nullopt;
        double v = 0.0;
        if (!d || std::sscanf(f[1].c_str(), "%lf", &v) != 1 || !(v > 0.0))
            throw Error(ErrorCategory::parse, path.string() + ":" + std::to_string(line_no) + ": expected date, level");
        out[*d] = v;
    }
    return out;
}

}  // namespace

PricePanel synthesize_market(const SynthConfig& cfg, std::uint64_t seed) {
    const auto n = cfg.n_firms;
    if (n < 2) throw Error(ErrorCategory::config, "n_firms must be at least 2");
    if (cfg.n_days < 3) throw Error(ErrorCategory::config, "n_days must be at least 3");
    const std::size_t n_ret = cfg.n_days - 1;

    PricePanel panel;
    panel.taxonomy = cfg.taxonomy;
    panel.dates = synthetic_calendar(cfg.n_days, cfg.start_year);
    const auto n_sectors = panel.taxonomy.size();
    for (std::size_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "S%04zu", i);
        panel.tickers.emplace_back(buf);
        panel.sectors.push_back(i % n_sectors);
    }

    SvmParams base;
    base.gamma_m = cfg.gamma_m;
    base.gamma = cfg.gamma.realize(n, derive_seed(seed, "svm.gamma"), 0);
    base.beta0 = normalize_beta0(cfg.beta0.realize(n, derive_seed(seed, "svm.beta0"), 0));
    base.seed = derive_seed(seed, "svm.noise");

    std::optional<std::size_t> planted;
    std::size_t planted_days = 0;
    if (cfg.planted_sector && cfg.planted_days > 0) {
        const auto it = std::find(panel.taxonomy.begin(), panel.taxonomy.end(), *cfg.planted_sector);
        if (it == panel.taxonomy.end())
            throw Error(ErrorCategory::config, "planted sector '" + *cfg.planted_sector + "' not in taxonomy");
        planted = static_cast<std::size_t>(it - panel.taxonomy.begin());
        planted_days = std::min(cfg.planted_days, n_ret);
    }

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_ret));
    if (planted) {
        SvmParams epoch = base;
        for (std::size_t i = 0; i < n; ++i)
            if (panel.sectors[i] == *planted) epoch.beta0(static_cast<Eigen::Index>(i)) *= cfg.planted_coupling;
        epoch.beta0 = normalize_beta0(epoch.beta0);
        const auto p = static_cast<Eigen::Index>(planted_days);
        raw.leftCols(p) = sample_returns(epoch, planted_days);
        if (planted_days < n_ret)
            raw.rightCols(static_cast<Eigen::Index>(n_ret) - p) = sample_returns(base, n_ret - planted_days, planted_days);
    } else {
        raw = sample_returns(base, n_ret);
    }

    const double scale = cfg.daily_volatility / std::sqrt(ideal_covariance(base).diagonal().mean());
    const CounterRng rng(derive_seed(seed, "synth.market"));
    const auto t_len = static_cast<Eigen::Index>(cfg.n_days);
    panel.prices.resize(static_cast<Eigen::Index>(n), t_len);
    panel.volumes.resize(static_cast<Eigen::Index>(n), t_len);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        double log_price = std::log(50.0) + 0.5 * rng.normal(0, i);
        const double base_volume = 1e6 * std::exp(rng.normal(1, i));
        const bool in_planted = planted && panel.sectors[i] == *planted;
        for (Eigen::Index t = 0; t < t_len; ++t) {
            if (t > 0) log_price += scale * raw(r, t - 1);
            panel.prices(r, t) = std::max(1e-4, std::round(std::exp(log_price) * 1e4) / 1e4);
            double v = base_volume * std::exp(0.3 * rng.normal(2 + i, static_cast<std::uint64_t>(t)) - 0.045);
            if (in_planted && static_cast<std::size_t>(t) < planted_days) v *= cfg.planted_volume;
            panel.volumes(r, t) = std::round(v);
        }
    }
    return panel;
}

IngestResult run_ingest(const RunConfig& cfg) {
    require_file(cfg.quotes, "quotes");
    require_file(cfg.sectors, "sectors");
    std::optional<std::vector<std::string>> taxonomy;
    if (cfg.taxonomy) taxonomy = cfg.synth.taxonomy;
    const auto panel = load_panel(cfg.quotes, cfg.sectors, {cfg.delimiter}, taxonomy);
    auto report = filter_liquidity_report(panel, cfg.liquidity);

    save_panel(report.panel, cfg.panel_path());
    fs::create_directories(cfg.output);
    TableWriter out(cfg.output / "filter_report.csv",
                    "firms removed by the liquidity filter; stale_fraction [fraction of days], "
                    "longest_flat_run [days]",
                    {"ticker", "stale_fraction", "longest_flat_run", "reason"});
    for (const auto& d : report.dropped)
        out.cell(d.ticker).cell(d.stale_fraction).cell(d.longest_flat_run).cell(d.reason).end_row();
    return {std::move(report.panel), std::move(report.dropped)};
}

AnalyzeResult run_analyze(const RunConfig& cfg) {
    AnalyzeResult res;
    res.returns = compute_returns(load_clean_panel(cfg));
    const auto& r = res.returns;
    const auto grid = window_grid(r.n_obs(), cfg.window, cfg.step);
    for (const auto& spec : grid) {
        try {
            res.windows.push_back(analyze_window(r, spec));
        } catch (const Error& e) {
            throw Error(e.category(), window_context(r, spec) + ": " + e.what());
        }
    }
    res.series = market_series(r, res.windows);

    const auto dir = cfg.output / "analyze";
    fs::create_directories(dir / "eigenvalues");
    {
        std::ofstream out(dir / "returns.csv", std::ios::binary);
        write_returns(out, r);
    }

    std::size_t violations = 0;
    {
        TableWriter w(dir / "windows.csv",
                      "per-window spectrum and market diagnostics; lambda0 and trace in normalized "
                      "return^2 units, other columns dimensionless",
                      {"center_day", "center_date", "first_day", "end_day", "lambda0", "lambda0_over_N",
                       "trace", "beta_bar", "delta_sq", "delta_bound", "bound_holds", "c_av_direct",
                       "c_av_identity"});
        for (const auto& d : res.series.windows) {
            const bool ok = d.bound_holds();
            violations += ok ? 0 : 1;
            w.cell(static_cast<long long>(d.spec.center))
                .cell(format_iso_date(r.dates[static_cast<std::size_t>(d.spec.center)]))
                .cell(static_cast<long long>(d.spec.first()))
                .cell(static_cast<long long>(d.spec.end()))
                .cell(d.lambda0)
                .cell(d.lambda0 / static_cast<double>(r.n_firms()))
                .cell(d.trace)
                .cell(d.beta_bar)
                .cell(d.delta_sq)
                .cell(d.bound)
                .cell(ok ? "1" : "0")
                .cell(d.c_av.direct)
                .cell(d.c_av.identity)
                .end_row();
        }
    }
    res.all_bounds_hold = violations == 0;

    for (std::size_t k = 0; k < res.windows.size(); ++k) {
        const auto& win = res.windows[k];
        char name[32];
        std::snprintf(name, sizeof name, "window_%04zu.csv", k);
        TableWriter w(dir / "eigenvalues" / name,
                      "eigenvalues of the window covariance, descending [normalized return^2]; window "
                      "centred at " + format_iso_date(r.dates[static_cast<std::size_t>(win.spec.center)]),
                      {"nu", "lambda", "lambda_over_N"});
        for (Eigen::Index nu = 0; nu < win.eigenvalues.size(); ++nu)
            w.cell(static_cast<long long>(nu))
                .cell(win.eigenvalues(nu))
                .cell(win.eigenvalues(nu) / static_cast<double>(r.n_firms()))
                .end_row();
    }

    {
        std::vector<std::string> cols = {"ticker", "sector"};
        for (const auto& win : res.windows) cols.push_back(format_iso_date(r.dates[static_cast<std::size_t>(win.spec.center)]));
        TableWriter w(dir / "betas.csv", "beta_i = sqrt(N) e_i^0 per firm (rows) and window centre (columns) [dimensionless]", cols);
        for (std::size_t i = 0; i < r.n_firms(); ++i) {
            w.cell(r.tickers[i]).cell(r.taxonomy[r.sectors[i]]);
            for (const auto& win : res.windows) w.cell(win.betas(static_cast<Eigen::Index>(i)));
            w.end_row();
        }
    }

    {
        const auto& s = res.series;
        std::vector<std::string> cols = {"date", "L_M", "L_av"};
        const bool smooth = cfg.smooth > 1;
        if (smooth) {
            cols.push_back("L_M_smooth");
            cols.push_back("L_av_smooth");
        }
        Eigen::VectorXd l_index;
        if (cfg.index) {
            const auto levels = read_index(*cfg.index, cfg.delimiter);
            Eigen::VectorXd v(s.l_m.size());
            for (Eigen::Index k = 0; k < v.size(); ++k) {
                const auto& d = r.price_dates[static_cast<std::size_t>(s.first + k)];
                const auto it = levels.find(d);
                if (it == levels.end())
                    throw Error(ErrorCategory::input, "index has no level on " + format_iso_date(d));
                v(k) = it->second;
            }
            l_index = log_index(v);
            cols.push_back("L_index");
        }
        const Eigen::VectorXd lm_s = smooth ? centered_mean(s.l_m, cfg.smooth) : Eigen::VectorXd();
        const Eigen::VectorXd lav_s = smooth ? centered_mean(s.l_av, cfg.smooth) : Eigen::VectorXd();
        TableWriter w(dir / "indices.csv",
                      "log pseudo indices on price dates, each recentred to zero sum [log price units]; "
                      "smooth columns are centred " + std::to_string(cfg.smooth) + "-day means",
                      cols);
        for (Eigen::Index k = 0; k < s.l_m.size(); ++k) {
            w.cell(format_iso_date(r.price_dates[static_cast<std::size_t>(s.first + k)])).cell(s.l_m(k)).cell(s.l_av(k));
            if (smooth) w.cell(lm_s(k)).cell(lav_s(k));
            if (cfg.index) w.cell(l_index(k));
            w.end_row();
        }
    }

    {
        TableWriter w(dir / "metadata.csv", "analysis run metadata", {"key", "value"});
        auto row = [&](const std::string& k, const std::string& v) { w.cell(k).cell(v).end_row(); };
        row("version", MKTPHASE_VERSION);
        row("n_firms", std::to_string(r.n_firms()));
        row("n_returns", std::to_string(r.n_obs()));
        row("r_norm", format_double(r.r_norm));
        row("window_days", std::to_string(cfg.window));
        row("step_days", std::to_string(cfg.step));
        row("n_windows", std::to_string(res.windows.size()));
        row("first_center", format_iso_date(r.dates[static_cast<std::size_t>(grid.front().center)]));
        row("last_center", format_iso_date(r.dates[static_cast<std::size_t>(grid.back().center)]));
        row("delta_bound_checks", res.all_bounds_hold ? "pass" : "fail");
        row("delta_bound_violations", std::to_string(violations));
    }
    return res;
}

ScalingResult run_scaling(const RunConfig& cfg) {
    const auto returns = compute_returns(load_clean_panel(cfg));
    ScalingResult res;
    res.points = scaling_curve(returns, cfg.scaling_k);

    std::vector<double> n, lam, dsq, sig;
    for (const auto& p : res.points) {
        n.push_back(static_cast<double>(p.n_sub));
        lam.push_back(p.lambda0_mean);
        dsq.push_back(p.delta_sq_mean);
        sig.push_back(p.sigma_beta_mean);
    }
    const bool fit = res.points.size() >= 3;
    if (fit) {
        res.lambda0_fit = fit_power_law(n, lam);
        res.delta_sq_fit = fit_power_law(n, dsq);
        res.sigma_beta_fit = fit_power_law(n, sig);
    }

    const auto dir = cfg.output / "scaling";
    fs::create_directories(dir);
    {
        TableWriter w(dir / "scaling.csv",
                      "group-averaged observables per group count k; N = firms per group, lambda0 "
                      "[normalized return^2], delta_sq and sigma_beta dimensionless",
                      {"k", "N", "lambda0", "delta_sq", "sigma_beta", "lambda0_spread"});
        for (const auto& p : res.points)
            w.cell(p.k).cell(p.n_sub).cell(p.lambda0_mean).cell(p.delta_sq_mean).cell(p.sigma_beta_mean)
                .cell(p.lambda0_spread).end_row();
    }
    if (fit) {
        TableWriter w(dir / "fits.csv", "log-log least-squares fits y = exp(intercept) N^exponent",
                      {"observable", "exponent", "intercept", "max_residual"});
        auto row = [&](const char* name, const PowerLawFit& f) {
            w.cell(name).cell(f.exponent).cell(f.intercept).cell(f.max_residual).end_row();
        };
        row("lambda0", res.lambda0_fit);
        row("delta_sq", res.delta_sq_fit);
        row("sigma_beta", res.sigma_beta_fit);
    }
    return res;
}

std::vector<PhaseWindow> run_phase(const RunConfig& cfg) {
    const auto returns = compute_returns(load_clean_panel(cfg));
    const auto grid = window_grid(returns.n_obs(), cfg.phase_window, cfg.phase_step);
    PhaseOptions opts;
    opts.gate = cfg.beta_gate;
    opts.n_permutations = cfg.permutations;
    opts.quantile = cfg.phase_quantile;
    opts.seed = derive_seed(cfg.seed, "phase");
    auto windows = phase_series(returns, grid, opts);

    const auto dir = cfg.output / "phase";
    fs::create_directories(dir);
    {
        TableWriter w(dir / "order_parameter.csv",
                      "sector risk R [beta x turnover in volume units] and order parameter m "
                      "[dimensionless] per window and sector; threshold is the permutation "
                      "quantile of max_s m",
                      {"center_day", "center_date", "volume_year", "sector", "R", "m", "threshold", "label"});
        for (const auto& pw : windows) {
            const auto label = pw.label(returns.taxonomy);
            for (std::size_t s = 0; s < returns.taxonomy.size(); ++s) {
                const auto k = static_cast<Eigen::Index>(s);
                w.cell(static_cast<long long>(pw.spec.center))
                    .cell(format_iso_date(pw.center_date))
                    .cell(pw.volume_year)
                    .cell(returns.taxonomy[s])
                    .cell(pw.risk(k))
                    .cell(pw.m(k))
                    .cell(pw.threshold)
                    .cell(label)
                    .end_row();
            }
        }
    }
    std::vector<std::string> sector_names;
    for (auto s : returns.sectors) sector_names.push_back(returns.taxonomy[s]);
    for (const double bc : cfg.beta_c) {
        TableWriter w(dir / ("leaders_" + format_double(bc) + ".csv"),
                      "market leaders with beta > " + format_double(bc) +
                          "; turnover = volume summed over the centre's calendar year [volume units]",
                      {"center_date", "rank", "ticker", "sector", "beta", "turnover"});
        for (const auto& pw : windows) {
            const auto leaders = market_leaders(pw.betas, bc, pw.turnover, sector_names, returns.tickers);
            for (std::size_t k = 0; k < leaders.size(); ++k)
                w.cell(format_iso_date(pw.center_date)).cell(k + 1).cell(leaders[k].ticker).cell(leaders[k].sector)
                    .cell(leaders[k].beta).cell(leaders[k].turnover).end_row();
        }
    }
    return windows;
}

PricePanel run_synth(const RunConfig& cfg) {
    auto panel = synthesize_market(cfg.synth, derive_seed(cfg.seed, "synth"));
    fs::create_directories(cfg.output);
    {
        std::ofstream out(cfg.output / "quotes.csv", std::ios::binary);
        if (!out) throw Error(ErrorCategory::io, "cannot write " + (cfg.output / "quotes.csv").string());
        write_quotes(out, panel);
    }
    {
        std::ofstream out(cfg.output / "sectors.csv", std::ios::binary);
        write_sector_map(out, panel);
    }
    return panel;
}

}  // namespace mktphase
