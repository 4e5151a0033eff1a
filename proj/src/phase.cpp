#include "mktphase/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mktphase/error.hpp"
#include "mktphase/random.hpp"

namespace mktphase {

Eigen::VectorXd sector_risk(const Eigen::VectorXd& betas, const Eigen::VectorXd& volumes,
                            std::span<const std::size_t> sectors, std::size_t n_sectors, double gate) {
    const auto n = static_cast<std::size_t>(betas.size());
    if (static_cast<std::size_t>(volumes.size()) != n || sectors.size() != n)
        throw Error(ErrorCategory::input, "sector_risk inputs differ in length");
    Eigen::VectorXd risk = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_sectors));
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (volumes(k) < 0.0) throw Error(ErrorCategory::input, "negative volume");
        if (sectors[i] >= n_sectors) throw Error(ErrorCategory::input, "sector index out of range");
        if (betas(k) > gate) risk(static_cast<Eigen::Index>(sectors[i])) += betas(k) * volumes(k);
    }
    return risk;
}

double order_parameter(const Eigen::VectorXd& risk, std::size_t s0) {
    const auto s = static_cast<double>(risk.size());
    if (risk.size() < 2) throw Error(ErrorCategory::input, "order parameter needs at least 2 sectors");
    if (s0 >= static_cast<std::size_t>(risk.size())) throw Error(ErrorCategory::input, "sector index out of range");
    const double total = risk.sum();
    if (!(total > 0.0)) throw Error(ErrorCategory::domain, "no risk mass: all betas below unity");
    // (S share - 1)/(S - 1): exact at the fully ordered point.
    return (s * risk(static_cast<Eigen::Index>(s0)) / total - 1.0) / (s - 1.0);
}

Eigen::VectorXd order_parameters(const Eigen::VectorXd& risk) {
    Eigen::VectorXd m(risk.size());
    for (Eigen::Index s = 0; s < risk.size(); ++s) m(s) = order_parameter(risk, static_cast<std::size_t>(s));
    return m;
}

double kirman_order_parameter(double theta) {
    if (!(theta >= 0.0)) throw Error(ErrorCategory::input, "theta must be nonnegative");
    if (std::isinf(theta)) return 1.0;
    return theta / (1.0 + theta);
}

double permutation_threshold(const Eigen::VectorXd& betas, const Eigen::VectorXd& volumes,
                             std::span<const std::size_t> sectors, std::size_t n_sectors,
                             const PhaseOptions& opts, std::uint64_t stream) {
    if (opts.n_permutations == 0) throw Error(ErrorCategory::config, "need at least one permutation");
    if (!(opts.quantile > 0.0 && opts.quantile < 1.0))
        throw Error(ErrorCategory::config, "phase quantile must lie in (0, 1)");
    const CounterRng rng(derive_seed(opts.seed, "phase.permutation"));
    const std::size_t n = sectors.size();
    std::vector<std::size_t> labels(sectors.begin(), sectors.end());
    std::vector<double> maxima;
    maxima.reserve(opts.n_permutations);
    for (std::size_t p = 0; p < opts.n_permutations; ++p) {
        std::copy(sectors.begin(), sectors.end(), labels.begin());
        for (std::size_t i = n; i > 1; --i) {
            const auto j = rng.below(i, stream, p * n + i);
            std::swap(labels[i - 1], labels[j]);
        }
        const auto m = order_parameters(sector_risk(betas, volumes, labels, n_sectors, opts.gate));
        maxima.push_back(m.maxCoeff());
    }
    std::sort(maxima.begin(), maxima.end());
    const double pos = opts.quantile * static_cast<double>(maxima.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, maxima.size() - 1);
    return maxima[lo] + (pos - static_cast<double>(lo)) * (maxima[hi] - maxima[lo]);
}

std::optional<std::size_t> classify(const Eigen::VectorXd& m, double threshold) {
    std::optional<std::size_t> hit;
    for (Eigen::Index s = 0; s < m.size(); ++s) {
        if (m(s) > threshold) {
            if (hit) return std::nullopt;
            hit = static_cast<std::size_t>(s);
        }
    }
    return hit;
}

std::string PhaseWindow::label(std::span<const std::string> taxonomy) const {
    if (!ordered_sector) return "disordered";
    return "ordered:" + taxonomy[*ordered_sector];
}

std::vector<PhaseWindow> phase_series(const ReturnPanel& returns, std::span<const WindowSpec> grid,
                                      const PhaseOptions& opts) {
    const auto n_sectors = returns.taxonomy.size();
    std::vector<PhaseWindow> out;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& spec = grid[k];
        PhaseWindow w;
        w.spec = spec;
        validate_window(spec, returns.n_obs());
        w.center_date = returns.dates[static_cast<std::size_t>(spec.center)];
        w.volume_year = year_of(w.center_date);
        try {
            const auto window = analyze_window(returns, spec);
            w.betas = window.betas;
            w.turnover = annual_volume(returns.price_dates, returns.volumes, w.volume_year);
            w.risk = sector_risk(w.betas, w.turnover, returns.sectors, n_sectors, opts.gate);
            w.m = order_parameters(w.risk);
            w.threshold = permutation_threshold(w.betas, w.turnover, returns.sectors, n_sectors, opts, k);
        } catch (const Error& e) {
            throw Error(e.category(), "window centred at " + format_iso_date(w.center_date) + ": " + e.what());
        }
        w.ordered_sector = classify(w.m, w.threshold);
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace mktphase
