#include "mktphase/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mktphase/error.hpp"
#include "mktphase/indices.hpp"

namespace mktphase {

std::vector<std::vector<std::size_t>> partition(const Eigen::VectorXd& size, std::size_t k) {
    const auto n0 = static_cast<std::size_t>(size.size());
    if (k == 0) throw Error(ErrorCategory::input, "group count must be at least 1");
    if (n0 / k < 2)
        throw Error(ErrorCategory::input, "k = " + std::to_string(k) + " exceeds N0/2 for N0 = " +
                                              std::to_string(n0));
    std::vector<std::size_t> rank(n0);
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        return size(static_cast<Eigen::Index>(a)) > size(static_cast<Eigen::Index>(b));
    });
    std::vector<std::vector<std::size_t>> groups(k);
    const std::size_t used = (n0 / k) * k;
    for (std::size_t r = 0; r < used; ++r) groups[r % k].push_back(rank[r]);
    return groups;
}

double standard_deviation(const Eigen::VectorXd& values) {
    if (values.size() == 0) return 0.0;
    const double mean = values.mean();
    return std::sqrt((values.array() - mean).square().mean());
}

std::vector<ScalingPoint> scaling_curve(const ReturnPanel& returns, std::span<const std::size_t> ks) {
    const auto t_obs = static_cast<std::ptrdiff_t>(returns.n_obs());
    const WindowSpec full{(t_obs + 1) / 2, t_obs, t_obs};
    const Eigen::VectorXd size = returns.volumes.rowwise().mean();

    std::vector<ScalingPoint> out;
    for (const auto k : ks) {
        const auto groups = partition(size, k);
        Eigen::VectorXd lam(static_cast<Eigen::Index>(k));
        Eigen::VectorXd dsq(static_cast<Eigen::Index>(k));
        Eigen::VectorXd sig(static_cast<Eigen::Index>(k));
        for (std::size_t g = 0; g < k; ++g) {
            const auto sub = returns.select_firms(groups[g]);
            const auto window = analyze_window(sub, full);
            const auto diag = diagnose_window(sub.values, window);
            const auto gi = static_cast<Eigen::Index>(g);
            lam(gi) = window.lambda0();
            dsq(gi) = diag.delta_sq;
            sig(gi) = standard_deviation(window.betas);
        }
        ScalingPoint p;
        p.k = k;
        p.n_sub = groups.front().size();
        p.lambda0_mean = lam.mean();
        p.delta_sq_mean = dsq.mean();
        p.sigma_beta_mean = sig.mean();
        p.lambda0_spread = standard_deviation(lam);
        out.push_back(p);
    }
    return out;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCategory::input, "power-law fit: x and y differ in length");
    if (x.size() < 3) throw Error(ErrorCategory::input, "power-law fit needs at least 3 points");
    const auto n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw Error(ErrorCategory::domain, "power-law fit needs positive values");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCategory::domain, "power-law fit needs distinct x values");
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    for (std::size_t i = 0; i < n; ++i)
        fit.max_residual = std::max(fit.max_residual, std::abs(ly[i] - fit.intercept - fit.exponent * lx[i]));
    return fit;
}

}  // namespace mktphase
