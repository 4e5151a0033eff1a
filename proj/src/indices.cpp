#include "mktphase/indices.hpp"

#include <cmath>

#include "mktphase/error.hpp"

namespace mktphase {

Eigen::VectorXd average_return(const Eigen::MatrixXd& returns) {
    if (returns.rows() == 0 || returns.cols() == 0)
        throw Error(ErrorCategory::input, "average_return of an empty panel");
    return returns.colwise().mean().transpose();
}

Eigen::VectorXd average_return(const ReturnPanel& returns) { return average_return(returns.values); }

Eigen::VectorXd pseudo_index(const Eigen::VectorXd& returns, double r_norm) {
    if (returns.size() == 0) throw Error(ErrorCategory::input, "pseudo_index of an empty series");
    if (!(r_norm > 0.0)) throw Error(ErrorCategory::input, "r_norm must be positive");
    Eigen::VectorXd level(returns.size() + 1);
    level(0) = 0.0;
    for (Eigen::Index t = 0; t < returns.size(); ++t) level(t + 1) = level(t) + returns(t) / r_norm;
    level.array() -= level.mean();
    return level;
}

Eigen::VectorXd log_index(const Eigen::VectorXd& levels) {
    if ((levels.array() <= 0.0).any()) throw Error(ErrorCategory::input, "index levels must be positive");
    Eigen::VectorXd out = levels.array().log().matrix();
    out.array() -= out.mean();
    return out;
}

Eigen::VectorXd centered_mean(const Eigen::VectorXd& series, std::ptrdiff_t width) {
    if (width <= 1) return series;
    const auto n = series.size();
    Eigen::VectorXd prefix(n + 1);
    prefix(0) = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + series(i);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto lo = std::max<Eigen::Index>(0, i - width / 2);
        const auto hi = std::min<Eigen::Index>(n, i - width / 2 + width);
        out(i) = (prefix(hi) - prefix(lo)) / static_cast<double>(hi - lo);
    }
    return out;
}

double delta_squared(const Eigen::VectorXd& r_m, const Eigen::VectorXd& r_av, const WindowSpec& spec,
                     std::ptrdiff_t origin) {
    if (r_m.size() != r_av.size()) throw Error(ErrorCategory::input, "r_M and r_av differ in length");
    const auto lo = spec.first() - origin;
    const auto hi = spec.end() - origin;
    if (lo < 0 || hi > r_m.size())
        throw Error(ErrorCategory::input, "series do not cover window centred at " +
                                              std::to_string(spec.center));
    const auto m = r_m.segment(lo, hi - lo);
    const auto a = r_av.segment(lo, hi - lo);
    const double den = m.squaredNorm();
    if (!(den > 0.0)) throw Error(ErrorCategory::domain, "degenerate market return");
    return (m - a).squaredNorm() / den;
}

double delta_bound(const SpectralWindow& window) {
    const double b = window.beta_bar;
    return (1.0 - b) * (2.0 * window.cov.trace() / window.lambda0() - 1.0 - b);
}

AverageCorrelation average_correlation(const SpectralWindow& window, double delta_sq, double market_var) {
    const auto n = window.cov.rows();
    if (n < 2) throw Error(ErrorCategory::input, "average correlation needs at least 2 firms");
    const double nd = static_cast<double>(n);
    AverageCorrelation out;
    out.direct = (window.cov.sum() - window.cov.trace()) / (nd * (nd - 1.0));
    out.identity = market_var * (delta_sq + 2.0 * window.beta_bar - 1.0) - 1.0 / nd;
    return out;
}

Eigen::VectorXd mode_overlaps(const SpectralWindow& window) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(window.eigenvectors.rows()));
    return inv * window.eigenvectors.colwise().sum().transpose();
}

double delta_squared_from_modes(const SpectralWindow& window) {
    const Eigen::VectorXd a = mode_overlaps(window);
    const double lam0 = window.lambda0();
    double sum = (1.0 - window.beta_bar) * (1.0 - window.beta_bar);
    for (Eigen::Index mu = 1; mu < a.size(); ++mu) sum += window.eigenvalues(mu) / lam0 * a(mu) * a(mu);
    return sum;
}

WindowDiagnostics diagnose_window(const Eigen::MatrixXd& returns, const SpectralWindow& window) {
    const auto& spec = window.spec;
    WindowDiagnostics d;
    d.spec = spec;
    d.lambda0 = window.lambda0();
    d.trace = window.cov.trace();
    d.beta_bar = window.beta_bar;
    const Eigen::VectorXd r_m = project_returns(returns, window.eigenvectors.col(0), spec.first(), spec.end());
    const Eigen::VectorXd r_av = average_return(Eigen::MatrixXd(returns.middleCols(spec.first(), spec.width)));
    d.market_var = r_m.squaredNorm() / static_cast<double>(spec.width);
    d.delta_sq = delta_squared(r_m, r_av, spec, spec.first());
    d.bound = delta_bound(window);
    d.delta_sq_modes = delta_squared_from_modes(window);
    d.c_av = average_correlation(window, d.delta_sq, d.market_var);
    return d;
}

MarketSeries market_series(const ReturnPanel& returns, std::span<const SpectralWindow> windows) {
    if (windows.empty()) throw Error(ErrorCategory::input, "market_series needs at least one window");
    for (std::size_t k = 1; k < windows.size(); ++k)
        if (windows[k].spec.step_first() != windows[k - 1].spec.step_end())
            throw Error(ErrorCategory::input, "windows do not tile: step spans of windows " +
                                                  std::to_string(k - 1) + " and " + std::to_string(k) +
                                                  " are not adjacent");
    MarketSeries s;
    s.first = windows.front().spec.step_first();
    s.end = windows.back().spec.step_end();
    s.r_m.resize(s.end - s.first);
    for (const auto& w : windows) {
        const Eigen::VectorXd seg = market_return(returns, w);
        s.r_m.segment(w.spec.step_first() - s.first, seg.size()) = seg;
        s.windows.push_back(diagnose_window(returns.values, w));
    }
    s.r_av = average_return(Eigen::MatrixXd(returns.values.middleCols(s.first, s.end - s.first)));
    s.l_m = pseudo_index(s.r_m, returns.r_norm);
    s.l_av = pseudo_index(s.r_av, returns.r_norm);
    return s;
}

}  // namespace mktphase
