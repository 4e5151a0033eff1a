#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mktphase/returns.hpp"
#include "mktphase/spectral.hpp"

namespace mktphase {

/// r_av(t) = (1/N) sum_i r_i(t).
Eigen::VectorXd average_return(const Eigen::MatrixXd& returns);
Eigen::VectorXd average_return(const ReturnPanel& returns);

/// Log pseudo index from a return series: L(0) = 0, L(k+1) = L(k) + r(k)/r_N,
/// then shifted so the n+1 values sum to zero.
Eigen::VectorXd pseudo_index(const Eigen::VectorXd& returns, double r_norm);

/// ln S_0(t) - l_0 with l_0 making the values sum to zero.
Eigen::VectorXd log_index(const Eigen::VectorXd& levels);

/// Centred moving average over `width` points, truncated at the edges.
Eigen::VectorXd centered_mean(const Eigen::VectorXd& series, std::ptrdiff_t width);

/// Delta^2 = sum (r_M - r_av)^2 / sum r_M^2 over the window's days. Element k
/// of both series belongs to day origin + k.
double delta_squared(const Eigen::VectorXd& r_m, const Eigen::VectorXd& r_av,
                     const WindowSpec& spec, std::ptrdiff_t origin = 0);

/// (1 - beta_bar)(2 trace(C)/lambda_0 - 1 - beta_bar).
double delta_bound(const SpectralWindow& window);

struct AverageCorrelation {
    double direct = 0.0;    ///< (1/(N(N-1))) sum_{i != j} C_ij
    double identity = 0.0;  ///< <r_M^2>(Delta^2 + 2 beta_bar - 1) - 1/N
};

AverageCorrelation average_correlation(const SpectralWindow& window, double delta_sq,
                                       double market_var);

/// a_mu = (1/sqrt(N)) sum_i e_i^mu, one entry per eigenvector; a_0 = beta_bar.
Eigen::VectorXd mode_overlaps(const SpectralWindow& window);

/// (1 - beta_bar)^2 + sum_{mu>0} (lambda_mu / lambda_0) a_mu^2. Equals
/// delta_squared over the window when r_M is projected on the window's own
/// days.
double delta_squared_from_modes(const SpectralWindow& window);

struct WindowDiagnostics {
    WindowSpec spec;
    double lambda0 = 0.0;
    double trace = 0.0;
    double beta_bar = 0.0;
    double market_var = 0.0;  ///< mean of r_M^2 over the window
    double delta_sq = 0.0;
    double bound = 0.0;
    double delta_sq_modes = 0.0;
    AverageCorrelation c_av;

    bool bound_holds(double slack = 1e-10) const { return delta_sq <= bound + slack; }
};

/// Window quantities, with r_M projected on the window's own market vector
/// over all of its days.
WindowDiagnostics diagnose_window(const Eigen::MatrixXd& returns, const SpectralWindow& window);

/// Market description over a window grid. r_M is stitched from the step span
/// of every window, covering days [first, end); r_av, L_M and L_av are given
/// on the same span (the L series have one more point, on price days).
struct MarketSeries {
    std::ptrdiff_t first = 0;
    std::ptrdiff_t end = 0;
    Eigen::VectorXd r_m;
    Eigen::VectorXd r_av;
    Eigen::VectorXd l_m;
    Eigen::VectorXd l_av;
    std::vector<WindowDiagnostics> windows;
};

/// Windows must come from one grid: equal step, consecutive centres.
MarketSeries market_series(const ReturnPanel& returns, std::span<const SpectralWindow> windows);

}  // namespace mktphase
