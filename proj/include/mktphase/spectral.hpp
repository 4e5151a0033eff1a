#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mktphase/returns.hpp"

namespace mktphase {

inline constexpr std::ptrdiff_t kTradingDaysPerYear = 252;

/// A window of `width` return observations centred on day `center`, advanced by
/// `step` days between consecutive windows. Day t belongs to the window when
/// center - ceil(width/2) <= t < center + floor(width/2), so it holds exactly
/// `width` days; the step span is defined the same way with `step`.
struct WindowSpec {
    std::ptrdiff_t center = 0;
    std::ptrdiff_t width = 0;
    std::ptrdiff_t step = 0;

    std::ptrdiff_t first() const { return center - (width + 1) / 2; }
    std::ptrdiff_t end() const { return center + width / 2; }
    std::ptrdiff_t step_first() const { return center - (step + 1) / 2; }
    std::ptrdiff_t step_end() const { return center + step / 2; }

    bool operator==(const WindowSpec&) const = default;
};

/// Throws if step/width are inconsistent or the window leaves [0, n_obs).
void validate_window(const WindowSpec& spec, std::size_t n_obs);

/// Windows of `width` days stepped by `step`, the first one starting on day 0,
/// as many as fit in `n_obs` days.
std::vector<WindowSpec> window_grid(std::size_t n_obs, std::ptrdiff_t width, std::ptrdiff_t step);

/// C_ij = (1/t_w) sum_t r_i(t) r_j(t) over the window. No demeaning.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& returns, const WindowSpec& spec);
Eigen::MatrixXd covariance(const ReturnPanel& returns, const WindowSpec& spec);

struct JacobiOptions {
    double tolerance = 1e-12;  ///< stop when off-diagonal Frobenius norm < tolerance * ||C||_F
    int max_sweeps = 100;
    double symmetry_tolerance = 1e-12;
};

struct Eigensystem {
    Eigen::VectorXd values;   ///< descending
    Eigen::MatrixXd vectors;  ///< column k pairs with values[k]
    int sweeps = 0;
};

/// Full eigensystem of a symmetric matrix by cyclic Jacobi rotations.
///
/// Every eigenvector is signed so its component sum is positive (first
/// nonzero component positive when the sum vanishes). Eigenvalues equal to
/// within 1e-12 relative are ordered by descending lexicographic comparison of
/// their vectors, so repeated calls on the same input give identical output.
Eigensystem eigensystem(const Eigen::MatrixXd& matrix, const JacobiOptions& opts = {});

struct SpectralWindow {
    WindowSpec spec;
    Eigen::MatrixXd cov;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd betas;
    double beta_bar = 0.0;

    std::size_t n_firms() const { return static_cast<std::size_t>(cov.rows()); }
    double lambda0() const { return eigenvalues(0); }
    Eigen::VectorXd market_vector() const { return eigenvectors.col(0); }
};

SpectralWindow analyze_window(const Eigen::MatrixXd& returns, const WindowSpec& spec);
SpectralWindow analyze_window(const ReturnPanel& returns, const WindowSpec& spec);

/// beta_i = sqrt(N) e^0_i.
Eigen::VectorXd betas(const SpectralWindow& window);

/// (1/sqrt(N)) sum_i e_i r_i(t) for t in [first, end).
Eigen::VectorXd project_returns(const Eigen::MatrixXd& returns, const Eigen::VectorXd& vector,
                                std::ptrdiff_t first, std::ptrdiff_t end);

/// r_M over the window's step span, indexed from spec.step_first().
Eigen::VectorXd market_return(const Eigen::MatrixXd& returns, const SpectralWindow& window);
Eigen::VectorXd market_return(const ReturnPanel& returns, const SpectralWindow& window);

struct Leader {
    std::string ticker;
    std::string sector;
    double beta = 0.0;
    double turnover = 0.0;
};

/// Firms with beta strictly above `threshold` (>= 0), by descending beta
/// (ticker breaks ties).
std::vector<Leader> market_leaders(const Eigen::VectorXd& betas, double threshold,
                                   const Eigen::VectorXd& turnover,
                                   std::span<const std::string> sectors,
                                   std::span<const std::string> tickers);

}  // namespace mktphase
