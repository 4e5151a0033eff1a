#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mktphase/returns.hpp"
#include "mktphase/spectral.hpp"

namespace mktphase {

/// Firms ranked by `size` (descending) and dealt round-robin into k groups;
/// the N0 mod k smallest firms are left out. Groups list firm rows.
std::vector<std::vector<std::size_t>> partition(const Eigen::VectorXd& size, std::size_t k);

struct ScalingPoint {
    std::size_t k = 1;
    std::size_t n_sub = 0;
    double lambda0_mean = 0.0;
    double delta_sq_mean = 0.0;
    double sigma_beta_mean = 0.0;
    double lambda0_spread = 0.0;  ///< population std of lambda_0 across groups
};

/// Population standard deviation.
double standard_deviation(const Eigen::VectorXd& values);

/// For each k, analyses every group over the full sample and averages
/// lambda_0, Delta^2 and sigma_beta over the groups. Firms are ranked by mean
/// daily volume.
std::vector<ScalingPoint> scaling_curve(const ReturnPanel& returns, std::span<const std::size_t> ks);

struct PowerLawFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

/// Least squares on (ln x, ln y).
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace mktphase
