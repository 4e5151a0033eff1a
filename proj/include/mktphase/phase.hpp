#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mktphase/returns.hpp"
#include "mktphase/spectral.hpp"

namespace mktphase {

/// R(s) = sum_{i in s, beta_i > gate} beta_i v_i, one entry per sector.
Eigen::VectorXd sector_risk(const Eigen::VectorXd& betas, const Eigen::VectorXd& volumes,
                            std::span<const std::size_t> sectors, std::size_t n_sectors,
                            double gate = 1.0);

/// m(s0) = S/(S-1) (R(s0)/sum_s R - 1/S).
double order_parameter(const Eigen::VectorXd& risk, std::size_t s0);

/// m for every sector.
Eigen::VectorXd order_parameters(const Eigen::VectorXd& risk);

/// theta/(1 + theta), theta >= 0.
double kirman_order_parameter(double theta);

struct PhaseOptions {
    double gate = 1.0;
    std::size_t n_permutations = 100;
    double quantile = 0.95;
    std::uint64_t seed = 0;
};

/// Quantile of max_s m under random relabelling of firms' sectors.
double permutation_threshold(const Eigen::VectorXd& betas, const Eigen::VectorXd& volumes,
                             std::span<const std::size_t> sectors, std::size_t n_sectors,
                             const PhaseOptions& opts, std::uint64_t stream);

/// Ordered toward s0 when m(s0) exceeds the threshold and no other sector
/// does; nullopt means disordered.
std::optional<std::size_t> classify(const Eigen::VectorXd& m, double threshold);

struct PhaseWindow {
    WindowSpec spec;
    Date center_date;
    int volume_year = 0;
    Eigen::VectorXd risk;
    Eigen::VectorXd m;
    double threshold = 0.0;
    std::optional<std::size_t> ordered_sector;
    Eigen::VectorXd betas;
    Eigen::VectorXd turnover;

    std::string label(std::span<const std::string> taxonomy) const;
};

/// For each window: betas, turnover over the calendar year containing the
/// centre day, sector risk, order parameters and the phase label.
std::vector<PhaseWindow> phase_series(const ReturnPanel& returns,
                                      std::span<const WindowSpec> grid,
                                      const PhaseOptions& opts = {});

}  // namespace mktphase
