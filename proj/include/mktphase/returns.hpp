#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mktphase/date.hpp"
#include "mktphase/ingest.hpp"

namespace mktphase {

/// Normalized log returns r_i(t) = r_N ln(S_i(t+1)/S_i(t)), firms x intervals.
/// dates[t] is the start day of interval t. Volumes stay on the price calendar.
struct ReturnPanel {
    Eigen::MatrixXd values;
    double r_norm = 1.0;
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    std::vector<std::size_t> sectors;
    std::vector<std::string> taxonomy;
    std::vector<Date> price_dates;
    Eigen::MatrixXd volumes;

    std::size_t n_firms() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_obs() const { return static_cast<std::size_t>(values.cols()); }

    ReturnPanel select_firms(std::span<const std::size_t> rows) const;
};

/// r_N such that the sum of squared normalized returns equals the number of
/// entries in `log_returns`.
double normalization_factor(const Eigen::MatrixXd& log_returns);

ReturnPanel compute_returns(const PricePanel& panel);

/// Wraps raw log returns (e.g. synthetic draws) with generated labels: a
/// synthetic calendar, tickers F0000.., one sector, unit volumes.
/// If `normalize` is false r_norm is 1 and values are stored unchanged.
ReturnPanel make_return_panel(const Eigen::MatrixXd& log_returns, bool normalize = true);

void write_returns(std::ostream& out, const ReturnPanel& panel);

}  // namespace mktphase
