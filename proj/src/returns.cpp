#include "mktphase/returns.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "mktphase/error.hpp"
#include "mktphase/table.hpp"

namespace mktphase {

ReturnPanel ReturnPanel::select_firms(std::span<const std::size_t> rows) const {
    ReturnPanel out;
    out.r_norm = r_norm;
    out.dates = dates;
    out.taxonomy = taxonomy;
    out.price_dates = price_dates;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
    out.volumes.resize(static_cast<Eigen::Index>(rows.size()), volumes.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(rows[k]);
        out.tickers.push_back(tickers.at(rows[k]));
        out.sectors.push_back(sectors.at(rows[k]));
        out.values.row(static_cast<Eigen::Index>(k)) = values.row(r);
        out.volumes.row(static_cast<Eigen::Index>(k)) = volumes.row(r);
    }
    return out;
}

double normalization_factor(const Eigen::MatrixXd& log_returns) {
    const double ss = log_returns.squaredNorm();
    if (!(ss > 0.0)) throw Error(ErrorCategory::domain, "degenerate panel: zero variance");
    return std::sqrt(static_cast<double>(log_returns.size()) / ss);
}

ReturnPanel compute_returns(const PricePanel& panel) {
    if (panel.n_days() < 2) throw Error(ErrorCategory::input, "need at least 2 dates for returns");
    if (panel.n_firms() == 0) throw Error(ErrorCategory::input, "panel has no firms");
    if ((panel.prices.array() <= 0.0).any()) throw Error(ErrorCategory::input, "nonpositive price");

    const auto t = panel.prices.cols();
    const Eigen::MatrixXd logs = panel.prices.array().log().matrix();
    const Eigen::MatrixXd raw = logs.rightCols(t - 1) - logs.leftCols(t - 1);

    ReturnPanel out;
    out.r_norm = normalization_factor(raw);
    out.values = out.r_norm * raw;
    out.dates.assign(panel.dates.begin(), panel.dates.end() - 1);
    out.tickers = panel.tickers;
    out.sectors = panel.sectors;
    out.taxonomy = panel.taxonomy;
    out.price_dates = panel.dates;
    out.volumes = panel.volumes;
    return out;
}

ReturnPanel make_return_panel(const Eigen::MatrixXd& log_returns, bool normalize) {
    ReturnPanel out;
    out.r_norm = normalize ? normalization_factor(log_returns) : 1.0;
    out.values = out.r_norm * log_returns;
    out.price_dates = synthetic_calendar(static_cast<std::size_t>(log_returns.cols()) + 1);
    out.dates.assign(out.price_dates.begin(), out.price_dates.end() - 1);
    out.taxonomy = {"All"};
    for (Eigen::Index i = 0; i < log_returns.rows(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "F%04d", static_cast<int>(i));
        out.tickers.emplace_back(buf);
        out.sectors.push_back(0);
    }
    out.volumes = Eigen::MatrixXd::Ones(log_returns.rows(), log_returns.cols() + 1);
    return out;
}

void write_returns(std::ostream& out, const ReturnPanel& panel) {
    out << "# normalized log returns r_i(t) = r_N ln(S(t+1)/S(t)) [dimensionless], r_N = "
        << format_double(panel.r_norm) << ", date = interval start\n"
        << "date";
    for (const auto& t : panel.tickers) out << ',' << t;
    out << '\n';
    for (std::size_t j = 0; j < panel.n_obs(); ++j) {
        out << format_iso_date(panel.dates[j]);
        for (Eigen::Index i = 0; i < panel.values.rows(); ++i)
            out << ',' << format_double(panel.values(i, static_cast<Eigen::Index>(j)));
        out << '\n';
    }
}

}  // namespace mktphase
