#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mktphase {

/// Couplings of the stochastic volatility model
///   r_i(t) = beta0_i gamma_M eta_M(t) + gamma_i eta_i(t),
/// with unit-variance independent noise and sum_i beta0_i^2 = N.
struct SvmParams {
    Eigen::VectorXd beta0;
    double gamma_m = 1.0;
    Eigen::VectorXd gamma;
    std::uint64_t seed = 0;

    std::size_t n_firms() const { return static_cast<std::size_t>(beta0.size()); }
};

/// Rescales `beta0` so its squares sum to its length.
Eigen::VectorXd normalize_beta0(const Eigen::VectorXd& beta0);

/// Throws unless sizes agree, gamma_M > 0, gamma >= 0 and beta0 is normalized.
void validate(const SvmParams& params);

/// Per-firm coupling recipe: constant, uniform(lo, hi) or an explicit list.
struct CouplingSpec {
    enum class Kind { constant, uniform, list };
    Kind kind = Kind::constant;
    double a = 1.0;
    double b = 1.0;
    std::vector<double> values;

    /// Parses "1.5", "constant(1.5)", "uniform(0.5,1.5)" or "list(1,2,3)".
    static CouplingSpec parse(const std::string& text);

    /// Draws n values; uniform draws use `stream` of a generator seeded with `seed`.
    Eigen::VectorXd realize(std::size_t n, std::uint64_t seed, std::uint64_t stream) const;
};

/// C_ij = beta0_i beta0_j gamma_M^2 + delta_ij gamma_i^2.
Eigen::MatrixXd ideal_covariance(const SvmParams& params);

/// Firms x days draws. Firm i uses noise stream i + 1 and the market uses
/// stream 0, so adding firms leaves existing firms' draws unchanged.
Eigen::MatrixXd sample_returns(const SvmParams& params, std::size_t n_days,
                               std::size_t day_offset = 0);

struct OracleResult {
    double lambda0 = 0.0;
    Eigen::VectorXd betas;
    Eigen::VectorXd sub_eigs;  ///< descending; empty unless requested
};

/// <a>_beta = (1/N) sum_i a_i beta0_i^2.
double beta_weighted_mean(const Eigen::VectorXd& values, const Eigen::VectorXd& beta0);

/// Second-order expansion in 1/E_0, E_0 = gamma_M^2 N:
///   lambda_0 = E_0 + <g^2> + (<g^4> - <g^2>^2)/E_0
///   beta_i   = beta0_i (1 + (g_i^2 - <g^2>)/E_0)
OracleResult oracle_leading(const SvmParams& params);

/// Non-leading eigenvalues lambda_nu = (f^nu, C1 f^nu) - (f^0, C1 f^nu)^2 / E_0
/// in a basis f^nu of the complement of f^0 = beta0/sqrt(N) that diagonalizes
/// C1 = diag(gamma^2) restricted to that complement. Descending.
Eigen::VectorXd oracle_subleading(const SvmParams& params);

/// Orthonormal basis of the complement of f0 diagonalizing diag(c1) there,
/// as columns (N x (N-1)).
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& f0, const Eigen::VectorXd& c1);

}  // namespace mktphase
