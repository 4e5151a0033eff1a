#include "mktphase/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mktphase/error.hpp"
#include "mktphase/random.hpp"
#include "mktphase/spectral.hpp"
#include "mktphase/table.hpp"

namespace mktphase {

namespace {

void check_shapes(const SvmParams& p) {
    if (p.beta0.size() == 0) throw Error(ErrorCategory::input, "SVM needs at least one firm");
    if (p.gamma.size() != p.beta0.size())
        throw Error(ErrorCategory::input, "beta0 and gamma differ in length");
    if (!(p.gamma_m >= 0.0) || !std::isfinite(p.gamma_m))
        throw Error(ErrorCategory::input, "gamma_M must be finite and nonnegative");
    if (!p.gamma.allFinite() || (p.gamma.array() < 0.0).any())
        throw Error(ErrorCategory::input, "gamma_i must be finite and nonnegative");
    if (!p.beta0.allFinite()) throw Error(ErrorCategory::input, "beta0 must be finite");
}

std::vector<double> parse_list(std::string_view body, const std::string& text) {
    std::vector<double> out;
    for (const auto& f : split_fields(body, ',')) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size())
            throw Error(ErrorCategory::config, "bad number in coupling spec '" + text + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

Eigen::VectorXd normalize_beta0(const Eigen::VectorXd& beta0) {
    const double ss = beta0.squaredNorm();
    if (!(ss > 0.0)) throw Error(ErrorCategory::input, "beta0 is identically zero");
    return beta0 * std::sqrt(static_cast<double>(beta0.size()) / ss);
}

void validate(const SvmParams& params) {
    check_shapes(params);
    if (!(params.gamma_m > 0.0)) throw Error(ErrorCategory::input, "gamma_M must be positive");
    const double n = static_cast<double>(params.beta0.size());
    if (std::abs(params.beta0.squaredNorm() - n) > 1e-12 * n)
        throw Error(ErrorCategory::input, "beta0 must satisfy sum beta0^2 = N");
}

CouplingSpec CouplingSpec::parse(const std::string& text) {
    const std::string_view t = trim(text);
    CouplingSpec spec;
    const auto open = t.find('(');
    if (open == std::string_view::npos) {
        const auto v = parse_list(t, text);
        if (v.size() != 1) throw Error(ErrorCategory::config, "bad coupling spec '" + text + "'");
        spec.a = spec.b = v[0];
        return spec;
    }
    if (t.back() != ')') throw Error(ErrorCategory::config, "bad coupling spec '" + text + "'");
    const auto name = trim(t.substr(0, open));
    const auto args = parse_list(t.substr(open + 1, t.size() - open - 2), text);
    if (name == "constant" && args.size() == 1) {
        spec.a = spec.b = args[0];
    } else if (name == "uniform" && args.size() == 2 && args[0] <= args[1]) {
        spec.kind = Kind::uniform;
        spec.a = args[0];
        spec.b = args[1];
    } else if (name == "list" && !args.empty()) {
        spec.kind = Kind::list;
        spec.values = args;
    } else {
        throw Error(ErrorCategory::config, "bad coupling spec '" + text + "'");
    }
    return spec;
}

Eigen::VectorXd CouplingSpec::realize(std::size_t n, std::uint64_t seed, std::uint64_t stream) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    switch (kind) {
        case Kind::constant:
            out.setConstant(a);
            break;
        case Kind::uniform: {
            const CounterRng rng(seed);
            for (std::size_t i = 0; i < n; ++i)
                out(static_cast<Eigen::Index>(i)) = a + (b - a) * rng.uniform(stream, i);
            break;
        }
        case Kind::list:
            if (values.size() != n)
                throw Error(ErrorCategory::config, "coupling list has " + std::to_string(values.size()) +
                                                       " values for " + std::to_string(n) + " firms");
            for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = values[i];
            break;
    }
    return out;
}

Eigen::MatrixXd ideal_covariance(const SvmParams& params) {
    check_shapes(params);
    Eigen::MatrixXd c = (params.gamma_m * params.gamma_m) * params.beta0 * params.beta0.transpose();
    c.diagonal() += params.gamma.cwiseAbs2();
    return c;
}

Eigen::MatrixXd sample_returns(const SvmParams& params, std::size_t n_days, std::size_t day_offset) {
    check_shapes(params);
    if (n_days < 2) throw Error(ErrorCategory::input, "sample_returns needs at least 2 days");
    const CounterRng rng(params.seed);
    const auto n = params.beta0.size();
    const auto t_len = static_cast<Eigen::Index>(n_days);
    Eigen::MatrixXd r(n, t_len);
    Eigen::VectorXd market(t_len);
    for (Eigen::Index t = 0; t < t_len; ++t)
        market(t) = params.gamma_m * rng.normal(0, day_offset + static_cast<std::uint64_t>(t));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double b = params.beta0(i);
        const double g = params.gamma(i);
        const auto stream = static_cast<std::uint64_t>(i) + 1;
        for (Eigen::Index t = 0; t < t_len; ++t)
            r(i, t) = b * market(t) + g * rng.normal(stream, day_offset + static_cast<std::uint64_t>(t));
    }
    return r;
}

double beta_weighted_mean(const Eigen::VectorXd& values, const Eigen::VectorXd& beta0) {
    return values.cwiseProduct(beta0.cwiseAbs2()).sum() / static_cast<double>(beta0.size());
}

OracleResult oracle_leading(const SvmParams& params) {
    check_shapes(params);
    if (!(params.gamma_m > 0.0))
        throw Error(ErrorCategory::domain, "gamma_M = 0: expansion parameter 1/E_0 undefined");
    validate(params);
    const double n = static_cast<double>(params.n_firms());
    const double e0 = params.gamma_m * params.gamma_m * n;
    const Eigen::VectorXd g2 = params.gamma.cwiseAbs2();
    const double m2 = beta_weighted_mean(g2, params.beta0);
    const double m4 = beta_weighted_mean(g2.cwiseAbs2(), params.beta0);

    OracleResult out;
    out.lambda0 = e0 + m2 + (m4 - m2 * m2) / e0;
    out.betas = params.beta0.array() * (1.0 + (g2.array() - m2) / e0);
    return out;
}

Eigen::MatrixXd complement_basis(const Eigen::VectorXd& f0, const Eigen::VectorXd& c1) {
    const auto n = f0.size();
    // Householder reflector H with H f0 = -sign(f0_0) e_0; its columns 1..n-1
    // are an orthonormal basis of the complement of f0.
    Eigen::VectorXd u = f0.normalized();
    u(0) += (u(0) >= 0.0 ? 1.0 : -1.0);
    u.normalize();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - 2.0 * u * u.transpose();
    const Eigen::MatrixXd q = h.rightCols(n - 1);
    if (n == 1) return q;

    Eigen::MatrixXd restricted = q.transpose() * c1.asDiagonal() * q;
    restricted = 0.5 * (restricted + restricted.transpose()).eval();
    const auto es = eigensystem(restricted);
    return q * es.vectors;
}

Eigen::VectorXd oracle_subleading(const SvmParams& params) {
    check_shapes(params);
    if (!(params.gamma_m > 0.0))
        throw Error(ErrorCategory::domain, "gamma_M = 0: expansion parameter 1/E_0 undefined");
    validate(params);
    const auto n = params.beta0.size();
    const double e0 = params.gamma_m * params.gamma_m * static_cast<double>(n);
    const Eigen::VectorXd f0 = params.beta0 / std::sqrt(static_cast<double>(n));
    const Eigen::VectorXd c1 = params.gamma.cwiseAbs2();
    const Eigen::MatrixXd f = complement_basis(f0, c1);
    const Eigen::VectorXd c1f0 = c1.cwiseProduct(f0);

    Eigen::VectorXd out(f.cols());
    for (Eigen::Index nu = 0; nu < f.cols(); ++nu) {
        const auto v = f.col(nu);
        const double diag = v.cwiseAbs2().dot(c1);
        const double cross = c1f0.dot(v);
        out(nu) = diag - cross * cross / e0;
    }
    std::sort(out.data(), out.data() + out.size(), std::greater<>());
    return out;
}

}  // namespace mktphase
