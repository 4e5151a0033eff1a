#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "mktphase/error.hpp"
#include "mktphase/spectral.hpp"
#include "mktphase/svm.hpp"

using namespace mktphase;

namespace {

SvmParams uniform_params(std::size_t n, double gamma_m, std::uint64_t seed) {
    SvmParams p;
    p.beta0 = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    p.gamma = CouplingSpec::parse("uniform(0.5,1.5)").realize(n, seed, 0);
    p.gamma_m = gamma_m;
    p.seed = seed;
    return p;
}

double exact_residual(const SvmParams& p) {
    return std::abs(oracle_leading(p).lambda0 - eigensystem(ideal_covariance(p)).values(0));
}

double beta_residual(const SvmParams& p) {
    const auto es = eigensystem(ideal_covariance(p));
    const Eigen::VectorXd exact = std::sqrt(static_cast<double>(p.n_firms())) * es.vectors.col(0);
    return (oracle_leading(p).betas - exact).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parameter validation", "[svm]") {
    auto p = uniform_params(4, 1.0, 1);
    CHECK_NOTHROW(validate(p));
    p.gamma_m = 0.0;
    CHECK_THROWS_AS(validate(p), Error);
    p.gamma_m = 1.0;
    p.beta0 = Eigen::Vector4d(1, 1, 1, 2);
    CHECK_THROWS_AS(validate(p), Error);
    p.beta0 = normalize_beta0(p.beta0);
    CHECK(p.beta0.squaredNorm() == Catch::Approx(4.0).epsilon(1e-15));
    CHECK_NOTHROW(validate(p));
    CHECK_THROWS_AS(normalize_beta0(Eigen::Vector2d::Zero()), Error);
}

TEST_CASE("coupling recipes", "[svm]") {
    CHECK(CouplingSpec::parse("1.5").realize(3, 0, 0) == Eigen::Vector3d::Constant(1.5));
    CHECK(CouplingSpec::parse("constant(0.25)").realize(2, 0, 0) == Eigen::Vector2d::Constant(0.25));
    CHECK(CouplingSpec::parse("list(1, 2, 3)").realize(3, 0, 0) == Eigen::Vector3d(1, 2, 3));
    CHECK_THROWS_AS(CouplingSpec::parse("list(1,2)").realize(3, 0, 0), Error);
    const auto u = CouplingSpec::parse("uniform(0.5, 1.5)").realize(1000, 7, 0);
    CHECK(u.minCoeff() > 0.5);
    CHECK(u.maxCoeff() < 1.5);
    CHECK(std::abs(u.mean() - 1.0) < 0.05);
    CHECK(u == CouplingSpec::parse("uniform(0.5,1.5)").realize(1000, 7, 0));
    for (const char* bad : {"", "uniform(2,1)", "uniform(1)", "gauss(0,1)", "list()", "1.5)"})
        CHECK_THROWS_AS(CouplingSpec::parse(bad), Error);
}

TEST_CASE("ideal covariance", "[svm]") {
    SvmParams p;
    p.beta0 = Eigen::Vector2d(1, 1);
    p.gamma = Eigen::Vector2d::Zero();
    p.gamma_m = 1.0;
    CHECK(ideal_covariance(p) == Eigen::Matrix2d::Ones());

    auto q = uniform_params(6, 0.7, 3);
    q.beta0 = normalize_beta0(CouplingSpec::parse("uniform(0.2,1.8)").realize(6, 3, 9));
    const auto c = ideal_covariance(q);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) {
            const double expect = q.beta0(i) * q.beta0(j) * 0.49 + (i == j ? q.gamma(i) * q.gamma(i) : 0.0);
            CHECK(std::abs(c(i, j) - expect) <= 1e-15);
        }

    // Shifted rank one: N gamma_M^2 + gamma^2 once, gamma^2 (N-1)-fold.
    SvmParams s;
    s.beta0 = Eigen::VectorXd::Ones(5);
    s.gamma = Eigen::VectorXd::Constant(5, 0.8);
    s.gamma_m = 1.2;
    const auto es = eigensystem(ideal_covariance(s));
    CHECK(es.values(0) == Catch::Approx(5 * 1.44 + 0.64).epsilon(1e-14));
    for (Eigen::Index k = 1; k < 5; ++k) CHECK(std::abs(es.values(k) - 0.64) <= 1e-14);
}

TEST_CASE("sampled returns", "[svm]") {
    SvmParams zero;
    zero.beta0 = Eigen::VectorXd::Ones(3);
    zero.gamma = Eigen::VectorXd::Zero(3);
    zero.gamma_m = 0.0;
    CHECK(sample_returns(zero, 10).isZero(0.0));

    const auto p = uniform_params(10, 1.0, 5);
    const auto a = sample_returns(p, 4000);
    CHECK(a == sample_returns(p, 4000));
    const Eigen::MatrixXd sample = a * a.transpose() / 4000.0;
    const auto ideal = ideal_covariance(p);
    CHECK((sample - ideal).norm() <= 5.0 * std::sqrt(10.0 / 4000.0) * ideal.norm());

    // Adding firms leaves existing firms' draws unchanged; offsets continue the sequence.
    auto bigger = p;
    bigger.beta0 = Eigen::VectorXd::Ones(12);
    bigger.gamma.conservativeResize(12);
    bigger.gamma.tail(2).setConstant(1.0);
    CHECK(sample_returns(bigger, 50).topRows(10) == a.leftCols(50));
    CHECK(sample_returns(p, 30, 20) == a.middleCols(20, 30));
}

TEST_CASE("oracle on a hand-solved two-firm market", "[svm]") {
    // beta0 = (1,1), gamma_M = 1, gamma^2 = (1, 2): E_0 = 2, <g^2> = 3/2, <g^4> = 5/2.
    SvmParams p;
    p.beta0 = Eigen::Vector2d(1, 1);
    p.gamma = Eigen::Vector2d(1.0, std::sqrt(2.0));
    p.gamma_m = 1.0;
    const auto o = oracle_leading(p);
    CHECK(o.lambda0 == Catch::Approx(3.625).epsilon(1e-15));
    CHECK(o.betas(0) == Catch::Approx(0.75).epsilon(1e-15));
    CHECK(o.betas(1) == Catch::Approx(1.25).epsilon(1e-15));
    const auto sub = oracle_subleading(p);
    REQUIRE(sub.size() == 1);
    CHECK(sub(0) == Catch::Approx(1.375).epsilon(1e-14));
    // Exact: C = [[2,1],[1,3]], lambda = (5 +- sqrt 5)/2.
    CHECK(std::abs(o.lambda0 - (5.0 + std::sqrt(5.0)) / 2.0) < 0.01);
    CHECK(std::abs(sub(0) - (5.0 - std::sqrt(5.0)) / 2.0) < 0.01);
}

TEST_CASE("constant idiosyncratic coupling is exact", "[svm]") {
    SvmParams p;
    p.beta0 = Eigen::VectorXd::Ones(9);
    p.gamma = Eigen::VectorXd::Constant(9, 0.9);
    p.gamma_m = 0.3;
    const auto o = oracle_leading(p);
    const auto es = eigensystem(ideal_covariance(p));
    CHECK(std::abs(o.lambda0 - (9 * 0.09 + 0.81)) <= 1e-14);
    CHECK(std::abs(o.lambda0 - es.values(0)) <= 1e-10);
    CHECK((o.betas.array() - 1.0).abs().maxCoeff() <= 1e-15);
    const auto sub = oracle_subleading(p);
    CHECK((sub.array() - 0.81).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("oracle lower bound", "[svm]") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto p = uniform_params(5 + seed, 0.1 * static_cast<double>(seed), seed);
        p.beta0 = normalize_beta0(CouplingSpec::parse("uniform(0.1,2)").realize(p.n_firms(), seed, 4));
        CHECK(oracle_leading(p).lambda0 >= static_cast<double>(p.n_firms()) * p.gamma_m * p.gamma_m);
    }
}

TEST_CASE("oracle needs a market coupling", "[svm]") {
    auto p = uniform_params(4, 0.0, 1);
    try {
        oracle_leading(p);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::domain);
    }
    CHECK_THROWS_AS(oracle_subleading(p), Error);
}

TEST_CASE("leading residuals at N=64 against the N=256 calibration", "[svm]") {
    const auto big = uniform_params(256, 0.1, 2);
    const auto small = uniform_params(64, 0.1, 2);
    const double c = 10.0 * exact_residual(big) * 256.0 * 256.0;
    CHECK(exact_residual(small) <= c / (64.0 * 64.0));
    const double cb = 10.0 * beta_residual(big) * 256.0 * 256.0;
    CHECK(beta_residual(small) <= cb / (64.0 * 64.0));
}

TEST_CASE("subleading predictions", "[svm]") {
    auto residual = [](double gamma_m) {
        auto p = uniform_params(6, gamma_m, 12);
        p.beta0 = normalize_beta0(Eigen::Vector<double, 6>(0.8, 1.1, 0.9, 1.3, 0.7, 1.0));
        const auto es = eigensystem(ideal_covariance(p));
        const auto sub = oracle_subleading(p);
        REQUIRE(sub.size() == 5);
        // Trace identity holds exactly for the second-order expansion.
        CHECK(std::abs(oracle_leading(p).lambda0 + sub.sum() - ideal_covariance(p).trace()) <= 1e-12 * es.values(0));
        return (sub - es.values.tail(5)).cwiseAbs().maxCoeff();
    };
    const double r2 = residual(2.0);
    const double r4 = residual(4.0);
    // Neglected terms are O(1/E_0^2): doubling gamma_M divides them by ~16.
    CHECK(r2 < 0.01);
    CHECK(r4 <= r2 / 8.0);

    const Eigen::VectorXd f0 = Eigen::VectorXd::Constant(5, 1.0 / std::sqrt(5.0));
    const auto basis = complement_basis(f0, Eigen::Vector<double, 5>(1, 2, 3, 4, 5));
    CHECK((basis.transpose() * basis - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((basis.transpose() * f0).cwiseAbs().maxCoeff() < 1e-13);
    const Eigen::MatrixXd restricted = basis.transpose() * Eigen::Vector<double, 5>(1, 2, 3, 4, 5).asDiagonal() * basis;
    CHECK((restricted - Eigen::MatrixXd(restricted.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}
