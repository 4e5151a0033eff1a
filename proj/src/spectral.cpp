#include "mktphase/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mktphase/error.hpp"
#include "mktphase/table.hpp"

namespace mktphase {

namespace {

std::string bounds_text(std::ptrdiff_t a, std::ptrdiff_t b) {
    return "[" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

// Sign so the component sum is positive; the first clearly nonzero component
// decides when the sum vanishes.
void fix_sign(double* v, std::size_t n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += v[k];
    const double tol = 1e-12 * std::sqrt(static_cast<double>(n));
    bool flip = sum < -tol;
    if (std::abs(sum) <= tol) {
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(v[k]) > 1e-12) {
                flip = v[k] < 0.0;
                break;
            }
        }
    }
    if (flip)
        for (std::size_t k = 0; k < n; ++k) v[k] = -v[k];
}

}  // namespace

void validate_window(const WindowSpec& spec, std::size_t n_obs) {
    if (spec.width <= 0 || spec.step <= 0 || spec.step > spec.width)
        throw Error(ErrorCategory::input, "invalid window: need 0 < step <= width (width " +
                                              std::to_string(spec.width) + ", step " +
                                              std::to_string(spec.step) + ")");
    const auto n = static_cast<std::ptrdiff_t>(n_obs);
    if (spec.first() < 0 || spec.end() > n)
        throw Error(ErrorCategory::input, "window " + bounds_text(spec.first(), spec.end()) +
                                              " centred at " + std::to_string(spec.center) +
                                              " outside panel " + bounds_text(0, n));
}

std::vector<WindowSpec> window_grid(std::size_t n_obs, std::ptrdiff_t width, std::ptrdiff_t step) {
    std::vector<WindowSpec> grid;
    WindowSpec first{(width + 1) / 2, width, step};
    validate_window(first, n_obs);
    for (auto spec = first; spec.end() <= static_cast<std::ptrdiff_t>(n_obs); spec.center += step)
        grid.push_back(spec);
    return grid;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& returns, const WindowSpec& spec) {
    validate_window(spec, static_cast<std::size_t>(returns.cols()));
    const auto n = returns.rows();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    c.selfadjointView<Eigen::Lower>().rankUpdate(returns.middleCols(spec.first(), spec.width),
                                                 1.0 / static_cast<double>(spec.width));
    return c.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd covariance(const ReturnPanel& returns, const WindowSpec& spec) {
    return covariance(returns.values, spec);
}

Eigensystem eigensystem(const Eigen::MatrixXd& matrix, const JacobiOptions& opts) {
    if (matrix.rows() != matrix.cols())
        throw Error(ErrorCategory::input, "eigensystem needs a square matrix");
    const auto n = static_cast<std::size_t>(matrix.rows());
    Eigensystem out;
    if (n == 0) return out;

    const double scale = matrix.cwiseAbs().maxCoeff();
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= opts.symmetry_tolerance * std::max(scale, 1e-300)) && asym > 0.0)
        throw Error(ErrorCategory::input,
                    "matrix not symmetric (max asymmetry " + format_double(asym) + ")");
    if (!matrix.allFinite()) throw Error(ErrorCategory::input, "matrix has non-finite entries");

    // Row-major working copy; vt row k accumulates eigenvector k.
    std::vector<double> a(n * n), vt(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        vt[i * n + i] = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = 0.5 * (matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                                  matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
    }
    const double norm = matrix.norm();
    const double target = opts.tolerance * norm;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += a[p * n + q] * a[p * n + q];
        return std::sqrt(2.0 * s);
    };

    double off = off_norm();
    int sweep = 0;
    while (off > target && !(off == 0.0)) {
        if (sweep == opts.max_sweeps)
            throw Error(ErrorCategory::numerical,
                        "Jacobi eigensolver did not converge in " + std::to_string(sweep) +
                            " sweeps (off-diagonal residual " + format_double(off) + ", target " +
                            format_double(target) + ")");
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                double* rp = &a[p * n];
                double* rq = &a[q * n];
                for (std::size_t k = 0; k < n; ++k) {
                    const double x = rp[k];
                    const double y = rq[k];
                    rp[k] = x - s * (y + tau * x);
                    rq[k] = y + s * (x - tau * y);
                }
                rp[p] = app - t * apq;
                rq[q] = aqq + t * apq;
                rp[q] = 0.0;
                rq[p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    a[k * n + p] = rp[k];
                    a[k * n + q] = rq[k];
                }

                double* vp = &vt[p * n];
                double* vq = &vt[q * n];
                for (std::size_t k = 0; k < n; ++k) {
                    const double x = vp[k];
                    const double y = vq[k];
                    vp[k] = x - s * (y + tau * x);
                    vq[k] = y + s * (x - tau * y);
                }
            }
        }
        off = off_norm();
    }
    out.sweeps = sweep;

    for (std::size_t k = 0; k < n; ++k) fix_sign(&vt[k * n], n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });

    // Near-equal eigenvalues: descending lexicographic order of the vectors.
    double lam_scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) lam_scale = std::max(lam_scale, std::abs(a[k * n + k]));
    const double tie = 1e-12 * lam_scale;
    for (std::size_t g = 0; g < n;) {
        std::size_t h = g + 1;
        while (h < n && a[order[h - 1] * (n + 1)] - a[order[h] * (n + 1)] <= tie) ++h;
        if (h - g > 1)
            std::sort(order.begin() + static_cast<std::ptrdiff_t>(g),
                      order.begin() + static_cast<std::ptrdiff_t>(h), [&](std::size_t x, std::size_t y) {
                          return std::lexicographical_compare(&vt[y * n], &vt[y * n] + n, &vt[x * n],
                                                              &vt[x * n] + n);
                      });
        g = h;
    }

    out.values.resize(static_cast<Eigen::Index>(n));
    out.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values(static_cast<Eigen::Index>(k)) = a[src * n + src];
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = vt[src * n + i];
    }
    return out;
}

SpectralWindow analyze_window(const Eigen::MatrixXd& returns, const WindowSpec& spec) {
    SpectralWindow w;
    w.spec = spec;
    w.cov = covariance(returns, spec);
    auto es = eigensystem(w.cov);
    w.eigenvalues = std::move(es.values);
    w.eigenvectors = std::move(es.vectors);
    w.betas = betas(w);
    w.beta_bar = w.betas.mean();
    return w;
}

SpectralWindow analyze_window(const ReturnPanel& returns, const WindowSpec& spec) {
    return analyze_window(returns.values, spec);
}

Eigen::VectorXd betas(const SpectralWindow& window) {
    if (window.eigenvectors.cols() == 0) throw Error(ErrorCategory::input, "eigensystem not computed");
    return std::sqrt(static_cast<double>(window.eigenvectors.rows())) * window.eigenvectors.col(0);
}

Eigen::VectorXd project_returns(const Eigen::MatrixXd& returns, const Eigen::VectorXd& vector,
                                std::ptrdiff_t first, std::ptrdiff_t end) {
    if (first < 0 || end > returns.cols() || first > end)
        throw Error(ErrorCategory::input, "projection span " + bounds_text(first, end) +
                                              " outside panel " + bounds_text(0, returns.cols()));
    const double inv = 1.0 / std::sqrt(static_cast<double>(returns.rows()));
    return inv * (returns.middleCols(first, end - first).transpose() * vector);
}

Eigen::VectorXd market_return(const Eigen::MatrixXd& returns, const SpectralWindow& window) {
    return project_returns(returns, window.eigenvectors.col(0), window.spec.step_first(),
                           window.spec.step_end());
}

Eigen::VectorXd market_return(const ReturnPanel& returns, const SpectralWindow& window) {
    return market_return(returns.values, window);
}

std::vector<Leader> market_leaders(const Eigen::VectorXd& betas, double threshold,
                                   const Eigen::VectorXd& turnover,
                                   std::span<const std::string> sectors,
                                   std::span<const std::string> tickers) {
    if (!(threshold >= 0.0)) throw Error(ErrorCategory::input, "leader threshold must be nonnegative");
    const auto n = static_cast<std::size_t>(betas.size());
    if (static_cast<std::size_t>(turnover.size()) != n || sectors.size() != n || tickers.size() != n)
        throw Error(ErrorCategory::input, "leader inputs differ in length");
    std::vector<Leader> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (betas(k) > threshold) out.push_back({tickers[i], sectors[i], betas(k), turnover(k)});
    }
    std::sort(out.begin(), out.end(), [](const Leader& x, const Leader& y) {
        return x.beta != y.beta ? x.beta > y.beta : x.ticker < y.ticker;
    });
    return out;
}

}  // namespace mktphase
