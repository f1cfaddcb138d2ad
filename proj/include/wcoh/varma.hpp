#ifndef WCOH_VARMA_HPP
#define WCOH_VARMA_HPP

#include "error.hpp"
#include "timeseries.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace wcoh {

/// Distance kept from the unit circle when projecting fitted coefficients.
inline constexpr double kStabilityMargin = 1e-4;
inline constexpr std::size_t kMinFitLength = 50;
inline constexpr double kMaxConditionNumber = 1e12;

/// x_t - mu = phi (x_{t-1} - mu) + e_t + theta e_{t-1}
struct ArmaModel {
    double mean = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double sigma2 = 0.0;
    std::size_t n_obs = 0;
    double last_value = 0.0;
    double last_residual = 0.0;
    /// Set when the refinement failed or coefficients had to be projected.
    bool warning = false;
};

/// x_t - mu = Phi (x_{t-1} - mu) + e_t + Theta e_{t-1},  e_t ~ N(0, Sigma)
struct VarmaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd phi;
    Eigen::MatrixXd theta;
    Eigen::MatrixXd sigma;
    std::size_t n_obs = 0;
    Eigen::VectorXd last_value;
    Eigen::VectorXd last_residual;
    bool warning = false;

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

inline double spectral_radius(const Eigen::MatrixXd& m)
{
    if (m.size() == 0) return 0.0;
    return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

inline VarmaModel to_varma(const ArmaModel& a)
{
    VarmaModel v;
    v.mean = Eigen::VectorXd::Constant(1, a.mean);
    v.phi = Eigen::MatrixXd::Constant(1, 1, a.phi);
    v.theta = Eigen::MatrixXd::Constant(1, 1, a.theta);
    v.sigma = Eigen::MatrixXd::Constant(1, 1, a.sigma2);
    v.n_obs = a.n_obs;
    v.last_value = Eigen::VectorXd::Constant(1, a.last_value);
    v.last_residual = Eigen::VectorXd::Constant(1, a.last_residual);
    v.warning = a.warning;
    return v;
}

namespace detail {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
};

/// Nelder-Mead simplex minimiser (standard reflection/expansion/contraction/shrink).
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                 double step, std::size_t max_iter, double tol)
{
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const auto best = order.front(), worst = order.back(), second = order[n - 1];
        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) spread = std::max(spread, std::abs(pts[i][k] - pts[best][k]));
        if (std::abs(vals[worst] - vals[best]) <= tol * (std::abs(vals[best]) + tol) && spread < 1e-8)
            return {pts[best], vals[best], true};

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        auto along = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
            return p;
        };

        auto refl = along(-1.0);
        const double fr = f(refl);
        if (fr < vals[best]) {
            auto expd = along(-2.0);
            const double fe = f(expd);
            if (fe < fr) pts[worst] = std::move(expd), vals[worst] = fe;
            else pts[worst] = std::move(refl), vals[worst] = fr;
        } else if (fr < vals[second]) {
            pts[worst] = std::move(refl);
            vals[worst] = fr;
        } else {
            auto contr = along(fr < vals[worst] ? -0.5 : 0.5);
            const double fc = f(contr);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = std::move(contr);
                vals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {pts[best], vals[best], false};
}

inline double condition_number(const Eigen::MatrixXd& gram)
{
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

/// Least squares B minimising ||Y - X B||, refusing ill-conditioned designs.
inline Eigen::MatrixXd least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y)
{
    const Eigen::MatrixXd gram = x.transpose() * x;
    if (condition_number(gram) > kMaxConditionNumber)
        throw DataError("collinear series: regressor cross-product is ill-conditioned");
    return gram.ldlt().solve(x.transpose() * y);
}

inline long long_ar_order(std::size_t n) { return std::lround(10.0 * std::log10(static_cast<double>(n))); }

/// Demeaned copy as an n x p matrix; validates length, finiteness and variance.
inline Eigen::MatrixXd demeaned(const std::vector<std::vector<double>>& cols, Eigen::VectorXd& mean)
{
    const std::size_t p = cols.size();
    const std::size_t n = cols.front().size();
    if (n < kMinFitLength) throw DataError("series too short for ARMA/VARMA fit (need >= 50)");
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    mean.resize(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        if (cols[j].size() != n) throw UsageError("series are not aligned");
        for (std::size_t t = 0; t < n; ++t) {
            if (!std::isfinite(cols[j][t])) throw DataError("non-finite value in series");
            y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = cols[j][t];
        }
        const auto jj = static_cast<Eigen::Index>(j);
        mean(jj) = y.col(jj).mean();
        y.col(jj).array() -= mean(jj);
        if (!(y.col(jj).squaredNorm() > 1e-24 * std::max(1.0, mean(jj) * mean(jj)) * static_cast<double>(n)))
            throw DataError("series has zero variance; no model can be fitted");
    }
    return y;
}

/// OLS VAR(m) without intercept on demeaned data; residuals for t >= m
/// (earlier rows left at zero).
inline Eigen::MatrixXd var_residuals(const Eigen::MatrixXd& y, long m, double* logdet = nullptr, long first = -1)
{
    const long n = y.rows(), p = y.cols();
    if (first < 0) first = m;
    const long rows = n - first;
    Eigen::MatrixXd x(rows, m * p), target(rows, p);
    for (long r = 0; r < rows; ++r) {
        const long t = first + r;
        for (long lag = 1; lag <= m; ++lag) x.block(r, (lag - 1) * p, 1, p) = y.row(t - lag);
        target.row(r) = y.row(t);
    }
    const Eigen::MatrixXd b = least_squares(x, target);
    const Eigen::MatrixXd res = target - x * b;
    if (logdet) {
        const Eigen::MatrixXd cov = res.transpose() * res / static_cast<double>(rows);
        *logdet = std::log(cov.determinant());
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, p);
    out.bottomRows(rows) = res;
    return out;
}

/// Conditional residuals e_t = y_t - Phi y_{t-1} - Theta e_{t-1}, e_0 = 0.
inline Eigen::MatrixXd varma_residuals(const Eigen::MatrixXd& y, const Eigen::MatrixXd& phi, const Eigen::MatrixXd& theta)
{
    const long n = y.rows(), p = y.cols();
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, p);
    for (long t = 1; t < n; ++t)
        e.row(t) = y.row(t) - y.row(t - 1) * phi.transpose() - e.row(t - 1) * theta.transpose();
    return e;
}

/// Levenberg-Marquardt on the conditional sum of squares whitened by
/// `sigma`. Derivatives of the residuals follow the same recursion as the
/// residuals themselves. Returns false if no decrease could be found.
inline bool css_refine(const Eigen::MatrixXd& y, Eigen::MatrixXd& phi, Eigen::MatrixXd& theta,
                       const Eigen::MatrixXd& sigma, std::size_t max_iter = 50)
{
    const long n = y.rows(), p = y.cols(), k = 2 * p * p;
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::MatrixXd w = llt.matrixL().solve(Eigen::MatrixXd::Identity(p, p));

    auto objective = [&](const Eigen::MatrixXd& ph, const Eigen::MatrixXd& th) {
        return (varma_residuals(y, ph, th) * w.transpose()).squaredNorm();
    };
    double ss = objective(phi, theta);
    double lambda = 1e-3;
    bool improved = false;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const Eigen::MatrixXd e = varma_residuals(y, phi, theta);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, k);
        for (long t = 1; t < n; ++t) {
            Eigen::MatrixXd next = -theta * d;
            for (long b = 0; b < p; ++b)
                for (long r = 0; r < p; ++r) {
                    next(r, r + b * p) -= y(t - 1, b);
                    next(r, p * p + r + b * p) -= e(t - 1, b);
                }
            d = std::move(next);
            const Eigen::MatrixXd wd = w * d;
            a.noalias() += wd.transpose() * wd;
            g.noalias() += wd.transpose() * (w * e.row(t).transpose());
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            Eigen::MatrixXd damped = a;
            damped.diagonal() *= 1.0 + lambda;
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            Eigen::MatrixXd ph = phi, th = theta;
            for (long i = 0; i < p * p; ++i) {
                ph(i % p, i / p) += step(i);
                th(i % p, i / p) += step(p * p + i);
            }
            if (spectral_radius(th) < 1.0 - kStabilityMargin) {
                const double cand = objective(ph, th);
                if (cand < ss) {
                    const double rel = (ss - cand) / ss;
                    phi = ph;
                    theta = th;
                    ss = cand;
                    lambda = std::max(lambda / 10.0, 1e-12);
                    accepted = improved = true;
                    if (rel < 1e-12) return true;
                    continue;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
    return improved;
}

inline void enforce_radius(Eigen::MatrixXd& m, bool& warning)
{
    const double r = spectral_radius(m);
    if (r >= 1.0 - kStabilityMargin) {
        m *= (1.0 - kStabilityMargin) / r;
        warning = true;
    }
}

} // namespace detail

/// ARMA(1,1) by Hannan-Rissanen (long-AR residual proxy, then regression on
/// lagged value and lagged residual), refined by conditional sum of squares
/// with a Nelder-Mead search.
inline ArmaModel fit_arma11(std::span<const double> x)
{
    Eigen::VectorXd mean;
    const Eigen::MatrixXd y = detail::demeaned({std::vector<double>(x.begin(), x.end())}, mean);
    const long n = y.rows();
    const long m = std::min(detail::long_ar_order(static_cast<std::size_t>(n)), n / 4);

    const Eigen::MatrixXd e = detail::var_residuals(y, m);
    const long rows = n - m - 1;
    Eigen::MatrixXd z(rows, 2), target(rows, 1);
    for (long r = 0; r < rows; ++r) {
        const long t = m + 1 + r;
        z(r, 0) = y(t - 1, 0);
        z(r, 1) = e(t - 1, 0);
        target(r, 0) = y(t, 0);
    }
    const Eigen::MatrixXd b = detail::least_squares(z, target);

    ArmaModel model;
    model.mean = mean(0);
    model.n_obs = static_cast<std::size_t>(n);
    const double bound = 1.0 - kStabilityMargin;
    auto project = [&](double v) {
        if (std::abs(v) > bound) {
            model.warning = true;
            return std::copysign(bound, v);
        }
        return v;
    };
    const double phi0 = project(b(0, 0));
    const double theta0 = project(b(1, 0));

    auto css = [&](double phi, double theta, double* last_e = nullptr) {
        double ss = 0.0, prev_e = 0.0;
        for (long t = 1; t < n; ++t) {
            const double et = y(t, 0) - phi * y(t - 1, 0) - theta * prev_e;
            ss += et * et;
            prev_e = et;
        }
        if (last_e) *last_e = prev_e;
        return ss;
    };
    const auto objective = [&](const std::vector<double>& v) {
        if (std::abs(v[0]) >= bound || std::abs(v[1]) >= bound) return std::numeric_limits<double>::max();
        return css(v[0], v[1]);
    };
    const auto fit = detail::nelder_mead(objective, {phi0, theta0}, 0.05, 500, 1e-12);
    if (fit.converged) {
        model.phi = fit.x[0];
        model.theta = fit.x[1];
    } else {
        model.phi = phi0;
        model.theta = theta0;
        model.warning = true;
    }
    double last_e = 0.0;
    model.sigma2 = css(model.phi, model.theta, &last_e) / static_cast<double>(n - 1);
    model.last_residual = last_e;
    model.last_value = y(n - 1, 0) + model.mean;
    return model;
}

/// VARMA(1,1) by multivariate Hannan-Rissanen: a long VAR (order by AIC,
/// capped at round(10 log10 n)) supplies residual proxies, one joint
/// regression of x_t on (x_{t-1}, e_{t-1}) gives starting values, and a
/// weighted conditional-sum-of-squares refinement finishes the fit unless
/// `refine` is false, in which case Sigma comes from the stage-2 residuals.
inline VarmaModel fit_varma11(const std::vector<std::vector<double>>& columns, bool refine = true)
{
    if (columns.size() < 2) throw UsageError("VARMA needs at least two series");
    VarmaModel model;
    const Eigen::MatrixXd y = detail::demeaned(columns, model.mean);
    const long n = y.rows(), p = y.cols();

    const long cap = std::max(1L, std::min(detail::long_ar_order(static_cast<std::size_t>(n)), (n / 2 - 1) / p));
    long best_m = 1;
    double best_aic = std::numeric_limits<double>::infinity();
    for (long m = 1; m <= cap; ++m) {
        double logdet = 0.0;
        detail::var_residuals(y, m, &logdet, cap);
        const double aic = logdet + 2.0 * static_cast<double>(m * p * p) / static_cast<double>(n - cap);
        if (aic < best_aic) {
            best_aic = aic;
            best_m = m;
        }
    }
    const Eigen::MatrixXd e = detail::var_residuals(y, best_m);

    const long rows = n - best_m - 1;
    Eigen::MatrixXd z(rows, 2 * p), target(rows, p);
    for (long r = 0; r < rows; ++r) {
        const long t = best_m + 1 + r;
        z.block(r, 0, 1, p) = y.row(t - 1);
        z.block(r, p, 1, p) = e.row(t - 1);
        target.row(r) = y.row(t);
    }
    const Eigen::MatrixXd b = detail::least_squares(z, target);
    const Eigen::MatrixXd res = target - z * b;

    model.phi = b.topRows(p).transpose();
    model.theta = b.bottomRows(p).transpose();
    model.n_obs = static_cast<std::size_t>(n);
    detail::enforce_radius(model.phi, model.warning);
    detail::enforce_radius(model.theta, model.warning);

    // Two CSS passes; the second reweights with the covariance of the first.
    Eigen::MatrixXd weight = res.transpose() * res / static_cast<double>(rows);
    for (int pass = 0; refine && pass < 2; ++pass) {
        detail::css_refine(y, model.phi, model.theta, 0.5 * (weight + weight.transpose()));
        const Eigen::MatrixXd r = detail::varma_residuals(y, model.phi, model.theta).bottomRows(n - 1);
        weight = r.transpose() * r / static_cast<double>(n - 1);
    }
    detail::enforce_radius(model.phi, model.warning);
    model.sigma = 0.5 * (weight + weight.transpose());

    const Eigen::MatrixXd fitted = detail::varma_residuals(y, model.phi, model.theta);
    model.last_residual = fitted.row(n - 1).transpose();
    model.last_value = y.row(n - 1).transpose() + model.mean;
    return model;
}

inline VarmaModel fit_varma11(const MultiSeries& ms, bool refine = true) { return fit_varma11(ms.columns(), refine); }

struct ForecastResult {
    std::size_t horizon = 0;
    /// H x p point forecasts.
    Eigen::MatrixXd point;
    /// Forecast-error covariance per horizon (index h-1).
    std::vector<Eigen::MatrixXd> cov;
    /// Gaussian 95% band (point -/+ 1.96 sd).
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;
};

inline constexpr double kBandZ = 1.96;

namespace detail {

inline void validate(const VarmaModel& m)
{
    const auto p = static_cast<Eigen::Index>(m.dim());
    detail::require(p >= 1 && m.phi.rows() == p && m.phi.cols() == p && m.theta.rows() == p && m.theta.cols() == p
                        && m.sigma.rows() == p && m.sigma.cols() == p,
                    "model matrices have inconsistent dimensions");
    detail::require(spectral_radius(m.phi) < 1.0, "model is not stationary (spectral radius of Phi >= 1)");
    detail::require(spectral_radius(m.theta) < 1.0, "model is not invertible (spectral radius of Theta >= 1)");
    detail::require((m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + m.sigma.cwiseAbs().maxCoeff()),
                    "innovation covariance is not symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.sigma, Eigen::EigenvaluesOnly);
    detail::require(es.eigenvalues().minCoeff() >= -1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()),
                    "innovation covariance is not positive semi-definite");
}

} // namespace detail

/// h-step forecasts with Psi-weight error covariance:
/// Psi_0 = I, Psi_1 = Phi + Theta, Psi_h = Phi Psi_{h-1}; cov_h = sum_{k<h} Psi_k Sigma Psi_k'.
inline ForecastResult forecast(const VarmaModel& model, const Eigen::VectorXd& last_value,
                               const Eigen::VectorXd& last_residual, std::size_t horizon)
{
    if (horizon < 1) throw UsageError("forecast horizon must be >= 1");
    detail::validate(model);
    const auto p = static_cast<Eigen::Index>(model.dim());
    if (last_value.size() != p) throw UsageError("forecast: last observation has wrong dimension");
    if (last_residual.size() != p) throw UsageError("forecast: missing trailing residual");

    ForecastResult out;
    out.horizon = horizon;
    const auto h = static_cast<Eigen::Index>(horizon);
    out.point.resize(h, p);
    out.lower.resize(h, p);
    out.upper.resize(h, p);

    Eigen::VectorXd dev = model.phi * (last_value - model.mean) + model.theta * last_residual;
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(p, p);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 0; k < h; ++k) {
        if (k > 0) dev = model.phi * dev;
        out.point.row(k) = (model.mean + dev).transpose();
        cov += psi * model.sigma * psi.transpose();
        out.cov.push_back(cov);
        psi = k == 0 ? Eigen::MatrixXd(model.phi + model.theta) : Eigen::MatrixXd(model.phi * psi);
        const Eigen::VectorXd half = kBandZ * cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        out.lower.row(k) = out.point.row(k) - half.transpose();
        out.upper.row(k) = out.point.row(k) + half.transpose();
    }
    return out;
}

inline ForecastResult forecast(const VarmaModel& model, std::size_t horizon)
{
    return forecast(model, model.last_value, model.last_residual, horizon);
}

inline ForecastResult forecast(const ArmaModel& model, std::size_t horizon) { return forecast(to_varma(model), horizon); }

struct MseEvaluation {
    /// H x p squared errors.
    Eigen::MatrixXd squared_error;
    /// Mean squared error over the horizon, per series.
    Eigen::VectorXd cumulative_mse;
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;

    [[nodiscard]] double overall_mse() const { return cumulative_mse.mean(); }
};

/// `actual` is at least H x p; only the first H rows are used.
inline MseEvaluation evaluate_mse(const ForecastResult& result, const Eigen::MatrixXd& actual)
{
    const auto h = static_cast<Eigen::Index>(result.horizon);
    if (actual.rows() < h || actual.cols() != result.point.cols())
        throw UsageError("evaluate_mse: actual values do not cover the forecast horizon");
    MseEvaluation ev;
    ev.squared_error = (actual.topRows(h) - result.point).array().square().matrix();
    ev.cumulative_mse = ev.squared_error.colwise().mean().transpose();
    ev.lower = result.lower;
    ev.upper = result.upper;
    return ev;
}

struct ComparisonRow {
    std::string series;
    double arma_mse = 0.0;
    double varma_mse = 0.0;
    /// "VARMA", "ARMA" or "none" (equal within 1e-12).
    std::string winner;
};

inline std::string mse_winner(double arma_mse, double varma_mse)
{
    if (std::abs(arma_mse - varma_mse) <= 1e-12) return "none";
    return varma_mse < arma_mse ? "VARMA" : "ARMA";
}

/// One row per series: univariate evaluations (one per series) against the joint one.
inline std::vector<ComparisonRow> compare_mse(const std::vector<std::string>& names,
                                              const std::vector<MseEvaluation>& arma,
                                              const MseEvaluation& varma)
{
    if (arma.size() != names.size() || varma.cumulative_mse.size() != static_cast<Eigen::Index>(names.size()))
        throw UsageError("compare_mse: series count mismatch");
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double a = arma[i].cumulative_mse(0);
        const double v = varma.cumulative_mse(static_cast<Eigen::Index>(i));
        rows.push_back({names[i], a, v, mse_winner(a, v)});
    }
    return rows;
}

inline constexpr std::size_t kSimulationBurnIn = 500;

/// n x p sample path with Gaussian innovations; deterministic in the seed.
inline Eigen::MatrixXd simulate_varma_matrix(const VarmaModel& model, std::size_t n, std::uint64_t seed)
{
    detail::validate(model);
    const auto p = static_cast<Eigen::Index>(model.dim());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.sigma);
    const Eigen::MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(p), prev_e = Eigen::VectorXd::Zero(p), z(p);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), p);
    for (std::size_t t = 0; t < n + kSimulationBurnIn; ++t) {
        for (Eigen::Index i = 0; i < p; ++i) z(i) = normal(rng);
        const Eigen::VectorXd e = root * z;
        y = model.phi * y + e + model.theta * prev_e;
        prev_e = e;
        if (t >= kSimulationBurnIn) out.row(static_cast<Eigen::Index>(t - kSimulationBurnIn)) = (y + model.mean).transpose();
    }
    return out;
}

/// Sample path as a MultiSeries on a synthetic daily grid starting 2000-01-01.
inline MultiSeries simulate_varma(const VarmaModel& model, std::size_t n, std::uint64_t seed)
{
    const auto m = simulate_varma_matrix(model, n, seed);
    std::vector<Date> dates(n);
    const Date start{std::chrono::year{2000} / 1 / 1};
    for (std::size_t t = 0; t < n; ++t) dates[t] = start + std::chrono::days{static_cast<int>(t)};
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols(model.dim());
    for (std::size_t j = 0; j < model.dim(); ++j) {
        names.push_back("X" + std::to_string(j + 1));
        cols[j].resize(n);
        for (std::size_t t = 0; t < n; ++t)
            cols[j][t] = m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    }
    return MultiSeries(std::move(dates), std::move(names), std::move(cols));
}

} // namespace wcoh

#endif // WCOH_VARMA_HPP
