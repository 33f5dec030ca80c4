#include "lifecycle/forecast.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/varx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lifecycle {

double lvc_step(double sd, double r, double k) {
    if (!(k > 0)) throw std::invalid_argument("carrying capacity must be > 0");
    if (sd < 0) throw std::invalid_argument("density must be >= 0");
    double next = sd * (1.0 + r * (1.0 - sd / k));
    return std::clamp(next, 0.0, k);
}

GrowthSeries invert_growth(std::span<const double> sd, double k) {
    constexpr double kFloor = 1e-8;
    GrowthSeries g;
    if (sd.size() < 2) {
        if (!sd.empty()) {
            g.values = {kInitialGrowth};
            g.mask = {1};
        }
        return g;
    }
    const std::size_t n = sd.size() - 1; // r(t) defined for t = 0..n-1
    g.values.assign(n, 0.0);
    g.mask.assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        double bracket = 1.0 - sd[t] / k;
        if (sd[t] >= kFloor && bracket >= kFloor) {
            g.values[t] = (sd[t + 1] / sd[t] - 1.0) / bracket;
            g.mask[t] = 1;
        }
    }
    g.values[0] = kInitialGrowth;
    g.mask[0] = 1;
    return g;
}

double mae(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw std::invalid_argument("mae: length mismatch or empty");
    double s = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        s += std::abs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double median_weekly_sales(const ProductLifecycle& lc) {
    auto v = lc.sales_count.values;
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

namespace {

void finalize(ForecastEvaluation& ev) {
    ev.n_units = ev.predictions.size();
    ev.mae = ev.n_units ? mae(ev.predictions, ev.truths) : 0.0;
}

} // namespace

ForecastEvaluation lvc_sale_backtest(const ProductLifecycle& lc,
                                     const BacktestOptions& opts) {
    ForecastEvaluation ev;
    ev.model_name = "LVC-Sale";
    ev.product_id = lc.product_id;
    if (!opts.skip_sales_filter &&
        median_weekly_sales(lc) < opts.min_median_sales) {
        ev.skipped = true;
        ev.diagnostics.push_back("below median-sales filter");
        return ev;
    }
    const auto& sd = lc.sales_density.values;
    const int len = static_cast<int>(sd.size());
    if (len < opts.window + 2) {
        ev.skipped = true;
        ev.diagnostics.push_back("series shorter than window + 2");
        return ev;
    }

    auto growth = invert_growth(sd);
    const int rn = static_cast<int>(growth.values.size());
    const WeeklySeries* exog[] = {
        &lc.helpfulness_avp,     &lc.sentiment_avp,    &lc.cum_avp_like_rating,
        &lc.helpfulness_nonavp,  &lc.sentiment_nonavp, &lc.cum_nonavp_rating};
    Eigen::MatrixXd x(rn, 6);
    std::vector<std::uint8_t> row_valid(growth.mask.begin(), growth.mask.end());
    for (int t = 0; t < rn; ++t)
        for (int j = 0; j < 6; ++j) {
            const auto& s = *exog[j];
            x(t, j) = t < static_cast<int>(s.size()) ? s.values[t] : 0.0;
        }

    Eigen::Map<const Eigen::VectorXd> r_all(growth.values.data(), rn);
    int first_valid = 0;
    while (first_valid < rn && !row_valid[static_cast<std::size_t>(first_valid)])
        ++first_valid;

    // Target density week w uses a growth model trained on
    // r[w-1-window .. w-2] and predicts r(w-1).
    for (int w = first_valid + opts.window + 1; w < len; ++w) {
        int t0 = w - 1 - opts.window;
        int t1 = w - 1; // exclusive
        Eigen::MatrixXd y_win = r_all.segment(t0, t1 - t0);
        Eigen::MatrixXd x_win = x.middleRows(t0, t1 - t0);
        std::vector<std::uint8_t> valid(row_valid.begin() + t0,
                                        row_valid.begin() + t1);
        double r_hat;
        try {
            auto model = fit_varx(y_win, x_win, opts.lag, opts.exog_lag, &valid);
            r_hat = predict_one(model, y_win, x_win)(0);
        } catch (const InsufficientDataError& e) {
            ev.diagnostics.push_back("week " + std::to_string(w) + ": " +
                                     e.what());
            continue;
        }
        ev.predictions.push_back(lvc_step(sd[static_cast<std::size_t>(w - 1)],
                                          r_hat));
        ev.truths.push_back(sd[static_cast<std::size_t>(w)]);
    }
    finalize(ev);
    return ev;
}

namespace {

std::vector<double> difference(std::span<const double> y, int d,
                               std::vector<double>* level_tails) {
    std::vector<double> z(y.begin(), y.end());
    for (int i = 0; i < d; ++i) {
        if (level_tails) level_tails->push_back(z.back());
        std::vector<double> nz;
        nz.reserve(z.size() - 1);
        for (std::size_t t = 1; t < z.size(); ++t)
            nz.push_back(z[t] - z[t - 1]);
        z = std::move(nz);
    }
    return z;
}

// Plain least squares; minimum norm on rank deficiency.
Eigen::VectorXd solve_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    return a.completeOrthogonalDecomposition().solve(b);
}

// AR(p) with intercept; returns coefficients [c, phi_1..phi_p].
Eigen::VectorXd fit_ar(const std::vector<double>& z, int p) {
    int t_len = static_cast<int>(z.size());
    int rows = t_len - p;
    if (rows < p + 2) throw InsufficientDataError("ar fit: window too short");
    Eigen::MatrixXd a(rows, p + 1);
    Eigen::VectorXd b(rows);
    for (int t = p; t < t_len; ++t) {
        a(t - p, 0) = 1.0;
        for (int i = 1; i <= p; ++i)
            a(t - p, i) = z[static_cast<std::size_t>(t - i)];
        b(t - p) = z[static_cast<std::size_t>(t)];
    }
    return solve_ls(a, b);
}

double ar_forecast(const std::vector<double>& z, const Eigen::VectorXd& coef,
                   int p) {
    double f = coef(0);
    for (int i = 1; i <= p; ++i)
        f += coef(i) * z[z.size() - static_cast<std::size_t>(i)];
    return f;
}

bool ma_invertible(const Eigen::VectorXd& theta) {
    // Roots of 1 + theta_1 z + theta_2 z^2 must lie outside the unit circle.
    if (theta.size() == 1) return std::abs(theta(0)) < 1.0;
    if (theta.size() == 2) {
        double t1 = theta(0), t2 = theta(1);
        return std::abs(t2) < 1.0 && t2 + t1 > -1.0 && t2 - t1 > -1.0;
    }
    return true; // higher orders accepted as-is
}

} // namespace

double arima_forecast_once(std::span<const double> window, int p, int d, int q,
                           std::vector<std::string>* diagnostics) {
    if (static_cast<int>(window.size()) < d + std::max(p, q) + 2)
        throw InsufficientDataError("arima: window too short");
    std::vector<double> tails;
    auto z = difference(window, d, &tails);

    double fz;
    if (p == 0 && q == 0) {
        fz = std::accumulate(z.begin(), z.end(), 0.0) /
             static_cast<double>(z.size());
    } else if (q == 0) {
        fz = ar_forecast(z, fit_ar(z, p), p);
    } else {
        // Hannan-Rissanen: long-AR residuals proxy the innovations, then
        // a joint OLS over AR and MA terms.
        int n = static_cast<int>(z.size());
        int m = std::min(std::max(p, q) + 3, n / 2 - 1);
        bool fell_back = false;
        if (m < 1) fell_back = true;
        std::vector<double> eps(static_cast<std::size_t>(n), 0.0);
        if (!fell_back) {
            try {
                auto long_ar = fit_ar(z, m);
                for (int t = m; t < n; ++t) {
                    double pred = long_ar(0);
                    for (int i = 1; i <= m; ++i)
                        pred += long_ar(i) * z[static_cast<std::size_t>(t - i)];
                    eps[static_cast<std::size_t>(t)] =
                        z[static_cast<std::size_t>(t)] - pred;
                }
            } catch (const InsufficientDataError&) {
                fell_back = true;
            }
        }
        if (!fell_back) {
            int start = m + std::max(p, q);
            int rows = n - start;
            if (rows < p + q + 2) fell_back = true;
            if (!fell_back) {
                Eigen::MatrixXd a(rows, 1 + p + q);
                Eigen::VectorXd b(rows);
                for (int t = start; t < n; ++t) {
                    int r = t - start;
                    a(r, 0) = 1.0;
                    for (int i = 1; i <= p; ++i)
                        a(r, i) = z[static_cast<std::size_t>(t - i)];
                    for (int i = 1; i <= q; ++i)
                        a(r, p + i) = eps[static_cast<std::size_t>(t - i)];
                    b(r) = z[static_cast<std::size_t>(t)];
                }
                Eigen::VectorXd coef = solve_ls(a, b);
                Eigen::VectorXd theta = coef.segment(1 + p, q);
                if (!coef.allFinite() || !ma_invertible(theta)) {
                    fell_back = true;
                } else {
                    fz = coef(0);
                    for (int i = 1; i <= p; ++i)
                        fz += coef(i) * z[static_cast<std::size_t>(n - i)];
                    for (int i = 1; i <= q; ++i)
                        fz += coef(p + i) * eps[static_cast<std::size_t>(n - i)];
                }
            }
        }
        if (fell_back) {
            if (diagnostics)
                diagnostics->push_back("arima: non-invertible fit, AR-only fallback");
            fz = p > 0 ? ar_forecast(z, fit_ar(z, p), p)
                       : std::accumulate(z.begin(), z.end(), 0.0) /
                             static_cast<double>(z.size());
        }
    }

    // Undifference.
    double f = fz;
    for (auto it = tails.rbegin(); it != tails.rend(); ++it) f += *it;
    return f;
}

ForecastEvaluation arima_backtest(std::span<const double> series, int p, int d,
                                  int q, int window) {
    ForecastEvaluation ev;
    ev.model_name = "ARIMA(" + std::to_string(p) + "," + std::to_string(d) +
                    "," + std::to_string(q) + ")";
    const int len = static_cast<int>(series.size());
    if (len < window + 1) {
        ev.skipped = true;
        ev.diagnostics.push_back("series shorter than window + 1");
        return ev;
    }
    for (int w = window; w < len; ++w) {
        try {
            double f = arima_forecast_once(series.subspan(w - window, window),
                                           p, d, q, &ev.diagnostics);
            ev.predictions.push_back(f);
            ev.truths.push_back(series[static_cast<std::size_t>(w)]);
        } catch (const InsufficientDataError& e) {
            ev.diagnostics.push_back("week " + std::to_string(w) + ": " +
                                     e.what());
        }
    }
    finalize(ev);
    return ev;
}

std::vector<double> fit_fourier(std::span<const double> y, int order,
                                double t0) {
    const int n = static_cast<int>(y.size());
    const double omega = 2.0 * M_PI / static_cast<double>(n);
    Eigen::MatrixXd a(n, 1 + 2 * order);
    Eigen::VectorXd b(n);
    for (int t = 0; t < n; ++t) {
        a(t, 0) = 1.0;
        for (int k = 1; k <= order; ++k) {
            a(t, 2 * k - 1) = std::sin(k * omega * (t0 + t));
            a(t, 2 * k) = std::cos(k * omega * (t0 + t));
        }
        b(t) = y[static_cast<std::size_t>(t)];
    }
    Eigen::VectorXd coef = solve_ls(a, b);
    return {coef.data(), coef.data() + coef.size()};
}

double eval_fourier(const std::vector<double>& coef, double t, double period) {
    const double omega = 2.0 * M_PI / period;
    double v = coef[0];
    int order = static_cast<int>((coef.size() - 1) / 2);
    for (int k = 1; k <= order; ++k)
        v += coef[static_cast<std::size_t>(2 * k - 1)] * std::sin(k * omega * t) +
             coef[static_cast<std::size_t>(2 * k)] * std::cos(k * omega * t);
    return v;
}

PowerFit fit_power(std::span<const double> y, double t0) {
    for (double v : y)
        if (!(v > 0))
            throw DegenerateInputError("power fit needs strictly positive data");
    const int n = static_cast<int>(y.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (int t = 0; t < n; ++t) {
        a(t, 0) = 1.0;
        a(t, 1) = std::log(t0 + t);
        b(t) = std::log(y[static_cast<std::size_t>(t)]);
    }
    Eigen::VectorXd coef = solve_ls(a, b);
    return {std::exp(coef(0)), coef(1)};
}

namespace {

double gaussian_sse(std::span<const double> y, double t0, double a, double b,
                    double c) {
    double s = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        double e = (t0 + static_cast<double>(t) - b) / c;
        double r = y[t] - a * std::exp(-e * e);
        s += r * r;
    }
    return s;
}

GaussianFit gauss_newton(std::span<const double> y, double t0, double a,
                         double b, double c) {
    const int n = static_cast<int>(y.size());
    GaussianFit fit{a, b, c, false};
    double sse = gaussian_sse(y, t0, a, b, c);
    for (int it = 0; it < 100; ++it) {
        Eigen::MatrixXd jac(n, 3);
        Eigen::VectorXd resid(n);
        for (int t = 0; t < n; ++t) {
            double u = (t0 + static_cast<double>(t) - fit.b) / fit.c;
            double e = std::exp(-u * u);
            resid(t) = y[static_cast<std::size_t>(t)] - fit.a * e;
            jac(t, 0) = e;
            jac(t, 1) = fit.a * e * 2.0 * u / fit.c;
            jac(t, 2) = fit.a * e * 2.0 * u * u / fit.c;
        }
        Eigen::VectorXd step = solve_ls(jac, resid);
        if (!step.allFinite()) return fit;
        // Backtracking keeps the iteration from overshooting.
        double scale = 1.0;
        double new_sse = sse;
        double na = fit.a, nb = fit.b, nc = fit.c;
        for (int half = 0; half < 12; ++half) {
            na = fit.a + scale * step(0);
            nb = fit.b + scale * step(1);
            nc = fit.c + scale * step(2);
            if (std::abs(nc) > 1e-8) {
                new_sse = gaussian_sse(y, t0, na, nb, nc);
                if (new_sse <= sse) break;
            }
            scale *= 0.5;
        }
        if (new_sse > sse) return fit;
        double change = std::abs(na - fit.a) + std::abs(nb - fit.b) +
                        std::abs(nc - fit.c);
        fit.a = na;
        fit.b = nb;
        fit.c = nc;
        sse = new_sse;
        if (change < 1e-9) {
            fit.converged = true;
            return fit;
        }
    }
    fit.converged = true; // ran the full budget with monotone SSE
    return fit;
}

} // namespace

GaussianFit fit_gaussian(std::span<const double> y, double t0) {
    const int n = static_cast<int>(y.size());
    if (n < 4) throw InsufficientDataError("gaussian fit: window too short");
    auto peak = std::max_element(y.begin(), y.end());
    double a0 = *peak;
    double b0 = t0 + static_cast<double>(std::distance(y.begin(), peak));
    double c0 = static_cast<double>(n) / 4.0;
    auto fit = gauss_newton(y, t0, a0, b0, std::max(c0, 1.0));
    if (fit.converged) return fit;
    // Moment-based retry.
    double total = 0, mean = 0;
    for (int t = 0; t < n; ++t) {
        double w = std::max(y[static_cast<std::size_t>(t)], 0.0);
        total += w;
        mean += w * (t0 + t);
    }
    if (total > 0) {
        mean /= total;
        double var = 0;
        for (int t = 0; t < n; ++t)
            var += std::max(y[static_cast<std::size_t>(t)], 0.0) *
                   (t0 + t - mean) * (t0 + t - mean);
        var /= total;
        fit = gauss_newton(y, t0, a0, mean,
                           std::max(std::sqrt(2.0 * var), 1.0));
    }
    return fit;
}

const char* curve_family_name(CurveFamily family) {
    switch (family) {
        case CurveFamily::fourier: return "Fourier";
        case CurveFamily::power: return "Power";
        case CurveFamily::gaussian: return "Gaussian";
    }
    return "?";
}

ForecastEvaluation curve_fit_backtest(std::span<const double> series,
                                      CurveFamily family, int window) {
    ForecastEvaluation ev;
    ev.model_name = curve_family_name(family);
    const int len = static_cast<int>(series.size());
    if (len < window + 1) {
        ev.skipped = true;
        ev.diagnostics.push_back("series shorter than window + 1");
        return ev;
    }
    for (int w = window; w < len; ++w) {
        auto win = series.subspan(w - window, window);
        // absolute 1-based time, so global curve shapes survive sliding
        double t0 = static_cast<double>(w - window + 1);
        double next = static_cast<double>(w + 1);
        double f;
        try {
            switch (family) {
                case CurveFamily::fourier:
                    f = eval_fourier(fit_fourier(win, 2, t0), next,
                                     static_cast<double>(window));
                    break;
                case CurveFamily::power: {
                    auto fit = fit_power(win, t0);
                    f = fit.a * std::pow(next, fit.b);
                    break;
                }
                case CurveFamily::gaussian: {
                    auto fit = fit_gaussian(win, t0);
                    if (!fit.converged)
                        throw DegenerateInputError("gaussian fit diverged");
                    double u = (next - fit.b) / fit.c;
                    f = fit.a * std::exp(-u * u);
                    break;
                }
            }
        } catch (const std::exception& e) {
            ev.diagnostics.push_back("week " + std::to_string(w) + ": " +
                                     e.what());
            continue;
        }
        ev.predictions.push_back(f);
        ev.truths.push_back(series[static_cast<std::size_t>(w)]);
    }
    finalize(ev);
    return ev;
}

} // namespace lifecycle
