#pragma once

#include "lifecycle/series.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lifecycle {

// Initial growth rate r(0).
inline constexpr double kInitialGrowth = 1e-4;

struct GrowthSeries {
    std::vector<double> values;
    std::vector<std::uint8_t> mask; // 0 where inversion is undefined
};

struct ForecastEvaluation {
    std::string model_name;
    std::string product_id;
    std::vector<double> predictions;
    std::vector<double> truths;
    double mae = 0.0;
    std::size_t n_units = 0;
    bool skipped = false;
    std::vector<std::string> diagnostics;
};

// Logistic sales step: sd * (1 + r * (1 - sd/K)), clamped to [0, K].
double lvc_step(double sd, double r, double k = 1.0);

// Recover r(t) from consecutive densities; r(0) forced to the initial
// epsilon, singular weeks masked.
GrowthSeries invert_growth(std::span<const double> sd, double k = 1.0);

double mae(std::span<const double> pred, std::span<const double> truth);

struct BacktestOptions {
    int window = 20;
    int lag = 1;
    int exog_lag = 1;
    double min_median_sales = 7.0;
    bool skip_sales_filter = false; // synthetic data carries no raw counts
};

// Rolling-window LVC-Sale backtest: per target week, fit a 1-dim VARX on
// the inverted growth rate with the six allied exogenous series, predict
// the next growth rate and advance the density by one logistic step.
ForecastEvaluation lvc_sale_backtest(const ProductLifecycle& lc,
                                     const BacktestOptions& opts = {});

// Same sliding protocol for a bare series with the named model. These
// operate on any series (densities here).
ForecastEvaluation arima_backtest(std::span<const double> series, int p, int d,
                                  int q, int window);

enum class CurveFamily { fourier, power, gaussian };
const char* curve_family_name(CurveFamily family);

ForecastEvaluation curve_fit_backtest(std::span<const double> series,
                                      CurveFamily family, int window);

// Fit primitives, exposed for direct checks.
struct PowerFit {
    double a = 0.0, b = 0.0;
};
PowerFit fit_power(std::span<const double> y,
                   double t0 = 1.0); // y_t = a * t^b, t = t0..t0+n-1

struct GaussianFit {
    double a = 0.0, b = 0.0, c = 1.0;
    bool converged = false;
};
GaussianFit fit_gaussian(std::span<const double> y,
                         double t0 = 1.0); // a*exp(-((t-b)/c)^2)

// Order-2 trigonometric polynomial on the window, period = window size.
// Returns [c0, a1, b1, a2, b2] for c0 + sum a_k sin + b_k cos.
std::vector<double> fit_fourier(std::span<const double> y, int order = 2,
                                double t0 = 1.0);
double eval_fourier(const std::vector<double>& coef, double t, double period);

// Hannan-Rissanen ARMA estimate on a (differenced) window; exposed for
// the backtest and tests. Returns one-step forecast of the next value.
double arima_forecast_once(std::span<const double> window, int p, int d, int q,
                           std::vector<std::string>* diagnostics = nullptr);

// Median of the weekly AVP counts; backtest inclusion filter.
double median_weekly_sales(const ProductLifecycle& lc);

} // namespace lifecycle
