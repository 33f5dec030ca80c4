#pragma once

#include "lifecycle/competition.hpp"
#include "lifecycle/series.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lifecycle {

struct TrustBin {
    int pct = 0; // rounded non-AVP percentage, 0..100
    int count = 0;
    // mean / variance per attribute, min-max normalized across bins
    double burst_mean = 0, burst_var = 0;
    double sales_mean = 0, sales_var = 0;
    double rating_mean = 0, rating_var = 0;
    double deviation_mean = 0, deviation_var = 0;
};

struct TrustProfile {
    std::vector<TrustBin> bins; // empty bins omitted
    std::vector<std::pair<double, double>> revenue_scatter; // (pct, revenue)
    std::array<double, 4> cubic_fit{}; // c0 + c1 x + c2 x^2 + c3 x^3
};

// Per-product spam-signal attributes binned by non-AVP percentage, plus
// the revenue-vs-percentage scatter with its cubic least-squares fit.
TrustProfile trust_profile(const std::vector<ProductLifecycle>& lifecycles);

// Raw per-product attributes, exposed for tests.
struct ProductAttributes {
    double burst = 0;     // mean inter-review gap, days
    double sales = 0;     // total AVP count
    double avg_avp_rating = 0;
    double rating_deviation = 0; // sd over all review ratings
    double nonavp_pct = 0;
    double total_revenue = 0;
};
ProductAttributes product_attributes(const ProductLifecycle& lc);

struct FactorOptions {
    // Row 8/9 sentiment threshold: the bounded-scale midpoint by default,
    // or the literal zero reading.
    bool literal_sentiment_zero = false;
};

// The 9 boolean competition factors.
std::array<bool, 9> factor_vector(const CompetitionPair& pair,
                                  const FactorOptions& opts = {},
                                  std::vector<std::string>* diagnostics = nullptr);

// Two-sided Fisher exact p for a 2x2 table [[a,b],[c,d]].
double fisher_exact(long a, long b, long c, long d);

// The 20 review-window statistics, in table order.
std::array<double, 20> review_features(std::span<const ReviewRecord> window);

// 69-column feature matrix row for one pair: 9 factors + 3 x 20 windows
// (leader pre-entry, competitor first 4 weeks, leader same 4 weeks).
Eigen::VectorXd pair_features(const CompetitionPair& pair,
                              const FactorOptions& opts = {});

// Coordinate-descent lasso on standardized X: 0.5*|y - Xb|^2/n + lambda*|b|_1.
Eigen::VectorXd lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double lambda, int max_sweeps = 100000,
                          double tol = 1e-7);

// Elastic net: penalty lambda * (alpha*|b|_1 + (1-alpha)*|b|_2^2 / 2).
Eigen::VectorXd elastic_net_fit(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, double lambda,
                                double alpha_mix, int max_sweeps = 100000,
                                double tol = 1e-7);

enum class RegressMethod { lasso, elastic_net };

struct CvResult {
    double cv_mae = 0.0;
    double lambda = 0.0;
    double alpha_mix = 1.0;
};

// k-fold CV with inner model selection over a lambda (and alpha) grid.
// Columns are standardized on the training folds. Deterministic per seed.
CvResult kfold_regress(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       RegressMethod method, int k = 3,
                       std::uint64_t seed = 0);

// Standardization helper (mean 0, sd 1 per column; constant columns
// pass through unscaled).
struct Standardizer {
    Eigen::VectorXd mean, scale;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};
Standardizer fit_standardizer(const Eigen::MatrixXd& x);

} // namespace lifecycle
