#pragma once

#include "lifecycle/forecast.hpp"
#include "lifecycle/series.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lifecycle {

inline constexpr double kDefaultDelta = 1.0 / 20.0;
inline constexpr double kDefaultRecoveryTheta = 0.9;

enum class Outcome { death, survival, undecided };
const char* outcome_name(Outcome o);

struct CompetitionEvents {
    std::optional<int> breakeven_week; // index on the aligned grid
    std::optional<int> takeover_time;  // breakeven - entry
    std::optional<int> recovery_time;  // weeks from breakeven
    Outcome outcome = Outcome::undecided;
};

// Leader/competitor lifecycles aligned on the same absolute weekly grid.
struct CompetitionPair {
    ProductLifecycle leader;
    ProductLifecycle competitor;
    int competitor_entry_week = 0; // week index of first competitor review
    CompetitionEvents events;
    double takeover_volume_pct = 0.0;
    std::optional<bool> manual_label_survival; // overrides the rule label
};

// Signed weekly advantage of j over i, all inputs in [0,1].
double competition_edge(double r_i, double h_i, double sc_i, double r_j,
                        double h_j, double sc_j);

// One Euler step of the coefficient path with the three-branch clamp.
double update_coefficient(double a, double ce, double delta = kDefaultDelta);

// Simultaneous two-species logistic step, both right-hand sides at week t.
std::pair<double, double> lvc_comp_step(double sd_i, double sd_j, double r_i,
                                        double r_j, double a_ij, double a_ji,
                                        double k_i = 1.0, double k_j = 1.0);

// Breakeven/takeover/recovery detection on smoothed aligned densities.
CompetitionEvents detect_events(std::span<const double> leader_density,
                                std::span<const double> competitor_density,
                                int entry_week,
                                double theta = kDefaultRecoveryTheta);

// Relative peak volume increase, percent.
double takeover_volume(double peak_first, double peak_second);

// Weekly normalized (rating, helpfulness, sentiment) triples for the CE
// computation: ratings mapped (r-1)/4, gaps carry forward, initial 0.5.
struct EdgeInputs {
    std::vector<double> rating, help, senti;
};
EdgeInputs edge_inputs(const ProductLifecycle& lc, std::size_t weeks);

// Coefficient paths a_ij(t), a_ji(t) from the CE recursion.
struct CoefficientPaths {
    std::vector<double> a_ij, a_ji;
};
CoefficientPaths coefficient_paths(const EdgeInputs& leader,
                                   const EdgeInputs& competitor,
                                   std::size_t weeks,
                                   double delta = kDefaultDelta);

struct CompBacktestOptions {
    int window = 20;
    int lag = 1;
    int exog_lag = 1;
    double delta = kDefaultDelta;
    // Test hook: fixed coefficient paths instead of the CE recursion.
    std::optional<CoefficientPaths> fixed_coefficients;
};

struct CompBacktestResult {
    ForecastEvaluation leader;
    ForecastEvaluation competitor;
    bool skipped = false;
    std::string diagnostic;
};

// Joint 2-dim growth VARX with the 12 exogenous series; densities advance
// through the coupled logistic step. All-zero coefficient paths decouple
// the pair into two single-product backtests (neutralism).
CompBacktestResult comp_backtest(const CompetitionPair& pair,
                                 const CompBacktestOptions& opts = {});

// Align two lifecycles on a common absolute calendar grid and detect
// events from their smoothed densities.
CompetitionPair make_pair(const ProductLifecycle& leader_raw,
                          const ProductLifecycle& competitor_raw,
                          double theta = kDefaultRecoveryTheta);

} // namespace lifecycle
