#include "lifecycle/competition.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/kde.hpp"
#include "lifecycle/varx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace lifecycle {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::death: return "death";
        case Outcome::survival: return "survival";
        case Outcome::undecided: return "undecided";
    }
    return "?";
}

double competition_edge(double r_i, double h_i, double sc_i, double r_j,
                        double h_j, double sc_j) {
    return ((r_j - r_i) + (h_j - h_i) + (sc_j - sc_i)) / 3.0;
}

double update_coefficient(double a, double ce, double delta) {
    double next = a + ce * delta;
    if (next < 0.0) return 0.0;
    if (next > 1.0) return 1.0;
    return next;
}

std::pair<double, double> lvc_comp_step(double sd_i, double sd_j, double r_i,
                                        double r_j, double a_ij, double a_ji,
                                        double k_i, double k_j) {
    double ni = sd_i * (1.0 + r_i * (1.0 - (sd_i + a_ij * sd_j) / k_i));
    double nj = sd_j * (1.0 + r_j * (1.0 - (sd_j + a_ji * sd_i) / k_j));
    return {std::clamp(ni, 0.0, k_i), std::clamp(nj, 0.0, k_j)};
}

CompetitionEvents detect_events(std::span<const double> leader_density,
                                std::span<const double> competitor_density,
                                int entry_week, double theta) {
    CompetitionEvents ev;
    const int len = static_cast<int>(
        std::min(leader_density.size(), competitor_density.size()));
    for (int w = std::max(entry_week, 0); w < len; ++w) {
        if (competitor_density[static_cast<std::size_t>(w)] >=
            leader_density[static_cast<std::size_t>(w)]) {
            ev.breakeven_week = w;
            break;
        }
    }
    if (!ev.breakeven_week) return ev; // undecided
    int be = *ev.breakeven_week;
    ev.takeover_time = be - entry_week;
    double pre_peak = 0.0;
    for (int w = 0; w < be; ++w)
        pre_peak = std::max(pre_peak, leader_density[static_cast<std::size_t>(w)]);
    ev.outcome = Outcome::death;
    if (pre_peak > 0.0) {
        for (int w = be; w < len; ++w) {
            if (leader_density[static_cast<std::size_t>(w)] >=
                theta * pre_peak) {
                ev.recovery_time = w - be;
                ev.outcome = Outcome::survival;
                break;
            }
        }
    }
    return ev;
}

double takeover_volume(double peak_first, double peak_second) {
    if (!(peak_first > 0))
        throw DegenerateInputError("takeover_volume: first peak must be > 0");
    return (peak_second / peak_first - 1.0) * 100.0;
}

EdgeInputs edge_inputs(const ProductLifecycle& lc, std::size_t weeks) {
    EdgeInputs in;
    in.rating.assign(weeks, 0.5);
    in.help.assign(weeks, 0.5);
    in.senti.assign(weeks, 0.5);
    std::vector<double> rs(weeks, 0), hs(weeks, 0), ss(weeks, 0);
    std::vector<int> counts(weeks, 0);
    for (const auto& r : lc.reviews) {
        int w = (r.day - lc.anchor_day) / 7;
        if (w < 0 || w >= static_cast<int>(weeks)) continue;
        rs[static_cast<std::size_t>(w)] += (r.rating - 1.0) / 4.0;
        hs[static_cast<std::size_t>(w)] +=
            helpfulness(r.helpful_votes, r.total_votes);
        ss[static_cast<std::size_t>(w)] +=
            sentiment_coefficient(r.pos_words, r.neg_words);
        ++counts[static_cast<std::size_t>(w)];
    }
    double cr = 0.5, ch = 0.5, cs = 0.5; // carried values, initial gap = 0.5
    for (std::size_t w = 0; w < weeks; ++w) {
        if (counts[w] > 0) {
            cr = rs[w] / counts[w];
            ch = hs[w] / counts[w];
            cs = ss[w] / counts[w];
        }
        in.rating[w] = cr;
        in.help[w] = ch;
        in.senti[w] = cs;
    }
    return in;
}

CoefficientPaths coefficient_paths(const EdgeInputs& leader,
                                   const EdgeInputs& competitor,
                                   std::size_t weeks, double delta) {
    CoefficientPaths paths;
    paths.a_ij.assign(weeks, 0.5);
    paths.a_ji.assign(weeks, 0.5);
    for (std::size_t t = 0; t + 1 < weeks; ++t) {
        double ce_ij = competition_edge(leader.rating[t], leader.help[t],
                                        leader.senti[t], competitor.rating[t],
                                        competitor.help[t], competitor.senti[t]);
        paths.a_ij[t + 1] = update_coefficient(paths.a_ij[t], ce_ij, delta);
        paths.a_ji[t + 1] = update_coefficient(paths.a_ji[t], -ce_ij, delta);
    }
    return paths;
}

namespace {

// Growth inversion with the competition bracket.
GrowthSeries invert_comp_growth(std::span<const double> sd_own,
                                std::span<const double> sd_other,
                                std::span<const double> a_path) {
    constexpr double kFloor = 1e-8;
    GrowthSeries g;
    const std::size_t n = sd_own.size() > 0 ? sd_own.size() - 1 : 0;
    g.values.assign(n, 0.0);
    g.mask.assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        double bracket = 1.0 - (sd_own[t] + a_path[t] * sd_other[t]);
        if (sd_own[t] >= kFloor && std::abs(bracket) >= kFloor) {
            g.values[t] = (sd_own[t + 1] / sd_own[t] - 1.0) / bracket;
            g.mask[t] = 1;
        }
    }
    if (!g.values.empty()) {
        g.values[0] = kInitialGrowth;
        g.mask[0] = 1;
    }
    return g;
}

void fill_exog(const ProductLifecycle& lc, Eigen::MatrixXd& x, int col0,
               int rows) {
    const WeeklySeries* series[] = {
        &lc.helpfulness_avp,    &lc.sentiment_avp,    &lc.cum_avp_like_rating,
        &lc.helpfulness_nonavp, &lc.sentiment_nonavp, &lc.cum_nonavp_rating};
    for (int j = 0; j < 6; ++j)
        for (int t = 0; t < rows; ++t)
            x(t, col0 + j) =
                t < static_cast<int>(series[j]->size()) ? series[j]->values[static_cast<std::size_t>(t)] : 0.0;
}

} // namespace

CompBacktestResult comp_backtest(const CompetitionPair& pair,
                                 const CompBacktestOptions& opts) {
    CompBacktestResult result;
    const auto& sdl = pair.leader.sales_density.values;
    const auto& sdc = pair.competitor.sales_density.values;
    const int len = static_cast<int>(std::min(sdl.size(), sdc.size()));
    if (len < opts.window + 2) {
        result.skipped = true;
        result.diagnostic = "overlap shorter than window + 2";
        return result;
    }

    CoefficientPaths paths;
    if (opts.fixed_coefficients) {
        paths = *opts.fixed_coefficients;
        paths.a_ij.resize(static_cast<std::size_t>(len), paths.a_ij.empty() ? 0.0 : paths.a_ij.back());
        paths.a_ji.resize(static_cast<std::size_t>(len), paths.a_ji.empty() ? 0.0 : paths.a_ji.back());
    } else {
        auto li = edge_inputs(pair.leader, static_cast<std::size_t>(len));
        auto ci = edge_inputs(pair.competitor, static_cast<std::size_t>(len));
        paths = coefficient_paths(li, ci, static_cast<std::size_t>(len),
                                  opts.delta);
    }

    bool neutral =
        std::all_of(paths.a_ij.begin(), paths.a_ij.end(),
                    [](double a) { return a == 0.0; }) &&
        std::all_of(paths.a_ji.begin(), paths.a_ji.end(),
                    [](double a) { return a == 0.0; });
    if (neutral) {
        // Zero coupling reduces both equations to the single-product form.
        BacktestOptions single;
        single.window = opts.window;
        single.lag = opts.lag;
        single.exog_lag = opts.exog_lag;
        single.skip_sales_filter = true;
        result.leader = lvc_sale_backtest(pair.leader, single);
        result.competitor = lvc_sale_backtest(pair.competitor, single);
        result.leader.model_name = "LVC-COMP";
        result.competitor.model_name = "LVC-COMP";
        return result;
    }

    auto gl = invert_comp_growth(std::span(sdl).first(static_cast<std::size_t>(len)),
                                 std::span(sdc).first(static_cast<std::size_t>(len)), paths.a_ij);
    auto gc = invert_comp_growth(std::span(sdc).first(static_cast<std::size_t>(len)),
                                 std::span(sdl).first(static_cast<std::size_t>(len)), paths.a_ji);
    const int rn = static_cast<int>(gl.values.size());

    Eigen::MatrixXd y(rn, 2);
    std::vector<std::uint8_t> row_valid(static_cast<std::size_t>(rn), 1);
    for (int t = 0; t < rn; ++t) {
        y(t, 0) = gl.values[static_cast<std::size_t>(t)];
        y(t, 1) = gc.values[static_cast<std::size_t>(t)];
        row_valid[static_cast<std::size_t>(t)] =
            gl.mask[static_cast<std::size_t>(t)] &&
            gc.mask[static_cast<std::size_t>(t)];
    }
    Eigen::MatrixXd x(rn, 12);
    fill_exog(pair.leader, x, 0, rn);
    fill_exog(pair.competitor, x, 6, rn);

    int first_valid = 0;
    while (first_valid < rn && !row_valid[static_cast<std::size_t>(first_valid)])
        ++first_valid;

    result.leader.model_name = "LVC-COMP";
    result.leader.product_id = pair.leader.product_id;
    result.competitor.model_name = "LVC-COMP";
    result.competitor.product_id = pair.competitor.product_id;

    for (int w = first_valid + opts.window + 1; w < len; ++w) {
        int t0 = w - 1 - opts.window;
        int t1 = w - 1;
        Eigen::MatrixXd y_win = y.middleRows(t0, t1 - t0);
        Eigen::MatrixXd x_win = x.middleRows(t0, t1 - t0);
        std::vector<std::uint8_t> valid(row_valid.begin() + t0,
                                        row_valid.begin() + t1);
        Eigen::VectorXd r_hat;
        try {
            auto model = fit_varx(y_win, x_win, opts.lag, opts.exog_lag, &valid);
            r_hat = predict_one(model, y_win, x_win);
        } catch (const InsufficientDataError& e) {
            result.leader.diagnostics.push_back("week " + std::to_string(w) +
                                                ": " + e.what());
            continue;
        }
        auto [pi, pj] = lvc_comp_step(
            sdl[static_cast<std::size_t>(w - 1)],
            sdc[static_cast<std::size_t>(w - 1)], r_hat(0), r_hat(1),
            paths.a_ij[static_cast<std::size_t>(w - 1)],
            paths.a_ji[static_cast<std::size_t>(w - 1)]);
        result.leader.predictions.push_back(pi);
        result.leader.truths.push_back(sdl[static_cast<std::size_t>(w)]);
        result.competitor.predictions.push_back(pj);
        result.competitor.truths.push_back(sdc[static_cast<std::size_t>(w)]);
    }
    auto finish = [](ForecastEvaluation& ev) {
        ev.n_units = ev.predictions.size();
        ev.mae = ev.n_units ? mae(ev.predictions, ev.truths) : 0.0;
    };
    finish(result.leader);
    finish(result.competitor);
    return result;
}

CompetitionPair make_pair(const ProductLifecycle& leader_raw,
                          const ProductLifecycle& competitor_raw,
                          double theta) {
    if (leader_raw.reviews.empty() || competitor_raw.reviews.empty())
        throw InsufficientDataError("make_pair: lifecycle without reviews");
    int anchor = std::min(leader_raw.anchor_day, competitor_raw.anchor_day);
    int last = std::max(leader_raw.reviews.back().day,
                        competitor_raw.reviews.back().day);
    int span = (last - anchor) / 7 + 1;

    CompetitionPair pair;
    pair.leader = build_lifecycle(leader_raw.product_id, leader_raw.reviews,
                                  leader_raw.price, anchor, span);
    pair.competitor =
        build_lifecycle(competitor_raw.product_id, competitor_raw.reviews,
                        competitor_raw.price, anchor, span);
    attach_sales_density(pair.leader);
    attach_sales_density(pair.competitor);
    pair.competitor_entry_week =
        (competitor_raw.reviews.front().day - anchor) / 7;
    pair.events = detect_events(pair.leader.sales_density.values,
                                pair.competitor.sales_density.values,
                                pair.competitor_entry_week, theta);
    double peak_l = pair.leader.sales_count.values.empty()
                        ? 0.0
                        : *std::max_element(pair.leader.sales_count.values.begin(),
                                            pair.leader.sales_count.values.end());
    double peak_c =
        pair.competitor.sales_count.values.empty()
            ? 0.0
            : *std::max_element(pair.competitor.sales_count.values.begin(),
                                pair.competitor.sales_count.values.end());
    pair.takeover_volume_pct =
        peak_l > 0 ? takeover_volume(peak_l, peak_c) : 0.0;
    return pair;
}

} // namespace lifecycle
