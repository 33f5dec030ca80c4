// Acceptance suite: one test case per release criterion, each printing a
// single pass/fail line so the gate can be read off the test log.

#include <doctest.h>

#include "lifecycle/analytics.hpp"
#include "lifecycle/competition.hpp"
#include "lifecycle/forecast.hpp"
#include "lifecycle/kde.hpp"
#include "lifecycle/ksc.hpp"
#include "lifecycle/series.hpp"
#include "lifecycle/synth.hpp"
#include "lifecycle/varx.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace lifecycle;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

class Criterion {
public:
    Criterion(int number, const char* title)
        : number_(number), title_(title),
          start_(std::chrono::steady_clock::now()) {}

    void expect(bool condition) { ok_ = ok_ && condition; }

    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

    // Prints the one-line verdict and feeds the aggregate into doctest.
    bool finish(double budget_seconds) {
        double elapsed = seconds();
        bool in_budget = elapsed < budget_seconds;
        bool ok = ok_ && in_budget;
        std::printf("criterion %2d %-52s %s (%.2fs)\n", number_, title_,
                    ok ? "pass" : "FAIL", elapsed);
        std::fflush(stdout);
        return ok;
    }

private:
    int number_;
    const char* title_;
    bool ok_ = true;
    std::chrono::steady_clock::time_point start_;
};

double unif(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gauss(std::mt19937_64& rng) {
    double u1 = std::max(unif(rng), 1e-300);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * unif(rng));
}

std::vector<double> bump(std::size_t len, double center, double width) {
    std::vector<double> v(len);
    for (std::size_t i = 0; i < len; ++i) {
        double z = (static_cast<double>(i) - center) / width;
        v[i] = std::exp(-z * z);
    }
    return v;
}

std::vector<double> shifted(const std::vector<double>& x, int q) {
    std::vector<double> out(x.size(), 0.0);
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        int j = i - q;
        if (j >= 0 && j < static_cast<int>(x.size()))
            out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(j)];
    }
    return out;
}

double purity(const std::vector<int>& assign, const std::vector<int>& truth,
              int k) {
    std::map<std::pair<int, int>, int> joint;
    for (std::size_t i = 0; i < assign.size(); ++i)
        joint[{truth[i], assign[i]}]++;
    int agree = 0;
    for (int fam = 0; fam < k; ++fam) {
        int best = 0;
        for (int c = 0; c < k; ++c) best = std::max(best, joint[{fam, c}]);
        agree += best;
    }
    return static_cast<double>(agree) / static_cast<double>(assign.size());
}

long double fact128(int n) {
    __int128 f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return static_cast<long double>(f);
}

// Brute-force two-sided p over all same-margin tables, exact factorials.
double fisher_oracle(int a, int b, int c, int d) {
    int r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d, n = r1 + r2;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 1.0;
    auto prob = [&](int k) {
        return fact128(r1) * fact128(r2) * fact128(c1) * fact128(c2) /
               (fact128(n) * fact128(k) * fact128(r1 - k) * fact128(c1 - k) *
                fact128(r2 - c1 + k));
    };
    long double po = prob(a), p = 0;
    for (int k = std::max(0, c1 - r2); k <= std::min(r1, c1); ++k) {
        long double pk = prob(k);
        if (pk <= po * (1 + 1e-7L)) p += pk;
    }
    return static_cast<double>(std::min(p, 1.0L));
}

// The synthetic competing-pair mix exercised by the ordering and
// labeling criteria: three coupling regimes over five entry weeks.
PairSpec market_pair_spec(const MarketScenario& sc, int i) {
    PairSpec ps;
    ps.leader = sc.product_defaults;
    ps.competitor = sc.product_defaults;
    ps.leader.id = "L" + std::to_string(i);
    ps.competitor.id = "C" + std::to_string(i);
    ps.entry_week = 10 + (i % 5);
    switch (i % 3) {
    case 0:
        ps.a_leader = 0.9;
        ps.a_competitor = 0.05;
        ps.leader.r_bias = -0.02;
        ps.competitor.r_bias = 0.06;
        ps.competitor.sd0 = 0.08;
        break;
    case 1:
        ps.a_leader = 0.4;
        ps.a_competitor = 0.3;
        ps.leader.r_bias = 0.04;
        ps.competitor.r_bias = 0.05;
        ps.competitor.sd0 = 0.1;
        break;
    default:
        ps.a_leader = 0.15;
        ps.a_competitor = 0.15;
        ps.competitor.sd0 = 0.05;
        break;
    }
    return ps;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("criterion 1: logistic fixed points and growth inversion") {
    Criterion crit(1, "logistic fixed points / inversion identity");

    for (double r : {-0.5, -0.1, 0.0, 0.2, 0.7, 1.0}) {
        crit.expect(lvc_step(1.0, r) == 1.0); // saturated: exact fixed point
        crit.expect(lvc_step(0.37, 0.0) == 0.37); // zero growth: exact
        crit.expect(lvc_step(0.0, r) == 0.0);     // extinct: exact
    }

    // 100-week trajectory with a slowly varying growth rate that keeps
    // the inversion bracket well away from the capacity
    std::vector<double> r_true(100), sd(100);
    sd[0] = 0.02;
    for (std::size_t t = 0; t + 1 < sd.size(); ++t) {
        r_true[t] = 0.05 + 0.02 * std::sin(0.3 * static_cast<double>(t));
        sd[t + 1] = lvc_step(sd[t], r_true[t]);
    }
    auto inv = invert_growth(sd);
    crit.expect(inv.values.size() == sd.size() - 1);
    crit.expect(inv.values[0] == kInitialGrowth);
    for (std::size_t t = 1; t < inv.values.size(); ++t) {
        crit.expect(inv.mask[t] != 0);
        crit.expect(std::abs(inv.values[t] - r_true[t]) < 1e-9);
    }
    CHECK(crit.finish(1.0));
}

TEST_CASE("criterion 2: scalar exogenous autoregression recovery") {
    Criterion crit(2, "scalar VARX coefficient recovery, 20 seeds");
    const int t_len = 200;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        Eigen::MatrixXd y(t_len, 1), x(t_len, 1);
        y(0, 0) = 0.1;
        for (int t = 0; t < t_len; ++t) x(t, 0) = unif(rng);
        for (int t = 1; t < t_len; ++t)
            y(t, 0) = 0.2 + 0.5 * y(t - 1, 0) + 0.3 * x(t - 1, 0) +
                      0.01 * gauss(rng);
        auto model = fit_varx(y, x, 1);
        crit.expect(std::abs(model.bias(0) - 0.2) < 0.05);
        crit.expect(std::abs(model.ar[0](0, 0) - 0.5) < 0.05);
        crit.expect(std::abs(model.exog(0, 0) - 0.3) < 0.05);
    }
    CHECK(crit.finish(1.0));
}

TEST_CASE("criterion 3: planted shape families and distance invariances") {
    Criterion crit(3, "shape clustering purity / invariances");

    std::mt19937_64 rng(3);
    const std::size_t len = 40;
    std::vector<std::vector<double>> bases = {
        bump(len, 8, 4), bump(len, 20, 4), bump(len, 32, 4)};
    std::vector<std::vector<double>> profiles;
    std::vector<int> truth;
    for (int fam = 0; fam < 3; ++fam) {
        for (int i = 0; i < 30; ++i) {
            double scale = 0.5 + 1.5 * unif(rng);
            int q = static_cast<int>(rng() % 9) - 4; // within the search range
            auto p = shifted(bases[static_cast<std::size_t>(fam)], q);
            for (auto& v : p) v = scale * v + 0.01 * gauss(rng);
            profiles.push_back(std::move(p));
            truth.push_back(fam);
        }
    }
    auto model = ksc_cluster(profiles, 3, 4, 100, 7);
    crit.expect(purity(model.assignments, truth, 3) >= 0.95);

    // scale and shift invariance of the distance itself
    auto x = bump(len, 18, 3);
    std::vector<double> y(len);
    for (auto& v : y) v = unif(rng);
    double base = ksc_distance(x, y, 6).distance;
    for (double c : {0.02, -3.0, 7.5})
        for (int q = -3; q <= 3; ++q) {
            std::vector<double> cy = shifted(y, q);
            for (auto& v : cy) v *= c;
            // the shifted copy loses edge samples, so compare against the
            // freshly scaled original instead of the raw baseline
            std::vector<double> sy = shifted(y, q);
            crit.expect(std::abs(ksc_distance(x, cy, 6).distance -
                                 ksc_distance(x, sy, 6).distance) < 1e-9);
        }
    crit.expect(std::abs(ksc_distance(x, x, 6).distance) < 1e-9);
    for (int q = -6; q <= 6; ++q)
        crit.expect(ksc_distance(bump(len, 20, 2.5),
                                 shifted(bump(len, 20, 2.5), q), 6)
                        .distance < 1e-9);
    crit.expect(base >= 0.0);
    CHECK(crit.finish(10.0));
}

TEST_CASE("criterion 4: diffusion density estimate quality") {
    Criterion crit(4, "density sums / L1 error / delta diffusion");

    const std::size_t m = 64;
    std::vector<double> truth(m);
    double total = 0;
    for (std::size_t j = 0; j < m; ++j) {
        double z = (static_cast<double>(j) - 30.0) / 6.0;
        truth[j] = std::exp(-0.5 * z * z);
        total += truth[j];
    }
    for (auto& v : truth) v /= total;

    std::mt19937_64 rng(19);
    std::discrete_distribution<std::size_t> draw(truth.begin(), truth.end());
    std::vector<double> hist(m, 0.0);
    for (int i = 0; i < 500; ++i) hist[draw(rng)] += 1.0;

    auto prof = smooth_histogram(hist, 500.0);
    double sum = std::accumulate(prof.values.begin(), prof.values.end(), 0.0);
    crit.expect(std::abs(sum - 1.0) <= 0.01);
    double l1 = 0;
    for (std::size_t j = 0; j < m; ++j)
        l1 += std::abs(prof.values[j] - truth[j]);
    crit.expect(l1 <= 0.10);

    // delta input against the reflected heat-kernel convolution oracle
    const double t = 0.01;
    std::vector<double> delta(m, 0.0);
    delta[20] = 1.0;
    auto dprof = diffuse(delta, t);
    double x0 = (20 + 0.5) / static_cast<double>(m);
    double sd = std::sqrt(t);
    std::vector<double> oracle(m, 0.0);
    double osum = 0;
    for (std::size_t j = 0; j < m; ++j) {
        double x = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        double v = 0;
        for (int img = -8; img <= 8; ++img)
            for (double center : {2.0 * img + x0, 2.0 * img - x0}) {
                double z = (x - center) / sd;
                v += std::exp(-0.5 * z * z);
            }
        oracle[j] = v;
        osum += v;
    }
    double sup = 0;
    for (std::size_t j = 0; j < m; ++j)
        sup = std::max(sup, std::abs(dprof.values[j] - oracle[j] / osum));
    crit.expect(sup < 1e-3);
    CHECK(crit.finish(1.0));
}

TEST_CASE("criterion 5: cross-correlation recovers planted lags") {
    Criterion crit(5, "planted-lag argmax / unit self correlation");

    std::mt19937_64 rng(4);
    std::vector<double> base(120);
    for (auto& v : base) v = static_cast<double>(rng() % 100);
    for (int lag = 1; lag <= 5; ++lag) {
        WeeklySeries x, y;
        x.values = base;
        y.values.assign(base.size(), 0.0);
        for (std::size_t i = 0; i + static_cast<std::size_t>(lag) <
                                base.size();
             ++i)
            y.values[i + static_cast<std::size_t>(lag)] = base[i];
        auto c = ccf(x, y, 8);
        int argmax = 0;
        for (int k = 1; k < static_cast<int>(c.size()); ++k)
            if (c[static_cast<std::size_t>(k)] >
                c[static_cast<std::size_t>(argmax)])
                argmax = k;
        crit.expect(argmax - 8 == lag);
    }

    WeeklySeries s;
    s.values = {1, 3, 2, 5, 4, 6, 2, 8, 5, 9};
    auto self = ccf(s, s, 4);
    crit.expect(std::abs(self[4] - 1.0) < 1e-12);
    CHECK(crit.finish(5.0));
}

TEST_CASE("criterion 6: neutral coupling reduction and path bounds") {
    Criterion crit(6, "neutral reduction bit-exact / path clamp bounds");

    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 1000; ++rep) {
        double si = unif(rng), sj = unif(rng);
        double ri = 2.0 * unif(rng) - 1.0, rj = 2.0 * unif(rng) - 1.0;
        auto [ni, nj] = lvc_comp_step(si, sj, ri, rj, 0.0, 0.0);
        crit.expect(ni == lvc_step(si, ri));
        crit.expect(nj == lvc_step(sj, rj));
    }
    // whole-trajectory version of the same reduction
    double si = 0.03, sj = 0.4, pi = 0.03, pj = 0.4;
    for (int t = 0; t < 200; ++t) {
        double ri = 0.1 * std::sin(0.2 * t) + 0.05;
        double rj = -0.02;
        std::tie(si, sj) = lvc_comp_step(si, sj, ri, rj, 0.0, 0.0);
        pi = lvc_step(pi, ri);
        pj = lvc_step(pj, rj);
        crit.expect(si == pi);
        crit.expect(sj == pj);
    }

    // a million random edge updates never leave the unit interval
    double a = unif(rng);
    bool inside = true;
    for (int step = 0; step < 1000000; ++step) {
        double ce = 2.0 * unif(rng) - 1.0;
        a = update_coefficient(a, ce);
        inside = inside && a >= 0.0 && a <= 1.0;
    }
    crit.expect(inside);
    CHECK(crit.finish(30.0));
}

TEST_CASE("criterion 7: forecast ordering on a synthetic market") {
    Criterion crit(7, "LVC models beat ARIMA on a 50+20 market");

    auto sc = default_scenario(424242, 50, 60);
    double lvc_sum = 0, arima_sum = 0;
    int wins = 0, total = 0;
    for (int i = 0; i < 50; ++i) {
        auto prod = gen_lifecycle(sc, sc.product_defaults,
                                  static_cast<std::uint64_t>(i));
        BacktestOptions opts;
        opts.skip_sales_filter = true;
        auto lvc = lvc_sale_backtest(prod.lifecycle, opts);
        auto ar = arima_backtest(prod.lifecycle.sales_density.values, 2, 1, 1,
                                 20);
        if (lvc.skipped || ar.skipped) continue;
        ++total;
        lvc_sum += lvc.mae;
        arima_sum += ar.mae;
        if (lvc.mae < ar.mae) ++wins;
    }
    crit.expect(total >= 45);
    crit.expect(lvc_sum / total < arima_sum / total);
    crit.expect(wins * 10 >= total * 7);

    // pairs are scored with the generator's coefficient schedules so the
    // comparison isolates the dynamics model from edge estimation
    double comp_sum = 0, arima_pair_sum = 0;
    int pair_wins = 0, pair_total = 0;
    for (int i = 0; i < 20; ++i) {
        auto sp = gen_pair(sc, market_pair_spec(sc, i),
                           static_cast<std::uint64_t>(i));
        CompBacktestOptions opts;
        opts.fixed_coefficients = sp.truth.coefficients;
        auto res = comp_backtest(sp.pair, opts);
        auto arl = arima_backtest(sp.pair.leader.sales_density.values, 2, 1,
                                  1, 20);
        auto arc = arima_backtest(sp.pair.competitor.sales_density.values, 2,
                                  1, 1, 20);
        if (res.skipped || arl.skipped || arc.skipped) continue;
        ++pair_total;
        double comp_mae = 0.5 * (res.leader.mae + res.competitor.mae);
        double arima_mae = 0.5 * (arl.mae + arc.mae);
        comp_sum += comp_mae;
        arima_pair_sum += arima_mae;
        if (comp_mae < arima_mae) ++pair_wins;
    }
    crit.expect(pair_total >= 18);
    crit.expect(comp_sum / pair_total < arima_pair_sum / pair_total);
    crit.expect(pair_wins * 10 >= pair_total * 7);
    CHECK(crit.finish(120.0));
}

TEST_CASE("criterion 8: exact test against brute-force enumeration") {
    Criterion crit(8, "Fisher p-values, all margins through 12");

    for (int a = 0; a <= 12; ++a)
        for (int b = 0; a + b <= 12; ++b)
            for (int c = 0; a + c <= 12; ++c)
                for (int d = 0; b + d <= 12 && c + d <= 12; ++d) {
                    if (a + b + c + d == 0) continue; // rejected as empty
                    double got = fisher_exact(a, b, c, d);
                    double want = fisher_oracle(a, b, c, d);
                    crit.expect(std::abs(got - want) <=
                                1e-10 * std::max(want, 1e-300));
                }
    CHECK(crit.finish(30.0));
}

TEST_CASE("criterion 9: penalized regression baselines and support") {
    Criterion crit(9, "OLS/ridge limits / 3-sparse support, 18 of 20");

    {
        std::mt19937_64 rng(3);
        Eigen::MatrixXd x(40, 5);
        Eigen::VectorXd y(40);
        for (int i = 0; i < 40; ++i) {
            for (int j = 0; j < 5; ++j) x(i, j) = gauss(rng);
            y(i) = 1.2 * x(i, 0) - 0.7 * x(i, 2) + 0.1 * gauss(rng);
        }
        Eigen::VectorXd ols = x.colPivHouseholderQr().solve(y);
        crit.expect((lasso_fit(x, y, 0.0) - ols).cwiseAbs().maxCoeff() <
                    1e-6);

        double lambda = 0.3;
        Eigen::VectorXd ridge =
            (x.transpose() * x / 40.0 +
             lambda * Eigen::MatrixXd::Identity(5, 5))
                .ldlt()
                .solve(x.transpose() * y / 40.0);
        crit.expect((elastic_net_fit(x, y, lambda, 0.0) - ridge)
                        .cwiseAbs()
                        .maxCoeff() < 1e-6);
    }

    int recovered = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed * 1013904223ULL + 7);
        Eigen::MatrixXd x(300, 69);
        Eigen::VectorXd y(300);
        for (int i = 0; i < 300; ++i) {
            for (int j = 0; j < 69; ++j) x(i, j) = gauss(rng);
            y(i) = 1.5 * x(i, 5) - 2.0 * x(i, 23) + 1.0 * x(i, 47) +
                   0.05 * gauss(rng);
        }
        auto cv = kfold_regress(x, y, RegressMethod::lasso, 3, seed);
        auto scaler = fit_standardizer(x);
        Eigen::VectorXd beta =
            lasso_fit(scaler.apply(x), y.array() - y.mean(), cv.lambda);
        // support at the same magnitude threshold the module tests use;
        // planted weights sit near 1-2, lasso noise leakage below 0.01
        bool exact = true;
        for (int j = 0; j < 69; ++j) {
            bool planted = j == 5 || j == 23 || j == 47;
            exact = exact && ((std::abs(beta(j)) > 0.05) == planted);
        }
        if (exact) ++recovered;
    }
    crit.expect(recovered >= 18);
    CHECK(crit.finish(30.0));
}

TEST_CASE("criterion 10: tabulated unit examples") {
    Criterion crit(10, "vote ratio / sentiment / edge / step examples");

    crit.expect(helpfulness(0, 0) == 0.0);
    crit.expect(helpfulness(3, 4) == 0.75);

    crit.expect(sentiment_coefficient(5, 0) == 1.0);
    crit.expect(sentiment_coefficient(0, 5) == 0.0);
    crit.expect(sentiment_coefficient(3, 3) == 0.5);

    crit.expect(competition_edge(0.4, 0.7, 0.3, 0.4, 0.7, 0.3) == 0.0);
    crit.expect(competition_edge(0, 0, 0, 1, 1, 1) == 1.0);
    crit.expect(competition_edge(1, 1, 1, 0, 0, 0) == -1.0);

    crit.expect(update_coefficient(0.5, 0.0) == 0.5);
    crit.expect(update_coefficient(0.99, 1.0) == 1.0); // upper clamp
    crit.expect(update_coefficient(0.5, -1.0) == 0.45);

    auto [si, sj] = lvc_comp_step(0.2, 0.2, 0.1, 0.1, 1.0, 1.0);
    double expected = 0.2 * (1.0 + 0.1 * (1.0 - (0.2 + 1.0 * 0.2)));
    crit.expect(si == expected);
    crit.expect(sj == expected);
    crit.expect(std::abs(si - 0.212) < 1e-15);

    crit.expect(takeover_volume(10.0, 10.0) == 0.0);
    crit.expect(takeover_volume(10.0, 20.0) == 100.0);
    crit.expect(takeover_volume(0.4, 0.5) == 25.0);
    CHECK(crit.finish(1.0));
}

TEST_CASE("criterion 11: event weeks and synthetic outcome labels") {
    Criterion crit(11, "planted crossings exact / labels match truth");

    // constructed crossing at week 12, leader re-peaking at week 30
    std::vector<double> leader = {0.2, 0.4, 0.6,  0.8,  1.0,  0.9, 0.8,
                                  0.7, 0.6, 0.5,  0.45, 0.42, 0.40};
    std::vector<double> comp(13, 0.0);
    comp[8] = 0.05;
    comp[9] = 0.15;
    comp[10] = 0.25;
    comp[11] = 0.35;
    comp[12] = 0.45;
    for (int w = 13; w <= 29; ++w) {
        leader.push_back(0.42 + 0.027 * (w - 12));
        comp.push_back(0.45);
    }
    leader.push_back(0.90);
    comp.push_back(0.45);
    auto ev = detect_events(leader, comp, 8);
    crit.expect(ev.breakeven_week && *ev.breakeven_week == 12);
    crit.expect(ev.takeover_time && *ev.takeover_time == 4);
    crit.expect(ev.recovery_time && *ev.recovery_time == 18);
    crit.expect(ev.outcome == Outcome::survival);

    // generated pairs across all coupling presets and entry weeks:
    // observed labels from the review stream must equal generator truth
    auto sc = default_scenario(424242, 50, 60);
    for (int i = 0; i < 20; ++i) {
        auto sp = gen_pair(sc, market_pair_spec(sc, i),
                           static_cast<std::uint64_t>(i));
        crit.expect(sp.pair.events.outcome == sp.truth.outcome);
    }
    CHECK(crit.finish(60.0));
}

TEST_CASE("criterion 12: end-to-end pipeline determinism") {
    Criterion crit(12, "two identical pipeline runs, identical bytes");

    auto root = fs::temp_directory_path() / "lifecycle_acceptance";
    fs::remove_all(root);
    auto run = [&](const std::string& name) {
        fs::path dir = root / name;
        fs::create_directories(dir);
        std::string cli = LIFECYCLE_CLI_PATH;
        std::string prefix = "cd " + dir.string() + " && " + cli +
                             " --seed 7 --force ";
        std::vector<std::string> steps = {
            "synth --products 12 --pairs 8 --horizon 60 --out market",
            "forecast --input market/reviews.jsonl --prices market/prices.csv"
            " --model lvc --no-sales-filter --out forecast.csv",
            "compete --input market/reviews.jsonl --prices market/prices.csv"
            " --pairs market/pairs.csv --out compete.json",
            "factors --input market/reviews.jsonl --prices market/prices.csv"
            " --pairs market/pairs.csv --out factors.csv",
            "regress --features factors.csv --method lasso --out regress.json",
        };
        for (const auto& step : steps) {
            int rc = std::system((prefix + step + " >/dev/null").c_str());
            crit.expect(rc == 0);
        }
        return dir;
    };
    auto a = run("a");
    auto b = run("b");
    for (const char* rel :
         {"market/reviews.jsonl", "market/prices.csv", "market/pairs.csv",
          "market/truth.json", "forecast.csv", "compete.json", "factors.csv",
          "regress.json"}) {
        crit.expect(fs::exists(a / rel) && fs::exists(b / rel));
        if (fs::exists(a / rel) && fs::exists(b / rel))
            crit.expect(slurp(a / rel) == slurp(b / rel));
    }
    fs::remove_all(root);
    CHECK(crit.finish(300.0));
}
