#include "lifecycle/analytics.hpp"
#include "lifecycle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace lifecycle {

namespace {

double population_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                  static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
}

double mean_or_zero(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

} // namespace

ProductAttributes product_attributes(const ProductLifecycle& lc) {
    ProductAttributes at;
    at.nonavp_pct = lc.nonavp_fraction * 100.0;
    std::vector<double> all_ratings, avp_ratings, gaps;
    for (std::size_t i = 0; i < lc.reviews.size(); ++i) {
        const auto& r = lc.reviews[i];
        all_ratings.push_back(r.rating);
        if (r.verified) {
            at.sales += 1.0;
            avp_ratings.push_back(r.rating);
        }
        if (i > 0)
            gaps.push_back(static_cast<double>(r.day - lc.reviews[i - 1].day));
    }
    at.burst = mean_or_zero(gaps);
    at.avg_avp_rating = mean_or_zero(avp_ratings);
    at.rating_deviation = population_sd(all_ratings);
    at.total_revenue = std::accumulate(lc.revenue.values.begin(),
                                       lc.revenue.values.end(), 0.0);
    return at;
}

TrustProfile trust_profile(const std::vector<ProductLifecycle>& lifecycles) {
    if (lifecycles.empty())
        throw InsufficientDataError("trust_profile: no lifecycles");
    std::vector<ProductAttributes> attrs;
    attrs.reserve(lifecycles.size());
    for (const auto& lc : lifecycles) attrs.push_back(product_attributes(lc));

    // Burst is min-max normalized across products before binning.
    double blo = attrs[0].burst, bhi = attrs[0].burst;
    for (const auto& a : attrs) {
        blo = std::min(blo, a.burst);
        bhi = std::max(bhi, a.burst);
    }
    auto norm_burst = [&](double b) {
        return bhi > blo ? (b - blo) / (bhi - blo) : 0.0;
    };

    struct Acc {
        std::vector<double> burst, sales, rating, dev;
    };
    std::map<int, Acc> by_bin;
    TrustProfile profile;
    for (const auto& a : attrs) {
        int pct = static_cast<int>(std::lround(a.nonavp_pct));
        auto& acc = by_bin[pct];
        acc.burst.push_back(norm_burst(a.burst));
        acc.sales.push_back(a.sales);
        acc.rating.push_back(a.avg_avp_rating);
        acc.dev.push_back(a.rating_deviation);
        profile.revenue_scatter.emplace_back(a.nonavp_pct, a.total_revenue);
    }

    auto var_of = [](const std::vector<double>& v) {
        double sd = population_sd(v);
        return sd * sd;
    };
    for (const auto& [pct, acc] : by_bin) {
        TrustBin bin;
        bin.pct = pct;
        bin.count = static_cast<int>(acc.burst.size());
        bin.burst_mean = mean_or_zero(acc.burst);
        bin.burst_var = var_of(acc.burst);
        bin.sales_mean = mean_or_zero(acc.sales);
        bin.sales_var = var_of(acc.sales);
        bin.rating_mean = mean_or_zero(acc.rating);
        bin.rating_var = var_of(acc.rating);
        bin.deviation_mean = mean_or_zero(acc.dev);
        bin.deviation_var = var_of(acc.dev);
        profile.bins.push_back(bin);
    }

    // Min-max normalize each statistic across bins.
    auto normalize = [&](double TrustBin::* field) {
        double lo = profile.bins[0].*field, hi = lo;
        for (const auto& b : profile.bins) {
            lo = std::min(lo, b.*field);
            hi = std::max(hi, b.*field);
        }
        for (auto& b : profile.bins)
            b.*field = hi > lo ? (b.*field - lo) / (hi - lo) : 0.0;
    };
    for (auto f : {&TrustBin::burst_mean, &TrustBin::burst_var,
                   &TrustBin::sales_mean, &TrustBin::sales_var,
                   &TrustBin::rating_mean, &TrustBin::rating_var,
                   &TrustBin::deviation_mean, &TrustBin::deviation_var})
        normalize(f);

    // Cubic least squares on the revenue scatter.
    const auto& sc = profile.revenue_scatter;
    Eigen::MatrixXd a(sc.size(), 4);
    Eigen::VectorXd b(sc.size());
    for (std::size_t i = 0; i < sc.size(); ++i) {
        double x = sc[i].first;
        a(static_cast<long>(i), 0) = 1.0;
        a(static_cast<long>(i), 1) = x;
        a(static_cast<long>(i), 2) = x * x;
        a(static_cast<long>(i), 3) = x * x * x;
        b(static_cast<long>(i)) = sc[i].second;
    }
    Eigen::VectorXd coef = a.completeOrthogonalDecomposition().solve(b);
    for (int i = 0; i < 4; ++i)
        profile.cubic_fit[static_cast<std::size_t>(i)] = coef(i);
    return profile;
}

double fisher_exact(long a, long b, long c, long d) {
    if (a < 0 || b < 0 || c < 0 || d < 0)
        throw std::invalid_argument("fisher_exact: negative count");
    long n = a + b + c + d;
    if (n < 1) throw std::invalid_argument("fisher_exact: empty table");
    long r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 1.0;

    auto log_choose = [](long nn, long kk) {
        return std::lgamma(static_cast<double>(nn + 1)) -
               std::lgamma(static_cast<double>(kk + 1)) -
               std::lgamma(static_cast<double>(nn - kk + 1));
    };
    auto log_prob = [&](long k) {
        return log_choose(r1, k) + log_choose(r2, c1 - k) - log_choose(n, c1);
    };
    long k_lo = std::max(0L, c1 - r2);
    long k_hi = std::min(r1, c1);
    double lp_obs = log_prob(a);
    double p = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
        double lp = log_prob(k);
        if (lp <= lp_obs + 1e-7) p += std::exp(lp);
    }
    return std::min(p, 1.0);
}

std::array<double, 20> review_features(std::span<const ReviewRecord> window) {
    std::vector<double> pos, neg, help, words;
    std::vector<double> avp_like, avp_dislike, non_like, non_dislike;
    double comments = 0;
    for (const auto& r : window) {
        pos.push_back(r.pos_words);
        neg.push_back(r.neg_words);
        help.push_back(helpfulness(r.helpful_votes, r.total_votes));
        words.push_back(r.word_count);
        comments += r.comments;
        bool like = r.rating >= 4;
        if (r.verified)
            (like ? avp_like : avp_dislike).push_back(r.rating);
        else
            (like ? non_like : non_dislike).push_back(r.rating);
    }
    return {
        mean_or_zero(pos),
        mean_or_zero(neg),
        population_sd(pos),
        population_sd(neg),
        mean_or_zero(avp_like),
        mean_or_zero(avp_dislike),
        mean_or_zero(non_like),
        mean_or_zero(non_dislike),
        population_sd(avp_like),
        population_sd(avp_dislike),
        population_sd(non_like),
        population_sd(non_dislike),
        static_cast<double>(avp_like.size()),
        static_cast<double>(avp_dislike.size()),
        static_cast<double>(non_like.size()),
        static_cast<double>(non_dislike.size()),
        comments,
        mean_or_zero(help),
        population_sd(help),
        mean_or_zero(words),
    };
}

namespace {

std::vector<ReviewRecord> reviews_in_days(const ProductLifecycle& lc,
                                          int day_lo, int day_hi) {
    std::vector<ReviewRecord> out;
    for (const auto& r : lc.reviews)
        if (r.day >= day_lo && r.day < day_hi) out.push_back(r);
    return out;
}

double avg_rating(std::span<const ReviewRecord> rs, bool verified,
                  bool like_only = false) {
    std::vector<double> v;
    for (const auto& r : rs)
        if (r.verified == verified && (!like_only || r.rating >= 4))
            v.push_back(r.rating);
    return mean_or_zero(v);
}

double window_sentiment(std::span<const ReviewRecord> rs) {
    long cps = 0, cns = 0;
    for (const auto& r : rs) {
        cps += r.pos_words;
        cns += r.neg_words;
    }
    return sentiment_coefficient(static_cast<int>(cps), static_cast<int>(cns));
}

} // namespace

std::array<bool, 9> factor_vector(const CompetitionPair& pair,
                                  const FactorOptions& opts,
                                  std::vector<std::string>* diagnostics) {
    const auto& lead = pair.leader;
    const auto& comp = pair.competitor;
    const int anchor = lead.anchor_day;
    const int entry_day = anchor + pair.competitor_entry_week * 7;
    const int month_end = entry_day + 4 * 7;
    const int horizon = std::numeric_limits<int>::max();

    std::array<bool, 9> f{};

    // 1: higher AVP like rating of leader despite fewer reviews, over the
    // full overlap window.
    auto lead_overlap = reviews_in_days(lead, entry_day, horizon);
    auto comp_overlap = reviews_in_days(comp, entry_day, horizon);
    f[0] = avg_rating(lead_overlap, true, true) >
               avg_rating(comp_overlap, true, true) &&
           lead_overlap.size() < comp_overlap.size();

    // 2: leader has more than 50 reviews before the competitor arrives.
    f[1] = reviews_in_days(lead, 0, entry_day).size() > 50;

    // 3: product introductions more than 2 years apart.
    int gap_days = std::abs(lead.reviews.front().day - comp.reviews.front().day);
    f[2] = gap_days > 730;

    // 4: price difference greater than 50% of the higher price.
    if (lead.price > 0 && comp.price > 0) {
        double hi = std::max(lead.price, comp.price);
        f[3] = std::abs(lead.price - comp.price) / hi > 0.5;
    } else {
        f[3] = false;
        if (diagnostics)
            diagnostics->push_back("factor 4: missing price, marked false");
    }

    // 5-7: differences over the first four weeks after entry.
    auto lead_month = reviews_in_days(lead, entry_day, month_end);
    auto comp_month = reviews_in_days(comp, entry_day, month_end);
    auto avp_per_week = [](std::span<const ReviewRecord> rs) {
        double c = 0;
        for (const auto& r : rs)
            if (r.verified) c += 1.0;
        return c / 4.0;
    };
    f[4] = std::abs(avp_per_week(lead_month) - avp_per_week(comp_month)) > 1.0;
    f[5] = std::abs(avg_rating(lead_month, true) - avg_rating(comp_month, true)) >
           1.0;
    f[6] = std::abs(avg_rating(lead_month, false) -
                    avg_rating(comp_month, false)) > 1.0;

    // 8-9: sentiment above neutral (or literal zero) in the leader's
    // pre-entry reviews and the competitor's first month.
    double threshold = opts.literal_sentiment_zero ? 0.0 : 0.5;
    f[7] = window_sentiment(reviews_in_days(lead, 0, entry_day)) > threshold;
    f[8] = window_sentiment(comp_month) > threshold;
    return f;
}

Eigen::VectorXd pair_features(const CompetitionPair& pair,
                              const FactorOptions& opts) {
    const int anchor = pair.leader.anchor_day;
    const int entry_day = anchor + pair.competitor_entry_week * 7;
    const int month_end = entry_day + 4 * 7;

    auto factors = factor_vector(pair, opts);
    auto w1 = review_features(reviews_in_days(pair.leader, 0, entry_day));
    auto w2 = review_features(
        reviews_in_days(pair.competitor, entry_day, month_end));
    auto w3 =
        review_features(reviews_in_days(pair.leader, entry_day, month_end));

    Eigen::VectorXd v(69);
    int i = 0;
    for (bool b : factors) v(i++) = b ? 1.0 : 0.0;
    for (double x : w1) v(i++) = x;
    for (double x : w2) v(i++) = x;
    for (double x : w3) v(i++) = x;
    return v;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& x) {
    Standardizer s;
    s.mean = x.colwise().mean();
    s.scale.resize(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        double sd = std::sqrt(
            (x.col(j).array() - s.mean(j)).square().sum() /
            static_cast<double>(x.rows()));
        s.scale(j) = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out = x;
    for (int j = 0; j < x.cols(); ++j)
        out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
    return out;
}

Eigen::VectorXd elastic_net_fit(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, double lambda,
                                double alpha_mix, int max_sweeps, double tol) {
    if (lambda < 0 || alpha_mix < 0 || alpha_mix > 1)
        throw std::invalid_argument("elastic_net_fit: bad penalty");
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = y;
    Eigen::VectorXd col_sq(p);
    for (int j = 0; j < p; ++j)
        col_sq(j) = x.col(j).squaredNorm() / static_cast<double>(n);
    const double l1 = lambda * alpha_mix;
    const double l2 = lambda * (1.0 - alpha_mix);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (int j = 0; j < p; ++j) {
            if (col_sq(j) <= 0.0) continue;
            double rho = x.col(j).dot(resid) / static_cast<double>(n) +
                         col_sq(j) * beta(j);
            double bj;
            if (rho > l1)
                bj = (rho - l1) / (col_sq(j) + l2);
            else if (rho < -l1)
                bj = (rho + l1) / (col_sq(j) + l2);
            else
                bj = 0.0;
            double delta = bj - beta(j);
            if (delta != 0.0) {
                resid -= delta * x.col(j);
                beta(j) = bj;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < tol) break;
    }
    return beta;
}

Eigen::VectorXd lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double lambda, int max_sweeps, double tol) {
    return elastic_net_fit(x, y, lambda, 1.0, max_sweeps, tol);
}

namespace {

struct Fold {
    std::vector<int> train, test;
};

std::vector<Fold> make_folds(int n, int k, std::uint64_t seed) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Fold> folds(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
        int f = i % k;
        for (int g = 0; g < k; ++g) {
            if (g == f)
                folds[static_cast<std::size_t>(g)].test.push_back(idx[static_cast<std::size_t>(i)]);
            else
                folds[static_cast<std::size_t>(g)].train.push_back(idx[static_cast<std::size_t>(i)]);
        }
    }
    return folds;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& rows) {
    Eigen::MatrixXd out(rows.size(), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<long>(i)) = x.row(rows[i]);
    return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<int>& rows) {
    Eigen::VectorXd out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out(static_cast<long>(i)) = v(rows[i]);
    return out;
}

struct GridPoint {
    double lambda, alpha;
};

// Mean absolute held-out error for one penalty over given folds.
double cv_mae_for(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<Fold>& folds, double lambda,
                  double alpha) {
    double total = 0;
    int count = 0;
    for (const auto& fold : folds) {
        auto xtr = take_rows(x, fold.train);
        auto ytr = take(y, fold.train);
        auto scaler = fit_standardizer(xtr);
        double ymean = ytr.mean();
        Eigen::VectorXd beta = elastic_net_fit(scaler.apply(xtr),
                                               ytr.array() - ymean, lambda,
                                               alpha);
        auto xte = scaler.apply(take_rows(x, fold.test));
        auto yte = take(y, fold.test);
        Eigen::VectorXd pred = (xte * beta).array() + ymean;
        total += (pred - yte).array().abs().sum();
        count += static_cast<int>(fold.test.size());
    }
    return total / count;
}

} // namespace

CvResult kfold_regress(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       RegressMethod method, int k, std::uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    if (n < k) throw InsufficientDataError("kfold_regress: fewer rows than folds");

    auto outer = make_folds(n, k, seed);

    std::vector<double> alphas = method == RegressMethod::lasso
                                     ? std::vector<double>{1.0}
                                     : std::vector<double>{0.1, 0.3, 0.5,
                                                           0.7, 0.9};

    auto select = [&](const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                      std::uint64_t fold_seed) {
        auto scaler = fit_standardizer(xs);
        auto xn = scaler.apply(xs);
        Eigen::VectorXd yc = ys.array() - ys.mean();
        double lmax = (xn.transpose() * yc).array().abs().maxCoeff() /
                      static_cast<double>(xs.rows());
        std::vector<double> lambdas;
        for (int i = 0; i < 15; ++i)
            lambdas.push_back(lmax * std::pow(10.0, -4.0 * i / 14.0));
        auto inner = make_folds(static_cast<int>(xs.rows()), k, fold_seed);
        // Pick the sparsest penalty within one standard error of the best
        // held-out error (classic one-SE rule).
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::pair<GridPoint, double>> scores;
        for (double a : alphas)
            for (double l : lambdas) {
                double m = cv_mae_for(xs, ys, inner, l, a);
                scores.push_back({{l, a}, m});
                best = std::min(best, m);
            }
        double se = best / std::sqrt(static_cast<double>(xs.rows()));
        GridPoint chosen{lambdas.front(), alphas.front()};
        double chosen_lambda = -1;
        for (const auto& [gp, m] : scores)
            if (m <= best + se && gp.lambda > chosen_lambda) {
                chosen = gp;
                chosen_lambda = gp.lambda;
            }
        return chosen;
    };

    double total_mae = 0;
    for (std::size_t f = 0; f < outer.size(); ++f) {
        const auto& fold = outer[f];
        auto xtr = take_rows(x, fold.train);
        auto ytr = take(y, fold.train);
        auto gp = select(xtr, ytr, seed + 1 + f);
        auto scaler = fit_standardizer(xtr);
        double ymean = ytr.mean();
        Eigen::VectorXd beta = elastic_net_fit(scaler.apply(xtr),
                                               ytr.array() - ymean, gp.lambda,
                                               gp.alpha);
        auto xte = scaler.apply(take_rows(x, fold.test));
        auto yte = take(y, fold.test);
        Eigen::VectorXd pred = (xte * beta).array() + ymean;
        total_mae += (pred - yte).array().abs().mean();
    }

    CvResult result;
    result.cv_mae = total_mae / static_cast<double>(outer.size());
    auto gp = select(x, y, seed + 101);
    result.lambda = gp.lambda;
    result.alpha_mix = gp.alpha;
    return result;
}

} // namespace lifecycle
