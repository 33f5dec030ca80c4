#include "lifecycle/series.hpp"
#include "lifecycle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lifecycle {

namespace {

int week_of(int day, int anchor_day) {
    return (day - anchor_day) / 7; // anchor_day <= day by construction
}

} // namespace

WeeklySeries bin_weekly(std::span<const ReviewRecord> records,
                        const ReviewPredicate& predicate, int week_span,
                        int anchor_day) {
    if (week_span < 1) throw std::invalid_argument("week_span must be >= 1");
    WeeklySeries s;
    s.epoch_week = anchor_day / 7;
    s.values.assign(static_cast<std::size_t>(week_span), 0.0);
    for (const auto& r : records) {
        if (!predicate(r)) continue;
        int w = week_of(r.day, anchor_day);
        if (w >= 0 && w < week_span) s.values[static_cast<std::size_t>(w)] += 1.0;
    }
    return s;
}

double helpfulness(int hv, int tv) {
    if (hv < 0 || tv < 0 || hv > tv)
        throw DegenerateInputError("helpfulness requires 0 <= HV <= TV");
    return tv == 0 ? 0.0 : static_cast<double>(hv) / tv;
}

double sentiment_coefficient(int cps, int cns) {
    if (cps < 0 || cns < 0)
        throw DegenerateInputError("sentiment counts must be non-negative");
    if (cps + cns == 0) return 0.5;
    return 0.5 * (static_cast<double>(cps - cns) / (cps + cns) + 1.0);
}

WeeklySeries weekly_mean(std::span<const ReviewRecord> records,
                         const ReviewPredicate& predicate,
                         const std::function<double(const ReviewRecord&)>& value,
                         int week_span, int anchor_day) {
    WeeklySeries s;
    s.epoch_week = anchor_day / 7;
    s.values.assign(static_cast<std::size_t>(week_span), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(week_span), 0);
    for (const auto& r : records) {
        if (!predicate(r)) continue;
        int w = week_of(r.day, anchor_day);
        if (w < 0 || w >= week_span) continue;
        s.values[static_cast<std::size_t>(w)] += value(r);
        ++counts[static_cast<std::size_t>(w)];
    }
    for (std::size_t w = 0; w < s.values.size(); ++w)
        if (counts[w] > 0) s.values[w] /= counts[w];
    return s;
}

WeeklySeries cumulative_rating(std::span<const ReviewRecord> records,
                               RatingFilter filter, int week_span,
                               int anchor_day) {
    auto selected = [filter](const ReviewRecord& r) {
        if (filter == RatingFilter::avp_like) return r.verified && r.rating >= 4;
        return !r.verified;
    };
    WeeklySeries s;
    s.epoch_week = anchor_day / 7;
    s.values.assign(static_cast<std::size_t>(week_span), 0.0);
    s.mask.assign(static_cast<std::size_t>(week_span), 0);
    std::vector<double> sums(static_cast<std::size_t>(week_span), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(week_span), 0);
    for (const auto& r : records) {
        if (!selected(r)) continue;
        int w = week_of(r.day, anchor_day);
        if (w < 0 || w >= week_span) continue;
        sums[static_cast<std::size_t>(w)] += r.rating;
        ++counts[static_cast<std::size_t>(w)];
    }
    double run_sum = 0.0;
    long run_count = 0;
    for (std::size_t w = 0; w < s.values.size(); ++w) {
        run_sum += sums[w];
        run_count += counts[w];
        if (run_count > 0) {
            s.values[w] = run_sum / static_cast<double>(run_count);
            s.mask[w] = 1;
        }
    }
    return s;
}

std::vector<double> ccf(const WeeklySeries& x, const WeeklySeries& y,
                        int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * max_lag + 1));
    const long ex = x.epoch_week, ey = y.epoch_week;
    for (int k = -max_lag; k <= max_lag; ++k) {
        // Pair x at absolute week a with y at absolute week a + k.
        long a_lo = std::max(ex, ey - k);
        long a_hi = std::min(ex + static_cast<long>(x.size()) - 1,
                             ey + static_cast<long>(y.size()) - 1 - k);
        long n = a_hi - a_lo + 1;
        if (n < 3)
            throw InsufficientDataError("ccf overlap shorter than 3 at lag " +
                                        std::to_string(k));
        double mx = 0, my = 0;
        for (long a = a_lo; a <= a_hi; ++a) {
            mx += x.values[static_cast<std::size_t>(a - ex)];
            my += y.values[static_cast<std::size_t>(a + k - ey)];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        double sxy = 0, sxx = 0, syy = 0;
        for (long a = a_lo; a <= a_hi; ++a) {
            double dx = x.values[static_cast<std::size_t>(a - ex)] - mx;
            double dy = y.values[static_cast<std::size_t>(a + k - ey)] - my;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        if (sxx == 0.0 || syy == 0.0)
            throw DegenerateInputError("constant series on ccf overlap at lag " +
                                       std::to_string(k));
        out.push_back(sxy / (std::sqrt(sxx) * std::sqrt(syy)));
    }
    return out;
}

WeeklySeries minmax_normalize(const WeeklySeries& x) {
    if (x.values.empty()) throw DegenerateInputError("empty series");
    auto [lo_it, hi_it] = std::minmax_element(x.values.begin(), x.values.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi == lo) throw DegenerateInputError("constant series has no range");
    WeeklySeries out = x;
    for (auto& v : out.values) v = (v - lo) / (hi - lo);
    return out;
}

ProductLifecycle build_lifecycle(const std::string& product_id,
                                 std::vector<ReviewRecord> records,
                                 double price, int anchor_day, int week_span) {
    if (records.empty())
        throw InsufficientDataError("no reviews for product " + product_id);
    std::stable_sort(records.begin(), records.end(),
                     [](const ReviewRecord& a, const ReviewRecord& b) {
                         return a.day < b.day;
                     });
    if (anchor_day < 0) anchor_day = records.front().day;
    if (week_span < 0)
        week_span = (records.back().day - anchor_day) / 7 + 1;

    ProductLifecycle lc;
    lc.product_id = product_id;
    lc.price = price;
    lc.anchor_day = anchor_day;

    auto avp = [](const ReviewRecord& r) { return r.verified; };
    auto nonavp = [](const ReviewRecord& r) { return !r.verified; };
    auto help = [](const ReviewRecord& r) {
        return helpfulness(r.helpful_votes, r.total_votes);
    };
    auto senti = [](const ReviewRecord& r) {
        return sentiment_coefficient(r.pos_words, r.neg_words);
    };

    lc.sales_count = bin_weekly(records, avp, week_span, anchor_day);
    lc.nonavp_count = bin_weekly(records, nonavp, week_span, anchor_day);
    lc.helpfulness_avp = weekly_mean(records, avp, help, week_span, anchor_day);
    lc.helpfulness_nonavp = weekly_mean(records, nonavp, help, week_span, anchor_day);
    lc.sentiment_avp = weekly_mean(records, avp, senti, week_span, anchor_day);
    lc.sentiment_nonavp = weekly_mean(records, nonavp, senti, week_span, anchor_day);
    lc.cum_avp_like_rating =
        cumulative_rating(records, RatingFilter::avp_like, week_span, anchor_day);
    lc.cum_nonavp_rating =
        cumulative_rating(records, RatingFilter::nonavp_all, week_span, anchor_day);

    lc.revenue = lc.sales_count;
    for (auto& v : lc.revenue.values) v *= price;

    std::size_t n_nonavp = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), nonavp));
    lc.nonavp_fraction = static_cast<double>(n_nonavp) / records.size();
    lc.reviews = std::move(records);
    return lc;
}

} // namespace lifecycle
