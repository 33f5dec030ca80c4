#pragma once

#include "lifecycle/ingest.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lifecycle {

// Uniform weekly grid. epoch_week indexes week 0 on the absolute calendar
// (days-since-epoch / 7 of the anchor day). An empty mask means all valid.
struct WeeklySeries {
    long epoch_week = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;

    std::size_t size() const { return values.size(); }
    bool valid(std::size_t i) const { return mask.empty() || mask[i] != 0; }
};

// The seven derived weekly series of a product, plus the non-AVP
// helpfulness/sentiment analogues used as forecasting exogenous inputs.
struct ProductLifecycle {
    std::string product_id;
    double price = 0.0;
    int anchor_day = 0; // absolute day of week 0

    WeeklySeries sales_count;   // # AVP reviews / week
    WeeklySeries nonavp_count;
    WeeklySeries helpfulness_avp;
    WeeklySeries helpfulness_nonavp;
    WeeklySeries sentiment_avp;
    WeeklySeries sentiment_nonavp;
    WeeklySeries cum_avp_like_rating;
    WeeklySeries cum_nonavp_rating;
    WeeklySeries revenue;
    WeeklySeries sales_density; // filled by the kde stage

    double nonavp_fraction = 0.0;
    std::vector<ReviewRecord> reviews; // sorted by day
};

using ReviewPredicate = std::function<bool(const ReviewRecord&)>;

// value[w] = # selected records in week w, zero-filled gaps.
WeeklySeries bin_weekly(std::span<const ReviewRecord> records,
                        const ReviewPredicate& predicate, int week_span,
                        int anchor_day);

// Vote ratio: 0 when unvoted, HV/TV otherwise.
double helpfulness(int hv, int tv);

// 0.5*((CPS-CNS)/(CPS+CNS)+1); 0.5 when both counts are zero.
double sentiment_coefficient(int cps, int cns);

// Weekly mean of a per-review value over the selected records; empty
// weeks are zero-filled.
WeeklySeries weekly_mean(std::span<const ReviewRecord> records,
                         const ReviewPredicate& predicate,
                         const std::function<double(const ReviewRecord&)>& value,
                         int week_span, int anchor_day);

enum class RatingFilter { avp_like, nonavp_all };

// Running mean of filtered ratings from week 0 through w. Weeks before
// the first qualifying review hold 0 and are masked invalid.
WeeklySeries cumulative_rating(std::span<const ReviewRecord> records,
                               RatingFilter filter, int week_span,
                               int anchor_day);

// Cross-correlation at lags -max_lag..max_lag over the overlap window.
// Result index i holds lag i - max_lag.
std::vector<double> ccf(const WeeklySeries& x, const WeeklySeries& y,
                        int max_lag);

// (x - min)/(max - min). Throws DegenerateInputError on constant input.
WeeklySeries minmax_normalize(const WeeklySeries& x);

// Assemble all allied series on the product's weekly grid. The anchor
// defaults to the first review's day; pass an absolute anchor (and span)
// for calendar-aligned competition pairs.
ProductLifecycle build_lifecycle(const std::string& product_id,
                                 std::vector<ReviewRecord> records,
                                 double price, int anchor_day = -1,
                                 int week_span = -1);

} // namespace lifecycle
