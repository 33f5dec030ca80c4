#include "lifecycle/synth.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace lifecycle {

const char* spam_preset_name(SpamPreset p) {
    switch (p) {
        case SpamPreset::none: return "none";
        case SpamPreset::lead: return "lead";
        case SpamPreset::lead_lagged: return "lead_lagged";
        case SpamPreset::follow: return "follow";
        case SpamPreset::buffered_lagged: return "buffered_lagged";
        case SpamPreset::buffered_tight: return "buffered_tight";
    }
    return "?";
}

namespace {

// Explicit draw primitives keep output stable across standard libraries.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng) {
    double u1 = std::max(uniform01(rng), 1e-300);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int poisson(std::mt19937_64& rng, double mean) {
    if (mean <= 0) return 0;
    double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(rng);
    } while (p > limit);
    return k - 1;
}

int binomial(std::mt19937_64& rng, int n, double p) {
    int s = 0;
    for (int i = 0; i < n; ++i)
        if (uniform01(rng) < p) ++s;
    return s;
}

std::size_t sample_cdf(std::mt19937_64& rng, const std::vector<double>& cdf) {
    double u = uniform01(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(std::distance(cdf.begin(), it), cdf.size() - 1);
}

std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> cdf(w.size());
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += std::max(w[i], 0.0);
        cdf[i] = s;
    }
    if (s <= 0) throw DegenerateInputError("synth: all-zero sampling weights");
    return cdf;
}

std::uint64_t derived_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

int preset_shift(SpamPreset p) {
    switch (p) {
        case SpamPreset::lead: return -8;
        case SpamPreset::lead_lagged: return -12;
        case SpamPreset::follow: return 6;
        case SpamPreset::buffered_lagged: return -4;
        case SpamPreset::buffered_tight: return -1;
        default: return 0;
    }
}

std::vector<double> shift_weights(const std::vector<double>& w, int shift) {
    std::vector<double> out(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        long j = static_cast<long>(i) + shift;
        j = std::clamp<long>(j, 0, static_cast<long>(w.size()) - 1);
        out[static_cast<std::size_t>(j)] += w[i];
    }
    return out;
}

struct ExogSignals {
    std::array<std::vector<double>, 6> x;
};

ExogSignals gen_exog(std::mt19937_64& rng, int horizon) {
    ExogSignals sig;
    for (auto& series : sig.x) {
        double cycles = 2.0 + std::floor(uniform01(rng) * 3.0);
        double phase = uniform01(rng);
        series.resize(static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t)
            series[static_cast<std::size_t>(t)] =
                0.5 + 0.35 * std::sin(2.0 * M_PI *
                                      (cycles * t / horizon + phase));
    }
    return sig;
}

std::vector<double> gen_growth(std::mt19937_64& rng, const ProductSpec& spec,
                               const ExogSignals& sig, int horizon) {
    std::vector<double> r(static_cast<std::size_t>(horizon), 0.0);
    if (spec.growth == GrowthKind::constant) {
        std::fill(r.begin(), r.end(), spec.constant_r);
        return r;
    }
    r[0] = kInitialGrowth;
    for (int t = 1; t < horizon; ++t) {
        double v = spec.r_bias + spec.r_ar * r[static_cast<std::size_t>(t - 1)];
        for (int j = 0; j < 6; ++j)
            v += spec.exog_coef[static_cast<std::size_t>(j)] *
                 (sig.x[static_cast<std::size_t>(j)][static_cast<std::size_t>(t - 1)] - 0.5);
        if (spec.r_noise_sd > 0) v += spec.r_noise_sd * normal(rng);
        r[static_cast<std::size_t>(t)] = std::clamp(v, -0.5, 0.8);
    }
    return r;
}

std::vector<ReviewRecord> sample_reviews(std::mt19937_64& rng,
                                         const ProductSpec& spec,
                                         const std::vector<double>& sd_truth,
                                         int epoch_day,
                                         const std::string& id) {
    const int horizon = static_cast<int>(sd_truth.size());
    long n_avp = std::lround(static_cast<double>(spec.n_reviews) *
                             spec.avp_fraction);
    long n_non = spec.n_reviews - n_avp;

    auto avp_cdf = cumulative(sd_truth);
    auto non_weights = shift_weights(sd_truth, preset_shift(spec.spam));
    std::vector<double> non_cdf;
    if (n_non > 0) non_cdf = cumulative(non_weights);

    std::vector<ReviewRecord> reviews;
    reviews.reserve(static_cast<std::size_t>(spec.n_reviews));
    auto draw = [&](bool verified, const std::vector<double>& cdf) {
        ReviewRecord r;
        r.product_id = id;
        r.verified = verified;
        int week = static_cast<int>(sample_cdf(rng, cdf));
        r.day = epoch_day + week * 7 +
                static_cast<int>(std::floor(uniform01(rng) * 7.0));
        const auto& probs =
            verified ? spec.avp_rating_probs : spec.nonavp_rating_probs;
        double u = uniform01(rng);
        double acc = 0;
        r.rating = 5;
        for (int s = 0; s < 5; ++s) {
            acc += probs[static_cast<std::size_t>(s)];
            if (u < acc) {
                r.rating = s + 1;
                break;
            }
        }
        r.total_votes = poisson(rng, spec.vote_rate);
        r.helpful_votes = binomial(rng, r.total_votes, spec.helpful_prob);
        // Sentiment tracks the star rating.
        double tilt = (r.rating - 1.0) / 4.0;
        r.pos_words = poisson(rng, spec.pos_word_rate * (0.5 + tilt));
        r.neg_words = poisson(rng, spec.neg_word_rate * (1.5 - tilt));
        r.word_count = r.pos_words + r.neg_words + poisson(rng, 20.0);
        return r;
    };
    for (long i = 0; i < n_avp; ++i) reviews.push_back(draw(true, avp_cdf));
    for (long i = 0; i < n_non; ++i) reviews.push_back(draw(false, non_cdf));
    std::stable_sort(reviews.begin(), reviews.end(),
                     [](const ReviewRecord& a, const ReviewRecord& b) {
                         return a.day < b.day;
                     });
    (void)horizon;
    return reviews;
}

void override_signals(ProductLifecycle& lc, const ExogSignals& sig) {
    auto set = [](WeeklySeries& s, const std::vector<double>& v, bool scaled) {
        s.values = v;
        if (scaled)
            for (auto& x : s.values) x = 1.0 + 4.0 * x;
        s.mask.clear();
    };
    set(lc.helpfulness_avp, sig.x[0], false);
    set(lc.sentiment_avp, sig.x[1], false);
    set(lc.cum_avp_like_rating, sig.x[2], true);
    set(lc.helpfulness_nonavp, sig.x[3], false);
    set(lc.sentiment_nonavp, sig.x[4], false);
    set(lc.cum_nonavp_rating, sig.x[5], true);
}

std::vector<double> observe(std::mt19937_64& rng,
                            const std::vector<double>& sd_truth,
                            double noise_sd) {
    std::vector<double> obs = sd_truth;
    if (noise_sd > 0)
        for (auto& v : obs) {
            // a product with no sales yet observes as exactly zero
            if (v == 0.0) continue;
            v = std::clamp(v + noise_sd * normal(rng), 1e-6, 1.0);
        }
    return obs;
}

} // namespace

SynthProduct gen_lifecycle(const MarketScenario& scenario,
                           const ProductSpec& spec, std::uint64_t index) {
    if (scenario.horizon_weeks < 25)
        throw std::invalid_argument("scenario horizon must be >= 25 weeks");
    std::mt19937_64 rng(derived_seed(scenario.seed, index));
    const int horizon = scenario.horizon_weeks;

    auto sig = gen_exog(rng, horizon);
    auto r = gen_growth(rng, spec, sig, horizon);

    SynthProduct out;
    out.truth.r = r;
    out.truth.sd.assign(static_cast<std::size_t>(horizon), 0.0);
    out.truth.sd[0] = spec.sd0;
    for (int t = 0; t + 1 < horizon; ++t)
        out.truth.sd[static_cast<std::size_t>(t + 1)] =
            lvc_step(out.truth.sd[static_cast<std::size_t>(t)],
                     r[static_cast<std::size_t>(t)]);

    auto reviews = sample_reviews(rng, spec, out.truth.sd, scenario.epoch_day,
                                  spec.id);
    out.lifecycle = build_lifecycle(spec.id, std::move(reviews), spec.price,
                                    scenario.epoch_day, horizon);
    out.lifecycle.sales_density.epoch_week = scenario.epoch_day / 7;
    out.lifecycle.sales_density.values =
        observe(rng, out.truth.sd, spec.obs_noise_sd);
    if (spec.growth == GrowthKind::varx_driven)
        override_signals(out.lifecycle, sig);
    return out;
}

SynthPair gen_pair(const MarketScenario& scenario, const PairSpec& spec,
                   std::uint64_t index) {
    std::mt19937_64 rng(derived_seed(scenario.seed ^ 0xC0FFEEULL, index));
    const int horizon = scenario.horizon_weeks;
    const int entry = spec.entry_week;
    if (entry < 1 || entry >= horizon - 5)
        throw std::invalid_argument("pair entry week outside horizon");

    auto sig_l = gen_exog(rng, horizon);
    auto sig_c = gen_exog(rng, horizon);
    auto r_l = gen_growth(rng, spec.leader, sig_l, horizon);
    auto r_c = gen_growth(rng, spec.competitor, sig_c, horizon);

    SynthPair out;
    out.truth.leader.r = r_l;
    out.truth.competitor.r = r_c;
    auto& sd_l = out.truth.leader.sd;
    auto& sd_c = out.truth.competitor.sd;
    sd_l.assign(static_cast<std::size_t>(horizon), 0.0);
    sd_c.assign(static_cast<std::size_t>(horizon), 0.0);
    sd_l[0] = spec.leader.sd0;
    auto& paths = out.truth.coefficients;
    paths.a_ij.assign(static_cast<std::size_t>(horizon), 0.0);
    paths.a_ji.assign(static_cast<std::size_t>(horizon), 0.0);
    for (int t = entry; t < horizon; ++t) {
        paths.a_ij[static_cast<std::size_t>(t)] = spec.a_leader;
        paths.a_ji[static_cast<std::size_t>(t)] = spec.a_competitor;
    }
    for (int t = 0; t + 1 < horizon; ++t) {
        if (t + 1 == entry) sd_c[static_cast<std::size_t>(t + 1)] = spec.competitor.sd0;
        auto [ni, nj] = lvc_comp_step(
            sd_l[static_cast<std::size_t>(t)], sd_c[static_cast<std::size_t>(t)],
            r_l[static_cast<std::size_t>(t)], r_c[static_cast<std::size_t>(t)],
            paths.a_ij[static_cast<std::size_t>(t)],
            paths.a_ji[static_cast<std::size_t>(t)]);
        sd_l[static_cast<std::size_t>(t + 1)] = ni;
        if (t + 1 != entry) sd_c[static_cast<std::size_t>(t + 1)] = nj;
    }

    out.truth.events = detect_events(sd_l, sd_c, entry);
    out.truth.outcome = out.truth.events.outcome;

    auto reviews_l = sample_reviews(rng, spec.leader, sd_l, scenario.epoch_day,
                                    spec.leader.id);
    std::vector<double> comp_weights = sd_c; // zero before entry
    auto reviews_c = sample_reviews(rng, spec.competitor, comp_weights,
                                    scenario.epoch_day, spec.competitor.id);

    out.pair.leader = build_lifecycle(spec.leader.id, std::move(reviews_l),
                                      spec.leader.price, scenario.epoch_day,
                                      horizon);
    out.pair.competitor =
        build_lifecycle(spec.competitor.id, std::move(reviews_c),
                        spec.competitor.price, scenario.epoch_day, horizon);
    out.pair.leader.sales_density.values =
        observe(rng, sd_l, spec.leader.obs_noise_sd);
    out.pair.competitor.sales_density.values =
        observe(rng, sd_c, spec.competitor.obs_noise_sd);
    if (spec.leader.growth == GrowthKind::varx_driven)
        override_signals(out.pair.leader, sig_l);
    if (spec.competitor.growth == GrowthKind::varx_driven)
        override_signals(out.pair.competitor, sig_c);
    out.pair.competitor_entry_week = entry;
    out.pair.events = detect_events(out.pair.leader.sales_density.values,
                                    out.pair.competitor.sales_density.values,
                                    entry);
    double peak_l =
        *std::max_element(out.pair.leader.sales_count.values.begin(),
                          out.pair.leader.sales_count.values.end());
    double peak_c =
        *std::max_element(out.pair.competitor.sales_count.values.begin(),
                          out.pair.competitor.sales_count.values.end());
    out.pair.takeover_volume_pct =
        peak_l > 0 ? takeover_volume(peak_l, peak_c) : 0.0;
    return out;
}

MarketScenario default_scenario(std::uint64_t seed, int n_products,
                                int horizon_weeks) {
    MarketScenario sc;
    sc.seed = seed;
    sc.n_products = n_products;
    sc.horizon_weeks = horizon_weeks;
    sc.product_defaults.sd0 = 0.15;
    sc.product_defaults.obs_noise_sd = 0.00025;
    sc.product_defaults.r_noise_sd = 0.002;
    sc.product_defaults.n_reviews = 2000;
    return sc;
}

namespace {

PairSpec preset_pair(const MarketScenario& sc, int variant, int index) {
    PairSpec p;
    p.leader = sc.product_defaults;
    p.competitor = sc.product_defaults;
    p.leader.id = "L" + std::to_string(index);
    p.competitor.id = "C" + std::to_string(index);
    p.entry_week = 10 + (index % 5);
    switch (variant % 3) {
        case 0: // strong asymmetric takeover, leader dies
            p.a_leader = 0.9;
            p.a_competitor = 0.05;
            p.leader.r_bias = -0.02;
            p.competitor.r_bias = 0.06;
            p.competitor.sd0 = 0.08;
            break;
        case 1: // contested market, leader can rebound
            p.a_leader = 0.4;
            p.a_competitor = 0.3;
            p.leader.r_bias = 0.04;
            p.competitor.r_bias = 0.05;
            p.competitor.sd0 = 0.1;
            break;
        default: // weak coupling
            p.a_leader = 0.15;
            p.a_competitor = 0.15;
            p.competitor.sd0 = 0.05;
            break;
    }
    return p;
}

} // namespace

MarketScenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario file not found: " + path.string());
    MarketScenario sc = default_scenario(1, 10, 60);
    int n_pairs = 0;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{}
                                          : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        auto& d = sc.product_defaults;
        if (key == "seed") sc.seed = std::stoull(val);
        else if (key == "products") sc.n_products = std::stoi(val);
        else if (key == "pairs") n_pairs = std::stoi(val);
        else if (key == "horizon_weeks") sc.horizon_weeks = std::stoi(val);
        else if (key == "obs_noise_sd") d.obs_noise_sd = std::stod(val);
        else if (key == "r_noise_sd") d.r_noise_sd = std::stod(val);
        else if (key == "n_reviews") d.n_reviews = std::stol(val);
        else if (key == "avp_fraction") d.avp_fraction = std::stod(val);
        else if (key == "price") d.price = std::stod(val);
        else if (key == "growth")
            d.growth = val == "constant" ? GrowthKind::constant
                                         : GrowthKind::varx_driven;
        else if (key == "constant_r") d.constant_r = std::stod(val);
        else if (key == "sd0") d.sd0 = std::stod(val);
        else if (key == "spam") {
            if (val == "lead") d.spam = SpamPreset::lead;
            else if (val == "lead_lagged") d.spam = SpamPreset::lead_lagged;
            else if (val == "follow") d.spam = SpamPreset::follow;
            else if (val == "buffered_lagged") d.spam = SpamPreset::buffered_lagged;
            else if (val == "buffered_tight") d.spam = SpamPreset::buffered_tight;
            else d.spam = SpamPreset::none;
        } else
            throw ConfigError("unknown scenario key: " + key);
    }
    for (int i = 0; i < n_pairs; ++i)
        sc.pairs.push_back(preset_pair(sc, i, i));
    return sc;
}

} // namespace lifecycle
