#pragma once

#include "lifecycle/competition.hpp"
#include "lifecycle/series.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lifecycle {

enum class GrowthKind { constant, varx_driven };

// The five qualitative non-AVP timing presets.
enum class SpamPreset {
    none,
    lead,
    lead_lagged,
    follow,
    buffered_lagged,
    buffered_tight
};
const char* spam_preset_name(SpamPreset p);

struct ProductSpec {
    std::string id;
    double sd0 = 0.05;
    GrowthKind growth = GrowthKind::varx_driven;
    double constant_r = 0.1;
    double r_bias = 0.02;
    double r_ar = 0.3;
    std::array<double, 6> exog_coef{0.375, -0.3, 0.225, -0.225, 0.3, -0.15};
    double r_noise_sd = 0.0;
    double obs_noise_sd = 0.0; // density observation noise
    long n_reviews = 500;
    double avp_fraction = 0.8;
    double price = 20.0;
    std::array<double, 5> avp_rating_probs{0.05, 0.05, 0.1, 0.3, 0.5};
    std::array<double, 5> nonavp_rating_probs{0.1, 0.1, 0.2, 0.3, 0.3};
    double vote_rate = 2.0;       // mean total votes per review
    double helpful_prob = 0.7;    // helpful | voted
    double pos_word_rate = 3.0;   // mean positive lexicon hits
    double neg_word_rate = 1.0;
    SpamPreset spam = SpamPreset::none;
};

struct PairSpec {
    ProductSpec leader;
    ProductSpec competitor;
    int entry_week = 10;
    double a_leader = 0.5;     // suppression of the leader by the competitor
    double a_competitor = 0.5; // and vice versa
};

struct MarketScenario {
    std::uint64_t seed = 1;
    int n_products = 10;
    int horizon_weeks = 60;
    int epoch_day = 16436; // 2015-01-01
    ProductSpec product_defaults;
    std::vector<PairSpec> pairs;
};

struct LifecycleTruth {
    std::vector<double> sd; // noise-free density
    std::vector<double> r;  // generating growth rates
};

struct SynthProduct {
    ProductLifecycle lifecycle;
    LifecycleTruth truth;
};

struct PairTruth {
    LifecycleTruth leader, competitor;
    CoefficientPaths coefficients;
    Outcome outcome = Outcome::undecided;
    CompetitionEvents events;
};

struct SynthPair {
    CompetitionPair pair;
    PairTruth truth;
};

// Deterministic per (scenario.seed, product_index).
SynthProduct gen_lifecycle(const MarketScenario& scenario,
                           const ProductSpec& spec, std::uint64_t index);

SynthPair gen_pair(const MarketScenario& scenario, const PairSpec& spec,
                   std::uint64_t index);

// Declarative `key = value` scenario file (see README for keys).
MarketScenario load_scenario(const std::filesystem::path& path);
MarketScenario default_scenario(std::uint64_t seed, int n_products,
                                int horizon_weeks);

} // namespace lifecycle
