// Command-line front end for the lifecycle library.
//
// Every writer refuses to clobber existing files unless --force is given,
// and all output bytes are deterministic for a fixed seed and option set.

#include "lifecycle/analytics.hpp"
#include "lifecycle/competition.hpp"
#include "lifecycle/errors.hpp"
#include "lifecycle/forecast.hpp"
#include "lifecycle/ingest.hpp"
#include "lifecycle/kde.hpp"
#include "lifecycle/ksc.hpp"
#include "lifecycle/synth.hpp"
#include "lifecycle/varx.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lifecycle;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitInsufficient = 4;
constexpr int kExitDegenerate = 5;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

struct Ctx {
    bool force = false;
    std::uint64_t seed = 1;
    std::string config; // canonical option string, hashed into headers
};

std::string header(const Ctx& ctx) {
    std::ostringstream os;
    os << "lifecycle " << kVersion << " seed=" << ctx.seed << " config="
       << std::hex << fnv1a(ctx.config);
    return os.str();
}

std::ofstream open_out(const fs::path& path, const Ctx& ctx) {
    if (!ctx.force && fs::exists(path))
        throw ConfigError("refusing to overwrite " + path.string() +
                          " (use --force)");
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

json meta(const Ctx& ctx) {
    return json{{"tool", std::string("lifecycle ") + kVersion},
                {"seed", ctx.seed},
                {"config", fnv1a(ctx.config)}};
}

void write_json(const fs::path& path, const Ctx& ctx, json j) {
    j["meta"] = meta(ctx);
    auto out = open_out(path, ctx);
    out << j.dump(2) << "\n";
}

std::vector<ProductLifecycle> load_lifecycles(const fs::path& reviews,
                                              const fs::path& prices_path,
                                              bool with_density) {
    ReviewSet set = parse_reviews_file(reviews);
    PriceTable prices;
    if (!prices_path.empty()) prices = load_prices(prices_path);
    std::vector<ProductLifecycle> out;
    for (auto& [id, records] : set.by_product) {
        double price = 0.0;
        if (auto it = prices.prices.find(id); it != prices.prices.end())
            price = it->second;
        auto lc = build_lifecycle(id, std::move(records), price);
        if (with_density) {
            try {
                attach_sales_density(lc);
            } catch (const InsufficientDataError&) {
                // too few reviews to smooth; leave the density empty
            }
        }
        out.push_back(std::move(lc));
    }
    return out;
}

struct PairRow {
    std::string leader, competitor;
    std::optional<bool> label_survival;
};

std::vector<PairRow> load_pair_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("pair list not found: " + path.string());
    std::vector<PairRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        PairRow row;
        std::string label;
        if (!std::getline(ss, row.leader, ',') ||
            !std::getline(ss, row.competitor, ','))
            throw ConfigError("bad pair line: " + line);
        if (row.leader == "leader_id") continue; // header
        if (std::getline(ss, label, ',')) {
            if (label == "survival") row.label_survival = true;
            else if (label == "death") row.label_survival = false;
            else if (!label.empty() && label != "undecided")
                throw ConfigError("bad pair label: " + label);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const ProductLifecycle& find_lifecycle(
    const std::vector<ProductLifecycle>& lcs, const std::string& id) {
    for (const auto& lc : lcs)
        if (lc.product_id == id) return lc;
    throw ConfigError("unknown product id: " + id);
}

// ---- subcommand bodies ----

void run_ingest(const Ctx& ctx, const fs::path& input, const fs::path& pos,
                const fs::path& neg, const fs::path& out_dir) {
    const Lexicon* lex_ptr = nullptr;
    Lexicon lex;
    std::vector<std::string> warnings;
    if (!pos.empty() || !neg.empty()) {
        lex = load_lexicon(pos, neg, &warnings);
        lex_ptr = &lex;
    }
    ReviewSet set = parse_reviews_file(input, lex_ptr);

    auto out = open_out(out_dir / "reviews.jsonl", ctx);
    for (const auto& [id, records] : set.by_product)
        for (const auto& r : records) out << to_json_line(r) << "\n";

    json diag = json::array();
    for (const auto& d : set.diagnostics)
        diag.push_back({{"line", d.line}, {"message", d.message}});
    write_json(out_dir / "ingest_report.json", ctx,
               {{"lines_read", set.lines_read},
                {"accepted", set.accepted},
                {"products", set.by_product.size()},
                {"lexicon_warnings", warnings},
                {"diagnostics", diag}});
}

void run_series(const Ctx& ctx, const fs::path& input, const fs::path& prices,
                const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, true);
    auto out = open_out(out_path, ctx);
    out << "# " << header(ctx) << "\n";
    out << "product_id,week,sales_count,nonavp_count,helpfulness_avp,"
           "helpfulness_nonavp,sentiment_avp,sentiment_nonavp,"
           "cum_avp_like_rating,cum_nonavp_rating,revenue,sales_density\n";
    for (const auto& lc : lcs) {
        for (std::size_t w = 0; w < lc.sales_count.size(); ++w) {
            out << lc.product_id << ',' << w << ','
                << fmt(lc.sales_count.values[w]) << ','
                << fmt(lc.nonavp_count.values[w]) << ','
                << fmt(lc.helpfulness_avp.values[w]) << ','
                << fmt(lc.helpfulness_nonavp.values[w]) << ','
                << fmt(lc.sentiment_avp.values[w]) << ','
                << fmt(lc.sentiment_nonavp.values[w]) << ','
                << fmt(lc.cum_avp_like_rating.values[w]) << ','
                << fmt(lc.cum_nonavp_rating.values[w]) << ','
                << fmt(lc.revenue.values[w]) << ','
                << (w < lc.sales_density.size()
                        ? fmt(lc.sales_density.values[w])
                        : std::string("nan"))
                << "\n";
        }
    }
}

void run_cluster(const Ctx& ctx, const fs::path& input, const fs::path& prices,
                 int k_outer, int k_inner, const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, true);
    auto report = pattern_report(lcs, k_outer, k_inner,
                                 default_q_range(lcs.empty()
                                                     ? 0
                                                     : lcs[0].sales_count.size()),
                                 ctx.seed);
    json groups = json::array();
    for (const auto& g : report.groups) {
        json fams = json::array();
        for (const auto& f : g.families)
            fams.push_back({{"family", f.family},
                            {"present", f.present},
                            {"dominant_size", f.dominant_size},
                            {"dominant_centroid", f.dominant_centroid},
                            {"note", f.note}});
        groups.push_back({{"size", g.size},
                          {"sales_centroid", g.sales_centroid},
                          {"members", g.member_indices},
                          {"families", fams}});
    }
    json ids = json::array();
    for (const auto& lc : lcs) ids.push_back(lc.product_id);
    write_json(out_path, ctx,
               {{"groups", groups},
                {"assignments", report.assignments},
                {"product_ids", ids}});
}

void run_trust(const Ctx& ctx, const fs::path& input, const fs::path& prices,
               const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, false);
    auto profile = trust_profile(lcs);
    json bins = json::array();
    for (const auto& b : profile.bins)
        bins.push_back({{"pct", b.pct},
                        {"count", b.count},
                        {"burst_mean", b.burst_mean},
                        {"burst_var", b.burst_var},
                        {"sales_mean", b.sales_mean},
                        {"sales_var", b.sales_var},
                        {"rating_mean", b.rating_mean},
                        {"rating_var", b.rating_var},
                        {"deviation_mean", b.deviation_mean},
                        {"deviation_var", b.deviation_var}});
    json scatter = json::array();
    for (auto [pct, rev] : profile.revenue_scatter)
        scatter.push_back({pct, rev});
    write_json(out_path, ctx,
               {{"bins", bins},
                {"revenue_scatter", scatter},
                {"cubic_fit", profile.cubic_fit}});
}

void run_ccf(const Ctx& ctx, const fs::path& input, const fs::path& prices,
             const std::string& a, const std::string& b,
             const std::string& series_name, int max_lag,
             const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, series_name == "sales_density");
    auto pick = [&](const ProductLifecycle& lc) -> const WeeklySeries& {
        if (series_name == "sales_count") return lc.sales_count;
        if (series_name == "nonavp_count") return lc.nonavp_count;
        if (series_name == "sales_density") return lc.sales_density;
        if (series_name == "revenue") return lc.revenue;
        throw ConfigError("unknown series: " + series_name);
    };
    const auto& la = find_lifecycle(lcs, a);
    const auto& lb = find_lifecycle(lcs, b);
    auto values = ccf(pick(la), pick(lb), max_lag);
    auto out = open_out(out_path, ctx);
    out << "# " << header(ctx) << "\n";
    out << "lag,ccf\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << (static_cast<int>(i) - max_lag) << ',' << fmt(values[i])
            << "\n";
}

void run_forecast(const Ctx& ctx, const fs::path& input,
                  const fs::path& prices, const std::string& model, int window,
                  int lag, int exog_lag, double min_median,
                  bool no_sales_filter, const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, true);
    auto out = open_out(out_path, ctx);
    out << "# " << header(ctx) << "\n";
    out << "product_id,model,n_units,mae,skipped,diagnostics\n";
    for (const auto& lc : lcs) {
        ForecastEvaluation ev;
        try {
            if (model == "lvc") {
                BacktestOptions opts;
                opts.window = window;
                opts.lag = lag;
                opts.exog_lag = exog_lag;
                opts.min_median_sales = min_median;
                opts.skip_sales_filter = no_sales_filter;
                ev = lvc_sale_backtest(lc, opts);
            } else if (model == "arima") {
                ev = arima_backtest(lc.sales_density.values, 2, 1, 1, window);
            } else if (model == "fourier" || model == "power" ||
                       model == "gaussian") {
                CurveFamily fam = model == "fourier" ? CurveFamily::fourier
                                  : model == "power" ? CurveFamily::power
                                                     : CurveFamily::gaussian;
                ev = curve_fit_backtest(lc.sales_density.values, fam, window);
            } else {
                throw ConfigError("unknown model: " + model);
            }
        } catch (const InsufficientDataError& e) {
            ev.skipped = true;
            ev.diagnostics.push_back(e.what());
            ev.model_name = model;
        }
        ev.product_id = lc.product_id;
        std::string diag;
        for (const auto& d : ev.diagnostics) {
            if (!diag.empty()) diag += "; ";
            diag += d;
        }
        out << ev.product_id << ',' << (ev.model_name.empty() ? model
                                                              : ev.model_name)
            << ',' << ev.n_units << ',' << fmt(ev.mae) << ','
            << (ev.skipped ? 1 : 0) << ",\"" << diag << "\"\n";
    }
}

void run_compete(const Ctx& ctx, const fs::path& input, const fs::path& prices,
                 const fs::path& pairs_path, int window, double delta,
                 double theta, const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, false);
    auto rows = load_pair_list(pairs_path);
    json results = json::array();
    for (const auto& row : rows) {
        auto pair = make_pair(find_lifecycle(lcs, row.leader),
                              find_lifecycle(lcs, row.competitor), theta);
        pair.manual_label_survival = row.label_survival;
        CompBacktestOptions opts;
        opts.window = window;
        opts.delta = delta;
        auto bt = comp_backtest(pair, opts);
        json j = {{"leader", row.leader},
                  {"competitor", row.competitor},
                  {"entry_week", pair.competitor_entry_week},
                  {"outcome", outcome_name(pair.events.outcome)},
                  {"takeover_volume_pct", pair.takeover_volume_pct},
                  {"backtest_skipped", bt.skipped},
                  {"leader_mae", bt.leader.mae},
                  {"competitor_mae", bt.competitor.mae},
                  {"leader_units", bt.leader.n_units},
                  {"competitor_units", bt.competitor.n_units}};
        if (pair.events.breakeven_week)
            j["breakeven_week"] = *pair.events.breakeven_week;
        if (pair.events.takeover_time)
            j["takeover_time"] = *pair.events.takeover_time;
        if (pair.events.recovery_time)
            j["recovery_time"] = *pair.events.recovery_time;
        if (row.label_survival)
            j["manual_label"] = *row.label_survival ? "survival" : "death";
        if (!bt.diagnostic.empty()) j["diagnostic"] = bt.diagnostic;
        results.push_back(std::move(j));
    }
    write_json(out_path, ctx, {{"pairs", results}});
}

void run_factors(const Ctx& ctx, const fs::path& input, const fs::path& prices,
                 const fs::path& pairs_path, bool literal_zero,
                 const fs::path& out_path) {
    auto lcs = load_lifecycles(input, prices, false);
    auto rows = load_pair_list(pairs_path);
    FactorOptions opts;
    opts.literal_sentiment_zero = literal_zero;
    auto out = open_out(out_path, ctx);
    out << "# " << header(ctx) << "\n";
    out << "leader_id,competitor_id,label";
    for (int i = 1; i <= 9; ++i) out << ",factor_" << i;
    for (int i = 1; i <= 60; ++i) out << ",feature_" << i;
    out << "\n";
    for (const auto& row : rows) {
        auto pair = make_pair(find_lifecycle(lcs, row.leader),
                              find_lifecycle(lcs, row.competitor));
        pair.manual_label_survival = row.label_survival;
        Eigen::VectorXd feat = pair_features(pair, opts);
        out << row.leader << ',' << row.competitor << ',';
        if (row.label_survival)
            out << (*row.label_survival ? "survival" : "death");
        else
            out << outcome_name(pair.events.outcome);
        for (int i = 0; i < feat.size(); ++i) out << ',' << fmt(feat[i]);
        out << "\n";
    }
}

void run_regress(const Ctx& ctx, const fs::path& features_path,
                 const std::string& method_name, int k,
                 const fs::path& out_path) {
    // Consumes the factors CSV: label column becomes the response.
    std::ifstream in(features_path);
    if (!in) throw ConfigError("feature file not found: " +
                               features_path.string());
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("leader_id", 0) == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ','); // leader
        std::getline(ss, cell, ','); // competitor
        std::getline(ss, cell, ','); // label
        double y;
        if (cell == "survival") y = 1.0;
        else if (cell == "death") y = 0.0;
        else y = 0.5;
        std::vector<double> feat;
        while (std::getline(ss, cell, ',')) feat.push_back(std::stod(cell));
        if (feat.size() != 69)
            throw ConfigError("expected 69 feature columns, got " +
                              std::to_string(feat.size()));
        rows.push_back(std::move(feat));
        targets.push_back(y);
    }
    if (rows.size() < static_cast<std::size_t>(2 * k))
        throw InsufficientDataError("need at least 2k rows for k-fold CV");
    Eigen::MatrixXd x(rows.size(), 69);
    Eigen::VectorXd y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 69; ++j) x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        y(static_cast<Eigen::Index>(i)) = targets[i];
    }
    RegressMethod method;
    if (method_name == "lasso") method = RegressMethod::lasso;
    else if (method_name == "elastic_net") method = RegressMethod::elastic_net;
    else throw ConfigError("unknown method: " + method_name);
    auto cv = kfold_regress(x, y, method, k, ctx.seed);

    auto scaler = fit_standardizer(x);
    Eigen::MatrixXd xs = scaler.apply(x);
    Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::VectorXd beta =
        method == RegressMethod::lasso
            ? lasso_fit(xs, yc, cv.lambda)
            : elastic_net_fit(xs, yc, cv.lambda, cv.alpha_mix);
    std::vector<int> support;
    for (int j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) support.push_back(j);
    write_json(out_path, ctx,
               {{"method", method_name},
                {"rows", rows.size()},
                {"cv_mae", cv.cv_mae},
                {"lambda", cv.lambda},
                {"alpha_mix", cv.alpha_mix},
                {"nonzero", support.size()},
                {"support", support},
                {"coefficients", std::vector<double>(
                                     beta.data(), beta.data() + beta.size())}});
}

void run_synth(const Ctx& ctx, const fs::path& scenario_path, int products,
               int pairs, int horizon, const fs::path& out_dir) {
    MarketScenario sc;
    if (!scenario_path.empty()) {
        sc = load_scenario(scenario_path);
        sc.seed = ctx.seed;
    } else {
        sc = default_scenario(ctx.seed, products, horizon);
        for (int i = 0; i < pairs; ++i) {
            PairSpec p;
            p.leader = sc.product_defaults;
            p.competitor = sc.product_defaults;
            p.leader.id = "L" + std::to_string(i);
            p.competitor.id = "C" + std::to_string(i);
            p.entry_week = 10 + (i % 5);
            if (i % 2 == 0) {
                p.a_leader = 0.9;
                p.a_competitor = 0.05;
                p.leader.r_bias = -0.02;
                p.competitor.r_bias = 0.06;
                p.competitor.sd0 = 0.08;
            } else {
                p.a_leader = 0.4;
                p.a_competitor = 0.3;
                p.leader.r_bias = 0.04;
                p.competitor.r_bias = 0.05;
                p.competitor.sd0 = 0.1;
            }
            sc.pairs.push_back(std::move(p));
        }
    }

    auto reviews_out = open_out(out_dir / "reviews.jsonl", ctx);
    auto prices_out = open_out(out_dir / "prices.csv", ctx);
    auto pairs_out = open_out(out_dir / "pairs.csv", ctx);
    prices_out << "product_id,price\n";
    pairs_out << "leader_id,competitor_id,label\n";

    json truth = json::object();
    auto dump_reviews = [&](const ProductLifecycle& lc) {
        for (const auto& r : lc.reviews) reviews_out << to_json_line(r) << "\n";
        prices_out << lc.product_id << ',' << fmt(lc.price) << "\n";
    };
    for (int i = 0; i < sc.n_products; ++i) {
        ProductSpec spec = sc.product_defaults;
        spec.id = "P" + std::to_string(i);
        auto prod = gen_lifecycle(sc, spec, static_cast<std::uint64_t>(i));
        dump_reviews(prod.lifecycle);
        truth[spec.id] = {{"sd", prod.truth.sd}, {"r", prod.truth.r}};
    }
    json pair_truth = json::array();
    for (std::size_t i = 0; i < sc.pairs.size(); ++i) {
        auto sp = gen_pair(sc, sc.pairs[i], i);
        dump_reviews(sp.pair.leader);
        dump_reviews(sp.pair.competitor);
        pairs_out << sp.pair.leader.product_id << ','
                  << sp.pair.competitor.product_id << ','
                  << outcome_name(sp.truth.outcome) << "\n";
        pair_truth.push_back(
            {{"leader", sp.pair.leader.product_id},
             {"competitor", sp.pair.competitor.product_id},
             {"entry_week", sp.pair.competitor_entry_week},
             {"outcome", outcome_name(sp.truth.outcome)},
             {"leader_sd", sp.truth.leader.sd},
             {"competitor_sd", sp.truth.competitor.sd}});
    }
    write_json(out_dir / "truth.json", ctx,
               {{"products", truth}, {"pairs", pair_truth}});
}

} // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("LIFECYCLE_THREADS"))
        Eigen::setNbThreads(std::max(1, std::atoi(t)));

    CLI::App app{"Product lifecycle analytics"};
    app.set_version_flag("--version", std::string("lifecycle ") + kVersion);
    app.require_subcommand(1);

    Ctx ctx;
    app.add_flag("--force", ctx.force, "overwrite existing outputs");
    app.add_option("--seed", ctx.seed, "random seed")->capture_default_str();

    std::string input, prices, out = "out";
    std::string pos_lex, neg_lex, pairs_file, model = "lvc",
                method = "lasso", prod_a, prod_b, series_name = "sales_count",
                scenario;
    int k_outer = 3, k_inner = 3, window = 20, lag = 1, exog_lag = 1,
        max_lag = 10, kfold = 3, n_products = 10, n_pairs = 4, horizon = 60;
    double min_median = 7.0, delta = kDefaultDelta,
           theta = kDefaultRecoveryTheta;
    bool no_sales_filter = false, literal_zero = false;

    auto add_io = [&](CLI::App* cmd, bool need_prices = true) {
        cmd->add_option("--input", input, "review JSON-lines file")
            ->required();
        if (need_prices) cmd->add_option("--prices", prices, "price CSV");
        cmd->add_option("--out", out, "output path")->required();
    };

    auto* c_ingest = app.add_subcommand("ingest", "validate and normalize reviews");
    c_ingest->add_option("--input", input)->required();
    c_ingest->add_option("--lexicon-pos", pos_lex, "positive word list");
    c_ingest->add_option("--lexicon-neg", neg_lex, "negative word list");
    c_ingest->add_option("--out", out, "output directory")->required();

    auto* c_series = app.add_subcommand("series", "weekly series per product");
    add_io(c_series);

    auto* c_cluster = app.add_subcommand("cluster", "shape clustering report");
    add_io(c_cluster);
    c_cluster->add_option("--k", k_outer, "outer cluster count")
        ->capture_default_str();
    c_cluster->add_option("--k-inner", k_inner, "inner cluster count")
        ->capture_default_str();

    auto* c_trust = app.add_subcommand("trust", "spam-signal trust profile");
    add_io(c_trust);

    auto* c_ccf = app.add_subcommand("ccf", "cross-correlation of two products");
    add_io(c_ccf);
    c_ccf->add_option("--a", prod_a, "first product id")->required();
    c_ccf->add_option("--b", prod_b, "second product id")->required();
    c_ccf->add_option("--series", series_name, "series name")
        ->capture_default_str();
    c_ccf->add_option("--max-lag", max_lag)->capture_default_str();

    auto* c_forecast = app.add_subcommand("forecast", "rolling backtests");
    add_io(c_forecast);
    c_forecast->add_option("--model", model,
                           "lvc|arima|fourier|power|gaussian")
        ->capture_default_str();
    c_forecast->add_option("--window", window)->capture_default_str();
    c_forecast->add_option("--lag", lag)->capture_default_str();
    c_forecast->add_option("--exog-lag", exog_lag)->capture_default_str();
    c_forecast->add_option("--min-median-sales", min_median)
        ->capture_default_str();
    c_forecast->add_flag("--no-sales-filter", no_sales_filter,
                         "disable the median sales inclusion filter");

    auto* c_compete = app.add_subcommand("compete", "pair events and backtests");
    add_io(c_compete);
    c_compete->add_option("--pairs", pairs_file, "pair list CSV")->required();
    c_compete->add_option("--window", window)->capture_default_str();
    c_compete->add_option("--delta", delta)->capture_default_str();
    c_compete->add_option("--theta", theta)->capture_default_str();

    auto* c_factors = app.add_subcommand("factors", "pair feature matrix");
    add_io(c_factors);
    c_factors->add_option("--pairs", pairs_file, "pair list CSV")->required();
    c_factors->add_flag("--literal-sentiment-zero", literal_zero,
                        "use the literal zero sentiment threshold");

    auto* c_regress = app.add_subcommand("regress", "cross-validated sparse fit");
    c_regress->add_option("--features", input, "factors CSV")->required();
    c_regress->add_option("--method", method, "lasso|elastic_net")
        ->capture_default_str();
    c_regress->add_option("--k", kfold, "folds")->capture_default_str();
    c_regress->add_option("--out", out, "output path")->required();

    auto* c_synth = app.add_subcommand("synth", "generate a synthetic market");
    c_synth->add_option("--scenario", scenario, "scenario file");
    c_synth->add_option("--products", n_products)->capture_default_str();
    c_synth->add_option("--pairs", n_pairs)->capture_default_str();
    c_synth->add_option("--horizon", horizon)->capture_default_str();
    c_synth->add_option("--out", out, "output directory")->required();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    for (int i = 1; i < argc; ++i) {
        ctx.config += argv[i];
        ctx.config += '\x1f';
    }

    try {
        if (c_ingest->parsed())
            run_ingest(ctx, input, pos_lex, neg_lex, out);
        else if (c_series->parsed())
            run_series(ctx, input, prices, out);
        else if (c_cluster->parsed())
            run_cluster(ctx, input, prices, k_outer, k_inner, out);
        else if (c_trust->parsed())
            run_trust(ctx, input, prices, out);
        else if (c_ccf->parsed())
            run_ccf(ctx, input, prices, prod_a, prod_b, series_name, max_lag,
                    out);
        else if (c_forecast->parsed())
            run_forecast(ctx, input, prices, model, window, lag, exog_lag,
                         min_median, no_sales_filter, out);
        else if (c_compete->parsed())
            run_compete(ctx, input, prices, pairs_file, window, delta, theta,
                        out);
        else if (c_factors->parsed())
            run_factors(ctx, input, prices, pairs_file, literal_zero, out);
        else if (c_regress->parsed())
            run_regress(ctx, input, method, kfold, out);
        else if (c_synth->parsed())
            run_synth(ctx, scenario, n_products, n_pairs, horizon, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InsufficientDataError& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitInsufficient;
    } catch (const DegenerateInputError& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
