#include "lifecycle/ingest.hpp"
#include "lifecycle/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

namespace lifecycle {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::pair<int, int> score_sentiment(const std::vector<std::string>& tokens,
                                    const Lexicon& lex) {
    int cps = 0, cns = 0;
    for (const auto& t : tokens) {
        if (lex.positive.count(t)) ++cps;
        if (lex.negative.count(t)) ++cns;
    }
    return {cps, cns};
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::unordered_set<std::string> read_word_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("lexicon file not found: " + path.string());
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == ';') continue;
        words.insert(lower(line));
    }
    return words;
}

} // namespace

Lexicon load_lexicon(const std::filesystem::path& pos_path,
                     const std::filesystem::path& neg_path,
                     std::vector<std::string>* warnings) {
    Lexicon lex;
    lex.positive = read_word_file(pos_path);
    lex.negative = read_word_file(neg_path);
    std::vector<std::string> overlap;
    for (const auto& w : lex.positive)
        if (lex.negative.count(w)) overlap.push_back(w);
    for (const auto& w : overlap) {
        lex.positive.erase(w);
        lex.negative.erase(w);
        if (warnings)
            warnings->push_back("word in both lexicons, dropped: " + w);
    }
    return lex;
}

int parse_date(std::string_view iso) {
    int y, m, d;
    char dash1, dash2;
    std::istringstream ss{std::string(iso)};
    if (!(ss >> y >> dash1 >> m >> dash2 >> d) || dash1 != '-' || dash2 != '-')
        throw std::invalid_argument("bad date: " + std::string(iso));
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw std::invalid_argument("bad date: " + std::string(iso));
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::string format_date(int day) {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

namespace {

// Returns nullopt-style failure via exception; caller turns it into a diagnostic.
ReviewRecord record_from_json(const json& j, const Lexicon* lex) {
    ReviewRecord r;
    r.product_id = j.at("product_id").get<std::string>();
    r.day = parse_date(j.at("date").get<std::string>());
    r.rating = j.at("rating").get<int>();
    r.verified = j.at("verified").get<bool>();
    if (j.contains("helpful_votes"))
        r.helpful_votes = j.at("helpful_votes").get<int>();
    if (j.contains("total_votes"))
        r.total_votes = j.at("total_votes").get<int>();
    if (j.contains("comments")) r.comments = j.at("comments").get<int>();
    if (j.contains("text")) {
        auto tokens = tokenize(j.at("text").get<std::string>());
        r.word_count = static_cast<int>(tokens.size());
        if (lex) {
            auto [cps, cns] = score_sentiment(tokens, *lex);
            r.pos_words = cps;
            r.neg_words = cns;
        }
    }
    if (j.contains("pos_words")) r.pos_words = j.at("pos_words").get<int>();
    if (j.contains("neg_words")) r.neg_words = j.at("neg_words").get<int>();
    if (j.contains("word_count")) r.word_count = j.at("word_count").get<int>();

    if (r.rating < 1 || r.rating > 5)
        throw std::invalid_argument("rating outside [1,5]");
    if (r.helpful_votes < 0 || r.total_votes < 0)
        throw std::invalid_argument("negative vote count");
    if (r.helpful_votes > r.total_votes)
        throw std::invalid_argument("helpful_votes > total_votes");
    if (r.pos_words < 0 || r.neg_words < 0)
        throw std::invalid_argument("negative sentiment count");
    return r;
}

} // namespace

ReviewSet parse_reviews(std::istream& in, const Lexicon* lex) {
    ReviewSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        ++set.lines_read;
        try {
            json j = json::parse(line);
            ReviewRecord r = record_from_json(j, lex);
            set.by_product[r.product_id].push_back(std::move(r));
            ++set.accepted;
        } catch (const std::exception& e) {
            set.diagnostics.push_back({lineno, e.what()});
        }
    }
    for (auto& [id, recs] : set.by_product)
        std::stable_sort(recs.begin(), recs.end(),
                         [](const ReviewRecord& a, const ReviewRecord& b) {
                             return a.day < b.day;
                         });
    return set;
}

ReviewSet parse_reviews_file(const std::filesystem::path& path, const Lexicon* lex) {
    std::ifstream in(path);
    if (!in) throw ConfigError("reviews file not found: " + path.string());
    return parse_reviews(in, lex);
}

PriceTable load_prices(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("prices file not found: " + path.string());
    PriceTable table;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::string id = trim(line.substr(0, comma));
        std::string val = trim(line.substr(comma + 1));
        if (id == "product_id") continue; // header
        try {
            double price = std::stod(val);
            if (price < 0)
                throw ConfigError("negative price for " + id);
            table.prices[id] = price;
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad price row: " + line);
        }
    }
    return table;
}

std::string to_json_line(const ReviewRecord& r) {
    json j;
    j["product_id"] = r.product_id;
    j["date"] = format_date(r.day);
    j["rating"] = r.rating;
    j["verified"] = r.verified;
    j["helpful_votes"] = r.helpful_votes;
    j["total_votes"] = r.total_votes;
    j["pos_words"] = r.pos_words;
    j["neg_words"] = r.neg_words;
    if (r.comments) j["comments"] = r.comments;
    if (r.word_count) j["word_count"] = r.word_count;
    return j.dump();
}

} // namespace lifecycle
