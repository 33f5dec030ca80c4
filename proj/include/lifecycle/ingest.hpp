#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lifecycle {

// One review. Dates are stored as days since 1970-01-01.
struct ReviewRecord {
    std::string product_id;
    int day = 0;
    int rating = 1; // stars, 1..5
    bool verified = false; // AVP vs non-AVP
    int helpful_votes = 0; // HV
    int total_votes = 0;   // TV
    int pos_words = 0;     // CPS
    int neg_words = 0;     // CNS
    int comments = 0;
    int word_count = 0;
};

struct Lexicon {
    std::unordered_set<std::string> positive;
    std::unordered_set<std::string> negative;
};

struct PriceTable {
    std::unordered_map<std::string, double> prices;
};

struct ParseDiagnostic {
    std::size_t line = 0;
    std::string message;
};

struct ReviewSet {
    // Records per product, sorted by day.
    std::map<std::string, std::vector<ReviewRecord>> by_product;
    std::vector<ParseDiagnostic> diagnostics;
    std::size_t lines_read = 0;
    std::size_t accepted = 0;
};

// Split on non-alphanumeric characters and lowercase.
std::vector<std::string> tokenize(std::string_view text);

// Lexicon hit counts (CPS, CNS) with multiplicity.
std::pair<int, int> score_sentiment(const std::vector<std::string>& tokens,
                                    const Lexicon& lex);

// One word per line; ';' starts a comment line. Words appearing in both
// files are dropped from both sets with a warning.
Lexicon load_lexicon(const std::filesystem::path& pos_path,
                     const std::filesystem::path& neg_path,
                     std::vector<std::string>* warnings = nullptr);

// JSON-lines review stream. Malformed lines are reported, not fatal.
// When a record carries `text` and a lexicon is given, sentiment counts
// are filled from the lexicon at ingest time.
ReviewSet parse_reviews(std::istream& in, const Lexicon* lex = nullptr);
ReviewSet parse_reviews_file(const std::filesystem::path& path,
                             const Lexicon* lex = nullptr);

// CSV `product_id,price`, header optional.
PriceTable load_prices(const std::filesystem::path& path);

// ISO-8601 YYYY-MM-DD -> days since epoch. Throws std::invalid_argument.
int parse_date(std::string_view iso);
std::string format_date(int day);

// Serialize one record as a JSON line (round-trips through parse_reviews).
std::string to_json_line(const ReviewRecord& r);

} // namespace lifecycle
