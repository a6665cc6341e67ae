#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "revlens/csv.hpp"
#include "revlens/preprocess.hpp"

namespace revlens {

constexpr int kDefaultMaxInterval = 90;
constexpr std::int64_t kSecondsPerDay = 86400;

/// Days since 1970-01-01 for a proleptic Gregorian date.
/// Standard civil-calendar arithmetic (era/day-of-era decomposition).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

inline std::string format_date(std::int64_t epoch_days) {
    std::int64_t y;
    unsigned m, d;
    civil_from_days(epoch_days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
    return buf;
}

inline std::string format_datetime(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "T%02lld:%02lld:%02lld", static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60), static_cast<long long>(rem % 60));
    return format_date(days) + buf;
}

namespace detail {

inline bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        char ch = s[pos + i];
        if (ch < '0' || ch > '9') return false;
        v = v * 10 + static_cast<unsigned>(ch - '0');
    }
    out = v;
    return true;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned base[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return base[m - 1];
}

} // namespace detail

/// Parse `YYYY-MM-DD` or `YYYY-MM-DDTHH:MM[:SS]` into epoch seconds.
/// A date-only timestamp means midnight.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    unsigned y4, mo, dy;
    if (s.size() < 10) return std::nullopt;
    if (!detail::parse_uint(s, 0, 4, y4) || s[4] != '-' ||
        !detail::parse_uint(s, 5, 2, mo) || s[7] != '-' ||
        !detail::parse_uint(s, 8, 2, dy)) {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || dy < 1 || dy > detail::days_in_month(y4, mo)) return std::nullopt;

    unsigned hh = 0, mi = 0, ss = 0;
    if (s.size() > 10) {
        if (s[10] != 'T' || s.size() < 16) return std::nullopt;
        if (!detail::parse_uint(s, 11, 2, hh) || s[13] != ':' ||
            !detail::parse_uint(s, 14, 2, mi)) {
            return std::nullopt;
        }
        if (s.size() == 16) {
            // HH:MM only
        } else if (s.size() == 19 && s[16] == ':') {
            if (!detail::parse_uint(s, 17, 2, ss)) return std::nullopt;
        } else {
            return std::nullopt;
        }
        if (hh > 23 || mi > 59 || ss > 59) return std::nullopt;
    }
    return days_from_civil(y4, mo, dy) * kSecondsPerDay + hh * 3600 + mi * 60 + ss;
}

/// Whole days elapsed between purchase and review (floor).
/// Throws when the review precedes the purchase.
inline std::int64_t compute_time_interval(std::int64_t purchase_epoch, std::int64_t review_epoch) {
    if (review_epoch < purchase_epoch) {
        throw std::invalid_argument("review precedes purchase");
    }
    return (review_epoch - purchase_epoch) / kSecondsPerDay;
}

struct ReviewRecord {
    std::string id;
    std::string product;
    std::vector<TaggedToken> tokens;
    std::int64_t purchase_time = 0; // epoch seconds
    std::int64_t review_time = 0;   // epoch seconds
    int interval_days = 0;
};

struct Corpus {
    std::vector<ReviewRecord> records;
    std::optional<std::string> product_filter;
    int max_interval = kDefaultMaxInterval;
};

struct Rejection {
    std::size_t line = 0; // 1-based input line
    std::string reason;
};

struct LoadResult {
    Corpus corpus;
    std::vector<Rejection> rejections;
};

inline std::string rejection_report_csv(const std::vector<Rejection>& rejections) {
    std::string out = "line,reason\n";
    for (const auto& r : rejections) {
        out += std::to_string(r.line);
        out += ',';
        out += csv_escape(r.reason);
        out += '\n';
    }
    return out;
}

/// Load a JSON-lines review file. Invalid lines are rejected per reason and
/// never abort the load. Raw-text records are segmented with the supplied
/// dictionaries; pre-tagged records pass through.
inline LoadResult load_corpus(const std::filesystem::path& path,
                              int max_interval = kDefaultMaxInterval,
                              const Dictionary* base_dict = nullptr,
                              const Dictionary* user_dict = nullptr,
                              const std::optional<std::string>& product_filter = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open corpus: " + path.string());
    }

    LoadResult result;
    result.corpus.max_interval = max_interval;
    result.corpus.product_filter = product_filter;

    std::unordered_set<std::string> seen_ids;
    static const Dictionary kEmptyDict;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto reject = [&](const char* reason) { result.rejections.push_back({line_no, reason}); };

        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            reject("bad_json");
            continue;
        }

        auto str_field = [&](const char* name) -> const std::string* {
            auto it = j.find(name);
            if (it == j.end() || !it->is_string()) return nullptr;
            return it->get_ptr<const std::string*>();
        };

        const auto* id = str_field("id");
        const auto* product = str_field("product");
        const auto* purchase = str_field("purchase_time");
        const auto* review = str_field("review_time");
        bool has_body = j.contains("tokens") || (j.contains("text") && j["text"].is_string());
        if (!id || !product || !purchase || !review || !has_body) {
            reject("missing_field");
            continue;
        }

        auto pt = parse_timestamp(*purchase);
        auto rt = parse_timestamp(*review);
        if (!pt || !rt) {
            reject("bad_timestamp");
            continue;
        }
        if (*rt < *pt) {
            reject("negative_interval");
            continue;
        }
        auto interval = compute_time_interval(*pt, *rt);
        if (interval > max_interval) {
            reject("interval_out_of_range");
            continue;
        }

        ReviewRecord rec;
        rec.id = *id;
        rec.product = *product;
        rec.purchase_time = *pt;
        rec.review_time = *rt;
        rec.interval_days = static_cast<int>(interval);

        if (j.contains("tokens")) {
            const auto& toks = j["tokens"];
            if (!toks.is_array()) {
                reject("bad_tokens");
                continue;
            }
            bool ok = true;
            for (const auto& t : toks) {
                if (!t.is_object() || !t.contains("w") || !t["w"].is_string() ||
                    !t.contains("pos") || !t["pos"].is_string()) {
                    ok = false;
                    break;
                }
                rec.tokens.push_back({t["w"].get<std::string>(), t["pos"].get<std::string>(),
                                      rec.tokens.size()});
            }
            if (!ok) {
                reject("bad_tokens");
                continue;
            }
        } else {
            if ((!base_dict || base_dict->empty()) && (!user_dict || user_dict->empty())) {
                reject("no_dictionary");
                continue;
            }
            rec.tokens = tokenize(j["text"].get<std::string>(),
                                  base_dict ? *base_dict : kEmptyDict,
                                  user_dict ? *user_dict : kEmptyDict);
        }
        if (rec.tokens.empty()) {
            reject("empty_tokens");
            continue;
        }

        if (product_filter && rec.product != *product_filter) {
            reject("product_filtered");
            continue;
        }
        if (!seen_ids.insert(rec.id).second) {
            reject("duplicate_id");
            continue;
        }
        result.corpus.records.push_back(std::move(rec));
    }
    return result;
}

enum class BinAxis { interval_day, interval_week, purchase_date };

/// Week index over the 0..90 day range is 1-based: floor(days/7) + 1.
inline int week_of_interval(int interval_days) {
    return interval_days / 7 + 1;
}

/// Partition record ids by the requested axis. Keys are the interval day,
/// the 1-based week, or the purchase date in epoch days (see format_date).
inline std::map<std::int64_t, std::vector<std::string>> bin_records(const Corpus& corpus,
                                                                    BinAxis axis) {
    std::map<std::int64_t, std::vector<std::string>> bins;
    for (const auto& rec : corpus.records) {
        std::int64_t key = 0;
        switch (axis) {
            case BinAxis::interval_day: key = rec.interval_days; break;
            case BinAxis::interval_week: key = week_of_interval(rec.interval_days); break;
            case BinAxis::purchase_date:
                key = rec.purchase_time >= 0 ? rec.purchase_time / kSecondsPerDay
                                             : (rec.purchase_time - kSecondsPerDay + 1) / kSecondsPerDay;
                break;
        }
        bins[key].push_back(rec.id);
    }
    return bins;
}

} // namespace revlens
