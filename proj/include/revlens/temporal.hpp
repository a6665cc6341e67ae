#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "revlens/aspects.hpp"
#include "revlens/corpus.hpp"
#include "revlens/csv.hpp"

namespace revlens {

constexpr int kDefaultAttentionT = 90;

/// Distinct-review mention tallies, the raw material of every attention
/// metric: a review mentioning an attribute any number of times counts once
/// for that attribute at the review's interval.
struct MentionTable {
    std::unordered_map<std::string, std::map<int, int>> by_attribute; // attr -> ti -> reviews
    std::map<int, int> total_by_ti;       // ti -> review count over all attributes
    std::map<int, std::set<int>> aspects_by_ti; // ti -> aspect ids mentioned
    int max_ti = 0;                       // largest interval observed in the corpus
};

inline MentionTable build_mention_table(const Corpus& corpus, const AspectModel& model) {
    MentionTable table;
    auto patterns = detail::member_patterns(model);
    for (const auto& rec : corpus.records) {
        table.max_ti = std::max(table.max_ti, rec.interval_days);
        auto mentions = map_mentions(rec.tokens, patterns);
        std::unordered_set<std::string> seen;
        for (const auto& m : mentions) {
            if (!seen.insert(m.attribute).second) continue;
            table.by_attribute[m.attribute][rec.interval_days] += 1;
            table.total_by_ti[rec.interval_days] += 1;
            table.aspects_by_ti[rec.interval_days].insert(m.aspect_id);
        }
    }
    return table;
}

/// Per-interval attention series of one aspect: counts[ti] is the member
/// mention-review count averaged over the k members; total is the raw grand
/// sum over intervals and members.
struct IntervalSeries {
    int aspect_id = 0;
    int k = 1;
    std::map<int, double> counts; // every ti in [0, max_ti], zeros included
    double total = 0;
};

inline const Aspect& find_aspect(const AspectModel& model, int aspect_id) {
    for (const auto& cluster : model.clusters) {
        if (cluster.id == aspect_id) return cluster;
    }
    throw std::invalid_argument("unknown aspect id " + std::to_string(aspect_id));
}

inline IntervalSeries mention_counts(const MentionTable& table, const AspectModel& model,
                                     int aspect_id) {
    const Aspect& aspect = find_aspect(model, aspect_id);
    IntervalSeries series;
    series.aspect_id = aspect_id;
    series.k = static_cast<int>(aspect.members.size());
    for (int ti = 0; ti <= table.max_ti; ++ti) series.counts[ti] = 0;
    for (const auto& member : aspect.members) {
        auto it = table.by_attribute.find(member);
        if (it == table.by_attribute.end()) continue;
        for (const auto& [ti, n] : it->second) {
            series.counts[ti] += n;
            series.total += n;
        }
    }
    for (auto& [ti, n] : series.counts) n /= series.k;
    return series;
}

inline double attention_share(const IntervalSeries& series, int ti) {
    if (series.total <= 0) {
        throw std::runtime_error("empty series for aspect " + std::to_string(series.aspect_id));
    }
    auto it = series.counts.find(ti);
    if (it == series.counts.end()) return 0;
    return it->second / series.total;
}

inline std::optional<double> attention_y1(const IntervalSeries& series, int ti) {
    double share = attention_share(series, ti);
    if (share <= 0) return std::nullopt;
    return std::log10(share);
}

/// Fraction of the aspect universe mentioned at the interval.
inline double aspect_count_ratio(const MentionTable& table, int ti, int universe) {
    if (universe <= 0) {
        throw std::invalid_argument("aspect universe must be positive");
    }
    auto it = table.aspects_by_ti.find(ti);
    int mentioned = it == table.aspects_by_ti.end() ? 0 : static_cast<int>(it->second.size());
    return static_cast<double>(mentioned) / universe;
}

/// Average attention: mean over intervals of the aspect's share of that
/// interval's total mention-review count, divided by T (fixed at 90 even
/// though ti spans 91 values; the off-by-one divisor is intentional).
/// Intervals with an empty denominator contribute nothing.
inline double average_attention(const MentionTable& table, const AspectModel& model,
                                int aspect_id, int T = kDefaultAttentionT) {
    const Aspect& aspect = find_aspect(model, aspect_id);
    double k = static_cast<double>(aspect.members.size());
    std::map<int, double> numer; // ti -> mean member count
    for (const auto& member : aspect.members) {
        auto it = table.by_attribute.find(member);
        if (it == table.by_attribute.end()) continue;
        for (const auto& [ti, n] : it->second) numer[ti] += n;
    }
    double sum = 0;
    for (const auto& [ti, n] : numer) {
        auto denom = table.total_by_ti.find(ti);
        if (denom == table.total_by_ti.end() || denom->second <= 0) continue;
        sum += (n / k) / denom->second;
    }
    return sum / T;
}

struct AttentionSummary {
    int aspect_id = 0;
    std::string label;
    double y2 = 0;
    int rank = 0;
};

inline std::vector<AttentionSummary> attention_ranking(const MentionTable& table,
                                                       const AspectModel& model,
                                                       int T = kDefaultAttentionT) {
    std::vector<AttentionSummary> rows;
    rows.reserve(model.clusters.size());
    for (const auto& cluster : model.clusters) {
        rows.push_back({cluster.id, cluster.label,
                        average_attention(table, model, cluster.id, T), 0});
    }
    std::sort(rows.begin(), rows.end(), [](const AttentionSummary& a, const AttentionSummary& b) {
        if (a.y2 != b.y2) return a.y2 > b.y2;
        return a.aspect_id < b.aspect_id;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

inline std::string attention_table_csv(const std::vector<AttentionSummary>& rows,
                                       std::size_t top_n = SIZE_MAX) {
    std::string out = "rank,aspect,average_attention\n";
    for (std::size_t i = 0; i < rows.size() && i < top_n; ++i) {
        out += std::to_string(rows[i].rank);
        out += ',';
        out += csv_escape(rows[i].label);
        out += ',';
        out += fmt_fixed(rows[i].y2, 5);
        out += '\n';
    }
    return out;
}

inline std::string interval_series_csv(const std::vector<IntervalSeries>& all) {
    std::string out = "aspect_id,ti,count,share,y1\n";
    for (const auto& series : all) {
        for (const auto& [ti, count] : series.counts) {
            double share = series.total > 0 ? count / series.total : 0;
            out += std::to_string(series.aspect_id);
            out += ',';
            out += std::to_string(ti);
            out += ',';
            out += fmt_number(count);
            out += ',';
            out += fmt_number(share);
            out += ',';
            if (share > 0) out += fmt_number(std::log10(share));
            out += '\n';
        }
    }
    return out;
}

} // namespace revlens
