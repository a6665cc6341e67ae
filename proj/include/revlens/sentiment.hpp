#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "revlens/aspects.hpp"
#include "revlens/corpus.hpp"
#include "revlens/csv.hpp"
#include "revlens/resources.hpp"

namespace revlens {

struct MentionSentiment {
    std::string review_id;
    int aspect_id = 0;
    std::string attribute;
    int ti = 0;
    int score = 0;       // sign of raw_sum; 0 is neutral
    double raw_sum = 0;  // distance-weighted, negation-adjusted polarity sum
};

/// Negation coefficient for the sentiment word at position k: the two
/// preceding tokens carry the rule. Both negations cancel (c = +1), exactly
/// one flips (c = -1), none leaves the polarity alone (c = +1). The window
/// truncates at the start of the review.
inline int negation_coefficient(const std::vector<TaggedToken>& tokens, std::size_t k,
                                const WordSet& negations) {
    int n = 0;
    if (k >= 1 && negations.count(tokens[k - 1].word)) ++n;
    if (k >= 2 && negations.count(tokens[k - 2].word)) ++n;
    return n == 1 ? -1 : 1;
}

/// Token span: start index + length.
struct Span {
    std::size_t start = 0;
    std::size_t len = 1;
};

namespace detail {

inline bool is_sentence_end(const std::string& w) {
    return w == "." || w == "!" || w == "?" || w == "\xE3\x80\x82" /* 。 */ ||
           w == "\xEF\xBC\x81" /* ！ */ || w == "\xEF\xBC\x9F" /* ？ */;
}

/// Sentence index per token when sentence-scoped scoring is enabled.
inline std::vector<std::size_t> sentence_ids(const std::vector<TaggedToken>& tokens) {
    std::vector<std::size_t> ids(tokens.size());
    std::size_t cur = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        ids[i] = cur;
        if (is_sentence_end(tokens[i].word)) ++cur;
    }
    return ids;
}

inline std::size_t span_distance(std::size_t k, const Span& span) {
    if (k < span.start) return span.start - k;
    if (k >= span.start + span.len) return k - (span.start + span.len - 1);
    return 0;
}

} // namespace detail

struct SentimentResult {
    double raw_sum = 0;
    int score = 0;
};

/// Score one attribute within one review: sum c * SO(sw) / dist over every
/// sentiment-word occurrence, dist being the token distance to the nearest
/// occurrence of the attribute (floored at 1). With sentence_scope, only
/// sentiment words sharing a sentence with an attribute occurrence count,
/// and dist is measured within that sentence.
inline SentimentResult attribute_sentiment(const std::vector<TaggedToken>& tokens,
                                           const std::vector<Span>& occurrences,
                                           const SentimentLexicon& lexicon,
                                           const WordSet& negations,
                                           bool sentence_scope = false) {
    SentimentResult result;
    if (occurrences.empty()) return result;

    std::vector<std::size_t> sent_ids;
    if (sentence_scope) sent_ids = detail::sentence_ids(tokens);

    for (std::size_t k = 0; k < tokens.size(); ++k) {
        auto lex = lexicon.find(tokens[k].word);
        if (lex == lexicon.end()) continue;

        std::size_t best = SIZE_MAX;
        for (const auto& occ : occurrences) {
            if (sentence_scope && sent_ids[occ.start] != sent_ids[k]) continue;
            best = std::min(best, detail::span_distance(k, occ));
        }
        if (best == SIZE_MAX) continue; // no occurrence in this sentence

        double dist = static_cast<double>(std::max<std::size_t>(best, 1));
        int c = negation_coefficient(tokens, k, negations);
        result.raw_sum += c * lex->second / dist;
    }
    result.score = result.raw_sum > 0 ? 1 : result.raw_sum < 0 ? -1 : 0;
    return result;
}

/// Score every (review, attribute) pair of a mention list. Multiple
/// occurrences of one attribute in a review collapse into a single scored
/// mention whose dist uses the nearest occurrence.
inline std::vector<MentionSentiment> score_mentions(const ReviewRecord& record,
                                                    const std::vector<Mention>& mentions,
                                                    const SentimentLexicon& lexicon,
                                                    const WordSet& negations,
                                                    bool sentence_scope = false) {
    struct Group {
        int aspect_id;
        std::vector<Span> occurrences;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, Group> groups;
    for (const auto& m : mentions) {
        auto [it, inserted] = groups.try_emplace(m.attribute);
        if (inserted) {
            it->second.aspect_id = m.aspect_id;
            order.push_back(m.attribute);
        }
        std::size_t words = static_cast<std::size_t>(
            std::count(m.attribute.begin(), m.attribute.end(), ' ')) + 1;
        it->second.occurrences.push_back({m.token_index, words});
    }

    std::vector<MentionSentiment> out;
    out.reserve(order.size());
    for (const auto& attr : order) {
        const auto& group = groups[attr];
        auto r = attribute_sentiment(record.tokens, group.occurrences, lexicon, negations,
                                     sentence_scope);
        out.push_back({record.id, group.aspect_id, attr, record.interval_days, r.score, r.raw_sum});
    }
    return out;
}

struct AspectSentimentSeries {
    int aspect_id = 0;
    std::map<int, double> mean;  // ti -> mean of non-neutral scores
    std::map<int, int> mentions; // ti -> scored mention count (neutral included)
};

/// Per-aspect, per-interval mean of the non-neutral mention scores.
/// Intervals with no non-neutral mention carry no mean.
inline std::map<int, AspectSentimentSeries> aspect_sentiment_series(
    const std::vector<MentionSentiment>& scored) {
    struct Acc {
        int sum = 0;
        int non_neutral = 0;
        int total = 0;
    };
    std::map<int, std::map<int, Acc>> acc; // aspect -> ti -> sums
    for (const auto& m : scored) {
        auto& a = acc[m.aspect_id][m.ti];
        a.sum += m.score;
        a.total += 1;
        if (m.score != 0) a.non_neutral += 1;
    }
    std::map<int, AspectSentimentSeries> series;
    for (const auto& [aspect_id, by_ti] : acc) {
        auto& s = series[aspect_id];
        s.aspect_id = aspect_id;
        for (const auto& [ti, a] : by_ti) {
            s.mentions[ti] = a.total;
            if (a.non_neutral > 0) {
                s.mean[ti] = static_cast<double>(a.sum) / a.non_neutral;
            }
        }
    }
    return series;
}

inline std::string mention_sentiment_csv(const std::vector<MentionSentiment>& scored) {
    std::string out = "review_id,aspect_id,attribute,ti,score,raw_sum\n";
    for (const auto& m : scored) {
        out += csv_escape(m.review_id);
        out += ',';
        out += std::to_string(m.aspect_id);
        out += ',';
        out += csv_escape(m.attribute);
        out += ',';
        out += std::to_string(m.ti);
        out += ',';
        out += std::to_string(m.score);
        out += ',';
        out += fmt_number(m.raw_sum);
        out += '\n';
    }
    return out;
}

} // namespace revlens
