#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "revlens/corpus.hpp"
#include "revlens/csv.hpp"
#include "revlens/resources.hpp"

namespace revlens {

constexpr int kDefaultMinTf = 20;
constexpr int kDefaultMaxPhraseLen = 3;
constexpr double kDefaultSimilarityThreshold = 0.7;

struct AttributeCandidate {
    std::string surface; // noun tokens joined with single spaces
    std::size_t tf = 0;
    std::size_t first_seen = 0; // scan position of the first occurrence
};

/// Count every noun n-gram (length 1..max_phrase_len) inside maximal noun
/// runs, then keep candidates with tf strictly above min_tf that are not
/// stoplisted. Order: descending tf, ties by first occurrence.
inline std::vector<AttributeCandidate> extract_candidates(const Corpus& corpus,
                                                          int min_tf = kDefaultMinTf,
                                                          int max_phrase_len = kDefaultMaxPhraseLen,
                                                          const WordSet& stoplist = {}) {
    std::unordered_map<std::string, AttributeCandidate> counts;
    std::size_t scan_pos = 0;

    for (const auto& rec : corpus.records) {
        std::size_t i = 0;
        const auto& toks = rec.tokens;
        while (i < toks.size()) {
            if (!is_noun(toks[i].pos)) {
                ++i;
                continue;
            }
            std::size_t run_end = i;
            while (run_end < toks.size() && is_noun(toks[run_end].pos)) ++run_end;

            for (std::size_t start = i; start < run_end; ++start) {
                std::string surface;
                std::size_t limit = std::min(run_end - start,
                                             static_cast<std::size_t>(max_phrase_len));
                for (std::size_t len = 1; len <= limit; ++len) {
                    if (len > 1) surface += ' ';
                    surface += toks[start + len - 1].word;
                    auto [it, inserted] = counts.try_emplace(surface);
                    if (inserted) {
                        it->second.surface = surface;
                        it->second.first_seen = scan_pos;
                    }
                    ++it->second.tf;
                    ++scan_pos;
                }
            }
            i = run_end;
        }
    }

    std::vector<AttributeCandidate> out;
    for (auto& [surface, cand] : counts) {
        if (cand.tf > static_cast<std::size_t>(min_tf) && !stoplist.count(surface)) {
            out.push_back(std::move(cand));
        }
    }
    std::sort(out.begin(), out.end(), [](const AttributeCandidate& a, const AttributeCandidate& b) {
        if (a.tf != b.tf) return a.tf > b.tf;
        return a.first_seen < b.first_seen;
    });
    return out;
}

inline double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("dimension mismatch");
    }
    double uv = 0, uu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0 || vv == 0) {
        throw std::invalid_argument("undefined similarity: zero vector");
    }
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

struct Aspect {
    int id = 0;               // 1-based, in creation order
    std::string label;        // center attribute surface
    std::vector<std::string> members;
    std::vector<double> center;
};

struct AspectModel {
    std::vector<Aspect> clusters;
    std::vector<std::string> excluded; // candidates with no embedding
};

namespace detail {

/// Multi-word attribute surfaces are looked up with spaces replaced by
/// underscores, the usual convention for phrase vectors in text embedding
/// files; a plain-surface entry wins when present.
inline const std::vector<double>* embedding_for(const EmbeddingTable& table,
                                                const std::string& surface) {
    if (const auto* v = table.find(surface)) return v;
    if (surface.find(' ') != std::string::npos) {
        std::string key = surface;
        std::replace(key.begin(), key.end(), ' ', '_');
        return table.find(key);
    }
    return nullptr;
}

} // namespace detail

/// Allocation phase. Candidates are scanned in the given order; the first
/// seeds cluster 1. Each next candidate joins the cluster whose CENTER is
/// most similar to it when that similarity reaches the threshold (ties go
/// to the lowest cluster id), otherwise it seeds a new cluster with itself
/// as the fixed center.
inline AspectModel allocate(const std::vector<AttributeCandidate>& candidates,
                            const EmbeddingTable& embeddings,
                            double threshold = kDefaultSimilarityThreshold) {
    AspectModel model;
    for (const auto& cand : candidates) {
        const auto* vec = detail::embedding_for(embeddings, cand.surface);
        if (!vec) {
            model.excluded.push_back(cand.surface);
            continue;
        }
        int best = -1;
        double best_sim = 0;
        for (const auto& cluster : model.clusters) {
            double sim = cosine_similarity(*vec, cluster.center);
            if (sim >= threshold && (best < 0 || sim > best_sim)) {
                best = cluster.id;
                best_sim = sim;
            }
        }
        if (best >= 0) {
            model.clusters[static_cast<std::size_t>(best - 1)].members.push_back(cand.surface);
        } else {
            Aspect aspect;
            aspect.id = static_cast<int>(model.clusters.size()) + 1;
            aspect.label = cand.surface;
            aspect.members.push_back(cand.surface);
            aspect.center = *vec;
            model.clusters.push_back(std::move(aspect));
        }
    }
    return model;
}

/// Transfer phase: one pass over the allocation's membership in creation
/// order. A non-center member moves to a LATER-created cluster when that
/// cluster's center is strictly more similar than its current center (best
/// such center wins; ties keep the earlier cluster). Centers never move.
inline AspectModel transfer(const AspectModel& model,
                            const EmbeddingTable& embeddings,
                            double threshold = kDefaultSimilarityThreshold) {
    (void)threshold; // moves are driven by strict improvement alone
    AspectModel out = model;
    for (std::size_t i = 0; i < model.clusters.size(); ++i) {
        const auto& cluster = model.clusters[i];
        for (const auto& member : cluster.members) {
            if (member == cluster.label) continue;
            const auto* vec = detail::embedding_for(embeddings, member);
            if (!vec) continue;
            double current = cosine_similarity(*vec, cluster.center);
            std::size_t best = i;
            double best_sim = current;
            for (std::size_t j = i + 1; j < model.clusters.size(); ++j) {
                double sim = cosine_similarity(*vec, model.clusters[j].center);
                if (sim > best_sim) {
                    best = j;
                    best_sim = sim;
                }
            }
            if (best != i) {
                auto& from = out.clusters[i].members;
                from.erase(std::find(from.begin(), from.end(), member));
                out.clusters[best].members.push_back(member);
            }
        }
    }
    std::erase_if(out.clusters, [](const Aspect& a) { return a.members.empty(); });
    return out;
}

inline AspectModel cluster_attributes(const std::vector<AttributeCandidate>& candidates,
                                      const EmbeddingTable& embeddings,
                                      double threshold = kDefaultSimilarityThreshold) {
    return transfer(allocate(candidates, embeddings, threshold), embeddings, threshold);
}

struct Mention {
    int aspect_id = 0;
    std::string attribute;
    std::size_t token_index = 0; // start of the matched span
};

namespace detail {

struct MemberPattern {
    std::vector<std::string> words;
    int aspect_id = 0;
    std::string surface;
};

inline std::vector<MemberPattern> member_patterns(const AspectModel& model) {
    std::vector<MemberPattern> pats;
    for (const auto& cluster : model.clusters) {
        for (const auto& member : cluster.members) {
            MemberPattern p;
            p.aspect_id = cluster.id;
            p.surface = member;
            std::size_t start = 0;
            while (start <= member.size()) {
                auto sp = member.find(' ', start);
                if (sp == std::string::npos) {
                    p.words.push_back(member.substr(start));
                    break;
                }
                p.words.push_back(member.substr(start, sp - start));
                start = sp + 1;
            }
            pats.push_back(std::move(p));
        }
    }
    std::sort(pats.begin(), pats.end(), [](const MemberPattern& a, const MemberPattern& b) {
        return a.words.size() > b.words.size();
    });
    return pats;
}

} // namespace detail

/// Find every member-attribute occurrence in a token stream. Overlaps are
/// resolved longest-first, left-to-right: at each position the longest
/// matching member wins and the matched span is consumed.
inline std::vector<Mention> map_mentions(const std::vector<TaggedToken>& tokens,
                                         const std::vector<detail::MemberPattern>& patterns) {
    std::vector<Mention> mentions;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t advance = 1;
        for (const auto& pat : patterns) { // sorted longest first
            if (pat.words.size() > tokens.size() - i) continue;
            bool match = true;
            for (std::size_t k = 0; k < pat.words.size(); ++k) {
                if (tokens[i + k].word != pat.words[k]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                mentions.push_back({pat.aspect_id, pat.surface, i});
                advance = pat.words.size();
                break;
            }
        }
        i += advance;
    }
    return mentions;
}

inline std::vector<Mention> map_mentions(const std::vector<TaggedToken>& tokens,
                                         const AspectModel& model) {
    return map_mentions(tokens, detail::member_patterns(model));
}

inline std::string aspect_model_csv(const AspectModel& model) {
    std::string out = "aspect_id,label,member\n";
    for (const auto& cluster : model.clusters) {
        for (const auto& member : cluster.members) {
            out += std::to_string(cluster.id);
            out += ',';
            out += csv_escape(cluster.label);
            out += ',';
            out += csv_escape(member);
            out += '\n';
        }
    }
    return out;
}

/// Rebuild a model from its CSV export. Center vectors are not stored in
/// the CSV; clusters come back with empty centers, which is fine for
/// mention mapping and reporting.
inline AspectModel parse_aspect_model_csv(const std::string& content) {
    AspectModel model;
    std::unordered_map<int, std::size_t> index;
    std::size_t pos = 0;
    bool header = true;
    while (pos < content.size()) {
        auto eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = csv_split(line);
        if (fields.size() != 3) {
            throw std::runtime_error("aspect model row needs aspect_id,label,member: " + line);
        }
        int id = std::stoi(fields[0]);
        auto it = index.find(id);
        if (it == index.end()) {
            Aspect aspect;
            aspect.id = id;
            aspect.label = fields[1];
            index.emplace(id, model.clusters.size());
            model.clusters.push_back(std::move(aspect));
            it = index.find(id);
        }
        model.clusters[it->second].members.push_back(fields[2]);
    }
    return model;
}

} // namespace revlens
