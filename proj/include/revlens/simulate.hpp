#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlens/corpus.hpp"
#include "revlens/csv.hpp"

namespace revlens {

/// Deterministic helpers over mt19937_64. The std distributions are not
/// pinned across standard libraries, so bounded draws and shuffling are
/// done by hand to keep generated corpora byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = eng_();
            if (r >= threshold) return (r - threshold) % bound;
        }
    }

    int range(int lo, int hi) { // inclusive
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double unit() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

struct AspectSchedule {
    std::string label;                // equals members.front()
    std::vector<std::string> members; // single-token attribute surfaces
    double a = 0;
    double b = 0;
    std::map<int, double> p_pos;      // step schedule: value of greatest key <= ti
    std::optional<int> cutoff_ti;     // aspect emits nothing past this interval
};

struct ScenarioSpec {
    std::uint64_t seed = 42;
    int max_interval = kDefaultMaxInterval;
    std::string product = "phone-x1";
    std::string purchase_start = "2016-01-01";
    int purchase_window_days = 120;
    std::vector<AspectSchedule> aspects;
    double filler_a = 0; // background reviews mentioning no attribute
    double filler_b = 0;
};

struct SimulationStats {
    std::size_t reviews = 0;
    std::size_t aspect_reviews = 0;
};

/// Planted review count for one aspect at one interval.
inline long long planted_count(double a, double b, int ti) {
    return std::llround(a * std::pow(static_cast<double>(ti) + 1.0, -b));
}

inline double p_pos_at(const AspectSchedule& aspect, int ti) {
    double p = 0.8;
    for (const auto& [from, value] : aspect.p_pos) {
        if (from > ti) break;
        p = value;
    }
    return p;
}

namespace detail {

inline const std::vector<std::string>& positive_words() {
    static const std::vector<std::string> words = {"good", "great", "solid"};
    return words;
}

inline const std::vector<std::string>& negative_words() {
    static const std::vector<std::string> words = {"bad", "poor", "weak"};
    return words;
}

inline const std::vector<std::string>& negation_words() {
    static const std::vector<std::string> words = {"not", "never"};
    return words;
}

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {"very", "quite", "really",
                                                   "indeed", "so", "still"};
    return words;
}

inline void append_token(nlohmann::ordered_json& tokens, const std::string& w,
                         const char* pos) {
    tokens.push_back({{"w", w}, {"pos", pos}});
}

} // namespace detail

/// Generate a corpus with planted per-aspect power-law attention and
/// stratified sentiment, plus every resource file the pipeline needs.
///
/// Counts follow the rounded schedule exactly: aspect i emits
/// round(a·(ti+1)^-b) reviews at interval ti, one member attribute per
/// review assigned round-robin. Sentiment signs are stratified per
/// (aspect, ti) block: exactly round(p_pos·n) positives, placed by a seeded
/// shuffle, so the block mean is within 1/n of 2·p_pos - 1 by construction.
/// Sign realization varies between a direct lexicon word and a negated
/// opposite-polarity word to keep the negation rules exercised.
inline SimulationStats generate_corpus(const ScenarioSpec& spec,
                                       const std::filesystem::path& out_dir) {
    if (spec.aspects.empty() && spec.filler_a <= 0) {
        throw std::invalid_argument("scenario produces zero reviews");
    }
    std::filesystem::create_directories(out_dir);
    Rng rng(spec.seed);

    auto start = parse_timestamp(spec.purchase_start);
    if (!start) {
        throw std::invalid_argument("bad purchase_start: " + spec.purchase_start);
    }
    const std::int64_t window_seconds =
        static_cast<std::int64_t>(spec.purchase_window_days) * kSecondsPerDay;

    const auto& pos_words = detail::positive_words();
    const auto& neg_words = detail::negative_words();
    const auto& negations = detail::negation_words();
    const auto& filler = detail::filler_words();

    std::string corpus_out;
    SimulationStats stats;
    std::vector<std::size_t> rr(spec.aspects.size(), 0);
    std::size_t id_counter = 0;

    auto emit_review = [&](int ti, const std::string* attribute, int sign) {
        nlohmann::ordered_json j;
        char id[16];
        std::snprintf(id, sizeof(id), "r%07zu", ++id_counter);
        j["id"] = id;
        j["product"] = spec.product;
        std::int64_t purchase = *start + static_cast<std::int64_t>(rng.below(window_seconds));
        std::int64_t review = purchase + static_cast<std::int64_t>(ti) * kSecondsPerDay +
                              static_cast<std::int64_t>(rng.below(kSecondsPerDay));
        j["purchase_time"] = format_datetime(purchase);
        j["review_time"] = format_datetime(review);
        auto& tokens = j["tokens"] = nlohmann::ordered_json::array();
        if (attribute) {
            detail::append_token(tokens, *attribute, "n");
            detail::append_token(tokens, "is", "v");
            bool negate = rng.unit() < 0.3;
            if (negate) {
                detail::append_token(tokens, negations[rng.below(negations.size())], "d");
                const auto& pool = sign > 0 ? neg_words : pos_words;
                detail::append_token(tokens, pool[rng.below(pool.size())], "a");
            } else {
                const auto& pool = sign > 0 ? pos_words : neg_words;
                detail::append_token(tokens, pool[rng.below(pool.size())], "a");
            }
            int tail = rng.range(0, 3);
            for (int t = 0; t < tail; ++t) {
                detail::append_token(tokens, filler[rng.below(filler.size())], "u");
            }
        } else {
            int n = rng.range(2, 5);
            for (int t = 0; t < n; ++t) {
                detail::append_token(tokens, filler[rng.below(filler.size())], "u");
            }
        }
        corpus_out += j.dump();
        corpus_out += '\n';
        ++stats.reviews;
    };

    for (int ti = 0; ti <= spec.max_interval; ++ti) {
        for (std::size_t ai = 0; ai < spec.aspects.size(); ++ai) {
            const auto& aspect = spec.aspects[ai];
            if (aspect.cutoff_ti && ti > *aspect.cutoff_ti) continue;
            long long n = planted_count(aspect.a, aspect.b, ti);
            if (n <= 0) continue;
            long long n_pos = std::llround(p_pos_at(aspect, ti) * static_cast<double>(n));
            std::vector<int> signs(static_cast<std::size_t>(n), -1);
            for (long long s = 0; s < n_pos; ++s) signs[static_cast<std::size_t>(s)] = 1;
            rng.shuffle(signs);
            for (long long r = 0; r < n; ++r) {
                const auto& member = aspect.members[rr[ai]++ % aspect.members.size()];
                emit_review(ti, &member, signs[static_cast<std::size_t>(r)]);
                ++stats.aspect_reviews;
            }
        }
        if (spec.filler_a > 0) {
            long long n = planted_count(spec.filler_a, spec.filler_b, ti);
            for (long long r = 0; r < n; ++r) emit_review(ti, nullptr, 0);
        }
    }
    if (stats.reviews == 0) {
        throw std::invalid_argument("scenario produces zero reviews");
    }
    atomic_write(out_dir / "corpus.jsonl", corpus_out);

    // Embeddings: one near-orthogonal basis direction per aspect, members
    // jittered slightly around it. Within-aspect similarity stays near 1,
    // cross-aspect similarity near 0.
    const std::size_t dim = std::max<std::size_t>(8, spec.aspects.size());
    std::string emb;
    std::size_t n_vectors = 0;
    for (const auto& aspect : spec.aspects) n_vectors += aspect.members.size();
    emb += std::to_string(n_vectors) + " " + std::to_string(dim) + "\n";
    for (std::size_t ai = 0; ai < spec.aspects.size(); ++ai) {
        for (const auto& member : spec.aspects[ai].members) {
            emb += member;
            for (std::size_t d = 0; d < dim; ++d) {
                double v = (d == ai ? 1.0 : 0.0) + (rng.unit() - 0.5) * 0.04;
                emb += ' ';
                emb += fmt_fixed(v, 6);
            }
            emb += '\n';
        }
    }
    atomic_write(out_dir / "embeddings.txt", emb);

    std::string lex;
    for (const auto& w : pos_words) lex += w + "\t+1\n";
    for (const auto& w : neg_words) lex += w + "\t-1\n";
    atomic_write(out_dir / "lexicon.tsv", lex);

    std::string negf = "# negation words\n";
    for (const auto& w : negations) negf += w + "\n";
    atomic_write(out_dir / "negation.txt", negf);

    atomic_write(out_dir / "stoplist.txt", "# noise words never admitted as attributes\nthing\nstuff\n");

    std::string truth = "aspect,a,b\n";
    for (const auto& aspect : spec.aspects) {
        truth += csv_escape(aspect.label) + "," + fmt_number(aspect.a) + "," +
                 fmt_number(aspect.b) + "\n";
    }
    atomic_write(out_dir / "ground_truth.csv", truth);

    std::string senti = "aspect,ti,expected_mean\n";
    for (const auto& aspect : spec.aspects) {
        int last = aspect.cutoff_ti ? *aspect.cutoff_ti : spec.max_interval;
        for (int ti = 0; ti <= last; ++ti) {
            senti += csv_escape(aspect.label) + "," + std::to_string(ti) + "," +
                     fmt_number(2.0 * p_pos_at(aspect, ti) - 1.0) + "\n";
        }
    }
    atomic_write(out_dir / "sentiment_truth.csv", senti);

    return stats;
}

/// Eight aspects with planted exponents spanning [0.8, 1.45] plus a heavy
/// background of mention-free reviews. Exponents above ~1.5 are left out on
/// purpose: with amplitudes capped at 500, count rounding flattens their
/// tails past the recovery tolerance.
inline ScenarioSpec scenario_default(std::uint64_t seed = 42) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.aspects = {
        {"screen", {"screen"}, 500, 1.45, {{0, 0.8}}, std::nullopt},
        {"battery", {"battery", "endurance"}, 450, 1.40, {{0, 0.8}}, std::nullopt},
        {"camera", {"camera", "lens"}, 420, 1.30, {{0, 0.8}}, std::nullopt},
        {"system", {"system", "firmware"}, 380, 1.20, {{0, 0.7}}, std::nullopt},
        {"appearance", {"appearance", "looks", "design"}, 300, 1.10, {{0, 0.9}}, std::nullopt},
        {"price", {"price"}, 220, 1.00, {{0, 0.6}}, std::nullopt},
        {"logistics", {"logistics", "delivery", "shipping"}, 160, 0.90, {{0, 0.8}}, std::nullopt},
        {"feel", {"feel"}, 100, 0.80, {{0, 0.75}}, std::nullopt},
    };
    spec.filler_a = 3000;
    spec.filler_b = 0.6;
    return spec;
}

/// One heavily mentioned aspect whose positive share steps down over time:
/// 0.9 through ti 10, 0.75 in between, 0.6 from ti 30 on. Every interval
/// keeps well over 1000 mentions.
inline ScenarioSpec scenario_sentiment_shift(std::uint64_t seed = 7) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.aspects = {
        {"battery", {"battery"}, 1500, 0.05, {{0, 0.9}, {11, 0.75}, {30, 0.6}}, std::nullopt},
    };
    return spec;
}

/// Three persistent aspects plus five that vanish after early intervals,
/// so the fraction of aspects mentioned decays with ti.
inline ScenarioSpec scenario_early_burst(std::uint64_t seed = 11) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.aspects = {
        {"screen", {"screen"}, 220, 1.00, {{0, 0.8}}, std::nullopt},
        {"battery", {"battery"}, 210, 0.90, {{0, 0.8}}, std::nullopt},
        {"camera", {"camera"}, 230, 1.10, {{0, 0.8}}, std::nullopt},
        {"strap", {"strap"}, 40, 0.0, {{0, 0.8}}, 3},
        {"hinge", {"hinge"}, 40, 0.0, {{0, 0.8}}, 4},
        {"dial", {"dial"}, 40, 0.0, {{0, 0.8}}, 5},
        {"clasp", {"clasp"}, 40, 0.0, {{0, 0.8}}, 6},
        {"bezel", {"bezel"}, 40, 0.0, {{0, 0.8}}, 7},
    };
    return spec;
}

inline ScenarioSpec make_scenario(const std::string& name, std::uint64_t seed) {
    if (name == "default") return scenario_default(seed);
    if (name == "sentiment-shift") return scenario_sentiment_shift(seed);
    if (name == "early-burst") return scenario_early_burst(seed);
    throw std::invalid_argument("unknown scenario: " + name);
}

} // namespace revlens
