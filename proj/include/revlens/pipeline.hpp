#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlens/aspects.hpp"
#include "revlens/corpus.hpp"
#include "revlens/csv.hpp"
#include "revlens/powerfit.hpp"
#include "revlens/preprocess.hpp"
#include "revlens/resources.hpp"
#include "revlens/sentiment.hpp"
#include "revlens/simulate.hpp"
#include "revlens/temporal.hpp"

namespace revlens {

/// A stage input that should have been produced by an earlier stage (or
/// supplied by the user) is not on disk.
struct MissingArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path lexicon;
    std::filesystem::path extra_lexicon;
    std::filesystem::path negation;
    std::filesystem::path stoplist;
    std::filesystem::path user_dict;
    std::filesystem::path base_dict;
    std::filesystem::path embeddings;
    std::filesystem::path model_override;
    std::filesystem::path out_dir = "out";
    int min_tf = kDefaultMinTf;
    double threshold = kDefaultSimilarityThreshold;
    int max_interval = kDefaultMaxInterval;
    int x_offset = kDefaultXOffset;
    int attention_T = kDefaultAttentionT;
    int top_n = 10;
    bool sentence_scope = false;
    std::string product_filter; // empty = keep all products
};

namespace detail {

inline void require_file(const std::filesystem::path& path, const char* stage,
                         const char* what) {
    if (path.empty()) {
        throw MissingArtifact(std::string(stage) + ": no path configured for " + what);
    }
    if (!std::filesystem::exists(path)) {
        throw MissingArtifact(std::string(stage) + ": missing " + what + ": " + path.string());
    }
}

inline nlohmann::ordered_json new_manifest(const char* stage, const PipelineConfig& cfg) {
    nlohmann::ordered_json m;
    m["stage"] = stage;
    m["created_epoch_s"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    m["params"] = {{"min_tf", cfg.min_tf},
                   {"threshold", cfg.threshold},
                   {"max_interval", cfg.max_interval},
                   {"x_offset", cfg.x_offset},
                   {"T", cfg.attention_T},
                   {"top_n", cfg.top_n},
                   {"sentence_scope", cfg.sentence_scope},
                   {"product_filter", cfg.product_filter}};
    m["inputs"] = nlohmann::ordered_json::object();
    m["counts"] = nlohmann::ordered_json::object();
    return m;
}

inline void write_manifest(const PipelineConfig& cfg, const char* stage,
                           nlohmann::ordered_json& manifest) {
    atomic_write(cfg.out_dir / (std::string("manifest_") + stage + ".json"),
                 manifest.dump(2) + "\n");
}

inline std::vector<std::string> csv_rows(const std::string& content, bool skip_header = true) {
    std::vector<std::string> rows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < content.size()) {
        auto eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        if (!line.empty()) rows.push_back(std::move(line));
    }
    return rows;
}

} // namespace detail

inline std::filesystem::path clean_corpus_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "clean.jsonl";
}
inline std::filesystem::path candidates_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "candidates.csv";
}
inline std::filesystem::path model_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "aspect_model.csv";
}
inline std::filesystem::path mentions_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "mentions.csv";
}
inline std::filesystem::path series_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "series.csv";
}
inline std::filesystem::path attention_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "attention.csv";
}
inline std::filesystem::path fits_path(const PipelineConfig& cfg) {
    return cfg.out_dir / "fits.csv";
}

/// Validate the input corpus into out/clean.jsonl (pre-tagged, normalized)
/// plus out/rejections.csv. Raw-text records are segmented here once so
/// every later stage can rely on tokens.
inline nlohmann::ordered_json stage_ingest(const PipelineConfig& cfg) {
    detail::require_file(cfg.corpus, "ingest", "corpus");
    std::filesystem::create_directories(cfg.out_dir);

    std::optional<Dictionary> base_dict, user_dict;
    if (!cfg.base_dict.empty()) {
        detail::require_file(cfg.base_dict, "ingest", "base dictionary");
        base_dict = load_dictionary(cfg.base_dict);
    }
    if (!cfg.user_dict.empty()) {
        detail::require_file(cfg.user_dict, "ingest", "user dictionary");
        user_dict = load_dictionary(cfg.user_dict);
    }
    std::optional<std::string> filter;
    if (!cfg.product_filter.empty()) filter = cfg.product_filter;

    auto result = load_corpus(cfg.corpus, cfg.max_interval,
                              base_dict ? &*base_dict : nullptr,
                              user_dict ? &*user_dict : nullptr, filter);

    std::string clean;
    for (const auto& rec : result.corpus.records) {
        nlohmann::ordered_json j;
        j["id"] = rec.id;
        j["product"] = rec.product;
        j["purchase_time"] = format_datetime(rec.purchase_time);
        j["review_time"] = format_datetime(rec.review_time);
        auto& tokens = j["tokens"] = nlohmann::ordered_json::array();
        for (const auto& t : rec.tokens) {
            tokens.push_back({{"w", t.word}, {"pos", t.pos}});
        }
        clean += j.dump();
        clean += '\n';
    }
    atomic_write(clean_corpus_path(cfg), clean);
    atomic_write(cfg.out_dir / "rejections.csv", rejection_report_csv(result.rejections));

    auto manifest = detail::new_manifest("ingest", cfg);
    manifest["inputs"]["corpus"] = cfg.corpus.string();
    manifest["counts"]["accepted"] = result.corpus.records.size();
    manifest["counts"]["rejected"] = result.rejections.size();
    std::map<std::string, int> by_reason;
    for (const auto& r : result.rejections) ++by_reason[r.reason];
    manifest["counts"]["rejected_by_reason"] = by_reason;
    detail::write_manifest(cfg, "ingest", manifest);
    return manifest;
}

inline Corpus load_clean_corpus(const PipelineConfig& cfg, const char* stage) {
    detail::require_file(clean_corpus_path(cfg), stage, "clean corpus (run ingest first)");
    auto result = load_corpus(clean_corpus_path(cfg), cfg.max_interval);
    return std::move(result.corpus);
}

inline nlohmann::ordered_json stage_extract(const PipelineConfig& cfg) {
    auto corpus = load_clean_corpus(cfg, "extract");
    WordSet stoplist;
    if (!cfg.stoplist.empty()) {
        detail::require_file(cfg.stoplist, "extract", "stoplist");
        stoplist = load_word_list(cfg.stoplist);
    }
    auto candidates = extract_candidates(corpus, cfg.min_tf, kDefaultMaxPhraseLen, stoplist);

    std::string csv = "attribute,tf\n";
    for (const auto& cand : candidates) {
        csv += csv_escape(cand.surface);
        csv += ',';
        csv += std::to_string(cand.tf);
        csv += '\n';
    }
    atomic_write(candidates_path(cfg), csv);

    auto manifest = detail::new_manifest("extract", cfg);
    manifest["inputs"]["clean_corpus"] = clean_corpus_path(cfg).string();
    manifest["counts"]["reviews"] = corpus.records.size();
    manifest["counts"]["candidates"] = candidates.size();
    detail::write_manifest(cfg, "extract", manifest);
    return manifest;
}

inline nlohmann::ordered_json stage_cluster(const PipelineConfig& cfg) {
    detail::require_file(candidates_path(cfg), "cluster", "candidates (run extract first)");
    detail::require_file(cfg.embeddings, "cluster", "embeddings");

    std::vector<AttributeCandidate> candidates;
    auto rows = detail::csv_rows(read_file(candidates_path(cfg)));
    candidates.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto fields = csv_split(rows[i]);
        if (fields.size() != 2) {
            throw std::runtime_error("cluster: bad candidates row: " + rows[i]);
        }
        candidates.push_back({fields[0], static_cast<std::size_t>(std::stoull(fields[1])), i});
    }

    auto embeddings = load_embeddings(cfg.embeddings);
    auto model = cluster_attributes(candidates, embeddings.table, cfg.threshold);
    atomic_write(model_path(cfg), aspect_model_csv(model));

    auto manifest = detail::new_manifest("cluster", cfg);
    manifest["inputs"]["candidates"] = candidates_path(cfg).string();
    manifest["inputs"]["embeddings"] = cfg.embeddings.string();
    manifest["counts"]["aspects"] = model.clusters.size();
    manifest["counts"]["clustered_attributes"] =
        candidates.size() - model.excluded.size();
    manifest["counts"]["embedding_rows_rejected"] = embeddings.rejected_lines;
    manifest["excluded_no_embedding"] = model.excluded;
    manifest["embedding_warnings"] = embeddings.warnings;
    detail::write_manifest(cfg, "cluster", manifest);
    return manifest;
}

inline AspectModel resolve_model(const PipelineConfig& cfg, const char* stage) {
    if (!cfg.model_override.empty()) {
        detail::require_file(cfg.model_override, stage, "aspect model override");
        return parse_aspect_model_csv(read_file(cfg.model_override));
    }
    detail::require_file(model_path(cfg), stage, "aspect model (run cluster first)");
    return parse_aspect_model_csv(read_file(model_path(cfg)));
}

inline nlohmann::ordered_json stage_sentiment(const PipelineConfig& cfg) {
    auto corpus = load_clean_corpus(cfg, "sentiment");
    auto model = resolve_model(cfg, "sentiment");
    detail::require_file(cfg.lexicon, "sentiment", "lexicon");
    auto lexicon = load_lexicon(cfg.lexicon);
    if (!cfg.extra_lexicon.empty()) {
        detail::require_file(cfg.extra_lexicon, "sentiment", "extra lexicon");
        lexicon = merge_lexicons(std::move(lexicon), load_lexicon(cfg.extra_lexicon));
    }
    WordSet negations;
    if (!cfg.negation.empty()) {
        detail::require_file(cfg.negation, "sentiment", "negation list");
        negations = load_word_list(cfg.negation);
    }

    auto patterns = detail::member_patterns(model);
    std::vector<MentionSentiment> scored;
    for (const auto& rec : corpus.records) {
        auto mentions = map_mentions(rec.tokens, patterns);
        auto per_record = score_mentions(rec, mentions, lexicon, negations, cfg.sentence_scope);
        scored.insert(scored.end(), per_record.begin(), per_record.end());
    }
    atomic_write(mentions_path(cfg), mention_sentiment_csv(scored));

    auto manifest = detail::new_manifest("sentiment", cfg);
    manifest["inputs"]["clean_corpus"] = clean_corpus_path(cfg).string();
    manifest["inputs"]["model"] =
        (cfg.model_override.empty() ? model_path(cfg) : cfg.model_override).string();
    manifest["inputs"]["lexicon"] = cfg.lexicon.string();
    manifest["counts"]["scored_mentions"] = scored.size();
    detail::write_manifest(cfg, "sentiment", manifest);
    return manifest;
}

inline nlohmann::ordered_json stage_attention(const PipelineConfig& cfg) {
    auto corpus = load_clean_corpus(cfg, "attention");
    auto model = resolve_model(cfg, "attention");
    auto table = build_mention_table(corpus, model);

    std::vector<IntervalSeries> all;
    all.reserve(model.clusters.size());
    for (const auto& cluster : model.clusters) {
        all.push_back(mention_counts(table, model, cluster.id));
    }
    atomic_write(series_path(cfg), interval_series_csv(all));

    auto ranking = attention_ranking(table, model, cfg.attention_T);
    atomic_write(attention_path(cfg), attention_table_csv(ranking));

    auto manifest = detail::new_manifest("attention", cfg);
    manifest["inputs"]["clean_corpus"] = clean_corpus_path(cfg).string();
    manifest["inputs"]["model"] =
        (cfg.model_override.empty() ? model_path(cfg) : cfg.model_override).string();
    manifest["counts"]["aspects"] = model.clusters.size();
    manifest["counts"]["max_ti"] = table.max_ti;
    detail::write_manifest(cfg, "attention", manifest);
    return manifest;
}

inline std::map<int, IntervalSeries> parse_series_csv(const std::string& content) {
    std::map<int, IntervalSeries> by_aspect;
    for (const auto& row : detail::csv_rows(content)) {
        auto fields = csv_split(row);
        if (fields.size() != 5) {
            throw std::runtime_error("bad series row: " + row);
        }
        int aspect_id = std::stoi(fields[0]);
        auto& series = by_aspect[aspect_id];
        series.aspect_id = aspect_id;
        double count = std::strtod(fields[2].c_str(), nullptr);
        series.counts[std::stoi(fields[1])] = count;
        series.total += count;
    }
    return by_aspect;
}

inline nlohmann::ordered_json stage_fit(const PipelineConfig& cfg) {
    detail::require_file(series_path(cfg), "fit", "attention series (run attention first)");
    auto model = resolve_model(cfg, "fit");
    auto by_aspect = parse_series_csv(read_file(series_path(cfg)));

    std::vector<FitRow> rows;
    auto manifest = detail::new_manifest("fit", cfg);
    auto& skipped = manifest["skipped"] = nlohmann::ordered_json::object();
    for (const auto& cluster : model.clusters) {
        auto it = by_aspect.find(cluster.id);
        if (it == by_aspect.end()) {
            skipped[cluster.label] = "no series";
            continue;
        }
        try {
            auto input = prepare_fit_input(it->second, cfg.x_offset);
            rows.push_back({cluster.id, cluster.label, fit_power_law(input)});
        } catch (const FitError& e) {
            skipped[cluster.label] = e.what();
        }
    }
    atomic_write(fits_path(cfg), fit_table_csv(rows));

    manifest["inputs"]["series"] = series_path(cfg).string();
    manifest["counts"]["fitted"] = rows.size();
    detail::write_manifest(cfg, "fit", manifest);
    return manifest;
}

inline nlohmann::ordered_json stage_simulate(const PipelineConfig& cfg,
                                             const std::string& scenario,
                                             std::uint64_t seed) {
    auto spec = make_scenario(scenario, seed);
    spec.max_interval = cfg.max_interval;
    auto stats = generate_corpus(spec, cfg.out_dir);

    auto manifest = detail::new_manifest("simulate", cfg);
    manifest["params"]["scenario"] = scenario;
    manifest["params"]["seed"] = seed;
    manifest["counts"]["reviews"] = stats.reviews;
    manifest["counts"]["aspect_reviews"] = stats.aspect_reviews;
    manifest["outputs"] = {"corpus.jsonl",      "embeddings.txt",    "lexicon.tsv",
                           "negation.txt",      "stoplist.txt",      "ground_truth.csv",
                           "sentiment_truth.csv"};
    detail::write_manifest(cfg, "simulate", manifest);
    return manifest;
}

/// Bundle the report tables: the fit table, the top-N attention ranking,
/// the aspect-count ratio by interval, the per-interval sentiment means,
/// and the review count by purchase date and interval week.
inline nlohmann::ordered_json stage_report(const PipelineConfig& cfg) {
    detail::require_file(fits_path(cfg), "report", "fit table (run fit first)");
    detail::require_file(attention_path(cfg), "report", "attention table (run attention first)");
    detail::require_file(mentions_path(cfg), "report", "mention sentiment (run sentiment first)");
    auto corpus = load_clean_corpus(cfg, "report");
    auto model = resolve_model(cfg, "report");

    auto report_dir = cfg.out_dir / "report";
    std::filesystem::create_directories(report_dir);

    atomic_write(report_dir / "fit_table.csv", read_file(fits_path(cfg)));

    auto attention_rows = detail::csv_rows(read_file(attention_path(cfg)));
    std::string top = "rank,aspect,average_attention\n";
    for (std::size_t i = 0; i < attention_rows.size() &&
                            i < static_cast<std::size_t>(cfg.top_n); ++i) {
        top += attention_rows[i];
        top += '\n';
    }
    atomic_write(report_dir / "attention_top.csv", top);

    auto table = build_mention_table(corpus, model);
    int universe = static_cast<int>(model.clusters.size());
    std::string ratio = "ti,ratio\n";
    for (int ti = 0; ti <= table.max_ti; ++ti) {
        ratio += std::to_string(ti);
        ratio += ',';
        ratio += fmt_number(aspect_count_ratio(table, ti, universe));
        ratio += '\n';
    }
    atomic_write(report_dir / "ratio_series.csv", ratio);

    std::vector<MentionSentiment> scored;
    for (const auto& row : detail::csv_rows(read_file(mentions_path(cfg)))) {
        auto fields = csv_split(row);
        if (fields.size() != 6) {
            throw std::runtime_error("bad mentions row: " + row);
        }
        MentionSentiment m;
        m.review_id = fields[0];
        m.aspect_id = std::stoi(fields[1]);
        m.attribute = fields[2];
        m.ti = std::stoi(fields[3]);
        m.score = std::stoi(fields[4]);
        m.raw_sum = std::strtod(fields[5].c_str(), nullptr);
        scored.push_back(std::move(m));
    }
    auto sentiment = aspect_sentiment_series(scored);
    std::string senti = "aspect_id,ti,mean,mentions\n";
    for (const auto& [aspect_id, series] : sentiment) {
        for (const auto& [ti, n] : series.mentions) {
            senti += std::to_string(aspect_id);
            senti += ',';
            senti += std::to_string(ti);
            senti += ',';
            auto mean = series.mean.find(ti);
            if (mean != series.mean.end()) senti += fmt_number(mean->second);
            senti += ',';
            senti += std::to_string(n);
            senti += '\n';
        }
    }
    atomic_write(report_dir / "sentiment_series.csv", senti);

    std::map<std::pair<std::int64_t, int>, int> matrix;
    for (const auto& rec : corpus.records) {
        std::int64_t day = rec.purchase_time >= 0
                               ? rec.purchase_time / kSecondsPerDay
                               : (rec.purchase_time - kSecondsPerDay + 1) / kSecondsPerDay;
        ++matrix[{day, week_of_interval(rec.interval_days)}];
    }
    std::string pm = "purchase_date,interval_week,reviews\n";
    for (const auto& [key, n] : matrix) {
        pm += format_date(key.first);
        pm += ',';
        pm += std::to_string(key.second);
        pm += ',';
        pm += std::to_string(n);
        pm += '\n';
    }
    atomic_write(report_dir / "purchase_matrix.csv", pm);

    auto manifest = detail::new_manifest("report", cfg);
    manifest["inputs"]["fits"] = fits_path(cfg).string();
    manifest["inputs"]["attention"] = attention_path(cfg).string();
    manifest["inputs"]["mentions"] = mentions_path(cfg).string();
    manifest["counts"]["aspects"] = model.clusters.size();
    manifest["counts"]["reviews"] = corpus.records.size();
    detail::write_manifest(cfg, "report", manifest);
    return manifest;
}

} // namespace revlens
