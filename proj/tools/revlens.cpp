// Command-line front end for the review attention/sentiment pipeline.
// Stages communicate through CSV/JSONL artifacts in the output directory;
// every stage writes a manifest describing its inputs and parameters.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "revlens/revlens.hpp"

namespace {

struct Cli {
    std::string corpus, lexicon, extra_lexicon, negation, stoplist;
    std::string user_dict, base_dict, embeddings, model, out = "out";
    std::string product;
    int min_tf = revlens::kDefaultMinTf;
    double threshold = revlens::kDefaultSimilarityThreshold;
    int max_interval = revlens::kDefaultMaxInterval;
    int x_offset = revlens::kDefaultXOffset;
    int attention_T = revlens::kDefaultAttentionT;
    int top_n = 10;
    bool sentence_scope = false;

    std::string scenario = "default";
    std::uint64_t seed = 42;

    revlens::PipelineConfig to_config() const {
        revlens::PipelineConfig cfg;
        cfg.corpus = corpus;
        cfg.lexicon = lexicon;
        cfg.extra_lexicon = extra_lexicon;
        cfg.negation = negation;
        cfg.stoplist = stoplist;
        cfg.user_dict = user_dict;
        cfg.base_dict = base_dict;
        cfg.embeddings = embeddings;
        cfg.model_override = model;
        cfg.out_dir = out;
        cfg.min_tf = min_tf;
        cfg.threshold = threshold;
        cfg.max_interval = max_interval;
        cfg.x_offset = x_offset;
        cfg.attention_T = attention_T;
        cfg.top_n = top_n;
        cfg.sentence_scope = sentence_scope;
        cfg.product_filter = product;
        return cfg;
    }
};

void print_counts(const nlohmann::ordered_json& manifest) {
    const auto& stage = manifest["stage"].get_ref<const std::string&>();
    std::string line = stage + ":";
    for (const auto& [key, value] : manifest["counts"].items()) {
        line += " " + key + "=" + value.dump();
    }
    std::puts(line.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mine per-aspect user attention and sentiment from timestamped reviews"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value file mirroring the flags; flags win");

    Cli cli;
    app.add_option("--corpus", cli.corpus, "review JSONL file");
    app.add_option("--lexicon", cli.lexicon, "sentiment lexicon TSV (word<TAB>±1)");
    app.add_option("--extra-lexicon", cli.extra_lexicon,
                   "supplemental lexicon merged over the base one");
    app.add_option("--negation", cli.negation, "negation word list");
    app.add_option("--stoplist", cli.stoplist, "attribute stoplist");
    app.add_option("--user-dict", cli.user_dict, "user dictionary TSV (wins over base)");
    app.add_option("--base-dict", cli.base_dict, "segmentation dictionary TSV");
    app.add_option("--embeddings", cli.embeddings, "word vector text file");
    app.add_option("--model", cli.model, "aspect model CSV override (skips clustering)");
    app.add_option("--out", cli.out, "artifact directory")->capture_default_str();
    app.add_option("--product", cli.product, "keep only reviews of this product");
    app.add_option("--min-tf", cli.min_tf, "attribute frequency floor (strict)")
        ->capture_default_str();
    app.add_option("--threshold", cli.threshold, "cluster similarity threshold")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    app.add_option("--max-interval", cli.max_interval, "largest accepted interval in days")
        ->check(CLI::Range(0, 100000))
        ->capture_default_str();
    app.add_option("--x-offset", cli.x_offset, "added to ti before the log-log fit")
        ->capture_default_str();
    app.add_option("--T", cli.attention_T, "divisor of the average-attention sum")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
    app.add_option("--top", cli.top_n, "rows in the report's attention table")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    app.add_flag("--sentence-scope", cli.sentence_scope,
                 "score sentiment within the attribute's sentence only");

    auto* sim = app.add_subcommand("simulate", "generate a planted synthetic corpus");
    sim->add_option("--scenario", cli.scenario, "default | sentiment-shift | early-burst")
        ->capture_default_str();
    sim->add_option("--seed", cli.seed, "generator seed")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "validate reviews into clean.jsonl");
    auto* extract = app.add_subcommand("extract", "count frequent attribute candidates");
    auto* cluster = app.add_subcommand("cluster", "group attributes into aspects");
    auto* sentiment = app.add_subcommand("sentiment", "score every attribute mention");
    auto* attention = app.add_subcommand("attention", "per-interval attention series");
    auto* fit = app.add_subcommand("fit", "power-law fit per aspect");
    auto* report = app.add_subcommand("report", "bundle the result tables");
    for (auto* sub : {sim, ingest, extract, cluster, sentiment, attention, fit, report}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    auto cfg = cli.to_config();
    try {
        nlohmann::ordered_json manifest;
        if (sim->parsed()) {
            manifest = revlens::stage_simulate(cfg, cli.scenario, cli.seed);
        } else if (ingest->parsed()) {
            manifest = revlens::stage_ingest(cfg);
        } else if (extract->parsed()) {
            manifest = revlens::stage_extract(cfg);
        } else if (cluster->parsed()) {
            manifest = revlens::stage_cluster(cfg);
        } else if (sentiment->parsed()) {
            manifest = revlens::stage_sentiment(cfg);
        } else if (attention->parsed()) {
            manifest = revlens::stage_attention(cfg);
        } else if (fit->parsed()) {
            manifest = revlens::stage_fit(cfg);
        } else if (report->parsed()) {
            manifest = revlens::stage_report(cfg);
        }
        print_counts(manifest);
        return 0;
    } catch (const revlens::MissingArtifact& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
