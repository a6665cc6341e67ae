#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "revlens/sentiment.hpp"
#include "revlens/simulate.hpp"

using namespace revlens;

namespace {

std::vector<TaggedToken> toks(std::initializer_list<const char*> words) {
    std::vector<TaggedToken> out;
    for (const char* w : words) out.push_back({w, "x", out.size()});
    return out;
}

const SentimentLexicon kLex{{"good", 1}, {"bad", -1}};
const WordSet kNeg{"not", "never"};

} // namespace

TEST_CASE("negation coefficient inspects the two preceding tokens") {
    auto t = toks({"screen", "not", "good"});
    REQUIRE(negation_coefficient(t, 2, kNeg) == -1);

    auto t2 = toks({"not", "not", "good"});
    REQUIRE(negation_coefficient(t2, 2, kNeg) == 1);

    auto t3 = toks({"good"});
    REQUIRE(negation_coefficient(t3, 0, kNeg) == 1);

    auto t4 = toks({"not", "very", "good"});
    REQUIRE(negation_coefficient(t4, 2, kNeg) == -1);

    auto t5 = toks({"not", "good"});
    REQUIRE(negation_coefficient(t5, 1, kNeg) == -1);
}

TEST_CASE("a lone sentiment word scores through its distance") {
    auto r = attribute_sentiment(toks({"screen", "is", "good"}), {{0, 1}}, kLex, kNeg);
    REQUIRE(r.raw_sum == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(r.score == 1);
}

TEST_CASE("a negated sentiment word flips the mention") {
    auto r = attribute_sentiment(toks({"screen", "not", "good"}), {{0, 1}}, kLex, kNeg);
    REQUIRE(r.raw_sum == Catch::Approx(-0.5).margin(1e-12));
    REQUIRE(r.score == -1);
}

TEST_CASE("no lexicon hits means a neutral mention") {
    auto r = attribute_sentiment(toks({"screen", "is", "is", "fine"}), {{0, 1}}, kLex, kNeg);
    REQUIRE(r.raw_sum == 0.0);
    REQUIRE(r.score == 0);
}

TEST_CASE("adjacent words get the distance floor") {
    auto r = attribute_sentiment(toks({"good", "screen"}), {{1, 1}}, kLex, kNeg);
    REQUIRE(r.raw_sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("distance counts from the nearest attribute occurrence") {
    // occurrences at 0 and 4; "good" at 5 is distance 1 from the second
    auto t = toks({"screen", "is", "a", "fine", "screen", "good"});
    auto r = attribute_sentiment(t, {{0, 1}, {4, 1}}, kLex, kNeg);
    REQUIRE(r.raw_sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("phrase spans measure from their closest edge") {
    // span {1,2} covers tokens 1..2, so "good" at 4 is 2 away
    auto t = toks({"the", "battery", "life", "is", "good"});
    auto r = attribute_sentiment(t, {{1, 2}}, kLex, kNeg);
    REQUIRE(r.raw_sum == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("flipping the lexicon negates every raw sum exactly") {
    SentimentLexicon flipped;
    for (const auto& [w, so] : kLex) flipped[w] = -so;
    Rng rng(321);
    std::vector<std::string> pool{"screen", "is", "good", "bad", "not", "very", "the"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<TaggedToken> t;
        std::size_t n = 3 + rng.below(10);
        for (std::size_t i = 0; i < n; ++i) {
            t.push_back({pool[rng.below(pool.size())], "x", i});
        }
        Span span{rng.below(n), 1};
        auto plus = attribute_sentiment(t, {span}, kLex, kNeg);
        auto minus = attribute_sentiment(t, {span}, flipped, kNeg);
        REQUIRE(minus.raw_sum == -plus.raw_sum);
        REQUIRE(minus.score == -plus.score);
    }
}

TEST_CASE("moving a sentiment word away never strengthens it") {
    double prev = 2;
    for (std::size_t gap = 1; gap <= 8; ++gap) {
        std::vector<TaggedToken> t;
        t.push_back({"screen", "n", 0});
        for (std::size_t i = 0; i < gap; ++i) t.push_back({"pad", "x", t.size()});
        t.push_back({"good", "a", t.size()});
        auto r = attribute_sentiment(t, {{0, 1}}, kLex, kNeg);
        REQUIRE(std::abs(r.raw_sum) <= prev + 1e-12);
        prev = std::abs(r.raw_sum);
    }
}

TEST_CASE("double negation cancels") {
    auto single = attribute_sentiment(toks({"screen", "pad", "not", "good"}), {{0, 1}}, kLex, kNeg);
    auto twice = attribute_sentiment(toks({"screen", "not", "not", "good"}), {{0, 1}}, kLex, kNeg);
    REQUIRE(single.score == -1);
    REQUIRE(twice.score == 1);
    REQUIRE(twice.raw_sum > 0);
}

TEST_CASE("raw sums respect the harmonic bound") {
    Rng rng(17);
    std::vector<std::string> pool{"good", "bad", "not", "pad", "very"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TaggedToken> t{{"screen", "n", 0}};
        std::size_t n = 1 + rng.below(12);
        for (std::size_t i = 0; i < n; ++i) t.push_back({pool[rng.below(pool.size())], "x", t.size()});
        Span span{0, 1};
        double bound = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!kLex.count(t[k].word)) continue;
            bound += 1.0 / std::max<std::size_t>(detail::span_distance(k, span), 1);
        }
        auto r = attribute_sentiment(t, {span}, kLex, kNeg);
        REQUIRE(std::abs(r.raw_sum) <= bound + 1e-12);
    }
}

TEST_CASE("sentence scope ignores sentiment outside the attribute's sentence") {
    auto t = toks({"screen", "is", "good", ".", "camera", "is", "bad"});
    auto whole = attribute_sentiment(t, {{0, 1}}, kLex, kNeg, false);
    REQUIRE(whole.raw_sum == Catch::Approx(0.5 - 1.0 / 6).margin(1e-12));
    auto scoped = attribute_sentiment(t, {{0, 1}}, kLex, kNeg, true);
    REQUIRE(scoped.raw_sum == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("one review yields one scored mention per attribute") {
    ReviewRecord rec;
    rec.id = "r1";
    rec.interval_days = 4;
    rec.tokens = toks({"battery", "pad", "battery", "is", "good"});
    std::vector<Mention> mentions{{3, "battery", 0}, {3, "battery", 2}};
    auto scored = score_mentions(rec, mentions, kLex, kNeg);
    REQUIRE(scored.size() == 1);
    REQUIRE(scored[0].review_id == "r1");
    REQUIRE(scored[0].aspect_id == 3);
    REQUIRE(scored[0].ti == 4);
    // nearest occurrence is index 2, two tokens from "good"
    REQUIRE(scored[0].raw_sum == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(scored[0].score == 1);
}

TEST_CASE("distinct attributes in one review are scored separately") {
    ReviewRecord rec;
    rec.id = "r2";
    rec.tokens = toks({"screen", "good", "pad", "battery", "bad"});
    std::vector<Mention> mentions{{1, "screen", 0}, {2, "battery", 3}};
    auto scored = score_mentions(rec, mentions, kLex, kNeg);
    REQUIRE(scored.size() == 2);
    REQUIRE(scored[0].attribute == "screen");
    REQUIRE(scored[1].attribute == "battery");
    // both words hit both attributes; only the balance differs
    REQUIRE(scored[0].raw_sum == Catch::Approx(1.0 - 1.0 / 4).margin(1e-12));
    REQUIRE(scored[1].raw_sum == Catch::Approx(1.0 / 2 - 1.0).margin(1e-12));
}

TEST_CASE("aspect series average the non-neutral scores") {
    std::vector<MentionSentiment> scored{
        {"a", 1, "screen", 5, 1, 0.5},
        {"b", 1, "screen", 5, 1, 0.25},
        {"c", 1, "screen", 5, -1, -0.125},
    };
    auto series = aspect_sentiment_series(scored);
    REQUIRE(series.at(1).mean.at(5) == Catch::Approx(1.0 / 3).margin(1e-12));
    REQUIRE(series.at(1).mentions.at(5) == 3);
}

TEST_CASE("unanimous intervals hit the bound") {
    std::vector<MentionSentiment> scored{
        {"a", 2, "x", 0, 1, 1},
        {"b", 2, "x", 0, 1, 1},
    };
    auto series = aspect_sentiment_series(scored);
    REQUIRE(series.at(2).mean.at(0) == 1.0);
}

TEST_CASE("neutral-only intervals carry a count but no mean") {
    std::vector<MentionSentiment> scored{
        {"a", 1, "x", 3, 0, 0},
        {"b", 1, "x", 3, 0, 0},
        {"c", 1, "x", 9, -1, -0.5},
    };
    auto series = aspect_sentiment_series(scored);
    REQUIRE(series.at(1).mentions.at(3) == 2);
    REQUIRE(series.at(1).mean.count(3) == 0);
    REQUIRE(series.at(1).mean.at(9) == -1.0);
}

TEST_CASE("series means stay within the unit interval") {
    Rng rng(55);
    std::vector<MentionSentiment> scored;
    for (int i = 0; i < 500; ++i) {
        int score = static_cast<int>(rng.below(3)) - 1;
        scored.push_back({"r" + std::to_string(i), static_cast<int>(rng.below(4)),
                          "x", static_cast<int>(rng.below(10)), score,
                          static_cast<double>(score)});
    }
    for (const auto& [id, s] : aspect_sentiment_series(scored)) {
        for (const auto& [ti, mean] : s.mean) {
            REQUIRE(mean >= -1.0);
            REQUIRE(mean <= 1.0);
        }
    }
}

TEST_CASE("the mention dump is a plain audit csv") {
    std::vector<MentionSentiment> scored{{"r1", 2, "battery life", 7, -1, -0.625}};
    auto csv = mention_sentiment_csv(scored);
    REQUIRE(csv == "review_id,aspect_id,attribute,ti,score,raw_sum\n"
                   "r1,2,battery life,7,-1,-0.625\n");
}
