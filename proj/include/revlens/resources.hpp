#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "revlens/preprocess.hpp"

namespace revlens {

using SentimentLexicon = std::unordered_map<std::string, int>; // word -> +1 / -1
using WordSet = std::unordered_set<std::string>;

struct EmbeddingTable {
    std::size_t dimension = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    const std::vector<double>* find(const std::string& word) const {
        auto it = vectors.find(word);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

struct EmbeddingLoad {
    EmbeddingTable table;
    std::size_t rejected_lines = 0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open: " + path.string());
    }
    return in;
}

inline void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace detail

/// TSV `word<TAB>polarity`, polarity one of +1, 1, -1. Re-stating a word
/// with the same polarity is allowed; a conflicting polarity is an error.
inline SentimentLexicon load_lexicon(const std::filesystem::path& path) {
    auto in = detail::open_or_throw(path);
    SentimentLexicon lex;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp(line);
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected word<TAB>polarity");
        }
        std::string word = line.substr(0, tab);
        std::string pol = detail::trim(line.substr(tab + 1));
        int value;
        if (pol == "+1" || pol == "1") {
            value = 1;
        } else if (pol == "-1") {
            value = -1;
        } else {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": polarity must be ±1");
        }
        auto it = lex.find(word);
        if (it != lex.end()) {
            if (it->second != value) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": conflicting polarity for \"" + word +
                                         "\" (first at line " +
                                         std::to_string(first_line[word]) + ")");
            }
            continue;
        }
        first_line[word] = line_no;
        lex.emplace(std::move(word), value);
    }
    return lex;
}

/// Overlay a supplemental lexicon; supplemental entries win on conflict.
inline SentimentLexicon merge_lexicons(SentimentLexicon base, const SentimentLexicon& supplemental) {
    for (const auto& [word, value] : supplemental) {
        base[word] = value;
    }
    return base;
}

/// One word per line; blank lines and `#` comment lines are skipped.
inline WordSet load_word_list(const std::filesystem::path& path) {
    auto in = detail::open_or_throw(path);
    WordSet words;
    std::string line;
    while (std::getline(in, line)) {
        detail::chomp(line);
        std::string w = detail::trim(line);
        if (w.empty() || w.front() == '#') continue;
        words.insert(std::move(w));
    }
    return words;
}

/// TSV `surface<TAB>tag`, one entry per line.
inline Dictionary load_dictionary(const std::filesystem::path& path) {
    auto in = detail::open_or_throw(path);
    Dictionary dict;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp(line);
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected surface<TAB>tag");
        }
        dict.add(line.substr(0, tab), detail::trim(line.substr(tab + 1)));
    }
    return dict;
}

/// Whitespace-separated text vectors: an optional `count dim` header line,
/// then `word v1 ... vd` rows. The dimension is inferred from the first data
/// row; rows of any other arity are rejected and counted. A word repeated
/// later replaces the earlier vector (with a warning).
inline EmbeddingLoad load_embeddings(const std::filesystem::path& path) {
    auto in = detail::open_or_throw(path);
    EmbeddingLoad out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp(line);
        if (line.empty()) continue;

        std::istringstream ss(line);
        std::vector<std::string> parts;
        for (std::string tok; ss >> tok;) parts.push_back(std::move(tok));
        if (parts.empty()) continue;

        if (first_content) {
            first_content = false;
            if (parts.size() == 2) {
                char* end1 = nullptr;
                char* end2 = nullptr;
                std::strtol(parts[0].c_str(), &end1, 10);
                std::strtol(parts[1].c_str(), &end2, 10);
                if (*end1 == '\0' && *end2 == '\0') {
                    continue; // header: announced count/dim are not trusted anyway
                }
            }
        }

        if (parts.size() < 2) {
            ++out.rejected_lines;
            continue;
        }
        if (out.table.dimension == 0) {
            out.table.dimension = parts.size() - 1;
        } else if (parts.size() - 1 != out.table.dimension) {
            ++out.rejected_lines;
            continue;
        }

        std::vector<double> vec;
        vec.reserve(out.table.dimension);
        bool numeric = true;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            char* end = nullptr;
            double v = std::strtod(parts[i].c_str(), &end);
            if (end == parts[i].c_str() || *end != '\0') {
                numeric = false;
                break;
            }
            vec.push_back(v);
        }
        if (!numeric) {
            ++out.rejected_lines;
            continue;
        }
        auto it = out.table.vectors.find(parts[0]);
        if (it != out.table.vectors.end()) {
            it->second = std::move(vec);
            out.warnings.push_back("duplicate vector for \"" + parts[0] + "\" at line " +
                                   std::to_string(line_no) + "; last occurrence kept");
        } else {
            out.table.vectors.emplace(std::move(parts[0]), std::move(vec));
        }
    }
    if (out.table.vectors.empty()) {
        throw std::runtime_error("empty embedding table: " + path.string());
    }
    return out;
}

} // namespace revlens
