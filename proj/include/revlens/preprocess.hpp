#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace revlens {

/// One token of a segmented review text.
struct TaggedToken {
    std::string word;
    std::string pos;
    std::size_t index = 0; // position in the token stream

    friend bool operator==(const TaggedToken& a, const TaggedToken& b) {
        return a.word == b.word && a.pos == b.pos && a.index == b.index;
    }
};

/// Word -> part-of-speech tag. Longest-match segmentation scans keys by
/// code-point length, so the maximum key length is tracked on insert.
class Dictionary {
public:
    void add(std::string word, std::string tag) {
        max_len_ = std::max(max_len_, codepoint_length(word));
        entries_[std::move(word)] = std::move(tag);
    }

    const std::string* find(const std::string& word) const {
        auto it = entries_.find(word);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t max_codepoints() const { return max_len_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    static std::size_t codepoint_length(std::string_view s) {
        std::size_t n = 0;
        for (unsigned char ch : s) {
            if ((ch & 0xC0) != 0x80) ++n;
        }
        return n;
    }

private:
    std::unordered_map<std::string, std::string> entries_;
    std::size_t max_len_ = 0;
};

/// A part-of-speech tag counts as nominal when it starts with 'n'
/// ("n", "nz", "ng", ...).
inline bool is_noun(std::string_view tag) {
    return !tag.empty() && tag.front() == 'n';
}

/// Byte offsets of each code-point start, plus a final end sentinel.
inline std::vector<std::size_t> codepoint_offsets(std::string_view text) {
    std::vector<std::size_t> offs;
    offs.reserve(text.size() + 1);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            offs.push_back(i);
        }
    }
    offs.push_back(text.size());
    return offs;
}

/// Greedy longest-match segmentation over code points.
///
/// At each position the longest substring present in either dictionary is
/// taken; when both know a word of that length the user dictionary's tag
/// wins. A position matching nothing becomes a single code point tagged
/// "x". Concatenating the produced words always reproduces the input.
inline std::vector<TaggedToken> tokenize(std::string_view text,
                                         const Dictionary& base,
                                         const Dictionary& user) {
    std::vector<TaggedToken> out;
    const auto offs = codepoint_offsets(text);
    const std::size_t n_cp = offs.size() - 1;
    const std::size_t max_len = std::max(base.max_codepoints(), user.max_codepoints());

    std::size_t pos = 0;
    std::string probe;
    while (pos < n_cp) {
        std::size_t take = 0;
        const std::string* tag = nullptr;
        std::size_t limit = std::min(max_len, n_cp - pos);
        for (std::size_t len = limit; len >= 1 && !tag; --len) {
            probe.assign(text.substr(offs[pos], offs[pos + len] - offs[pos]));
            if (const auto* t = user.find(probe)) {
                tag = t;
            } else if (const auto* t2 = base.find(probe)) {
                tag = t2;
            }
            if (tag) take = len;
        }
        if (!tag) {
            take = 1;
            out.push_back({std::string(text.substr(offs[pos], offs[pos + 1] - offs[pos])),
                           "x", out.size()});
        } else {
            out.push_back({std::string(text.substr(offs[pos], offs[pos + take] - offs[pos])),
                           *tag, out.size()});
        }
        pos += take;
    }
    return out;
}

} // namespace revlens
