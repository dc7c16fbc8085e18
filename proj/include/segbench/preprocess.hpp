#pragma once

#include <set>
#include <string>
#include <vector>

namespace segbench {

// Token streams per sentence with a parallel identifier flag, plus the
// derived vocabulary and sparse per-sentence counts the segmenters consume.
// finalize() rebuilds vocabulary and counts; the transform functions below
// call it, so TokenizedText instances are always internally consistent.
struct TokenizedText {
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::vector<bool>> is_identifier;  // parallel to sentences

    // token -> dense index, assigned in first-appearance order (sentence
    // order, then token order), so the mapping is reproducible.
    std::vector<std::string> vocabulary;
    // per sentence: (vocabulary index, count), sorted by index.
    std::vector<std::vector<std::pair<int, int>>> counts;

    void finalize();

    int sentence_count() const { return static_cast<int>(sentences.size()); }
    long token_count() const;
};

struct TokenizeOptions {
    bool drop_numerals = false;  // drop all-digit tokens (dates, scores)
};

// Splits sentences into tokens.  Entity identifiers (see
// is_entity_identifier) are cut out first and kept verbatim with their
// flag set; the remaining text is lowercased and split into maximal runs
// of letters and digits.  Tokens that happen to match the identifier
// shape after lowercasing are flagged too, keeping the flag and the
// pattern in lockstep.  Unicode letters count as word material; common
// punctuation blocks (general punctuation, guillemets and friends) do not.
TokenizedText tokenize(const std::vector<std::string>& sentences,
                       const TokenizeOptions& opts = {});

// Loads a stoplist: one token per line, '#' starts a comment, blank lines
// ignored.  Entries are lowercased.
std::set<std::string> load_stoplist(const std::string& path);

// Removes stoplisted tokens.  Identifier tokens survive regardless of the
// list contents.
TokenizedText remove_stopwords(const TokenizedText& text,
                               const std::set<std::string>& stoplist);

// Stems every non-identifier token with porter_stem.
TokenizedText stem(const TokenizedText& text);

} // namespace segbench
