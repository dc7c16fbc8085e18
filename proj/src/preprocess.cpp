#include "segbench/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

#include "segbench/annotate.hpp"
#include "segbench/porter.hpp"
#include "segbench/utf8.hpp"

namespace segbench {

namespace {

// Word material for tokenization: ASCII letters and digits, and code
// points above ASCII except the usual punctuation.  The exclusions cover
// the general-punctuation block (quotes, dashes, ellipsis), Latin-1
// punctuation and symbols (guillemets, middle dot, multiply and divide
// signs), and the dedicated Greek punctuation marks, which is enough for
// the scripts that actually flow through here.
bool is_token_codepoint(std::uint32_t cp) {
    if (cp < 0x80)
        return std::isalnum(static_cast<int>(cp)) != 0;
    if (cp >= 0xA0 && cp <= 0xBF) return false;   // Latin-1 punctuation/symbols
    if (cp == 0xD7 || cp == 0xF7) return false;   // multiply, divide
    if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
    if (cp == 0x374 || cp == 0x375 || cp == 0x37E) return false;  // Greek numeral signs, question mark
    if (cp == 0x384 || cp == 0x385 || cp == 0x387) return false;  // tonos marks, ano teleia
    return true;
}

std::string lower_ascii(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
    });
}

// Tokenizes the stretch between identifier matches.
void emit_plain_tokens(const std::string& piece, const TokenizeOptions& opts,
                       std::vector<std::string>& tokens,
                       std::vector<bool>& flags) {
    std::string current;
    std::size_t pos = 0;
    const auto flush = [&] {
        if (current.empty())
            return;
        std::string token = lower_ascii(current);
        current.clear();
        if (opts.drop_numerals && all_digits(token))
            return;
        tokens.push_back(token);
        flags.push_back(is_entity_identifier(tokens.back()));
    };
    while (pos < piece.size()) {
        const std::size_t start = pos;
        const std::uint32_t cp = utf8_decode(piece, pos);
        if (is_token_codepoint(cp))
            current.append(piece, start, pos - start);
        else
            flush();
    }
    flush();
}

} // namespace

void TokenizedText::finalize() {
    vocabulary.clear();
    counts.assign(sentences.size(), {});
    std::map<std::string, int> index;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        std::map<int, int> sentence_counts;
        for (const auto& token : sentences[s]) {
            auto [it, inserted] = index.try_emplace(token, static_cast<int>(vocabulary.size()));
            if (inserted)
                vocabulary.push_back(token);
            ++sentence_counts[it->second];
        }
        counts[s].assign(sentence_counts.begin(), sentence_counts.end());
    }
}

long TokenizedText::token_count() const {
    long total = 0;
    for (const auto& s : sentences)
        total += static_cast<long>(s.size());
    return total;
}

TokenizedText tokenize(const std::vector<std::string>& sentences,
                       const TokenizeOptions& opts) {
    TokenizedText text;
    text.sentences.resize(sentences.size());
    text.is_identifier.resize(sentences.size());
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        auto& tokens = text.sentences[s];
        auto& flags = text.is_identifier[s];
        const std::string& sentence = sentences[s];
        std::size_t cursor = 0;
        for (auto [begin, end] : find_entity_identifiers(sentence)) {
            emit_plain_tokens(sentence.substr(cursor, begin - cursor), opts, tokens, flags);
            tokens.push_back(sentence.substr(begin, end - begin));
            flags.push_back(true);
            cursor = end;
        }
        emit_plain_tokens(sentence.substr(cursor), opts, tokens, flags);
    }
    text.finalize();
    return text;
}

std::set<std::string> load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open stoplist: " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const std::size_t last = line.find_last_not_of(" \t\r");
        words.insert(lower_ascii(line.substr(first, last - first + 1)));
    }
    return words;
}

TokenizedText remove_stopwords(const TokenizedText& text,
                               const std::set<std::string>& stoplist) {
    TokenizedText out;
    out.sentences.resize(text.sentences.size());
    out.is_identifier.resize(text.sentences.size());
    for (std::size_t s = 0; s < text.sentences.size(); ++s) {
        for (std::size_t t = 0; t < text.sentences[s].size(); ++t) {
            if (!text.is_identifier[s][t] && stoplist.count(text.sentences[s][t]))
                continue;
            out.sentences[s].push_back(text.sentences[s][t]);
            out.is_identifier[s].push_back(text.is_identifier[s][t]);
        }
    }
    out.finalize();
    return out;
}

TokenizedText stem(const TokenizedText& text) {
    TokenizedText out;
    out.sentences.resize(text.sentences.size());
    out.is_identifier.resize(text.sentences.size());
    for (std::size_t s = 0; s < text.sentences.size(); ++s) {
        for (std::size_t t = 0; t < text.sentences[s].size(); ++t) {
            const bool id = text.is_identifier[s][t];
            out.sentences[s].push_back(id ? text.sentences[s][t]
                                          : porter_stem(text.sentences[s][t]));
            out.is_identifier[s].push_back(id);
        }
    }
    out.finalize();
    return out;
}

} // namespace segbench
