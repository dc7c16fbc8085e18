#include "segbench/annotate.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "segbench/utf8.hpp"

namespace fs = std::filesystem;

namespace segbench {

namespace {

constexpr std::array<const char*, 4> kTypeNames = {"person", "location", "date", "group"};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string lower_ascii(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Checks one maximal word-character run against the identifier shape:
// non-empty prefix, then a type name, then one or more digits running to
// the end of the run.
bool run_is_identifier(const std::string& text, std::size_t begin, std::size_t end) {
    std::size_t digits = end;
    while (digits > begin && std::isdigit(static_cast<unsigned char>(text[digits - 1])))
        --digits;
    if (digits == end || digits == begin)
        return false;
    for (const char* name : kTypeNames) {
        const std::size_t len = std::char_traits<char>::length(name);
        if (digits - begin > len && text.compare(digits - len, len, name) == 0)
            return true;
    }
    return false;
}

struct ParsedId {
    std::string doc_id;
    EntityType type;
};

// Splits <doc_id><type><ordinal>; returns false when the id does not have
// that shape or the doc_id part is not letters followed by optional digits.
bool parse_entity_id(const std::string& id, ParsedId& out) {
    std::size_t digits = id.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(id[digits - 1])))
        --digits;
    if (digits == id.size())
        return false;
    for (std::size_t t = 0; t < kTypeNames.size(); ++t) {
        const std::string name = kTypeNames[t];
        if (digits <= name.size() || id.compare(digits - name.size(), name.size(), name) != 0)
            continue;
        const std::string doc = id.substr(0, digits - name.size());
        std::size_t i = 0;
        while (i < doc.size() && std::isalpha(static_cast<unsigned char>(doc[i])))
            ++i;
        if (i == 0)
            continue;
        while (i < doc.size() && std::isdigit(static_cast<unsigned char>(doc[i])))
            ++i;
        if (i != doc.size())
            continue;
        out.doc_id = doc;
        out.type = static_cast<EntityType>(t);
        return true;
    }
    return false;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        cols.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
        if (tab == std::string::npos)
            break;
        pos = tab + 1;
    }
    return cols;
}

std::string joined_text(const SourceDocument& doc) {
    std::string text;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        if (i)
            text.push_back('\n');
        text += doc.sentences[i];
    }
    return text;
}

} // namespace

const char* entity_type_name(EntityType t) {
    return kTypeNames[static_cast<std::size_t>(t)];
}

bool is_entity_identifier(const std::string& token) {
    if (token.empty())
        return false;
    for (char c : token)
        if (!is_word_char(c))
            return false;
    return run_is_identifier(token, 0, token.size());
}

std::vector<std::pair<std::size_t, std::size_t>> find_entity_identifiers(
    const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && is_word_char(text[i]))
            ++i;
        if (run_is_identifier(text, begin, i))
            spans.emplace_back(begin, i);
    }
    return spans;
}

AnnotationSet parse_standoff(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open standoff file: " + path);

    AnnotationSet set;
    std::map<std::string, std::size_t> entity_index;
    // (start, end, entity_id, line) of every mention for the overlap check.
    struct SpanRow {
        std::size_t start, end;
        std::string entity_id;
        int line;
    };
    std::vector<SpanRow> spans;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const std::string at = path + ":" + std::to_string(lineno) + ": ";

        const auto cols = split_tabs(line);
        if (cols.size() != 6)
            throw std::runtime_error(at + "expected 6 tab-separated columns, got " +
                                     std::to_string(cols.size()));
        const std::string& doc_id = cols[0];
        const std::string& entity_id = cols[1];
        const std::string& type_name = cols[2];

        if (set.doc_id.empty())
            set.doc_id = doc_id;
        else if (set.doc_id != doc_id)
            throw std::runtime_error(at + "mixed doc_ids '" + set.doc_id + "' and '" +
                                     doc_id + "' in one file");

        auto type_it = std::find_if(kTypeNames.begin(), kTypeNames.end(),
                                    [&](const char* n) { return type_name == n; });
        if (type_it == kTypeNames.end())
            throw std::runtime_error(at + "unknown entity type '" + type_name + "'");
        const EntityType type =
            static_cast<EntityType>(type_it - kTypeNames.begin());

        ParsedId parsed;
        if (!parse_entity_id(entity_id, parsed) || parsed.doc_id != doc_id ||
            parsed.type != type)
            throw std::runtime_error(at + "entity id '" + entity_id +
                                     "' does not follow <doc_id><type><ordinal> for doc '" +
                                     doc_id + "' and type '" + type_name + "'");

        const auto parse_offset = [&](const std::string& s) -> std::size_t {
            if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) {
                    return std::isdigit(static_cast<unsigned char>(c));
                }))
                throw std::runtime_error(at + "offsets must be non-negative integers");
            return std::stoull(s);
        };
        const std::size_t start = parse_offset(cols[3]);
        const std::size_t end = parse_offset(cols[4]);
        if (start >= end)
            throw std::runtime_error(at + "empty or inverted span");
        const std::string& surface = cols[5];
        if (utf8_length(surface) != end - start)
            throw std::runtime_error(at + "surface '" + surface + "' is " +
                                     std::to_string(utf8_length(surface)) +
                                     " characters but the span holds " +
                                     std::to_string(end - start));

        auto [it, inserted] = entity_index.try_emplace(entity_id, set.entities.size());
        if (inserted)
            set.entities.push_back({entity_id, type, {}});
        set.entities[it->second].mentions.push_back({start, end, surface});
        spans.push_back({start, end, entity_id, lineno});
    }

    std::sort(spans.begin(), spans.end(),
              [](const SpanRow& a, const SpanRow& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].start < spans[i - 1].end)
            throw std::runtime_error(path + ": overlapping mentions '" +
                                     spans[i - 1].entity_id + "' (line " +
                                     std::to_string(spans[i - 1].line) + ") and '" +
                                     spans[i].entity_id + "' (line " +
                                     std::to_string(spans[i].line) + ")");
    }

    for (auto& entity : set.entities)
        std::sort(entity.mentions.begin(), entity.mentions.end(),
                  [](const Mention& a, const Mention& b) { return a.start < b.start; });
    return set;
}

SourceDocument substitute_entities(const SourceDocument& doc, const AnnotationSet& ann) {
    if (!ann.empty() && ann.doc_id != doc.doc_id)
        throw std::runtime_error("annotations for '" + ann.doc_id +
                                 "' applied to document '" + doc.doc_id + "'");

    // Flatten mentions and process right to left so that replacing one
    // span never shifts the offsets of those still pending.
    struct Pending {
        std::size_t start, end;
        const std::string* id;
        const std::string* surface;
    };
    std::vector<Pending> pending;
    for (const auto& entity : ann.entities)
        for (const auto& m : entity.mentions)
            pending.push_back({m.start, m.end, &entity.entity_id, &m.surface});
    std::sort(pending.begin(), pending.end(),
              [](const Pending& a, const Pending& b) { return a.start > b.start; });

    const std::string text = joined_text(doc);
    const auto byte_of = utf8_byte_index(text);
    const std::size_t total_chars = byte_of.size() - 1;

    std::string result = text;
    for (const auto& p : pending) {
        if (p.end > total_chars)
            throw std::runtime_error(doc.doc_id + ": mention '" + *p.id + "' span [" +
                                     std::to_string(p.start) + ", " + std::to_string(p.end) +
                                     ") beyond document end (" + std::to_string(total_chars) +
                                     " characters)");
        const std::size_t b0 = byte_of[p.start], b1 = byte_of[p.end];
        const std::string slice = text.substr(b0, b1 - b0);
        if (slice.find('\n') != std::string::npos)
            throw std::runtime_error(doc.doc_id + ": mention '" + *p.id +
                                     "' crosses a sentence break");
        if (slice != *p.surface)
            throw std::runtime_error(doc.doc_id + ": mention '" + *p.id +
                                     "' surface mismatch: document has '" + slice +
                                     "', annotation says '" + *p.surface + "'");
        result.replace(b0, b1 - b0, *p.id);
    }

    SourceDocument out;
    out.doc_id = doc.doc_id;
    out.category = doc.category;
    std::size_t pos = 0;
    while (true) {
        std::size_t nl = result.find('\n', pos);
        out.sentences.push_back(result.substr(pos, nl == std::string::npos ? nl : nl - pos));
        if (nl == std::string::npos)
            break;
        pos = nl + 1;
    }
    if (out.sentences.size() != doc.sentences.size())
        throw std::runtime_error(doc.doc_id + ": substitution changed the sentence count");
    out.paragraphs = doc.paragraphs;
    return out;
}

NeStats ne_stats(const std::vector<std::vector<std::string>>& units) {
    NeStats stats;
    if (units.empty())
        return stats;

    long total = 0;
    for (std::size_t u = 0; u < units.size(); ++u) {
        long count = 0;
        for (const auto& sentence : units[u]) {
            for (auto [b, e] : find_entity_identifiers(sentence)) {
                ++count;
                ParsedId parsed;
                if (parse_entity_id(sentence.substr(b, e - b), parsed))
                    ++stats.per_type_total[entity_type_name(parsed.type)];
            }
        }
        if (u == 0) {
            stats.min_per_unit = stats.max_per_unit = count;
        } else {
            stats.min_per_unit = std::min(stats.min_per_unit, count);
            stats.max_per_unit = std::max(stats.max_per_unit, count);
        }
        total += count;
    }
    const double mean = static_cast<double>(total) / static_cast<double>(units.size());
    stats.mean_per_unit = std::round(mean * 100.0) / 100.0;
    return stats;
}

std::map<std::string, AnnotationSet> load_annotations(
    const std::string& dir, const std::vector<SourceDocument>& pool) {
    if (!fs::is_directory(dir))
        throw std::runtime_error("annotation directory does not exist: " + dir);
    std::map<std::string, AnnotationSet> result;
    for (const auto& doc : pool) {
        const fs::path file = fs::path(dir) / (doc.doc_id + ".tsv");
        if (fs::exists(file)) {
            result[doc.doc_id] = parse_standoff(file.string());
        } else {
            AnnotationSet empty;
            empty.doc_id = doc.doc_id;
            result[doc.doc_id] = empty;
        }
    }
    return result;
}

const std::vector<std::string>& english_pronouns() {
    static const std::vector<std::string> forms = {
        "i",       "me",       "my",       "mine",    "myself",
        "we",      "us",       "our",      "ours",    "ourselves",
        "you",     "your",     "yours",    "yourself", "yourselves",
        "he",      "him",      "his",      "himself",
        "she",     "her",      "hers",     "herself",
        "it",      "its",      "itself",
        "they",    "them",     "their",    "theirs",  "themselves",
        "who",     "whom",     "whose",    "which",   "that",
        "this",    "these",    "those",    "one",     "oneself"};
    return forms;
}

bool is_pronoun_mention(const std::string& surface,
                        const std::vector<std::string>& pronouns) {
    const std::string lowered = lower_ascii(surface);
    return std::find(pronouns.begin(), pronouns.end(), lowered) != pronouns.end();
}

AnnotationSet drop_pronoun_mentions(const AnnotationSet& ann,
                                    const std::vector<std::string>& pronouns) {
    AnnotationSet out;
    out.doc_id = ann.doc_id;
    for (const auto& entity : ann.entities) {
        EntityRecord kept{entity.entity_id, entity.type, {}};
        for (const auto& m : entity.mentions)
            if (!is_pronoun_mention(m.surface, pronouns))
                kept.mentions.push_back(m);
        out.entities.push_back(std::move(kept));
    }
    return out;
}

} // namespace segbench
