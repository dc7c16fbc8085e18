#pragma once

#include <map>
#include <string>
#include <vector>

#include "segbench/corpus.hpp"

namespace segbench {

enum class EntityType { Person, Location, Date, Group };

const char* entity_type_name(EntityType t);

// One surface occurrence of an entity.  Offsets count code points into the
// document's sentences joined by single '\n' characters, [start, end).
struct Mention {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;
};

// All mentions of one entity.  The id follows <doc_id><type><ordinal>,
// e.g. A21person1; ordinals need not be contiguous.
struct EntityRecord {
    std::string entity_id;
    EntityType type = EntityType::Person;
    std::vector<Mention> mentions;
};

struct AnnotationSet {
    std::string doc_id;
    std::vector<EntityRecord> entities;

    bool empty() const { return entities.empty(); }
};

// Identifier scanning.  A token is an entity identifier when it is a
// maximal word-character run of the shape <prefix><type><digits> with a
// non-empty prefix, i.e. what the pattern
//     \b\w+?(person|location|date|group)[0-9]+\b
// matches.  This predicate is the single authority on identifier-hood for
// every later stage (stoplist and stemmer exemptions, statistics).
bool is_entity_identifier(const std::string& token);

// All identifier occurrences in a text, as [start, end) byte ranges.
std::vector<std::pair<std::size_t, std::size_t>> find_entity_identifiers(
    const std::string& text);

// Reads a standoff annotation file: one mention per line,
// doc_id<TAB>entity_id<TAB>type<TAB>start<TAB>end<TAB>surface.
// All rows must share one doc_id; entity ids must embed that doc_id and
// their type name; spans of any two mentions may not overlap; the surface
// column must be exactly end - start code points long.  Violations throw
// with the file name and line number.
AnnotationSet parse_standoff(const std::string& path);

// Replaces every mention span with its entity id, right to left inside
// each sentence so earlier offsets stay valid.  Sentence count and
// paragraph structure are preserved; a span that crosses a sentence break
// or whose document slice differs from the recorded surface (e.g. when a
// document that was already substituted is run again) is an error.
SourceDocument substitute_entities(const SourceDocument& doc, const AnnotationSet& ann);

// Identifier-occurrence statistics over text units (documents, segments).
// Each unit is scanned with find_entity_identifiers; mean carries two
// decimals, matching how the tables downstream are printed.
struct NeStats {
    long min_per_unit = 0;
    long max_per_unit = 0;
    double mean_per_unit = 0.0;
    std::map<std::string, long> per_type_total;
};

NeStats ne_stats(const std::vector<std::vector<std::string>>& units);

// Convenience: annotations for every document of a pool.  `dir` holds one
// <doc_id>.tsv per annotated document; documents without a file get an
// empty AnnotationSet.
std::map<std::string, AnnotationSet> load_annotations(
    const std::string& dir, const std::vector<SourceDocument>& pool);

// Built-in closed-class English pronoun forms, lowercased.  A mention
// whose lowercased surface is in this set is treated as a pronoun when
// splitting direct mentions from coreference-only ones.
const std::vector<std::string>& english_pronouns();

// True when the mention surface is a pronoun form (from `pronouns`,
// lowercased comparison).
bool is_pronoun_mention(const std::string& surface,
                        const std::vector<std::string>& pronouns);

// Copy of `ann` with pronoun mentions removed; entities that lose all
// their mentions are kept with an empty mention list.
AnnotationSet drop_pronoun_mentions(const AnnotationSet& ann,
                                    const std::vector<std::string>& pronouns);

} // namespace segbench
