#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segbench/segmentation.hpp"

namespace segbench {

// One pool document: sentences plus the paragraph structure of the source
// file.  Paragraphs are [first, last) sentence index ranges; every sentence
// belongs to exactly one paragraph.
struct SourceDocument {
    std::string doc_id;
    std::string category;                         // e.g. "A", "J", or an author name
    std::vector<std::string> sentences;
    std::vector<std::pair<int, int>> paragraphs;  // half-open sentence ranges

    int sentence_count() const { return static_cast<int>(sentences.size()); }
    int paragraph_count() const { return static_cast<int>(paragraphs.size()); }
};

// Provenance of one generated segment: which document it came from and the
// half-open sentence range that was copied.
struct SegmentProvenance {
    std::string doc_id;
    int first_sentence = 0;
    int last_sentence = 0;  // exclusive
};

// A concatenated sample: flattened sentences, the reference segmentation,
// per-segment provenance, and the seed the generator ran with.
struct Sample {
    std::string sample_id;
    std::vector<std::string> sentences;
    Segmentation reference;
    std::vector<SegmentProvenance> provenance;
    std::uint64_t seed = 0;
};

// Loads a document pool.  `path` is either a directory (every *.txt file
// becomes a document; doc_id is the file name without extension; category
// is the leading alphabetic prefix of the doc_id) or a manifest file with
// one tab-separated record per line: doc_id, category, path relative to the
// manifest.  Lines starting with '#' and blank lines are ignored.
// Throws on unreadable files, documents without sentences, duplicate ids,
// and empty pools.
std::vector<SourceDocument> load_pool(const std::string& path);

// Draws `segment_count` segments.  For each one: a document uniformly from
// the pool (with replacement), a target length n uniformly from
// [min_len, max_len], then the first min(n, document length) sentences.
// Every pool document must have at least min_len sentences so that segment
// lengths stay within the requested bounds.  Segment i draws from the
// substream derive_stream(seed, i): first the document index, then n.
Sample generate_length_sample(const std::vector<SourceDocument>& pool,
                              int min_len, int max_len, int segment_count,
                              std::uint64_t seed);

// Draws `segment_count` segments of whole paragraphs.  For each one: an
// author (pool category) uniformly among the distinct authors sorted by
// name, a document uniformly among that author's, then with Z = its
// paragraph count a length l uniformly from 1 < l < Z and a 1-based start
// m uniformly from 1 < m < Z - l; the segment is paragraphs m..m+l
// inclusive, so the first and last paragraph of a document never appear.
// A draw whose constraints cannot be met (Z too small for any valid l or
// m) is redrawn from scratch; after 100 failed draws for one segment the
// generator gives up with an error.  Segment i uses substream
// derive_stream(seed, i) with draw order author, document, l, m.
Sample generate_paragraph_sample(const std::vector<SourceDocument>& pool,
                                 int segment_count, std::uint64_t seed);

// Sample text serialization: one sentence per line with a line of exactly
// "==========" before the first sentence, between segments, and after the
// last sentence.
void write_sample_file(const Sample& sample, const std::string& path);

// Parses a file in the same convention.  The reference segmentation is
// recovered from the separator lines; sample_id is the file name without
// extension.  Throws on files that do not start with the separator, have
// empty segments, or contain no sentences.
Sample read_sample_file(const std::string& path);

} // namespace segbench
