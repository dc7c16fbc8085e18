#pragma once

#include <optional>
#include <string>
#include <vector>

#include "segbench/preprocess.hpp"
#include "segbench/segmentation.hpp"

namespace segbench {

// Dense symmetric matrices indexed by sentence.
using SimilarityMatrix = std::vector<std::vector<double>>;
using RankMatrix = std::vector<std::vector<double>>;

struct SegmenterOptions {
    // Rank-and-split segmenter.
    int rank_mask = 11;                 // odd window size of the rank filter
    double auto_threshold_coeff = 1.2;  // c in the mu + c*sigma stopping rule
    std::optional<int> fixed_segment_count;

    // Likelihood segmenter.
    double penalty_weight = 1.0;        // alpha on the per-boundary penalty

    // Length-model segmenter.
    double preferred_length = 1.0;      // target segment length
    double length_weight = 1.0;         // gamma on the squared length deviation
    std::optional<int> dp_segment_count;
};

// Cosine similarity between the sparse sentence count vectors.  The
// diagonal is 1 by convention; a sentence with no tokens has similarity 0
// with every other sentence.  All entries lie in [0, 1].
SimilarityMatrix build_similarity(const TokenizedText& text);

// Rank filter: each cell becomes the fraction of its mask x mask
// neighborhood (clipped at the matrix edge, the cell itself excluded from
// the denominator) holding a strictly smaller similarity.  A clipped
// window of a single cell yields 0.  `mask` must be odd and positive.
RankMatrix rank_transform(const SimilarityMatrix& sim, int mask);

// Rank-and-split segmentation: repeatedly insert the boundary that
// maximizes the summed within-block density mass(b)/area(b) over the rank
// matrix.  With fixed_segment_count set, exactly that many segments are
// produced (an error if more than n); otherwise splitting continues to
// completion and is cut at the first step whose density gain fails to
// exceed mean + auto_threshold_coeff * stddev of all gains, so inputs
// with a flat gain profile (e.g. all-identical sentences) stay unsplit.
// Ties prefer the leftmost boundary.
Segmentation segment_c99(const RankMatrix& rank, const SegmenterOptions& opts);

// Likelihood segmentation.  The cost of a segmentation is
//     sum over segments of sum over tokens w of
//         -log((count of w within its segment + 1) / (segment tokens + V))
//     + penalty_weight * boundaries * log(total tokens)
// with V the vocabulary size of the whole input.  Minimized exactly by
// shortest path over the sentence gaps; ties prefer fewer boundaries,
// then the lexicographically smallest boundary list.
//
// Cost arithmetic is pinned so independent evaluations agree bitwise:
// token terms accumulate in sentence-then-token order, each as
// -log((c + 1.0) / (T + V)); segment costs fold left to right with the
// boundary penalty added before each non-first segment.  An input with
// no tokens at all has cost 0 everywhere and falls back to the tie-break.
Segmentation segment_u00(const TokenizedText& text, const SegmenterOptions& opts);

// Length-model segmentation over a similarity matrix.  Segment cost is
//     length_weight * (len - preferred_length)^2
//     - (sum of S[i][j] over pairs i < j inside the segment) / len
// summed over segments (pair sums accumulate row-major; the same folding
// rules as above apply).  With dp_segment_count set the segment count is
// exact (an error if more than n).  Ties prefer fewer boundaries, then
// the lexicographically smallest list.
Segmentation segment_dp_length(const SimilarityMatrix& sim,
                               const SegmenterOptions& opts);

// Reference searches: enumerate all 2^(n-1) segmentations under the same
// pinned cost models and tie-breaks.  Deliberately written apart from the
// dynamic programs so the two routes stay independent.  Refuse n > 16.
Segmentation segment_exhaustive_u00(const TokenizedText& text,
                                    const SegmenterOptions& opts);
Segmentation segment_exhaustive_length(const SimilarityMatrix& sim,
                                       const SegmenterOptions& opts);

// Cost of a given segmentation under each model, using the pinned
// arithmetic; lets tests compare optima found by different routes.
double u00_cost(const TokenizedText& text, const std::vector<int>& boundaries,
                const SegmenterOptions& opts);
double length_cost(const SimilarityMatrix& sim, const std::vector<int>& boundaries,
                   const SegmenterOptions& opts);

// One line per sample: {"sample_id": ..., "algorithm": ..., "boundaries":
// [...], "n": ...}.
struct BoundaryRecord {
    std::string sample_id;
    std::string algorithm;
    std::vector<int> boundaries;
    int total_units = 0;
};

void write_boundary_file(const std::string& path,
                         const std::vector<BoundaryRecord>& records);

// Reads a boundary file.  With `errors` given, malformed lines are
// reported there ("line N: reason") and skipped; without it the first
// malformed line throws.
std::vector<BoundaryRecord> read_boundary_file(const std::string& path,
                                               std::vector<std::string>* errors = nullptr);

} // namespace segbench
