#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segbench/segment.hpp"

namespace segbench {

struct AlgorithmSpec {
    std::string name;  // c99 | u00 | dp_length
    SegmenterOptions options;
};

// Parsed experiment description.  Paths are resolved relative to the
// config file they came from.
struct ExperimentConfig {
    std::string pool;
    std::string annotations;    // empty when no annotation files are used
    std::string procedure;      // "prefix" | "paragraph"
    int min_len = 0;            // prefix procedure only
    int max_len = 0;
    int segments = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> variants;  // raw | ne_only | ne_plus_coref
    std::string stoplist;       // empty = keep everything
    bool stem_tokens = true;
    bool drop_numerals = false;
    std::string pronouns_file;  // empty = built-in English list
    std::string dataset;
    std::string out_dir;
    std::vector<AlgorithmSpec> algorithms;
};

// Reads the flat key = value format with repeated [algorithm] sections
// (keys documented in the README).  Shape problems (unknown keys, missing
// required fields, entity variants without an annotations directory) are
// reported with file and line before anything is computed.
ExperimentConfig parse_experiment_config(const std::string& path);

struct MeanMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double pk = 0.0;
    double window_diff = 0.0;
    double k_mean = 0.0;
    int samples = 0;
};

struct ResultRow {
    std::string algorithm;
    std::string dataset;
    std::string variant;
    MeanMetrics metrics;
};

// Exact per-metric differences against the same algorithm's raw variant.
struct DeltaRow {
    std::string algorithm;
    std::string dataset;
    std::string variant;
    double precision = 0.0;
    double recall = 0.0;
    double pk = 0.0;
    double window_diff = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<DeltaRow> deltas_vs_raw;
};

struct ExperimentOutput {
    ResultTable table;
    std::vector<BoundaryRecord> references;  // one per generated sample
    // key "algorithm/variant" -> one record per sample.
    std::map<std::string, std::vector<BoundaryRecord>> hypotheses;
    std::vector<std::string> errors;  // per-sample failures, empty when clean
    bool complete = false;            // every cell aggregated every sample
};

// Runs the full experiment: generates samples from the master seed (one
// derived stream per sample), materializes the requested variants from the
// same provenance so every variant shares the reference segmentation,
// preprocesses, segments, scores and aggregates in sample-index order.
// Work is spread over min(SEGBENCH_THREADS, sample count) workers; the
// reduction order makes the output independent of the thread count.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Scores externally produced boundary files against reference boundaries
// (both in the JSON-lines format).  Valid records are grouped by their
// algorithm field; unknown sample ids, duplicate records and unit-count
// mismatches are reported in `errors` and skipped.
ResultTable import_external(const std::string& boundary_file,
                            const std::string& reference_file,
                            const std::string& dataset,
                            std::vector<std::string>& errors);

// Emitters.  CSV prints the four metrics as percentages with two
// decimals; JSON keeps full precision and carries the delta rows.
void emit_csv(const ResultTable& table, const std::string& path);
void emit_json(const ResultTable& table, const std::string& path);

// Worker cap from the environment (SEGBENCH_THREADS), falling back to the
// hardware concurrency; always at least 1.
int configured_thread_count();

} // namespace segbench
