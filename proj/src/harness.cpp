#include "segbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "segbench/annotate.hpp"
#include "segbench/corpus.hpp"
#include "segbench/metrics.hpp"
#include "segbench/rng.hpp"

namespace fs = std::filesystem;

namespace segbench {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kVariantOrder = {"raw", "ne_only", "ne_plus_coref"};

int variant_rank(const std::string& v) {
    const auto it = std::find(kVariantOrder.begin(), kVariantOrder.end(), v);
    return it == kVariantOrder.end() ? static_cast<int>(kVariantOrder.size())
                                     : static_cast<int>(it - kVariantOrder.begin());
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& value, const std::string& where) {
    if (value == "true" || value == "yes" || value == "1")
        return true;
    if (value == "false" || value == "no" || value == "0")
        return false;
    throw std::runtime_error(where + ": expected a boolean, got '" + value + "'");
}

long parse_int(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected a number, got '" + value + "'");
    }
}

// Per-(variant, algorithm) outcome of one sample.
struct SampleScore {
    MetricReport report;
    std::vector<int> boundaries;
    int total_units = 0;
};

struct SampleResult {
    bool failed = false;
    std::string error;
    // indexed [variant][algorithm] following the config order.
    std::vector<std::vector<SampleScore>> scores;
    BoundaryRecord reference;
};

Segmentation run_algorithm(const AlgorithmSpec& spec, const TokenizedText& text,
                           const SimilarityMatrix* sim) {
    if (spec.name == "c99")
        return segment_c99(rank_transform(*sim, spec.options.rank_mask), spec.options);
    if (spec.name == "u00")
        return segment_u00(text, spec.options);
    if (spec.name == "dp_length")
        return segment_dp_length(*sim, spec.options);
    throw std::runtime_error("unknown algorithm: " + spec.name);
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config: " + path);
    const fs::path base = fs::path(path).parent_path();
    const auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (base / p).lexically_normal().string();
    };

    ExperimentConfig cfg;
    cfg.dataset = fs::path(path).stem().string();
    bool in_algorithm = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string at = path + ":" + std::to_string(lineno);
        std::string text = trim(line);
        if (text.empty() || text[0] == '#')
            continue;
        if (text == "[algorithm]") {
            cfg.algorithms.emplace_back();
            in_algorithm = true;
            continue;
        }
        if (text.front() == '[')
            throw std::runtime_error(at + ": unknown section " + text);
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(at + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (value.empty())
            throw std::runtime_error(at + ": empty value for '" + key + "'");

        if (in_algorithm) {
            AlgorithmSpec& alg = cfg.algorithms.back();
            if (key == "name") alg.name = value;
            else if (key == "mask") alg.options.rank_mask = static_cast<int>(parse_int(value, at));
            else if (key == "auto_c") alg.options.auto_threshold_coeff = parse_real(value, at);
            else if (key == "alpha") alg.options.penalty_weight = parse_real(value, at);
            else if (key == "l0") alg.options.preferred_length = parse_real(value, at);
            else if (key == "gamma") alg.options.length_weight = parse_real(value, at);
            else if (key == "segment_count") {
                const int count = static_cast<int>(parse_int(value, at));
                alg.options.fixed_segment_count = count;
                alg.options.dp_segment_count = count;
            } else
                throw std::runtime_error(at + ": unknown algorithm key '" + key + "'");
            continue;
        }

        if (key == "pool") cfg.pool = resolve(value);
        else if (key == "annotations") cfg.annotations = resolve(value);
        else if (key == "procedure") cfg.procedure = value == "choi" ? "prefix" : value;
        else if (key == "min_len") cfg.min_len = static_cast<int>(parse_int(value, at));
        else if (key == "max_len") cfg.max_len = static_cast<int>(parse_int(value, at));
        else if (key == "segments") cfg.segments = static_cast<int>(parse_int(value, at));
        else if (key == "samples") cfg.samples = static_cast<int>(parse_int(value, at));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, at));
        else if (key == "variants") {
            std::size_t pos = 0;
            while (pos <= value.size()) {
                const auto comma = value.find(',', pos);
                const std::string v =
                    trim(value.substr(pos, comma == std::string::npos ? comma : comma - pos));
                if (!v.empty())
                    cfg.variants.push_back(v);
                if (comma == std::string::npos)
                    break;
                pos = comma + 1;
            }
        }
        else if (key == "stoplist") cfg.stoplist = resolve(value);
        else if (key == "stem") cfg.stem_tokens = parse_bool(value, at);
        else if (key == "drop_numerals") cfg.drop_numerals = parse_bool(value, at);
        else if (key == "pronouns") cfg.pronouns_file = resolve(value);
        else if (key == "dataset") cfg.dataset = value;
        else if (key == "out") cfg.out_dir = resolve(value);
        else throw std::runtime_error(at + ": unknown key '" + key + "'");
    }

    // Shape validation; file existence is checked when the run starts.
    const std::string at = path;
    if (cfg.pool.empty())
        throw std::runtime_error(at + ": missing required key 'pool'");
    if (cfg.procedure != "prefix" && cfg.procedure != "paragraph")
        throw std::runtime_error(at + ": procedure must be 'prefix' or 'paragraph'");
    if (cfg.procedure == "prefix" && (cfg.min_len < 1 || cfg.max_len < cfg.min_len))
        throw std::runtime_error(at + ": prefix procedure needs 1 <= min_len <= max_len");
    if (cfg.segments < 1)
        throw std::runtime_error(at + ": 'segments' must be at least 1");
    if (cfg.samples < 1)
        throw std::runtime_error(at + ": 'samples' must be at least 1");
    if (cfg.variants.empty())
        cfg.variants.push_back("raw");
    for (const auto& v : cfg.variants) {
        if (variant_rank(v) >= static_cast<int>(kVariantOrder.size()))
            throw std::runtime_error(at + ": unknown variant '" + v + "'");
        if (v != "raw" && cfg.annotations.empty())
            throw std::runtime_error(at + ": variant '" + v +
                                     "' needs an 'annotations' directory");
    }
    if (std::set<std::string>(cfg.variants.begin(), cfg.variants.end()).size() !=
        cfg.variants.size())
        throw std::runtime_error(at + ": duplicate variants");
    if (cfg.algorithms.empty())
        throw std::runtime_error(at + ": at least one [algorithm] section is required");
    for (const auto& alg : cfg.algorithms) {
        if (alg.name != "c99" && alg.name != "u00" && alg.name != "dp_length")
            throw std::runtime_error(at + ": unknown algorithm '" + alg.name + "'");
    }
    return cfg;
}

int configured_thread_count() {
    if (const char* env = std::getenv("SEGBENCH_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    const std::vector<SourceDocument> pool = load_pool(cfg.pool);

    // Variant pools share sentence structure with the raw pool, so the
    // provenance recorded at generation time addresses all of them.
    const bool wants_entities =
        std::any_of(cfg.variants.begin(), cfg.variants.end(),
                    [](const std::string& v) { return v != "raw"; });
    std::vector<std::string> pronouns = english_pronouns();
    if (!cfg.pronouns_file.empty()) {
        pronouns.clear();
        for (const auto& p : load_stoplist(cfg.pronouns_file))
            pronouns.push_back(p);
    }

    std::map<std::string, std::map<std::string, SourceDocument>> variant_docs;
    if (wants_entities) {
        const auto annotations = load_annotations(cfg.annotations, pool);
        for (const auto& doc : pool) {
            const AnnotationSet& ann = annotations.at(doc.doc_id);
            for (const auto& variant : cfg.variants) {
                if (variant == "ne_only")
                    variant_docs[variant][doc.doc_id] =
                        substitute_entities(doc, drop_pronoun_mentions(ann, pronouns));
                else if (variant == "ne_plus_coref")
                    variant_docs[variant][doc.doc_id] = substitute_entities(doc, ann);
            }
        }
    }
    std::map<std::string, const SourceDocument*> raw_docs;
    for (const auto& doc : pool)
        raw_docs[doc.doc_id] = &doc;

    std::set<std::string> stoplist;
    if (!cfg.stoplist.empty())
        stoplist = load_stoplist(cfg.stoplist);
    TokenizeOptions token_opts;
    token_opts.drop_numerals = cfg.drop_numerals;

    std::vector<SampleResult> results(cfg.samples);
    std::atomic<int> next_sample{0};
    const auto worker = [&] {
        while (true) {
            const int s = next_sample.fetch_add(1);
            if (s >= cfg.samples)
                return;
            SampleResult& slot = results[s];
            try {
                const std::uint64_t sample_seed =
                    derive_stream(cfg.seed, static_cast<std::uint64_t>(s));
                Sample sample =
                    cfg.procedure == "prefix"
                        ? generate_length_sample(pool, cfg.min_len, cfg.max_len,
                                                 cfg.segments, sample_seed)
                        : generate_paragraph_sample(pool, cfg.segments, sample_seed);
                sample.sample_id = "sample_" + std::to_string(s);
                slot.reference = {sample.sample_id, "reference",
                                  sample.reference.boundaries,
                                  sample.reference.total_units};

                slot.scores.resize(cfg.variants.size());
                for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
                    const std::string& variant = cfg.variants[v];
                    std::vector<std::string> sentences;
                    if (variant == "raw") {
                        sentences = sample.sentences;
                    } else {
                        for (const auto& prov : sample.provenance) {
                            const SourceDocument& doc =
                                variant_docs.at(variant).at(prov.doc_id);
                            sentences.insert(sentences.end(),
                                             doc.sentences.begin() + prov.first_sentence,
                                             doc.sentences.begin() + prov.last_sentence);
                        }
                    }

                    TokenizedText text = tokenize(sentences, token_opts);
                    if (!stoplist.empty())
                        text = remove_stopwords(text, stoplist);
                    if (cfg.stem_tokens)
                        text = stem(text);

                    const bool needs_sim = std::any_of(
                        cfg.algorithms.begin(), cfg.algorithms.end(),
                        [](const AlgorithmSpec& a) { return a.name != "u00"; });
                    SimilarityMatrix sim;
                    if (needs_sim)
                        sim = build_similarity(text);

                    slot.scores[v].resize(cfg.algorithms.size());
                    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
                        const Segmentation hyp =
                            run_algorithm(cfg.algorithms[a], text, &sim);
                        SampleScore& score = slot.scores[v][a];
                        score.report = evaluate(hyp, sample.reference);
                        score.boundaries = hyp.boundaries;
                        score.total_units = hyp.total_units;
                    }
                }
            } catch (const std::exception& e) {
                slot.failed = true;
                slot.error = "sample " + std::to_string(s) + ": " + e.what();
            }
        }
    };

    const int thread_count = std::min(configured_thread_count(), cfg.samples);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < thread_count; ++t)
            threads.emplace_back(worker);
        for (auto& t : threads)
            t.join();
    }

    // Sample-index-order reduction keeps every mean bit-identical no
    // matter how the work was scheduled.
    ExperimentOutput out;
    for (int s = 0; s < cfg.samples; ++s) {
        if (results[s].failed) {
            out.errors.push_back(results[s].error);
            continue;
        }
        out.references.push_back(results[s].reference);
    }

    out.complete = out.errors.empty();
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
        for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
            MeanMetrics mean;
            std::vector<BoundaryRecord>& records =
                out.hypotheses[cfg.algorithms[a].name + "/" + cfg.variants[v]];
            for (int s = 0; s < cfg.samples; ++s) {
                if (results[s].failed)
                    continue;
                const SampleScore& score = results[s].scores[v][a];
                mean.precision += score.report.precision;
                mean.recall += score.report.recall;
                mean.pk += score.report.pk;
                mean.window_diff += score.report.window_diff;
                mean.k_mean += static_cast<double>(score.report.k_used);
                ++mean.samples;
                records.push_back({results[s].reference.sample_id,
                                   cfg.algorithms[a].name, score.boundaries,
                                   score.total_units});
            }
            if (mean.samples > 0) {
                const double count = static_cast<double>(mean.samples);
                mean.precision /= count;
                mean.recall /= count;
                mean.pk /= count;
                mean.window_diff /= count;
                mean.k_mean /= count;
            }
            if (mean.samples != cfg.samples)
                out.complete = false;
            out.table.rows.push_back(
                {cfg.algorithms[a].name, cfg.dataset, cfg.variants[v], mean});
        }
    }

    std::sort(out.table.rows.begin(), out.table.rows.end(),
              [](const ResultRow& x, const ResultRow& y) {
                  if (x.algorithm != y.algorithm) return x.algorithm < y.algorithm;
                  if (x.dataset != y.dataset) return x.dataset < y.dataset;
                  return variant_rank(x.variant) < variant_rank(y.variant);
              });

    for (const auto& row : out.table.rows) {
        if (row.variant == "raw")
            continue;
        const auto raw = std::find_if(
            out.table.rows.begin(), out.table.rows.end(), [&](const ResultRow& r) {
                return r.algorithm == row.algorithm && r.dataset == row.dataset &&
                       r.variant == "raw";
            });
        if (raw == out.table.rows.end())
            continue;
        out.table.deltas_vs_raw.push_back(
            {row.algorithm, row.dataset, row.variant,
             row.metrics.precision - raw->metrics.precision,
             row.metrics.recall - raw->metrics.recall,
             row.metrics.pk - raw->metrics.pk,
             row.metrics.window_diff - raw->metrics.window_diff});
    }
    return out;
}

ResultTable import_external(const std::string& boundary_file,
                            const std::string& reference_file,
                            const std::string& dataset,
                            std::vector<std::string>& errors) {
    std::vector<std::string> ref_errors;
    const auto refs = read_boundary_file(reference_file, &ref_errors);
    for (const auto& e : ref_errors)
        errors.push_back(reference_file + ": " + e);
    std::map<std::string, const BoundaryRecord*> by_id;
    for (const auto& r : refs)
        by_id[r.sample_id] = &r;

    std::vector<std::string> hyp_errors;
    const auto hyps = read_boundary_file(boundary_file, &hyp_errors);
    for (const auto& e : hyp_errors)
        errors.push_back(boundary_file + ": " + e);

    // Group by algorithm label, preserving first-appearance order.
    std::vector<std::string> algorithms;
    std::map<std::string, std::vector<const BoundaryRecord*>> grouped;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& h : hyps) {
        const auto ref = by_id.find(h.sample_id);
        if (ref == by_id.end()) {
            errors.push_back(boundary_file + ": unknown sample id '" + h.sample_id + "'");
            continue;
        }
        if (h.total_units != ref->second->total_units) {
            errors.push_back(boundary_file + ": sample '" + h.sample_id + "' has n = " +
                             std::to_string(h.total_units) + " but the reference has n = " +
                             std::to_string(ref->second->total_units));
            continue;
        }
        if (!seen.insert({h.algorithm, h.sample_id}).second) {
            errors.push_back(boundary_file + ": duplicate record for sample '" +
                             h.sample_id + "' and algorithm '" + h.algorithm + "'");
            continue;
        }
        if (grouped.find(h.algorithm) == grouped.end())
            algorithms.push_back(h.algorithm);
        grouped[h.algorithm].push_back(&h);
    }

    ResultTable table;
    for (const auto& name : algorithms) {
        MeanMetrics mean;
        for (const BoundaryRecord* h : grouped[name]) {
            const BoundaryRecord& ref = *by_id.at(h->sample_id);
            const Segmentation hyp_seg(h->total_units, h->boundaries);
            const Segmentation ref_seg(ref.total_units, ref.boundaries);
            const MetricReport report = evaluate(hyp_seg, ref_seg);
            mean.precision += report.precision;
            mean.recall += report.recall;
            mean.pk += report.pk;
            mean.window_diff += report.window_diff;
            mean.k_mean += static_cast<double>(report.k_used);
            ++mean.samples;
        }
        if (mean.samples > 0) {
            const double count = static_cast<double>(mean.samples);
            mean.precision /= count;
            mean.recall /= count;
            mean.pk /= count;
            mean.window_diff /= count;
            mean.k_mean /= count;
        }
        table.rows.push_back({name, dataset, "external", mean});
    }
    return table;
}

namespace {

std::string percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value * 100.0);
    return buf;
}

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

} // namespace

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write: " + path);
    out << "algorithm,dataset,variant,precision,recall,pk,window_diff,k_mean,samples\n";
    for (const auto& row : table.rows) {
        out << row.algorithm << ',' << row.dataset << ',' << row.variant << ','
            << percent(row.metrics.precision) << ',' << percent(row.metrics.recall) << ','
            << percent(row.metrics.pk) << ',' << percent(row.metrics.window_diff) << ','
            << fixed2(row.metrics.k_mean) << ',' << row.metrics.samples << "\n";
    }
}

void emit_json(const ResultTable& table, const std::string& path) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"algorithm", row.algorithm},
                        {"dataset", row.dataset},
                        {"variant", row.variant},
                        {"precision", row.metrics.precision},
                        {"recall", row.metrics.recall},
                        {"pk", row.metrics.pk},
                        {"window_diff", row.metrics.window_diff},
                        {"k_mean", row.metrics.k_mean},
                        {"samples", row.metrics.samples}});
    }
    json deltas = json::array();
    for (const auto& d : table.deltas_vs_raw) {
        deltas.push_back({{"algorithm", d.algorithm},
                          {"dataset", d.dataset},
                          {"variant", d.variant},
                          {"precision", d.precision},
                          {"recall", d.recall},
                          {"pk", d.pk},
                          {"window_diff", d.window_diff}});
    }
    json doc = {{"rows", rows}, {"deltas_vs_raw", deltas}};
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace segbench
