#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segbench/annotate.hpp"
#include "segbench/corpus.hpp"
#include "segbench/harness.hpp"
#include "segbench/metrics.hpp"
#include "segbench/preprocess.hpp"
#include "segbench/rng.hpp"
#include "segbench/segment.hpp"

namespace fs = std::filesystem;
using namespace segbench;

namespace {

struct PreprocessFlags {
    std::string stoplist;
    bool no_stem = false;
    bool drop_numerals = false;
};

void add_preprocess_flags(CLI::App* cmd, PreprocessFlags& flags) {
    cmd->add_option("--stoplist", flags.stoplist, "stoplist file, one token per line");
    cmd->add_flag("--no-stem", flags.no_stem, "skip stemming");
    cmd->add_flag("--drop-numerals", flags.drop_numerals, "drop all-digit tokens");
}

TokenizedText preprocess_sentences(const std::vector<std::string>& sentences,
                                   const PreprocessFlags& flags) {
    TokenizeOptions opts;
    opts.drop_numerals = flags.drop_numerals;
    TokenizedText text = tokenize(sentences, opts);
    if (!flags.stoplist.empty())
        text = remove_stopwords(text, load_stoplist(flags.stoplist));
    if (!flags.no_stem)
        text = stem(text);
    return text;
}

std::vector<std::string> sample_files_under(const std::string& path) {
    if (!fs::is_directory(path))
        return {path};
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no sample files under " + path);
    return files;
}

int cmd_generate(const std::string& pool_path, const std::string& procedure,
                 int min_len, int max_len, int segments, int samples,
                 std::uint64_t seed, const std::string& out_dir) {
    const auto pool = load_pool(pool_path);
    fs::create_directories(out_dir);
    std::vector<BoundaryRecord> refs;
    for (int s = 0; s < samples; ++s) {
        const std::uint64_t sample_seed = derive_stream(seed, static_cast<std::uint64_t>(s));
        Sample sample = procedure == "paragraph"
                            ? generate_paragraph_sample(pool, segments, sample_seed)
                            : generate_length_sample(pool, min_len, max_len, segments,
                                                     sample_seed);
        sample.sample_id = "sample_" + std::to_string(s);
        write_sample_file(sample, (fs::path(out_dir) / (sample.sample_id + ".txt")).string());
        refs.push_back({sample.sample_id, "reference", sample.reference.boundaries,
                        sample.reference.total_units});
    }
    write_boundary_file((fs::path(out_dir) / "references.jsonl").string(), refs);
    std::cout << "wrote " << samples << " samples to " << out_dir << "\n";
    return 0;
}

int cmd_annotate(const std::string& pool_path, const std::string& ann_dir,
                 const std::string& out_dir, const std::string& variant,
                 const std::string& pronoun_file) {
    const auto pool = load_pool(pool_path);
    const auto annotations = load_annotations(ann_dir, pool);
    std::vector<std::string> pronouns = english_pronouns();
    if (!pronoun_file.empty()) {
        pronouns.clear();
        for (const auto& p : load_stoplist(pronoun_file))
            pronouns.push_back(p);
    }
    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "manifest.tsv");
    for (const auto& doc : pool) {
        AnnotationSet ann = annotations.at(doc.doc_id);
        if (variant == "ne_only")
            ann = drop_pronoun_mentions(ann, pronouns);
        const SourceDocument annotated = substitute_entities(doc, ann);
        const std::string name = doc.doc_id + ".txt";
        std::ofstream out(fs::path(out_dir) / name);
        for (std::size_t p = 0; p < annotated.paragraphs.size(); ++p) {
            const auto [first, last] = annotated.paragraphs[p];
            for (int s = first; s < last; ++s)
                out << annotated.sentences[s] << "\n";
            if (p + 1 < annotated.paragraphs.size())
                out << "\n";
        }
        manifest << doc.doc_id << '\t' << doc.category << '\t' << name << "\n";
    }
    std::cout << "wrote " << pool.size() << " annotated documents to " << out_dir << "\n";
    return 0;
}

int cmd_preprocess(const std::string& in_path, const std::string& out_path,
                   const PreprocessFlags& flags) {
    std::ifstream probe(in_path);
    if (!probe)
        throw std::runtime_error("cannot open " + in_path);
    std::string first_line;
    std::getline(probe, first_line);
    probe.close();

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file)
            throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }

    const auto emit = [&](const TokenizedText& text, const std::vector<int>& boundaries) {
        std::size_t next = 0;
        for (int s = 0; s < text.sentence_count(); ++s) {
            if (next < boundaries.size() && boundaries[next] == s) {
                *out << "==========\n";
                ++next;
            }
            for (std::size_t t = 0; t < text.sentences[s].size(); ++t)
                *out << (t ? " " : "") << text.sentences[s][t];
            *out << "\n";
        }
    };

    if (first_line == "==========") {
        const Sample sample = read_sample_file(in_path);
        emit(preprocess_sentences(sample.sentences, flags), sample.reference.boundaries);
    } else {
        std::ifstream in(in_path);
        std::vector<std::string> sentences;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (!line.empty())
                sentences.push_back(line);
        }
        emit(preprocess_sentences(sentences, flags), {});
    }
    return 0;
}

int cmd_segment(const std::string& in_path, const std::string& algorithm,
                const SegmenterOptions& options, const PreprocessFlags& flags,
                const std::string& out_path, const std::string& refs_out) {
    AlgorithmSpec spec{algorithm, options};
    std::vector<BoundaryRecord> hyps, refs;
    for (const auto& file : sample_files_under(in_path)) {
        const Sample sample = read_sample_file(file);
        const TokenizedText text = preprocess_sentences(sample.sentences, flags);
        Segmentation hyp;
        if (algorithm == "u00") {
            hyp = segment_u00(text, options);
        } else {
            const SimilarityMatrix sim = build_similarity(text);
            if (algorithm == "c99")
                hyp = segment_c99(rank_transform(sim, options.rank_mask), options);
            else if (algorithm == "dp_length")
                hyp = segment_dp_length(sim, options);
            else
                throw std::runtime_error("unknown algorithm: " + algorithm);
        }
        hyps.push_back({sample.sample_id, algorithm, hyp.boundaries, hyp.total_units});
        refs.push_back({sample.sample_id, "reference", sample.reference.boundaries,
                        sample.reference.total_units});
    }
    write_boundary_file(out_path, hyps);
    if (!refs_out.empty())
        write_boundary_file(refs_out, refs);
    std::cout << "segmented " << hyps.size() << " samples with " << algorithm << "\n";
    return 0;
}

int cmd_score(const std::string& refs_path, const std::string& hyps_path,
              const std::string& dataset, const std::string& out_csv,
              const std::string& out_json) {
    std::vector<std::string> errors;
    const ResultTable table = import_external(hyps_path, refs_path, dataset, errors);
    for (const auto& e : errors)
        std::cerr << e << "\n";
    if (!out_csv.empty())
        emit_csv(table, out_csv);
    if (!out_json.empty())
        emit_json(table, out_json);
    for (const auto& row : table.rows) {
        std::cout << row.algorithm << " on " << row.dataset << " (" << row.metrics.samples
                  << " samples): precision " << row.metrics.precision * 100.0
                  << "%, recall " << row.metrics.recall * 100.0 << "%, pk "
                  << row.metrics.pk * 100.0 << "%, window_diff "
                  << row.metrics.window_diff * 100.0 << "%\n";
    }
    return errors.empty() ? 0 : 1;
}

int cmd_stats(const std::string& pool_path) {
    const auto pool = load_pool(pool_path);
    std::vector<std::vector<std::string>> units;
    for (const auto& doc : pool)
        units.push_back(doc.sentences);
    const NeStats stats = ne_stats(units);
    std::cout << "documents: " << pool.size() << "\n"
              << "identifier occurrences per document: min " << stats.min_per_unit
              << ", max " << stats.max_per_unit << ", mean " << stats.mean_per_unit << "\n";
    for (const auto& [type, count] : stats.per_type_total)
        std::cout << "  " << type << ": " << count << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path) {
    const ExperimentConfig cfg = parse_experiment_config(config_path);
    const ExperimentOutput output = run_experiment(cfg);
    for (const auto& e : output.errors)
        std::cerr << e << "\n";

    const std::string out_dir = cfg.out_dir.empty() ? "results" : cfg.out_dir;
    fs::create_directories(out_dir);
    emit_csv(output.table, (fs::path(out_dir) / "results.csv").string());
    emit_json(output.table, (fs::path(out_dir) / "results.json").string());
    write_boundary_file((fs::path(out_dir) / "references.jsonl").string(),
                        output.references);
    for (const auto& [key, records] : output.hypotheses) {
        std::string name = "boundaries_" + key + ".jsonl";
        std::replace(name.begin(), name.end(), '/', '_');
        write_boundary_file((fs::path(out_dir) / name).string(), records);
    }
    std::cout << "wrote results for " << output.table.rows.size() << " cells to "
              << out_dir << "\n";
    return output.complete ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"text segmentation benchmark toolkit"};
    app.require_subcommand(1);

    // generate
    std::string pool_path, out_dir, procedure = "prefix";
    int min_len = 3, max_len = 11, segments = 10, samples = 100;
    std::uint64_t seed = 1;
    auto* generate = app.add_subcommand("generate", "draw concatenated samples from a pool");
    generate->add_option("--pool", pool_path, "pool directory or manifest")->required();
    generate->add_option("--procedure", procedure, "prefix or paragraph")
        ->check(CLI::IsMember({"prefix", "choi", "paragraph"}));
    generate->add_option("--min-len", min_len, "minimum segment length (prefix)");
    generate->add_option("--max-len", max_len, "maximum segment length (prefix)");
    generate->add_option("--segments", segments, "segments per sample");
    generate->add_option("--samples", samples, "number of samples");
    generate->add_option("--seed", seed, "master seed");
    generate->add_option("--out", out_dir, "output directory")->required();

    // annotate
    std::string ann_dir, variant = "ne_plus_coref", pronoun_file;
    auto* annotate = app.add_subcommand("annotate", "substitute entity mentions in a pool");
    annotate->add_option("--pool", pool_path, "pool directory or manifest")->required();
    annotate->add_option("--ann", ann_dir, "directory of <doc_id>.tsv standoff files")
        ->required();
    annotate->add_option("--out", out_dir, "output directory")->required();
    annotate->add_option("--variant", variant, "ne_only or ne_plus_coref")
        ->check(CLI::IsMember({"ne_only", "ne_plus_coref"}));
    annotate->add_option("--pronouns", pronoun_file, "pronoun list overriding the built-in");

    // preprocess
    std::string in_path, out_path;
    PreprocessFlags pre_flags;
    auto* preprocess = app.add_subcommand("preprocess", "tokenize, stop and stem a file");
    preprocess->add_option("--in", in_path, "sample file or sentence-per-line text")
        ->required();
    preprocess->add_option("--out", out_path, "output file (stdout when absent)");
    add_preprocess_flags(preprocess, pre_flags);

    // segment
    std::string algorithm, refs_out;
    SegmenterOptions seg_options;
    int opt_segment_count = 0;
    auto* segment = app.add_subcommand("segment", "segment sample files");
    segment->add_option("--in", in_path, "sample file or directory of sample files")
        ->required();
    segment->add_option("--algorithm", algorithm, "c99, u00 or dp_length")
        ->required()
        ->check(CLI::IsMember({"c99", "u00", "dp_length"}));
    segment->add_option("--mask", seg_options.rank_mask, "rank filter size (c99)");
    segment->add_option("--auto-c", seg_options.auto_threshold_coeff,
                        "stopping coefficient (c99)");
    segment->add_option("--alpha", seg_options.penalty_weight, "boundary penalty (u00)");
    segment->add_option("--l0", seg_options.preferred_length, "target length (dp_length)");
    segment->add_option("--gamma", seg_options.length_weight, "length weight (dp_length)");
    segment->add_option("--segment-count", opt_segment_count,
                        "produce exactly this many segments");
    segment->add_option("--out", out_path, "boundary JSON-lines output")->required();
    segment->add_option("--refs-out", refs_out, "also write the reference boundaries here");
    add_preprocess_flags(segment, pre_flags);

    // score
    std::string refs_path, hyps_path, dataset = "imported", out_csv, out_json;
    auto* score = app.add_subcommand("score", "score boundary files against references");
    score->add_option("--refs", refs_path, "reference boundary JSON-lines")->required();
    score->add_option("--hyps", hyps_path, "hypothesis boundary JSON-lines")->required();
    score->add_option("--dataset", dataset, "dataset label for the result rows");
    score->add_option("--out-csv", out_csv, "write the result table as CSV");
    score->add_option("--out-json", out_json, "write the result table as JSON");

    // stats
    auto* stats = app.add_subcommand("stats", "identifier statistics over a pool");
    stats->add_option("--pool", pool_path, "pool directory or manifest")->required();

    // experiment
    std::string config_path;
    auto* experiment = app.add_subcommand("experiment", "run a configured experiment");
    experiment->add_option("--config", config_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(pool_path, procedure == "choi" ? "prefix" : procedure,
                                min_len, max_len, segments, samples, seed, out_dir);
        if (annotate->parsed())
            return cmd_annotate(pool_path, ann_dir, out_dir, variant, pronoun_file);
        if (preprocess->parsed())
            return cmd_preprocess(in_path, out_path, pre_flags);
        if (segment->parsed()) {
            if (opt_segment_count > 0) {
                seg_options.fixed_segment_count = opt_segment_count;
                seg_options.dp_segment_count = opt_segment_count;
            }
            return cmd_segment(in_path, algorithm, seg_options, pre_flags, out_path,
                               refs_out);
        }
        if (score->parsed())
            return cmd_score(refs_path, hyps_path, dataset, out_csv, out_json);
        if (stats->parsed())
            return cmd_stats(pool_path);
        if (experiment->parsed())
            return cmd_experiment(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
