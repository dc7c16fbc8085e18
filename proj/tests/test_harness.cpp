#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "segbench/harness.hpp"

using namespace segbench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(static_cast<bool>(in), path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content;
}

// One standoff row with offsets located by searching the joined document
// text, so the fixture cannot drift out of sync with the sentences.
std::string standoff_row(const std::string& doc_id,
                         const std::vector<std::string>& sentences,
                         const std::string& entity_id, const std::string& type,
                         const std::string& surface, int occurrence) {
    std::string joined;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i)
            joined.push_back('\n');
        joined += sentences[i];
    }
    std::size_t at = std::string::npos;
    for (int hit = 0; hit < occurrence; ++hit)
        at = joined.find(surface, at == std::string::npos ? 0 : at + 1);
    REQUIRE(at != std::string::npos);
    std::ostringstream row;
    row << doc_id << '\t' << entity_id << '\t' << type << '\t' << at << '\t'
        << at + surface.size() << '\t' << surface << '\n';
    return row.str();
}

// A tiny two-document workspace with annotations, stoplist and a config
// file, all under one throwaway directory.
fs::path make_workspace(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);

    const std::vector<std::string> a1 = {
        "Maria Santos opened the old mill at dawn.",
        "She checked the heavy grindstone for cracks.",
        "Maria Santos trusted the miller completely.",
        "He had worked the mill for thirty years.",
        "The river turned the wheel all summer.",
        "She locked the gate when the light failed.",
    };
    const std::vector<std::string> b2 = {
        "Omar Haddad painted the harbor boats.",
        "He mixed the blue pigment himself.",
        "Omar Haddad sold the small panels quickly.",
        "They praised his steady hand.",
        "The gallery kept two paintings back.",
        "He signed each frame in pencil.",
    };
    const auto join = [](const std::vector<std::string>& lines) {
        std::string text;
        for (const auto& l : lines)
            text += l + "\n";
        return text;
    };
    write_file(dir / "pool" / "A1.txt", join(a1));
    write_file(dir / "pool" / "B2.txt", join(b2));

    write_file(dir / "ann" / "A1.tsv",
               standoff_row("A1", a1, "A1person1", "person", "Maria Santos", 1) +
                   standoff_row("A1", a1, "A1person1", "person", "She", 1) +
                   standoff_row("A1", a1, "A1person1", "person", "Maria Santos", 2) +
                   standoff_row("A1", a1, "A1person2", "person", "He", 1) +
                   standoff_row("A1", a1, "A1person1", "person", "She", 2));
    write_file(dir / "ann" / "B2.tsv",
               standoff_row("B2", b2, "B2person1", "person", "Omar Haddad", 1) +
                   standoff_row("B2", b2, "B2person1", "person", "He", 1) +
                   standoff_row("B2", b2, "B2person1", "person", "Omar Haddad", 2) +
                   standoff_row("B2", b2, "B2group1", "group", "They", 1) +
                   standoff_row("B2", b2, "B2person1", "person", "his", 1) +
                   standoff_row("B2", b2, "B2person1", "person", "He", 2));

    write_file(dir / "stop.txt",
               "# test stoplist\nthe\na\nan\nat\nfor\nof\nto\nin\nall\nwhen\n"
               "he\nshe\nthey\nhis\nhimself\nhad\ntwo\neach\n");

    write_file(dir / "exp.conf",
               "pool = pool\n"
               "annotations = ann\n"
               "procedure = prefix\n"
               "min_len = 3\n"
               "max_len = 5\n"
               "segments = 3\n"
               "samples = 4\n"
               "seed = 11\n"
               "variants = raw, ne_only, ne_plus_coref\n"
               "stoplist = stop.txt\n"
               "stem = true\n"
               "\n"
               "[algorithm]\n"
               "name = u00\n"
               "alpha = 1.0\n"
               "\n"
               "[algorithm]\n"
               "name = dp_length\n"
               "l0 = 3\n"
               "gamma = 0.1\n");
    return dir;
}

ExperimentConfig parse_snippet(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "segbench_conf";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    write_file(path, content);
    return parse_experiment_config(path.string());
}

const std::string kMinimalTail =
    "segments = 2\nsamples = 1\nseed = 1\n[algorithm]\nname = u00\n";

} // namespace

TEST_CASE("experiment config parsing resolves paths and defaults") {
    const fs::path dir = make_workspace("segbench_ws_parse");
    const ExperimentConfig cfg = parse_experiment_config((dir / "exp.conf").string());

    CHECK(cfg.pool == (dir / "pool").string());
    CHECK(cfg.annotations == (dir / "ann").string());
    CHECK(cfg.stoplist == (dir / "stop.txt").string());
    CHECK(cfg.procedure == "prefix");
    CHECK(cfg.min_len == 3);
    CHECK(cfg.max_len == 5);
    CHECK(cfg.segments == 3);
    CHECK(cfg.samples == 4);
    CHECK(cfg.seed == 11);
    CHECK(cfg.variants ==
          std::vector<std::string>{"raw", "ne_only", "ne_plus_coref"});
    CHECK(cfg.stem_tokens);
    CHECK_FALSE(cfg.drop_numerals);
    CHECK(cfg.dataset == "exp");  // defaults to the config file stem

    REQUIRE(cfg.algorithms.size() == 2);
    CHECK(cfg.algorithms[0].name == "u00");
    CHECK(cfg.algorithms[0].options.penalty_weight == 1.0);
    CHECK(cfg.algorithms[1].name == "dp_length");
    CHECK(cfg.algorithms[1].options.preferred_length == 3.0);
    CHECK(cfg.algorithms[1].options.length_weight == doctest::Approx(0.1));
}

TEST_CASE("config aliases and fallbacks") {
    const auto cfg = parse_snippet("alias.conf",
                                   "pool = p\nprocedure = choi\nmin_len = 3\n"
                                   "max_len = 11\n" + kMinimalTail);
    CHECK(cfg.procedure == "prefix");
    CHECK(cfg.variants == std::vector<std::string>{"raw"});  // default variant
    CHECK(cfg.dataset == "alias");
}

TEST_CASE("config shape problems are reported with file and line") {
    const auto throws_with = [](const std::string& name, const std::string& content,
                                const std::string& needle) {
        try {
            parse_snippet(name, content);
            FAIL_CHECK("expected a parse failure for " << name);
        } catch (const std::exception& e) {
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                          name << ": " << e.what());
        }
    };

    throws_with("unknown_key.conf",
                "pool = p\nwibble = 3\nprocedure = prefix\nmin_len = 1\n"
                "max_len = 2\n" + kMinimalTail,
                "unknown_key.conf:2");
    throws_with("unknown_section.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n" +
                    kMinimalTail + "[frobnicator]\n",
                "unknown section");
    throws_with("no_pool.conf", "procedure = prefix\nmin_len = 1\nmax_len = 2\n" +
                                    kMinimalTail,
                "pool");
    throws_with("bad_proc.conf",
                "pool = p\nprocedure = sideways\nmin_len = 1\nmax_len = 2\n" +
                    kMinimalTail,
                "procedure");
    throws_with("bad_lens.conf",
                "pool = p\nprocedure = prefix\nmin_len = 5\nmax_len = 2\n" +
                    kMinimalTail,
                "min_len");
    throws_with("no_algo.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n"
                "segments = 2\nsamples = 1\nseed = 1\n",
                "algorithm");
    throws_with("bad_algo.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n"
                "segments = 2\nsamples = 1\nseed = 1\n[algorithm]\nname = zigzag\n",
                "zigzag");
    throws_with("bad_variant.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n"
                "variants = raw, sideways\nannotations = a\n" + kMinimalTail,
                "variant");
    throws_with("dup_variant.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n"
                "variants = raw, raw\nannotations = a\n" + kMinimalTail,
                "duplicate");
    // Entity variants are refused up front when no annotations directory
    // is configured, not midway through a run.
    throws_with("no_ann.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n"
                "variants = raw, ne_only\n" + kMinimalTail,
                "annotations");
    throws_with("bad_samples.conf",
                "pool = p\nprocedure = prefix\nmin_len = 1\nmax_len = 2\n"
                "segments = 2\nsamples = 0\nseed = 1\n[algorithm]\nname = u00\n",
                "samples");
}

TEST_CASE("experiment run produces one row per algorithm and variant") {
    const fs::path dir = make_workspace("segbench_ws_run");
    const ExperimentConfig cfg = parse_experiment_config((dir / "exp.conf").string());
    const ExperimentOutput out = run_experiment(cfg);

    CHECK(out.errors.empty());
    CHECK(out.complete);
    REQUIRE(out.table.rows.size() == 6);  // 2 algorithms x 3 variants
    REQUIRE(out.references.size() == 4);

    // Rows ordered by algorithm, then raw before the entity variants.
    CHECK(out.table.rows[0].algorithm == "dp_length");
    CHECK(out.table.rows[0].variant == "raw");
    CHECK(out.table.rows[1].variant == "ne_only");
    CHECK(out.table.rows[2].variant == "ne_plus_coref");
    CHECK(out.table.rows[3].algorithm == "u00");
    for (const auto& row : out.table.rows) {
        CHECK(row.dataset == "exp");
        CHECK(row.metrics.samples == 4);
        CHECK(row.metrics.pk >= 0.0);
        CHECK(row.metrics.pk <= 1.0);
    }

    // Every variant segments the same generated samples: hypothesis unit
    // counts match the references sample by sample.
    REQUIRE(out.hypotheses.size() == 6);
    for (const auto& [key, records] : out.hypotheses) {
        CAPTURE(key);
        REQUIRE(records.size() == 4);
        for (std::size_t s = 0; s < records.size(); ++s) {
            CHECK(records[s].sample_id == out.references[s].sample_id);
            CHECK(records[s].total_units == out.references[s].total_units);
        }
    }

    // Delta rows are exact differences against the raw row.
    REQUIRE(out.table.deltas_vs_raw.size() == 4);
    for (const auto& delta : out.table.deltas_vs_raw) {
        const ResultRow* raw = nullptr;
        const ResultRow* variant = nullptr;
        for (const auto& row : out.table.rows) {
            if (row.algorithm != delta.algorithm)
                continue;
            if (row.variant == "raw")
                raw = &row;
            if (row.variant == delta.variant)
                variant = &row;
        }
        REQUIRE(raw != nullptr);
        REQUIRE(variant != nullptr);
        CHECK(delta.pk == variant->metrics.pk - raw->metrics.pk);
        CHECK(delta.precision == variant->metrics.precision - raw->metrics.precision);
        CHECK(delta.recall == variant->metrics.recall - raw->metrics.recall);
        CHECK(delta.window_diff ==
              variant->metrics.window_diff - raw->metrics.window_diff);
    }
}

TEST_CASE("experiment output does not depend on the worker count") {
    const fs::path dir = make_workspace("segbench_ws_threads");
    const ExperimentConfig cfg = parse_experiment_config((dir / "exp.conf").string());

    setenv("SEGBENCH_THREADS", "1", 1);
    const ExperimentOutput serial = run_experiment(cfg);
    setenv("SEGBENCH_THREADS", "4", 1);
    const ExperimentOutput parallel = run_experiment(cfg);
    unsetenv("SEGBENCH_THREADS");

    const auto csv_of = [](const ExperimentOutput& out, const std::string& name) {
        const fs::path path = fs::temp_directory_path() / name;
        emit_csv(out.table, path.string());
        return slurp(path.string());
    };
    CHECK(csv_of(serial, "ws_serial.csv") == csv_of(parallel, "ws_parallel.csv"));
    for (const auto& [key, records] : serial.hypotheses) {
        const auto& other = parallel.hypotheses.at(key);
        REQUIRE(records.size() == other.size());
        for (std::size_t i = 0; i < records.size(); ++i)
            CHECK(records[i].boundaries == other[i].boundaries);
    }
}

TEST_CASE("worker cap comes from the environment") {
    setenv("SEGBENCH_THREADS", "3", 1);
    CHECK(configured_thread_count() == 3);
    setenv("SEGBENCH_THREADS", "0", 1);
    CHECK(configured_thread_count() >= 1);
    unsetenv("SEGBENCH_THREADS");
    CHECK(configured_thread_count() >= 1);
}

TEST_CASE("external boundary files are scored against references") {
    const fs::path dir = fs::temp_directory_path() / "segbench_import";
    fs::create_directories(dir);
    write_boundary_file((dir / "refs.jsonl").string(),
                        {{"sample_0", "reference", {5}, 10},
                         {"sample_1", "reference", {4}, 8}});
    write_boundary_file((dir / "hyps.jsonl").string(),
                        {{"sample_0", "c99", {5}, 10},
                         {"sample_1", "c99", {}, 8},
                         {"sample_0", "other", {4}, 10},
                         {"sample_0", "c99", {6}, 10},     // duplicate
                         {"sample_9", "c99", {2}, 10},     // unknown id
                         {"sample_1", "u00", {3}, 9}});    // unit mismatch

    std::vector<std::string> errors;
    const ResultTable table = import_external((dir / "hyps.jsonl").string(),
                                              (dir / "refs.jsonl").string(),
                                              "midway", errors);

    REQUIRE(errors.size() == 3);
    CHECK(errors[0].find("duplicate") != std::string::npos);
    CHECK(errors[1].find("sample_9") != std::string::npos);
    CHECK(errors[2].find("8") != std::string::npos);  // expected unit count

    // Groups appear in first-appearance order; the u00 record was invalid,
    // so no u00 row exists.
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].algorithm == "c99");
    CHECK(table.rows[0].dataset == "midway");
    CHECK(table.rows[0].variant == "external");
    CHECK(table.rows[0].metrics.samples == 2);
    // sample_0 scored 1/1; the boundary-free sample_1 scored 0/0.
    CHECK(table.rows[0].metrics.precision == doctest::Approx(0.5));
    CHECK(table.rows[0].metrics.recall == doctest::Approx(0.5));
    CHECK(table.rows[1].algorithm == "other");
    CHECK(table.rows[1].metrics.samples == 1);
    CHECK(table.rows[1].metrics.precision == 0.0);
    CHECK(table.deltas_vs_raw.empty());
}

TEST_CASE("csv output format is stable") {
    ResultTable table;
    ResultRow row;
    row.algorithm = "c99";
    row.dataset = "d";
    row.variant = "raw";
    row.metrics = {0.123456, 1.0, 0.5, 0.046, 2.5, 7};
    table.rows.push_back(row);

    const fs::path path = fs::temp_directory_path() / "segbench_golden.csv";
    emit_csv(table, path.string());
    CHECK(slurp(path.string()) ==
          "algorithm,dataset,variant,precision,recall,pk,window_diff,k_mean,samples\n"
          "c99,d,raw,12.35,100.00,50.00,4.60,2.50,7\n");
}

TEST_CASE("json output keeps full precision and the delta rows") {
    ResultTable table;
    ResultRow row;
    row.algorithm = "u00";
    row.dataset = "d";
    row.variant = "ne_only";
    row.metrics = {0.125, 0.25, 0.0625, 0.03125, 1.5, 3};
    table.rows.push_back(row);
    DeltaRow delta;
    delta.algorithm = "u00";
    delta.dataset = "d";
    delta.variant = "ne_only";
    delta.pk = -0.0625;
    table.deltas_vs_raw.push_back(delta);

    const fs::path path = fs::temp_directory_path() / "segbench_golden.json";
    emit_json(table, path.string());
    const auto doc = nlohmann::json::parse(slurp(path.string()));
    REQUIRE(doc.at("rows").size() == 1);
    CHECK(doc.at("rows")[0].at("pk").get<double>() == 0.0625);
    CHECK(doc.at("rows")[0].at("samples").get<int>() == 3);
    REQUIRE(doc.at("deltas_vs_raw").size() == 1);
    CHECK(doc.at("deltas_vs_raw")[0].at("pk").get<double>() == -0.0625);
}
