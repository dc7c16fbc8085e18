#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "segbench/preprocess.hpp"
#include "segbench/rng.hpp"
#include "segbench/segment.hpp"

using namespace segbench;
namespace fs = std::filesystem;

namespace {

// Two topical blocks of four sentences with a constant high value inside
// each block and a low value between them.
RankMatrix two_block_matrix(double intra, double inter) {
    RankMatrix m(8, std::vector<double>(8, inter));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if ((i < 4) == (j < 4))
                m[i][j] = intra;
    return m;
}

TokenizedText random_text(Rng& rng, int n_sentences, int vocab, int max_len) {
    std::vector<std::string> sentences;
    for (int s = 0; s < n_sentences; ++s) {
        std::string sentence;
        const int len = 1 + static_cast<int>(rng.next_in(0, max_len - 1));
        for (int t = 0; t < len; ++t) {
            if (t)
                sentence += ' ';
            sentence += "w" + std::to_string(rng.next_in(0, vocab - 1));
        }
        sentences.push_back(sentence);
    }
    return tokenize(sentences);
}

SimilarityMatrix random_similarity(Rng& rng, int n) {
    SimilarityMatrix sim(n, std::vector<double>(n, 1.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            sim[i][j] = sim[j][i] =
                static_cast<double>(rng.next_in(0, 1000)) / 1000.0;
    return sim;
}

std::vector<int> bits_to_bounds(unsigned subset, int n) {
    std::vector<int> bounds;
    for (int t = 1; t < n; ++t)
        if (subset & (1u << (t - 1)))
            bounds.push_back(t);
    return bounds;
}

} // namespace

TEST_CASE("cosine similarity from sparse counts") {
    const auto text = tokenize({"a b", "a c", "d", "a a b"});
    const auto sim = build_similarity(text);
    CHECK(sim[0][0] == 1.0);
    CHECK(sim[0][1] == doctest::Approx(0.5));         // 1 / (sqrt2 * sqrt2)
    CHECK(sim[0][2] == 0.0);
    CHECK(sim[0][3] == doctest::Approx(3.0 / std::sqrt(10.0)));
    CHECK(sim[1][3] == doctest::Approx(2.0 / std::sqrt(10.0)));
    CHECK(sim[1][0] == sim[0][1]);
}

TEST_CASE("sentences with no tokens are dissimilar to everything") {
    const auto text = tokenize({"...", "words here", "..."});
    const auto sim = build_similarity(text);
    CHECK(sim[0][0] == 1.0);  // diagonal stays 1 by convention
    CHECK(sim[0][1] == 0.0);
    CHECK(sim[0][2] == 0.0);
}

TEST_CASE("rank filter agrees with a literal window scan") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_in(0, 11));
        const auto sim = random_similarity(rng, n);
        for (int mask : {1, 3, 5, 11}) {
            const auto rank = rank_transform(sim, mask);
            const int radius = (mask - 1) / 2;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const int r0 = std::max(0, i - radius);
                    const int r1 = std::min(n - 1, i + radius);
                    const int c0 = std::max(0, j - radius);
                    const int c1 = std::min(n - 1, j + radius);
                    int lower = 0, cells = 0;
                    for (int p = r0; p <= r1; ++p)
                        for (int q = c0; q <= c1; ++q) {
                            ++cells;
                            if (sim[p][q] < sim[i][j])
                                ++lower;
                        }
                    const double want =
                        cells > 1 ? static_cast<double>(lower) / (cells - 1) : 0.0;
                    REQUIRE(rank[i][j] == doctest::Approx(want));
                }
            }
        }
    }
}

TEST_CASE("rank filter rejects bad masks and shapes") {
    const SimilarityMatrix sim(4, std::vector<double>(4, 0.5));
    CHECK_THROWS(rank_transform(sim, 2));
    CHECK_THROWS(rank_transform(sim, 0));
    CHECK_THROWS(rank_transform(sim, -3));
    CHECK_THROWS(rank_transform({{0.1, 0.2}}, 3));  // not square
    CHECK_THROWS(rank_transform({}, 3));

    // Mask 1 windows contain only the cell itself.
    const auto rank = rank_transform(sim, 1);
    for (const auto& row : rank)
        for (double v : row)
            CHECK(v == 0.0);
}

TEST_CASE("rank values on a constant matrix are all zero") {
    const auto rank = rank_transform(SimilarityMatrix(6, std::vector<double>(6, 1.0)), 11);
    for (const auto& row : rank)
        for (double v : row)
            CHECK(v == 0.0);
}

TEST_CASE("divisive splitting finds the block boundary") {
    const RankMatrix rank = two_block_matrix(0.8, 0.05);

    SegmenterOptions fixed;
    fixed.fixed_segment_count = 2;
    CHECK(segment_c99(rank, fixed).boundaries == std::vector<int>{4});

    SegmenterOptions open;
    CHECK(segment_c99(rank, open).boundaries == std::vector<int>{4});

    // Independent check of the first split: it must maximize the summed
    // per-block density over all single boundaries, leftmost on ties.
    const auto density = [&](int a, int b) {
        double mass = 0.0;
        for (int i = a; i < b; ++i)
            for (int j = a; j < b; ++j)
                mass += rank[i][j];
        return mass / (static_cast<double>(b - a) * static_cast<double>(b - a));
    };
    int best_t = -1;
    double best_d = 0.0;
    for (int t = 1; t < 8; ++t) {
        const double d = density(0, t) + density(t, 8);
        if (best_t < 0 || d > best_d) {
            best_d = d;
            best_t = t;
        }
    }
    CHECK(best_t == 4);
}

TEST_CASE("a flat gain profile produces no boundaries") {
    // All-identical sentences rank to an all-zero matrix; every split gain
    // is equal, the first step already fails mean + c*sigma, and the input
    // stays whole.
    const auto text = tokenize(std::vector<std::string>(8, "the cat sat"));
    const auto rank = rank_transform(build_similarity(text), 11);
    SegmenterOptions opts;
    CHECK(segment_c99(rank, opts).boundaries.empty());
}

TEST_CASE("fixed segment counts are honored exactly") {
    const RankMatrix rank = two_block_matrix(0.8, 0.05);
    for (int count = 1; count <= 8; ++count) {
        SegmenterOptions opts;
        opts.fixed_segment_count = count;
        const Segmentation seg = segment_c99(rank, opts);
        CHECK(seg.segment_count() == count);
    }
    SegmenterOptions too_many;
    too_many.fixed_segment_count = 9;
    CHECK_THROWS(segment_c99(rank, too_many));
    SegmenterOptions zero;
    zero.fixed_segment_count = 0;
    CHECK_THROWS(segment_c99(rank, zero));
}

TEST_CASE("likelihood segmentation splits topic halves and not clones") {
    std::vector<std::string> sents;
    for (int i = 0; i < 5; ++i)
        sents.push_back("hive comb nectar bees");
    for (int i = 0; i < 5; ++i)
        sents.push_back("forge anvil iron hammer");
    const auto halves = tokenize(sents);
    for (double alpha : {0.5, 1.0, 2.0}) {
        SegmenterOptions opts;
        opts.penalty_weight = alpha;
        CHECK(segment_u00(halves, opts).boundaries == std::vector<int>{5});
    }

    const auto clones = tokenize(std::vector<std::string>(8, "the cat sat"));
    SegmenterOptions opts;
    CHECK(segment_u00(clones, opts).boundaries.empty());
}

TEST_CASE("likelihood tie-break on token-free input prefers no boundaries") {
    const auto text = tokenize({"...", "!!", "??", "--"});
    SegmenterOptions opts;
    CHECK(segment_u00(text, opts).boundaries.empty());
}

TEST_CASE("likelihood dynamic program equals exhaustive search") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const auto text = random_text(rng, 10, 6, 6);
        SegmenterOptions opts;
        opts.penalty_weight = 0.5 + 0.5 * static_cast<double>(rng.next_in(0, 3));
        const Segmentation dp = segment_u00(text, opts);
        const Segmentation ex = segment_exhaustive_u00(text, opts);
        CAPTURE(trial);
        REQUIRE(dp.boundaries == ex.boundaries);
        // Bitwise equality, not approximate: both routes must follow the
        // pinned accumulation order.
        REQUIRE(u00_cost(text, dp.boundaries, opts) ==
                u00_cost(text, ex.boundaries, opts));
    }
}

TEST_CASE("length-model dynamic program equals exhaustive search") {
    Rng rng(505);
    for (int trial = 0; trial < 200; ++trial) {
        const auto sim = random_similarity(rng, 10);
        SegmenterOptions opts;
        opts.preferred_length = 1.0 + static_cast<double>(rng.next_in(0, 4));
        opts.length_weight = 0.1 * static_cast<double>(1 + rng.next_in(0, 9));
        const Segmentation dp = segment_dp_length(sim, opts);
        const Segmentation ex = segment_exhaustive_length(sim, opts);
        CAPTURE(trial);
        REQUIRE(dp.boundaries == ex.boundaries);
        REQUIRE(length_cost(sim, dp.boundaries, opts) ==
                length_cost(sim, ex.boundaries, opts));
    }
}

TEST_CASE("forced segment counts equal a restricted enumeration") {
    Rng rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 8;
        const auto sim = random_similarity(rng, n);
        for (int count = 1; count <= 4; ++count) {
            SegmenterOptions opts;
            opts.preferred_length = 3.0;
            opts.length_weight = 0.2;
            opts.dp_segment_count = count;
            const Segmentation dp = segment_dp_length(sim, opts);
            REQUIRE(dp.segment_count() == count);

            // Enumerate exactly the segmentations with `count` segments
            // and pick the best under the shared cost evaluator.
            std::vector<int> best;
            double best_cost = 0.0;
            bool have = false;
            for (unsigned subset = 0; subset < (1u << (n - 1)); ++subset) {
                if (std::popcount(subset) != count - 1)
                    continue;
                const auto bounds = bits_to_bounds(subset, n);
                const double cost = length_cost(sim, bounds, opts);
                if (!have || cost < best_cost ||
                    (cost == best_cost && bounds < best)) {
                    best = bounds;
                    best_cost = cost;
                    have = true;
                }
            }
            CAPTURE(trial);
            CAPTURE(count);
            REQUIRE(dp.boundaries == best);
            REQUIRE(length_cost(sim, dp.boundaries, opts) == best_cost);
        }
    }
}

TEST_CASE("length model splits blocks and honors degenerate weights") {
    SimilarityMatrix sim(8, std::vector<double>(8, 0.1));
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j)
            if ((i < 4) == (j < 4))
                sim[i][j] = 0.9;
        sim[i][i] = 1.0;
    }
    SegmenterOptions opts;
    opts.preferred_length = 4.0;
    opts.length_weight = 0.05;
    CHECK(segment_dp_length(sim, opts).boundaries == std::vector<int>{4});
    opts.dp_segment_count = 2;
    CHECK(segment_dp_length(sim, opts).boundaries == std::vector<int>{4});

    // With a zero similarity matrix and no length pressure every
    //  segmentation costs the same; ties keep the boundary list minimal,
    // and a forced count takes the lexicographically smallest list.
    const SimilarityMatrix zero(6, std::vector<double>(6, 0.0));
    SegmenterOptions flat;
    flat.length_weight = 0.0;
    CHECK(segment_dp_length(zero, flat).boundaries.empty());
    flat.dp_segment_count = 3;
    CHECK(segment_dp_length(zero, flat).boundaries == std::vector<int>{1, 2});

    SegmenterOptions too_many;
    too_many.dp_segment_count = 7;
    CHECK_THROWS(segment_dp_length(zero, too_many));
}

TEST_CASE("exhaustive search refuses oversized inputs") {
    const auto big_text = tokenize(std::vector<std::string>(17, "a b"));
    CHECK_THROWS_WITH(segment_exhaustive_u00(big_text, {}),
                      doctest::Contains("beyond 16"));
    const SimilarityMatrix big(17, std::vector<double>(17, 0.5));
    CHECK_THROWS_WITH(segment_exhaustive_length(big, {}),
                      doctest::Contains("beyond 16"));
}

TEST_CASE("cost evaluators reject invalid boundary lists") {
    const auto text = tokenize({"a", "b", "c"});
    CHECK_THROWS(u00_cost(text, {0}, {}));
    CHECK_THROWS(u00_cost(text, {3}, {}));
    CHECK_THROWS(u00_cost(text, {2, 1}, {}));
    const SimilarityMatrix sim(3, std::vector<double>(3, 0.5));
    CHECK_THROWS(length_cost(sim, {5}, {}));
}

TEST_CASE("boundary files round-trip") {
    const fs::path path = fs::temp_directory_path() / "segbench_bounds.jsonl";
    const std::vector<BoundaryRecord> records = {
        {"sample_0", "c99", {3, 7, 11}, 20},
        {"sample_1", "u00", {}, 15},
    };
    write_boundary_file(path.string(), records);

    const auto back = read_boundary_file(path.string());
    REQUIRE(back.size() == 2);
    CHECK(back[0].sample_id == "sample_0");
    CHECK(back[0].algorithm == "c99");
    CHECK(back[0].boundaries == std::vector<int>{3, 7, 11});
    CHECK(back[0].total_units == 20);
    CHECK(back[1].boundaries.empty());
    CHECK(back[1].total_units == 15);
}

TEST_CASE("boundary reading collects per-line errors and keeps good lines") {
    const fs::path path = fs::temp_directory_path() / "segbench_bounds_bad.jsonl";
    {
        std::ofstream out(path);
        out << R"({"algorithm":"c99","boundaries":[2],"n":5,"sample_id":"ok_1"})" << "\n";
        out << "not json at all\n";
        out << R"({"algorithm":"c99","boundaries":[9],"n":5,"sample_id":"bad_range"})" << "\n";
        out << R"({"algorithm":"c99","boundaries":"nope","n":5,"sample_id":"bad_type"})" << "\n";
        out << R"({"algorithm":"c99","boundaries":[1]})" << "\n";
        out << R"({"algorithm":"u00","boundaries":[2,4],"n":6,"sample_id":"ok_2"})" << "\n";
    }

    std::vector<std::string> errors;
    const auto records = read_boundary_file(path.string(), &errors);
    REQUIRE(records.size() == 2);
    CHECK(records[0].sample_id == "ok_1");
    CHECK(records[1].sample_id == "ok_2");
    REQUIRE(errors.size() == 4);
    CHECK(errors[0].find("line 2") != std::string::npos);
    CHECK(errors[1].find("line 3") != std::string::npos);
    CHECK(errors[2].find("line 4") != std::string::npos);
    CHECK(errors[3].find("line 5") != std::string::npos);

    // Without an error sink the first bad line throws instead.
    CHECK_THROWS(read_boundary_file(path.string()));
}
