#include "segbench/segment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace segbench {

namespace {

using json = nlohmann::json;

void require_square(const SimilarityMatrix& m, const char* who) {
    if (m.empty())
        throw std::runtime_error(std::string(who) + ": empty matrix");
    for (const auto& row : m)
        if (row.size() != m.size())
            throw std::runtime_error(std::string(who) + ": matrix is not square");
}

// Shared tie-break for every exact search: smaller cost, then fewer
// boundaries, then the lexicographically smallest boundary list.
bool better(double cost_a, const std::vector<int>& bounds_a,
            double cost_b, const std::vector<int>& bounds_b) {
    if (cost_a != cost_b)
        return cost_a < cost_b;
    if (bounds_a.size() != bounds_b.size())
        return bounds_a.size() < bounds_b.size();
    return bounds_a < bounds_b;
}

// Sentence tokens as dense vocabulary ids, in the original order.
std::vector<std::vector<int>> sentence_token_ids(const TokenizedText& text) {
    std::vector<std::vector<int>> ids(text.sentences.size());
    std::map<std::string, int> index;
    for (std::size_t v = 0; v < text.vocabulary.size(); ++v)
        index[text.vocabulary[v]] = static_cast<int>(v);
    for (std::size_t s = 0; s < text.sentences.size(); ++s) {
        ids[s].reserve(text.sentences[s].size());
        for (const auto& token : text.sentences[s])
            ids[s].push_back(index.at(token));
    }
    return ids;
}

// Pinned likelihood cost of sentences [a, b): two passes, first the
// within-segment counts, then the token terms in sentence-then-token
// order.  `counts` is scratch of vocabulary size, zeroed on entry and
// exit.
double u00_segment_cost(const std::vector<std::vector<int>>& ids, int a, int b,
                        long vocabulary_size, std::vector<long>& counts,
                        std::vector<int>& touched) {
    touched.clear();
    long total = 0;
    for (int s = a; s < b; ++s) {
        for (int id : ids[s]) {
            if (counts[id] == 0)
                touched.push_back(id);
            ++counts[id];
            ++total;
        }
    }
    const double denom = static_cast<double>(total + vocabulary_size);
    double cost = 0.0;
    for (int s = a; s < b; ++s)
        for (int id : ids[s])
            cost -= std::log((static_cast<double>(counts[id]) + 1.0) / denom);
    for (int id : touched)
        counts[id] = 0;
    return cost;
}

// Pinned length-model cost of sentences [a, b): row-major pair sum.
double length_segment_cost(const SimilarityMatrix& sim, int a, int b,
                           double preferred_length, double length_weight) {
    double pair_sum = 0.0;
    for (int p = a; p < b; ++p)
        for (int q = p + 1; q < b; ++q)
            pair_sum += sim[p][q];
    const double len = static_cast<double>(b - a);
    const double dl = len - preferred_length;
    return length_weight * (dl * dl) - pair_sum / len;
}

struct PathState {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<int> boundaries;
    bool reached = false;
};

void consider(PathState& into, double cost, std::vector<int>&& boundaries) {
    if (!into.reached || better(cost, boundaries, into.cost, into.boundaries)) {
        into.cost = cost;
        into.boundaries = std::move(boundaries);
        into.reached = true;
    }
}

} // namespace

SimilarityMatrix build_similarity(const TokenizedText& text) {
    const int n = text.sentence_count();
    if (n == 0)
        throw std::runtime_error("build_similarity: no sentences");

    std::vector<double> norms(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double sq = 0.0;
        for (const auto& [id, c] : text.counts[i])
            sq += static_cast<double>(c) * static_cast<double>(c);
        norms[i] = std::sqrt(sq);
    }

    SimilarityMatrix sim(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        sim[i][i] = 1.0;
        for (int j = i + 1; j < n; ++j) {
            if (norms[i] == 0.0 || norms[j] == 0.0)
                continue;
            const auto& a = text.counts[i];
            const auto& b = text.counts[j];
            double dot = 0.0;
            std::size_t x = 0, y = 0;
            while (x < a.size() && y < b.size()) {
                if (a[x].first < b[y].first) ++x;
                else if (a[x].first > b[y].first) ++y;
                else {
                    dot += static_cast<double>(a[x].second) * static_cast<double>(b[y].second);
                    ++x;
                    ++y;
                }
            }
            double value = dot / (norms[i] * norms[j]);
            value = std::min(1.0, std::max(0.0, value));
            sim[i][j] = sim[j][i] = value;
        }
    }
    return sim;
}

RankMatrix rank_transform(const SimilarityMatrix& sim, int mask) {
    require_square(sim, "rank_transform");
    if (mask < 1 || mask % 2 == 0)
        throw std::runtime_error("rank_transform: mask must be odd and positive, got " +
                                 std::to_string(mask));
    const int n = static_cast<int>(sim.size());
    const int radius = (mask - 1) / 2;
    RankMatrix rank(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int r0 = std::max(0, i - radius), r1 = std::min(n - 1, i + radius);
            const int c0 = std::max(0, j - radius), c1 = std::min(n - 1, j + radius);
            const int cells = (r1 - r0 + 1) * (c1 - c0 + 1);
            if (cells <= 1)
                continue;
            int lower = 0;
            for (int p = r0; p <= r1; ++p)
                for (int q = c0; q <= c1; ++q)
                    if (sim[p][q] < sim[i][j])
                        ++lower;
            rank[i][j] = static_cast<double>(lower) / static_cast<double>(cells - 1);
        }
    }
    return rank;
}

Segmentation segment_c99(const RankMatrix& rank, const SegmenterOptions& opts) {
    require_square(rank, "segment_c99");
    const int n = static_cast<int>(rank.size());
    if (opts.fixed_segment_count) {
        if (*opts.fixed_segment_count < 1)
            throw std::runtime_error("segment_c99: fixed segment count must be positive");
        if (*opts.fixed_segment_count > n)
            throw std::runtime_error("segment_c99: fixed segment count " +
                                     std::to_string(*opts.fixed_segment_count) +
                                     " exceeds " + std::to_string(n) + " sentences");
    }

    // Inclusion-exclusion prefix sums over the rank matrix.
    std::vector<std::vector<double>> prefix(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            prefix[i + 1][j + 1] =
                rank[i][j] + prefix[i][j + 1] + prefix[i + 1][j] - prefix[i][j];
    const auto block_density = [&](int a, int b) {
        const double mass =
            prefix[b][b] - prefix[a][b] - prefix[b][a] + prefix[a][a];
        const double side = static_cast<double>(b - a);
        return mass / (side * side);
    };
    // Density of a block sequence, folded left to right.
    const auto total_density = [&](const std::vector<int>& edges) {
        double d = 0.0;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k)
            d += block_density(edges[k], edges[k + 1]);
        return d;
    };

    // Greedy divisive splitting, run to completion; edges holds the block
    // borders including 0 and n.
    std::vector<int> edges = {0, n};
    std::vector<int> split_order;
    std::vector<double> density_after;  // D after each split
    double density = total_density(edges);
    const double initial_density = density;
    for (int step = 0; step < n - 1; ++step) {
        double best_density = 0.0;
        int best_split = -1;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            for (int t = edges[k] + 1; t < edges[k + 1]; ++t) {
                std::vector<int> candidate = edges;
                candidate.insert(candidate.begin() + static_cast<long>(k) + 1, t);
                const double d = total_density(candidate);
                if (best_split < 0 || d > best_density) {
                    best_density = d;
                    best_split = t;
                }
            }
        }
        edges.insert(std::upper_bound(edges.begin(), edges.end(), best_split),
                     best_split);
        split_order.push_back(best_split);
        density_after.push_back(best_density);
        density = best_density;
    }

    std::size_t keep = 0;
    if (opts.fixed_segment_count) {
        keep = static_cast<std::size_t>(*opts.fixed_segment_count - 1);
    } else {
        // Gain profile over all steps; cut at the first gain at or below
        // mean + c * stddev (population form).
        std::vector<double> gains;
        double previous = initial_density;
        for (double d : density_after) {
            gains.push_back(d - previous);
            previous = d;
        }
        keep = gains.size();
        if (!gains.empty()) {
            double mean = 0.0;
            for (double g : gains)
                mean += g;
            mean /= static_cast<double>(gains.size());
            double var = 0.0;
            for (double g : gains)
                var += (g - mean) * (g - mean);
            const double threshold =
                mean + opts.auto_threshold_coeff *
                           std::sqrt(var / static_cast<double>(gains.size()));
            for (std::size_t s = 0; s < gains.size(); ++s) {
                if (gains[s] <= threshold) {
                    keep = s;
                    break;
                }
            }
        }
    }

    std::vector<int> boundaries(split_order.begin(),
                                split_order.begin() + static_cast<long>(keep));
    std::sort(boundaries.begin(), boundaries.end());
    Segmentation result(n, std::move(boundaries));
    result.validate("segment_c99");
    return result;
}

Segmentation segment_u00(const TokenizedText& text, const SegmenterOptions& opts) {
    const int n = text.sentence_count();
    if (n == 0)
        throw std::runtime_error("segment_u00: no sentences");

    const auto ids = sentence_token_ids(text);
    const long vocab = static_cast<long>(text.vocabulary.size());
    const long total_tokens = text.token_count();
    const double penalty =
        opts.penalty_weight *
        std::log(static_cast<double>(std::max<long>(1, total_tokens)));

    std::vector<long> counts(text.vocabulary.size(), 0);
    std::vector<int> touched;
    std::vector<PathState> dp(n + 1);
    dp[0].cost = 0.0;
    dp[0].reached = true;
    for (int j = 1; j <= n; ++j) {
        for (int i = 0; i < j; ++i) {
            if (!dp[i].reached)
                continue;
            double cost = dp[i].cost;
            if (i > 0)
                cost += penalty;
            cost += u00_segment_cost(ids, i, j, vocab, counts, touched);
            std::vector<int> bounds = dp[i].boundaries;
            if (i > 0)
                bounds.push_back(i);
            consider(dp[j], cost, std::move(bounds));
        }
    }
    Segmentation result(n, std::move(dp[n].boundaries));
    result.validate("segment_u00");
    return result;
}

Segmentation segment_dp_length(const SimilarityMatrix& sim,
                               const SegmenterOptions& opts) {
    require_square(sim, "segment_dp_length");
    const int n = static_cast<int>(sim.size());

    if (opts.dp_segment_count) {
        const int m = *opts.dp_segment_count;
        if (m < 1)
            throw std::runtime_error("segment_dp_length: segment count must be positive");
        if (m > n)
            throw std::runtime_error("segment_dp_length: segment count " +
                                     std::to_string(m) + " exceeds " +
                                     std::to_string(n) + " sentences");
        // dp[k][j]: best split of the first j sentences into k segments.
        std::vector<std::vector<PathState>> dp(
            m + 1, std::vector<PathState>(n + 1));
        dp[0][0].cost = 0.0;
        dp[0][0].reached = true;
        for (int k = 1; k <= m; ++k) {
            for (int j = k; j <= n; ++j) {
                for (int i = k - 1; i < j; ++i) {
                    if (!dp[k - 1][i].reached)
                        continue;
                    double cost = dp[k - 1][i].cost +
                                  length_segment_cost(sim, i, j, opts.preferred_length,
                                                      opts.length_weight);
                    std::vector<int> bounds = dp[k - 1][i].boundaries;
                    if (i > 0)
                        bounds.push_back(i);
                    consider(dp[k][j], cost, std::move(bounds));
                }
            }
        }
        Segmentation result(n, std::move(dp[m][n].boundaries));
        result.validate("segment_dp_length");
        return result;
    }

    std::vector<PathState> dp(n + 1);
    dp[0].cost = 0.0;
    dp[0].reached = true;
    for (int j = 1; j <= n; ++j) {
        for (int i = 0; i < j; ++i) {
            if (!dp[i].reached)
                continue;
            double cost = dp[i].cost + length_segment_cost(sim, i, j, opts.preferred_length,
                                                           opts.length_weight);
            std::vector<int> bounds = dp[i].boundaries;
            if (i > 0)
                bounds.push_back(i);
            consider(dp[j], cost, std::move(bounds));
        }
    }
    Segmentation result(n, std::move(dp[n].boundaries));
    result.validate("segment_dp_length");
    return result;
}

namespace {

// The enumeration below re-states the cost models on purpose; keep it
// free of the helpers the dynamic programs use.

std::vector<int> bits_to_boundaries(unsigned subset, int n) {
    std::vector<int> bounds;
    for (int t = 1; t <= n - 1; ++t)
        if (subset & (1u << (t - 1)))
            bounds.push_back(t);
    return bounds;
}

template <typename SegmentCost>
Segmentation enumerate_all(int n, double per_boundary_penalty,
                           SegmentCost segment_cost, const char* who) {
    if (n < 1)
        throw std::runtime_error(std::string(who) + ": no sentences");
    if (n > 16)
        throw std::runtime_error(std::string(who) + ": refusing to enumerate beyond 16 sentences");

    double best_cost = 0.0;
    std::vector<int> best_bounds;
    bool have_best = false;
    const unsigned subsets = 1u << (n - 1);
    for (unsigned subset = 0; subset < subsets; ++subset) {
        const std::vector<int> bounds = bits_to_boundaries(subset, n);
        double cost = 0.0;
        int from = 0;
        bool first = true;
        for (std::size_t b = 0; b <= bounds.size(); ++b) {
            const int to = b < bounds.size() ? bounds[b] : n;
            if (!first)
                cost += per_boundary_penalty;
            cost += segment_cost(from, to);
            from = to;
            first = false;
        }
        if (!have_best || better(cost, bounds, best_cost, best_bounds)) {
            best_cost = cost;
            best_bounds = bounds;
            have_best = true;
        }
    }
    Segmentation result(n, std::move(best_bounds));
    result.validate(who);
    return result;
}

} // namespace

Segmentation segment_exhaustive_u00(const TokenizedText& text,
                                    const SegmenterOptions& opts) {
    const int n = text.sentence_count();
    if (n < 1)
        throw std::runtime_error("segment_exhaustive_u00: no sentences");

    // Independent token bookkeeping: plain string maps per segment.
    const long vocab = static_cast<long>(text.vocabulary.size());
    const long total_tokens = text.token_count();
    const double penalty =
        opts.penalty_weight *
        std::log(static_cast<double>(std::max<long>(1, total_tokens)));

    const auto segment_cost = [&](int a, int b) {
        std::map<std::string, long> counts;
        long total = 0;
        for (int s = a; s < b; ++s) {
            for (const auto& token : text.sentences[s]) {
                ++counts[token];
                ++total;
            }
        }
        const double denom = static_cast<double>(total + vocab);
        double cost = 0.0;
        for (int s = a; s < b; ++s)
            for (const auto& token : text.sentences[s])
                cost -= std::log((static_cast<double>(counts[token]) + 1.0) / denom);
        return cost;
    };
    return enumerate_all(n, penalty, segment_cost, "segment_exhaustive_u00");
}

Segmentation segment_exhaustive_length(const SimilarityMatrix& sim,
                                       const SegmenterOptions& opts) {
    require_square(sim, "segment_exhaustive_length");
    const int n = static_cast<int>(sim.size());
    const auto segment_cost = [&](int a, int b) {
        double pair_sum = 0.0;
        for (int p = a; p < b; ++p)
            for (int q = p + 1; q < b; ++q)
                pair_sum += sim[p][q];
        const double len = static_cast<double>(b - a);
        const double dl = len - opts.preferred_length;
        return opts.length_weight * (dl * dl) - pair_sum / len;
    };
    return enumerate_all(n, 0.0, segment_cost, "segment_exhaustive_length");
}

double u00_cost(const TokenizedText& text, const std::vector<int>& boundaries,
                const SegmenterOptions& opts) {
    const int n = text.sentence_count();
    Segmentation(n, boundaries).validate("u00_cost");
    const auto ids = sentence_token_ids(text);
    const long vocab = static_cast<long>(text.vocabulary.size());
    const double penalty =
        opts.penalty_weight *
        std::log(static_cast<double>(std::max<long>(1, text.token_count())));
    std::vector<long> counts(text.vocabulary.size(), 0);
    std::vector<int> touched;
    double cost = 0.0;
    int from = 0;
    bool first = true;
    for (std::size_t b = 0; b <= boundaries.size(); ++b) {
        const int to = b < boundaries.size() ? boundaries[b] : n;
        if (!first)
            cost += penalty;
        cost += u00_segment_cost(ids, from, to, vocab, counts, touched);
        from = to;
        first = false;
    }
    return cost;
}

double length_cost(const SimilarityMatrix& sim, const std::vector<int>& boundaries,
                   const SegmenterOptions& opts) {
    require_square(sim, "length_cost");
    const int n = static_cast<int>(sim.size());
    Segmentation(n, boundaries).validate("length_cost");
    double cost = 0.0;
    int from = 0;
    for (std::size_t b = 0; b <= boundaries.size(); ++b) {
        const int to = b < boundaries.size() ? boundaries[b] : n;
        cost += length_segment_cost(sim, from, to, opts.preferred_length,
                                    opts.length_weight);
        from = to;
    }
    return cost;
}

void write_boundary_file(const std::string& path,
                         const std::vector<BoundaryRecord>& records) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write boundary file: " + path);
    for (const auto& r : records) {
        json line = {{"sample_id", r.sample_id},
                     {"algorithm", r.algorithm},
                     {"boundaries", r.boundaries},
                     {"n", r.total_units}};
        out << line.dump() << "\n";
    }
}

std::vector<BoundaryRecord> read_boundary_file(const std::string& path,
                                               std::vector<std::string>* errors) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open boundary file: " + path);

    std::vector<BoundaryRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto fail = [&](const std::string& reason) {
            const std::string message = "line " + std::to_string(lineno) + ": " + reason;
            if (errors)
                errors->push_back(message);
            else
                throw std::runtime_error(path + ": " + message);
        };
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            fail("not a JSON object");
            continue;
        }
        if (!j.contains("sample_id") || !j["sample_id"].is_string() ||
            !j.contains("boundaries") || !j["boundaries"].is_array() ||
            !j.contains("n") || !j["n"].is_number_integer()) {
            fail("needs sample_id (string), boundaries (array), n (integer)");
            continue;
        }
        BoundaryRecord r;
        r.sample_id = j["sample_id"].get<std::string>();
        r.algorithm = j.value("algorithm", std::string());
        r.total_units = j["n"].get<int>();
        bool ok = true;
        for (const auto& v : j["boundaries"]) {
            if (!v.is_number_integer()) {
                fail("boundaries must be integers");
                ok = false;
                break;
            }
            r.boundaries.push_back(v.get<int>());
        }
        if (!ok)
            continue;
        try {
            Segmentation(r.total_units, r.boundaries).validate();
        } catch (const std::exception& e) {
            fail(e.what());
            continue;
        }
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace segbench
