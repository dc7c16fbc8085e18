#include "segbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace segbench {

namespace {

void require_same_units(const Segmentation& hyp, const Segmentation& ref) {
    if (hyp.total_units != ref.total_units)
        throw std::runtime_error("segmentations cover different unit counts: " +
                                 std::to_string(hyp.total_units) + " vs " +
                                 std::to_string(ref.total_units));
}

int resolve_k(const Segmentation& ref, int k) {
    if (k == 0)
        k = default_k(ref);
    if (k < 1 || k >= ref.total_units)
        throw std::runtime_error("window width k = " + std::to_string(k) +
                                 " must satisfy 1 <= k < " +
                                 std::to_string(ref.total_units));
    return k;
}

// prefix[t] = number of boundaries at slots <= t, for t in [0, N-1].
std::vector<int> boundary_prefix(const Segmentation& seg) {
    std::vector<int> prefix(seg.total_units, 0);
    for (int b : seg.boundaries)
        ++prefix[b];
    for (std::size_t t = 1; t < prefix.size(); ++t)
        prefix[t] += prefix[t - 1];
    return prefix;
}

// Segment id of every 1-indexed unit; used by the window-listing oracles.
std::vector<int> segment_ids(const Segmentation& seg) {
    std::vector<int> id(seg.total_units + 1, 0);
    int current = 0;
    std::size_t next = 0;
    for (int unit = 1; unit <= seg.total_units; ++unit) {
        if (next < seg.boundaries.size() && seg.boundaries[next] == unit - 1) {
            ++current;
            ++next;
        }
        id[unit] = current;
    }
    return id;
}

} // namespace

std::pair<double, double> precision_recall(const Segmentation& hyp,
                                           const Segmentation& ref) {
    require_same_units(hyp, ref);
    std::vector<int> common;
    std::set_intersection(hyp.boundaries.begin(), hyp.boundaries.end(),
                          ref.boundaries.begin(), ref.boundaries.end(),
                          std::back_inserter(common));
    const double matched = static_cast<double>(common.size());
    const double precision = hyp.boundaries.empty()
                                 ? (ref.boundaries.empty() ? 1.0 : 0.0)
                                 : matched / static_cast<double>(hyp.boundaries.size());
    const double recall = ref.boundaries.empty()
                              ? 1.0
                              : matched / static_cast<double>(ref.boundaries.size());
    return {precision, recall};
}

int default_k(const Segmentation& ref) {
    const double mean = static_cast<double>(ref.total_units) /
                        static_cast<double>(ref.segment_count());
    return std::max(1, static_cast<int>(std::floor(mean / 2.0)));
}

double pk(const Segmentation& hyp, const Segmentation& ref, int k) {
    require_same_units(hyp, ref);
    k = resolve_k(ref, k);
    const auto ref_prefix = boundary_prefix(ref);
    const auto hyp_prefix = boundary_prefix(hyp);
    const int n = ref.total_units;
    int disagreements = 0;
    for (int i = 1; i + k <= n; ++i) {
        // Endpoints i and i+k share a segment iff slots i..i+k-1 are empty.
        const bool ref_same = ref_prefix[i + k - 1] - ref_prefix[i - 1] == 0;
        const bool hyp_same = hyp_prefix[i + k - 1] - hyp_prefix[i - 1] == 0;
        if (ref_same != hyp_same)
            ++disagreements;
    }
    return static_cast<double>(disagreements) / static_cast<double>(n - k);
}

double window_diff(const Segmentation& hyp, const Segmentation& ref, int k) {
    require_same_units(hyp, ref);
    k = resolve_k(ref, k);
    const auto ref_prefix = boundary_prefix(ref);
    const auto hyp_prefix = boundary_prefix(hyp);
    const int n = ref.total_units;
    int penalties = 0;
    for (int i = 1; i + k <= n; ++i) {
        const int ref_count = ref_prefix[i + k - 1] - ref_prefix[i - 1];
        const int hyp_count = hyp_prefix[i + k - 1] - hyp_prefix[i - 1];
        if (ref_count != hyp_count)
            ++penalties;
    }
    return static_cast<double>(penalties) / static_cast<double>(n - k);
}

MetricReport evaluate(const Segmentation& hyp, const Segmentation& ref, int k) {
    MetricReport report;
    std::tie(report.precision, report.recall) = precision_recall(hyp, ref);
    report.k_used = k == 0 ? default_k(ref) : k;
    report.pk = pk(hyp, ref, report.k_used);
    report.window_diff = window_diff(hyp, ref, report.k_used);
    return report;
}

double pk_oracle(const Segmentation& hyp, const Segmentation& ref, int k) {
    require_same_units(hyp, ref);
    k = resolve_k(ref, k);
    const auto ref_id = segment_ids(ref);
    const auto hyp_id = segment_ids(hyp);
    const int n = ref.total_units;
    int disagreements = 0;
    for (int i = 1; i + k <= n; ++i) {
        const bool ref_same = ref_id[i] == ref_id[i + k];
        const bool hyp_same = hyp_id[i] == hyp_id[i + k];
        if (ref_same != hyp_same)
            ++disagreements;
    }
    return static_cast<double>(disagreements) / static_cast<double>(n - k);
}

double window_diff_oracle(const Segmentation& hyp, const Segmentation& ref, int k) {
    require_same_units(hyp, ref);
    k = resolve_k(ref, k);
    const int n = ref.total_units;
    int penalties = 0;
    for (int i = 1; i + k <= n; ++i) {
        int ref_count = 0, hyp_count = 0;
        for (int slot = i; slot <= i + k - 1; ++slot) {
            if (std::find(ref.boundaries.begin(), ref.boundaries.end(), slot) !=
                ref.boundaries.end())
                ++ref_count;
            if (std::find(hyp.boundaries.begin(), hyp.boundaries.end(), slot) !=
                hyp.boundaries.end())
                ++hyp_count;
        }
        if (ref_count != hyp_count)
            ++penalties;
    }
    return static_cast<double>(penalties) / static_cast<double>(n - k);
}

} // namespace segbench
