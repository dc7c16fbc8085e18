#pragma once

#include "segbench/segmentation.hpp"

namespace segbench {

struct MetricReport {
    double precision = 0.0;
    double recall = 0.0;
    double pk = 0.0;
    double window_diff = 0.0;
    int k_used = 0;
};

// Exact boundary-match precision and recall.  With no hypothesized
// boundaries precision is 1 when the reference is empty too, else 0;
// recall is 1 when the reference is empty.  Throws when the two
// segmentations disagree on the unit count.
std::pair<double, double> precision_recall(const Segmentation& hyp,
                                           const Segmentation& ref);

// Window half-width used by the sliding metrics: half the mean reference
// segment length, floored, but at least 1.
int default_k(const Segmentation& ref);

// Probability that the two endpoints of a random width-k window are
// placed in the same segment by one segmentation and different ones by
// the other: (1/(N-k)) * sum over i of [same_ref(i, i+k) != same_hyp(i, i+k)].
// Requires 1 <= k < N.  k = 0 picks default_k(ref).
double pk(const Segmentation& hyp, const Segmentation& ref, int k = 0);

// Fraction of width-k windows whose boundary counts differ between the
// segmentations: (1/(N-k)) * sum over i of [count_ref(i) != count_hyp(i)],
// counting boundaries in slots i .. i+k-1.  Same k rules as pk.
double window_diff(const Segmentation& hyp, const Segmentation& ref, int k = 0);

// Everything at once with a shared k (defaulted from the reference).
MetricReport evaluate(const Segmentation& hyp, const Segmentation& ref, int k = 0);

// Literal re-statement of the window metrics used to cross-check the
// closed-form implementations in tests: materializes every window as a
// pair of endpoint segment ids / an explicit boundary count and compares.
double pk_oracle(const Segmentation& hyp, const Segmentation& ref, int k);
double window_diff_oracle(const Segmentation& hyp, const Segmentation& ref, int k);

} // namespace segbench
