#pragma once

#include <string>
#include <vector>

namespace segbench {

// A linear segmentation of `total_units` sentences.  Boundary value t
// (1-based, valid range [1, total_units - 1]) sits in the gap between
// sentence t and sentence t + 1, so a text of N sentences has N - 1
// candidate slots.  Boundaries are kept strictly increasing.
struct Segmentation {
    int total_units = 0;
    std::vector<int> boundaries;

    Segmentation() = default;
    Segmentation(int n, std::vector<int> b) : total_units(n), boundaries(std::move(b)) {}

    int segment_count() const { return static_cast<int>(boundaries.size()) + 1; }

    // Lengths of the segments delimited by the boundaries, left to right.
    std::vector<int> segment_lengths() const;

    // Throws std::runtime_error when a boundary falls outside [1, N-1] or
    // the list is not strictly increasing.  `where` names the offender in
    // the message (a sample id, a file, ...).
    void validate(const std::string& where = "") const;
};

} // namespace segbench
