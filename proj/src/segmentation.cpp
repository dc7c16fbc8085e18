#include "segbench/segmentation.hpp"

#include <stdexcept>

namespace segbench {

std::vector<int> Segmentation::segment_lengths() const {
    std::vector<int> lengths;
    int prev = 0;
    for (int b : boundaries) {
        lengths.push_back(b - prev);
        prev = b;
    }
    lengths.push_back(total_units - prev);
    return lengths;
}

void Segmentation::validate(const std::string& where) const {
    const std::string ctx = where.empty() ? "" : where + ": ";
    if (total_units < 1)
        throw std::runtime_error(ctx + "segmentation needs at least one unit");
    int prev = 0;
    for (int b : boundaries) {
        if (b < 1 || b > total_units - 1)
            throw std::runtime_error(ctx + "boundary " + std::to_string(b) +
                                     " outside [1, " + std::to_string(total_units - 1) + "]");
        if (b <= prev)
            throw std::runtime_error(ctx + "boundaries not strictly increasing at " +
                                     std::to_string(b));
        prev = b;
    }
}

} // namespace segbench
