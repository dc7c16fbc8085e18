#include "segbench/rng.hpp"

namespace segbench {

namespace {

// Finalizer of SplitMix64; full-period bijection on 64-bit values.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace

std::uint64_t Rng::at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * kGolden);
}

std::uint64_t Rng::next_in(std::uint64_t lo, std::uint64_t hi) {
    return lo + next() % (hi - lo + 1);
}

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    // Two mixing rounds so that (seed, index) and (seed + 1, index - 1)
    // style collisions cannot line up.
    return mix64(mix64(master_seed ^ kGolden) + (index + 1) * kGolden);
}

} // namespace segbench
