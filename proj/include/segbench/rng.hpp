#pragma once

#include <cstdint>

namespace segbench {

// Counter-based pseudo-random generator built on the SplitMix64 mixing
// function (Steele, Lea & Flood 2014).  Output i is a pure function of
// (seed, i), so any draw can be computed without generating its
// predecessors and independently seeded streams can run in parallel
// while staying bit-identical to a sequential run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    // The i-th output of the stream identified by `seed`.
    static std::uint64_t at(std::uint64_t seed, std::uint64_t counter);

    std::uint64_t next() { return at(seed_, counter_++); }

    // Uniform draw from the inclusive range [lo, hi].  The modulo bias is
    // negligible for the small ranges used here (document counts, segment
    // lengths) and keeps the draw sequence easy to reproduce by hand.
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi);

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Derives the seed of a substream, e.g. one per generated segment or per
// sample.  Mixing the index through SplitMix64 decorrelates substreams even
// when master seeds or indices are small consecutive integers.
std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index);

} // namespace segbench
