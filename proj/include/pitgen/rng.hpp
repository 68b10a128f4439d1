#pragma once

#include <cstdint>
#include <random>

namespace pitgen {

// Deterministic random stream. Every randomized routine takes one of these
// explicitly; nothing in the library touches global RNG state. Streams for
// independent work items (trial i of an experiment, say) are derived from the
// master seed by index, so results do not depend on evaluation order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed)
        : seed_(seed)
        , eng_(seed)
    {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return eng_(); }

    // Unbiased draw from [0, bound) by rejection. bound = 0 is invalid.
    std::uint64_t below(std::uint64_t bound);

    // Child stream keyed by (seed, index). Does not consume from or depend on
    // the state of this stream.
    Rng derive(std::uint64_t index) const;

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

// splitmix64 step; used for seed mixing so derived streams decorrelate even
// for adjacent indices.
std::uint64_t mix64(std::uint64_t x);

} // namespace pitgen
