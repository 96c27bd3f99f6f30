#pragma once

#include <cstdint>

namespace mim {

// Default seed for every stochastic command; documented in the CLI help.
inline constexpr std::uint64_t kDefaultSeed = 20170001;

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Steele/Lea/Flood; same mix as Java's SplittableRandom).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix64 generator: one 64-bit state word, one add-and-mix per draw.
// Cheap to construct, so substreams are made per replica rather than jumped.
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1), endpoints excluded; safe under log().
    double next_unit_open() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

// Substream for replica `stream` of master seed `seed`. The double hash keeps
// nearby (seed, stream) pairs statistically unrelated, and the derivation is a
// pure function of the pair, so serial and parallel replica orders agree
// bit-for-bit.
constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix64(mix64(seed) ^ mix64(stream + kGolden)));
}

} // namespace rng
} // namespace mim
