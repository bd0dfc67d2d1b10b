#pragma once

#include <cstdint>
#include <initializer_list>

namespace bethe {

// SplitMix64 (Steele, Lea & Flood 2014). One 64-bit word of state, output
// sequence fully determined by the seed, identical on every platform.
// All randomness in this project flows through this generator so that runs
// replay exactly across implementations and thread counts.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 significant bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), rejection sampled so the result does not
    // depend on platform-specific modulo bias tricks.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
};

// Deterministic sub-stream derivation: folds a list of integer labels
// (model index, beta index, restart index, ...) into a fresh seed.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> labels) {
    SplitMix64 rng(seed);
    std::uint64_t h = rng.next();
    for (std::uint64_t label : labels) {
        SplitMix64 mix(h ^ (label + 0x9e3779b97f4a7c15ull));
        h = mix.next();
    }
    return h;
}

} // namespace bethe
