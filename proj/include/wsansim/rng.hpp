#pragma once

#include <cstdint>
#include <cstddef>

namespace wsansim {

/**
 * @brief Deterministic 64-bit PRNG (splitmix64), identical stream on every platform.
 *
 * The generator is fixed bit-exactly so that traces are reproducible across
 * machines and compilers:
 *
 *     state += 0x9E3779B97F4A7C15
 *     z = state
 *     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
 *     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
 *     output = z ^ (z >> 31)
 *
 * Derived draws are part of the contract too:
 *   - next_unit():  (next_u64() >> 11) * 2^-53, uniform in [0, 1)
 *   - next_index(n): next_u64() % n
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n). n must be nonzero.
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

private:
    std::uint64_t state_;
};

} // namespace wsansim
