#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smoothdt {

/// Counter-based generator, cheap enough to construct once per Monte-Carlo
/// trial. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }
    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Labeled stream splitting: one master seed, independent streams per
/// purpose ("tree", "delta", "sample", ...), optionally indexed per trial.
/// Experiments are reproducible component by component.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);
std::mt19937_64 make_engine(std::uint64_t master, std::string_view label,
                            std::uint64_t index = 0);

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [-r, r].
template <class Rng>
double uniform_symmetric(Rng& rng, double r) {
    return (2.0 * uniform_unit(rng) - 1.0) * r;
}

/// Unbiased integer in [0, n) via rejection; n >= 1.
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t rem = (~0ull % n + 1) % n; // 2^64 mod n
    std::uint64_t x = rng();
    while (rem != 0 && x >= 0ull - rem) x = rng();
    return x % n;
}

/// Uniform integer in [lo, hi], inclusive.
template <class Rng>
int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_below(
                    rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// +1 or -1 with equal probability.
template <class Rng>
int random_sign(Rng& rng) {
    return (rng() >> 63) ? 1 : -1;
}

} // namespace smoothdt
