#include "smoothdt/rng.hpp"

#include "smoothdt/util.hpp"

namespace smoothdt {

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) {
    SplitMix64 a(master);
    SplitMix64 b(a() ^ fnv1a64(label));
    SplitMix64 c(b() + 0x9e3779b97f4a7c15ull * index);
    return c();
}

std::mt19937_64 make_engine(std::uint64_t master, std::string_view label,
                            std::uint64_t index) {
    return std::mt19937_64(derive_seed(master, label, index));
}

} // namespace smoothdt
