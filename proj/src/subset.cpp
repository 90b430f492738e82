#include "smoothdt/subset.hpp"

#include <bit>
#include <charconv>
#include <stdexcept>

namespace smoothdt {

SubsetIndex SubsetIndex::full_set(int n) {
    if (n < 0 || n > 64) throw std::invalid_argument("full_set: n out of range");
    if (n == 64) return from_mask(~0ull);
    return from_mask((1ull << n) - 1);
}

SubsetIndex SubsetIndex::of(std::initializer_list<int> vars) {
    SubsetIndex s;
    for (int v : vars) {
        if (v < 1 || v > 64) throw std::invalid_argument("SubsetIndex: variable out of range");
        s = s.with(v);
    }
    return s;
}

int SubsetIndex::size() const { return std::popcount(bits_); }

int SubsetIndex::max_var() const {
    return bits_ == 0 ? 0 : 64 - std::countl_zero(bits_);
}

int SubsetIndex::ctz(std::uint64_t m) { return std::countr_zero(m); }

std::vector<int> SubsetIndex::vars() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for_each([&](int v) { out.push_back(v); });
    return out;
}

std::string SubsetIndex::to_string() const {
    if (empty()) return "empty";
    std::string out;
    bool first = true;
    for_each([&](int v) {
        if (!first) out += ';';
        out += std::to_string(v);
        first = false;
    });
    return out;
}

std::optional<SubsetIndex> SubsetIndex::parse(std::string_view text) {
    if (text == "empty" || text.empty()) return empty_set();
    SubsetIndex s;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(';', pos);
        std::string_view tok = text.substr(
            pos, next == std::string_view::npos ? std::string_view::npos
                                                : next - pos);
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || v < 1 || v > 64)
            return std::nullopt;
        s = s.with(v);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return s;
}

} // namespace smoothdt
