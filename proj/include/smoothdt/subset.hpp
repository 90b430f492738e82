#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smoothdt {

/// A subset S of the variable set {1..n}, n <= 64, packed as a bitmask.
/// Variables are 1-indexed in the public API; bit (i-1) holds membership
/// of variable i.
class SubsetIndex {
public:
    constexpr SubsetIndex() = default;

    static constexpr SubsetIndex empty_set() { return SubsetIndex{}; }
    static constexpr SubsetIndex from_mask(std::uint64_t m) {
        SubsetIndex s;
        s.bits_ = m;
        return s;
    }
    /// Full set {1..n}.
    static SubsetIndex full_set(int n);
    static SubsetIndex of(std::initializer_list<int> vars);

    bool contains(int var) const { return (bits_ >> (var - 1)) & 1u; }
    SubsetIndex with(int var) const {
        return from_mask(bits_ | (1ull << (var - 1)));
    }
    SubsetIndex without(int var) const {
        return from_mask(bits_ & ~(1ull << (var - 1)));
    }
    bool subset_of(SubsetIndex o) const { return (bits_ & ~o.bits_) == 0; }
    SubsetIndex set_union(SubsetIndex o) const {
        return from_mask(bits_ | o.bits_);
    }
    SubsetIndex set_minus(SubsetIndex o) const {
        return from_mask(bits_ & ~o.bits_);
    }
    int size() const;
    bool empty() const { return bits_ == 0; }
    std::uint64_t mask() const { return bits_; }
    int max_var() const; // 0 for the empty set

    /// Member variables in ascending order, 1-indexed.
    std::vector<int> vars() const;
    template <class Fn>
    void for_each(Fn&& fn) const {
        std::uint64_t m = bits_;
        while (m) {
            fn(ctz(m) + 1);
            m &= m - 1;
        }
    }

    /// "empty" or semicolon-separated ascending indices, e.g. "1;3;5".
    std::string to_string() const;
    static std::optional<SubsetIndex> parse(std::string_view text);

    friend auto operator<=>(const SubsetIndex&, const SubsetIndex&) = default;

private:
    static int ctz(std::uint64_t m);
    std::uint64_t bits_ = 0;
};

} // namespace smoothdt

template <>
struct std::hash<smoothdt::SubsetIndex> {
    std::size_t operator()(const smoothdt::SubsetIndex& s) const noexcept {
        return std::hash<std::uint64_t>{}(s.mask());
    }
};
