#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace smoothdt {

/// Deterministic cascade summation. The reduction tree depends only on the
/// element count, so results are bit-stable across runs and worker counts.
double pairwise_sum(std::span<const double> v);

/// Runs fn(i) for every i in [0, count) on up to `workers` threads.
/// fn must only write to per-index slots; exceptions must not escape fn.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(std::string_view text);

/// Provenance digest of a real vector (hash of the raw little-endian bytes).
std::string digest_doubles(std::span<const double> v);

/// Fixed "%.12g" formatting shared by all report CSV writers.
std::string format_double(double v);
/// Round-trip-exact "%.17g" formatting for data interchange files.
std::string format_double_exact(double v);

} // namespace smoothdt
