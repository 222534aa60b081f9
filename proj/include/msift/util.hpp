#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>

namespace msift {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::uint64_t value, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

/// PRNG stream derived from (seed, tag). The same pair always yields the
/// same stream, no matter where in the program it is requested.
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::string_view tag) {
  return std::mt19937_64{fnv1a64(tag, fnv1a64(seed))};
}

/// Unbiased draw in [0, n). Avoids std::uniform_int_distribution, whose
/// output differs between standard libraries.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_real01(std::mt19937_64& rng);

std::size_t whitespace_token_count(std::string_view text);

/// Runs fn(0..n-1) on up to `threads` workers. Each index is handled exactly
/// once; callers must make writes per-index disjoint. threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Writes via a temporary file in the same directory and renames into place,
/// so a failed run leaves no partial output behind.
void atomic_write_file(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

}  // namespace msift
