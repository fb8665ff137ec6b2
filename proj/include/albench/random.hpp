#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace albench {

// mt19937_64 output is fixed by the standard; the distributions below are
// written out by hand so draws agree across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {
inline std::uint64_t seed_part(std::uint64_t v) { return v; }
inline std::uint64_t seed_part(std::int64_t v) { return static_cast<std::uint64_t>(v); }
inline std::uint64_t seed_part(int v) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(v)); }
inline std::uint64_t seed_part(unsigned v) { return v; }
inline std::uint64_t seed_part(std::string_view s) { return fnv1a64(s); }
inline std::uint64_t seed_part(const char* s) { return fnv1a64(s); }
}  // namespace detail

// Order-sensitive 64-bit hash of a mixed list of integers and strings.
template <typename... Parts>
std::uint64_t hash64(const Parts&... parts) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  ((h = splitmix64(h ^ detail::seed_part(parts))), ...);
  return h;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range + 1) % range;
  std::uint64_t v;
  do {
    v = rng();
  } while (v > limit);
  return static_cast<std::size_t>(v % range);
}

// Uniform real in [0, 1) with 53 random bits.
inline double uniform_real(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// Random permutation of 0..n-1.
inline std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  shuffle(p, rng);
  return p;
}

// k distinct values from 0..n-1 (partial Fisher-Yates), in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_index(rng, n - i);
    std::swap(p[i], p[j]);
  }
  p.resize(k);
  return p;
}

}  // namespace albench
