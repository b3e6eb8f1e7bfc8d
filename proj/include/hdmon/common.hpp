#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdmon {

using Vec = std::vector<double>;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent substream keyed by (seed, stream). Reproducible regardless of
// which thread consumes which stream.
inline std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

// Type-7 quantile (linear interpolation of order statistics), p in (0,1).
// Sorts a copy; callers with a pre-sorted sample use quantile_type7_sorted.
inline double quantile_type7_sorted(const Vec& x, double p) {
  if (x.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p outside (0,1)");
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double quantile_type7(Vec x, double p) {
  std::sort(x.begin(), x.end());
  return quantile_type7_sorted(x, p);
}

// Falling factorial P_l^k = k(k-1)...(k-l+1), exact in 128-bit then converted.
// Negative arguments signal an index outside the statistic's trimmed range.
inline double falling_factorial(long long k, int l) {
  if (l < 0 || k < 0) throw std::invalid_argument("falling_factorial: negative argument");
  if (l == 0) return 1.0;
  if (k < l) return 0.0;
  __int128 acc = 1;
  for (int i = 0; i < l; ++i) acc *= static_cast<__int128>(k - i);
  return static_cast<double>(static_cast<long double>(acc));
}

inline double binom_coeff(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(acc);
}

inline double factorial_d(int n) {
  double acc = 1.0;
  for (int i = 2; i <= n; ++i) acc *= i;
  return acc;
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace hdmon
