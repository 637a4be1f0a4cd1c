#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the library.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline long double square(long double y, long double v) { return (y - v) * (y - v); }

inline long double entropy(long double y, long double v) {
  if ((v <= 0.0L && y > 0.0L) || (v >= 1.0L && y < 1.0L)) return INFINITY;
  long double out = 0.0L;
  if (y > 0.0L) out += y * std::log(y / v);
  if (y < 1.0L) out += (1.0L - y) * std::log((1.0L - y) / (1.0L - v));
  return out;
}

inline long double exponential(long double y, long double v) { return std::exp(-y * v); }

inline long double logit(long double y, long double v) { return std::log1p(std::exp(-y * v)); }

/// Sum over all 2^n step sequences of P(sequence) * pred(sums), pred given the
/// partial sums S_0..S_n.
template <typename Pred>
double enumerate_walks(int n, double up, Pred&& pred) {
  double total = 0.0;
  std::vector<int> sums(static_cast<std::size_t>(n) + 1);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0;
    sums[0] = 0;
    for (int j = 0; j < n; ++j) {
      const bool plus = (mask >> j) & 1u;
      prob *= plus ? up : 1.0 - up;
      sums[static_cast<std::size_t>(j) + 1] = sums[static_cast<std::size_t>(j)] + (plus ? 1 : -1);
    }
    total += prob * pred(sums);
  }
  return total;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace oracle
