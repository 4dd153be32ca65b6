#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hlb {

/// Pairwise (tree) summation; error grows like O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// (sum |v_i|^q)^(1/q), max |v_i| at q = inf.  Scaled by the largest
/// magnitude so large exponents do not overflow.
inline double lq_norm(std::span<const double> v, double q) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0 || std::isinf(q)) return m;
  std::vector<double> powers;
  powers.reserve(v.size());
  for (double x : v) {
    const double u = std::abs(x) / m;
    powers.push_back(q == 1.0 ? u : std::pow(u, q));
  }
  return m * std::pow(pairwise_sum(powers), 1.0 / q);
}

inline double lp_norm(std::span<const double> v, double p) { return lq_norm(v, p); }

}  // namespace hlb
