#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hlb/coeff_tensor.hpp"
#include "hlb/rational.hpp"
#include "hlb/summation.hpp"

namespace hlb {

/// Optimal summability exponent rho(p, m) for m-linear forms on l_p:
/// p/(p-m) for m < p <= 2m, 2mp/(mp+p-2m) for p >= 2m, 2m/(m+1) at p = inf.
inline double hl_exponent(int m, const ExtReal& p) {
  if (m < 2) throw std::invalid_argument("hl_exponent: m must be >= 2");
  if (p.is_inf()) return 2.0 * m / (m + 1.0);
  const double pv = p.value();
  if (pv <= m) throw std::domain_error("hl_exponent: requires p > m");
  if (pv <= 2.0 * m) return pv / (pv - m);
  return 2.0 * m * pv / (m * pv + pv - 2.0 * m);
}

/// Same exponent as an exact rational when p is rational or infinite.
inline Rational hl_exponent_exact(int m, const ExtReal& p) {
  if (m < 2) throw std::invalid_argument("hl_exponent: m must be >= 2");
  if (p.is_inf()) return Rational(2 * m, m + 1);
  if (!p.exact()) throw std::invalid_argument("hl_exponent_exact: p has no rational form");
  const std::int64_t a = p.exact()->num, b = p.exact()->den;
  if (a <= static_cast<std::int64_t>(m) * b) throw std::domain_error("hl_exponent: requires p > m");
  if (a <= 2 * static_cast<std::int64_t>(m) * b) return Rational(a, a - m * b);
  return Rational(2 * m * a, m * a + a - 2 * m * b);
}

/// (sum |c|^q)^(1/q) over the stored coefficients; max |c| at q = inf.
inline double coeff_lq(const CoeffTensor& t, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("coeff_lq: requires q >= 1");
  std::vector<double> mags;
  mags.reserve(t.nnz());
  for (const auto& [idx, c] : t.entries()) mags.push_back(c);
  return lq_norm(mags, q);
}

/// Exponent list q = (q_1, ..., q_m) for mixed norms.  q_1 is attached to
/// the outermost index, q_m to the innermost.
using ExponentVector = std::vector<double>;

namespace detail {

using EntryView = std::pair<const CoeffTensor::Index*, double>;

inline double mixed_reduce(std::span<const EntryView> entries, std::size_t axis,
                           std::span<const double> q) {
  if (axis + 1 == q.size()) {
    // innermost index: plain l_{q_m} over the run
    std::vector<double> mags;
    mags.reserve(entries.size());
    for (const auto& e : entries) mags.push_back(e.second);
    return lq_norm(mags, q[axis]);
  }
  std::vector<double> groups;
  std::size_t lo = 0;
  while (lo < entries.size()) {
    std::size_t hi = lo + 1;
    while (hi < entries.size() && (*entries[hi].first)[axis] == (*entries[lo].first)[axis]) ++hi;
    groups.push_back(mixed_reduce(entries.subspan(lo, hi - lo), axis + 1, q));
    lo = hi;
  }
  return lq_norm(groups, q[axis]);
}

}  // namespace detail

/// Nested mixed norm of the coefficient tensor: the innermost sum runs over
/// the last index with exponent q_m, the outermost over the first index with
/// exponent q_1.  Equals coeff_lq when all exponents agree.  q_i = inf takes
/// a max over that index.  The nesting order is exactly the order given;
/// callers wanting another order must permute the tensor themselves.
inline double mixed_norm(const CoeffTensor& t, std::span<const double> q) {
  if (static_cast<int>(q.size()) != t.degree())
    throw std::invalid_argument("mixed_norm: exponent count must equal degree");
  for (double qi : q)
    if (!(qi >= 1.0)) throw std::invalid_argument("mixed_norm: exponents must be >= 1");
  if (t.nnz() == 0) return 0.0;
  std::vector<detail::EntryView> entries;
  entries.reserve(t.nnz());
  for (const auto& [idx, c] : t.entries()) entries.emplace_back(&idx, c);
  return detail::mixed_reduce(entries, 0, q);
}

struct ExponentCheck {
  bool ok = false;
  std::string diagnostic;
};

/// Admissibility of q for degree m on l_p: every q_i in [p/(p-m), 2]
/// ([1, 2] at p = inf) and sum 1/q_i = (mp+p-2m)/(2p) within 1e-12.
inline ExponentCheck validate_exponents(std::span<const double> q, int m, const ExtReal& p) {
  std::ostringstream why;
  if (static_cast<int>(q.size()) != m) {
    why << "expected " << m << " exponents, got " << q.size();
    return {false, why.str()};
  }
  const bool inf = p.is_inf();
  if (!inf && p.value() <= m) return {false, "requires p > m"};
  const double lower = inf ? 1.0 : p.value() / (p.value() - m);
  const double target = inf ? (m + 1) / 2.0 : (m * p.value() + p.value() - 2.0 * m) / (2.0 * p.value());
  constexpr double kTol = 1e-12;
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::isinf(q[i])) {
      if (lower > 1.0 + kTol) {
        why << "q[" << i + 1 << "] = inf below lower limit " << lower;
        return {false, why.str()};
      }
      continue;  // contributes 0 to the sum
    }
    if (q[i] < lower - kTol || q[i] > 2.0 + kTol) {
      why << "q[" << i + 1 << "] = " << q[i] << " outside [" << lower << ", 2]";
      return {false, why.str()};
    }
    inv_sum += 1.0 / q[i];
  }
  if (std::abs(inv_sum - target) > kTol) {
    why << "sum 1/q_i = " << inv_sum << " but needs " << target;
    return {false, why.str()};
  }
  return {true, "ok"};
}

/// Companion exponent beta_m = 2*alpha*(m-1) / (alpha*(m+1) - 2): the value
/// making (alpha, beta_m, ..., beta_m) admissible at p = inf.
inline double gbh_beta(double alpha, int m) {
  if (m < 2) throw std::invalid_argument("gbh_beta: m must be >= 2");
  return (2.0 * alpha * m - 2.0 * alpha) / (alpha * m - 2.0 + alpha);
}

}  // namespace hlb
