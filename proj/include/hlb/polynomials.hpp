#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "hlb/optimizer.hpp"
#include "hlb/summation.hpp"

namespace hlb {

/// Homogeneous polynomial with exact integer coefficients, stored as a
/// sparse multi-index map.  Every stored multi-index alpha has
/// |alpha| = degree; doubles appear only when norms are taken.
struct Polynomial {
  using MultiIndex = std::vector<int>;

  int nvars = 0;
  int degree = 0;
  std::map<MultiIndex, std::int64_t> entries;

  Polynomial() = default;
  Polynomial(int nv, int deg) : nvars(nv), degree(deg) {
    if (nv < 1 || deg < 0) throw std::invalid_argument("polynomial: bad shape");
  }

  void add(const MultiIndex& alpha, std::int64_t c) {
    if (static_cast<int>(alpha.size()) != nvars)
      throw std::invalid_argument("polynomial: multi-index length mismatch");
    int total = 0;
    for (int a : alpha) {
      if (a < 0) throw std::invalid_argument("polynomial: negative exponent");
      total += a;
    }
    if (total != degree) throw std::invalid_argument("polynomial: not homogeneous");
    auto it = entries.find(alpha);
    if (it == entries.end()) {
      if (c != 0) entries.emplace(alpha, c);
    } else {
      it->second += c;
      if (it->second == 0) entries.erase(it);
    }
  }

  double evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars)
      throw std::invalid_argument("polynomial: argument length mismatch");
    double total = 0.0;
    for (const auto& [alpha, c] : entries) {
      double term = static_cast<double>(c);
      for (int v = 0; v < nvars; ++v)
        for (int e = 0; e < alpha[v]; ++e) term *= x[v];
      total += term;
    }
    return total;
  }

  std::vector<double> gradient(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars)
      throw std::invalid_argument("polynomial: argument length mismatch");
    std::vector<double> g(static_cast<std::size_t>(nvars), 0.0);
    for (const auto& [alpha, c] : entries) {
      for (int v = 0; v < nvars; ++v) {
        if (alpha[v] == 0) continue;
        double term = static_cast<double>(c) * alpha[v];
        for (int w = 0; w < nvars; ++w) {
          const int e = w == v ? alpha[w] - 1 : alpha[w];
          for (int i = 0; i < e; ++i) term *= x[w];
        }
        g[static_cast<std::size_t>(v)] += term;
      }
    }
    return g;
  }

  /// {"nvars": v, "degree": d, "entries": [{"alpha": [...], "c": k}, ...]}
  nlohmann::json to_json() const {
    nlohmann::json es = nlohmann::json::array();
    for (const auto& [alpha, c] : entries) es.push_back({{"alpha", alpha}, {"c", c}});
    return {{"nvars", nvars}, {"degree", degree}, {"entries", es}};
  }

  static Polynomial from_json(const nlohmann::json& j) {
    Polynomial p(j.at("nvars").get<int>(), j.at("degree").get<int>());
    for (const auto& e : j.at("entries"))
      p.add(e.at("alpha").get<MultiIndex>(), e.at("c").get<std::int64_t>());
    return p;
  }
};

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b,
                           std::size_t term_cap = 1'000'000) {
  if (a.nvars != b.nvars) throw std::invalid_argument("poly_mul: variable count mismatch");
  Polynomial out(a.nvars, a.degree + b.degree);
  Polynomial::MultiIndex alpha(static_cast<std::size_t>(a.nvars), 0);
  for (const auto& [aa, ac] : a.entries) {
    for (const auto& [ba, bc] : b.entries) {
      for (int v = 0; v < a.nvars; ++v) alpha[static_cast<std::size_t>(v)] = aa[v] + ba[v];
      out.add(alpha, ac * bc);
      if (out.entries.size() > term_cap) throw std::length_error("poly_mul: term cap exceeded");
    }
  }
  return out;
}

/// Exact coefficient convolution; the degree multiplies by n.
inline Polynomial poly_pow(const Polynomial& p, int n, std::size_t term_cap = 1'000'000) {
  if (n < 1) throw std::invalid_argument("poly_pow: requires n >= 1");
  Polynomial out = p;
  for (int i = 1; i < n; ++i) out = poly_mul(out, p, term_cap);
  return out;
}

/// (sum |a_alpha|^q)^(1/q); max |a_alpha| at q = inf.
inline double poly_coeff_norm(const Polynomial& p, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("poly_coeff_norm: requires q >= 1");
  std::vector<double> mags;
  mags.reserve(p.entries.size());
  for (const auto& [alpha, c] : p.entries) mags.push_back(static_cast<double>(c));
  return lq_norm(mags, q);
}

inline std::int64_t poly_max_abs_coeff(const Polynomial& p) {
  std::int64_t m = 0;
  for (const auto& [alpha, c] : p.entries) m = std::max(m, c < 0 ? -c : c);
  return m;
}

/// Degree-d polynomial in d variables built by squaring and differencing on
/// variable blocks: the base is x_1^2 - x_2^2, and each doubling is
/// (first half)^2 - (second half)^2 on fresh variables.
inline Polynomial make_Q(int d) {
  if (d < 2 || (d & (d - 1)) != 0)
    throw std::invalid_argument("make_Q: d must be a power of two >= 2");
  if (d == 2) {
    Polynomial q(2, 2);
    q.add({2, 0}, 1);
    q.add({0, 2}, -1);
    return q;
  }
  const int half = d / 2;
  const Polynomial inner = make_Q(half);
  Polynomial a(d, half), b(d, half);
  Polynomial::MultiIndex alpha(static_cast<std::size_t>(d), 0);
  for (const auto& [ia, c] : inner.entries) {
    for (int v = 0; v < half; ++v) alpha[static_cast<std::size_t>(v)] = ia[v];
    a.add(alpha, c);
    for (int v = 0; v < half; ++v) {
      alpha[static_cast<std::size_t>(v)] = 0;
      alpha[static_cast<std::size_t>(v + half)] = ia[v];
    }
    b.add(alpha, c);
    for (int v = half; v < d; ++v) alpha[static_cast<std::size_t>(v)] = 0;
  }
  Polynomial out(d, d);
  for (const auto& [ia, c] : poly_mul(a, a).entries) out.add(ia, c);
  for (const auto& [ia, c] : poly_mul(b, b).entries) out.add(ia, -c);
  return out;
}

struct EqMCheck {
  int m = 0, n = 0;
  std::int64_t lhs = 0;  // |Q_{2^m}^n|_inf, exact
  double rhs = 0.0;      // (2^n / (n+1))^(2^m - 1)
  bool holds = false;    // lhs >= rhs, compared in exact integer arithmetic
};

/// Compares |Q_{2^m}^n|_inf against (2^n/(n+1))^(2^m-1) by full expansion.
/// The comparison lhs * (n+1)^(2^m-1) >= 2^(n(2^m-1)) is done in integers.
inline EqMCheck check_eq_m(int m, int n, std::size_t term_cap = 1'000'000) {
  if (m < 1 || n < 1) throw std::invalid_argument("check_eq_m: requires m, n >= 1");
  EqMCheck r;
  r.m = m;
  r.n = n;
  const int d = 1 << m;
  r.lhs = poly_max_abs_coeff(poly_pow(make_Q(d), n, term_cap));
  const int e = d - 1;
  r.rhs = std::pow(std::pow(2.0, n) / (n + 1), static_cast<double>(e));
  __int128 lhs_scaled = r.lhs;
  for (int i = 0; i < e; ++i) lhs_scaled *= (n + 1);
  __int128 rhs_exact = 1;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) * e; ++i) rhs_exact *= 2;
  r.holds = lhs_scaled >= rhs_exact;
  return r;
}

/// Heuristic lower estimate of sup |P(x)| over the unit l_p ball by
/// multi-start gradient-direction ascent: each step replaces x with the
/// exact l_p maximizer of the linearization at x.  Feasible iterates only,
/// so the best value never exceeds the true norm.
inline double poly_sup_norm_ball(const Polynomial& poly, double p, int starts = 32,
                                 std::uint64_t seed = 0, int max_iters = 200) {
  if (!(p >= 1.0)) throw std::invalid_argument("poly_sup_norm_ball: requires p >= 1");
  double best = 0.0;
  for (int s = 0; s < starts; ++s) {
    SplitMix64 rng(SplitMix64::hash(seed, static_cast<std::uint64_t>(s)));
    std::vector<double> x(static_cast<std::size_t>(poly.nvars));
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& xi : x) xi = rng.next_normal();
      norm = lp_norm(x, p);
    }
    for (double& xi : x) xi /= norm;

    double value = std::abs(poly.evaluate(x));
    for (int it = 0; it < max_iters; ++it) {
      std::vector<double> g = poly.gradient(x);
      if (poly.evaluate(x) < 0.0)
        for (double& gi : g) gi = -gi;
      double big = 0.0;
      for (double gi : g) big = std::max(big, std::abs(gi));
      if (big == 0.0) break;
      auto [y, lin] = dual_argmax(g, p);
      const double candidate = std::abs(poly.evaluate(y));
      if (candidate <= value * (1.0 + 1e-12)) {
        value = std::max(value, candidate);
        break;
      }
      x = std::move(y);
      value = candidate;
    }
    best = std::max(best, value);
  }
  return best;
}

/// Exact max of |P| over the grid {-1, 0, 1}^nvars.  For the even-exponent
/// Q family this grid attains the true l_inf-ball norm.
inline double poly_grid_linf_max(const Polynomial& poly, int max_vars = 12) {
  if (poly.nvars > max_vars) throw std::length_error("poly_grid_linf_max: too many variables");
  std::vector<double> x(static_cast<std::size_t>(poly.nvars), -1.0);
  double best = 0.0;
  std::uint64_t total = 1;
  for (int v = 0; v < poly.nvars; ++v) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int v = 0; v < poly.nvars; ++v) {
      x[static_cast<std::size_t>(v)] = static_cast<double>(c % 3) - 1.0;
      c /= 3;
    }
    best = std::max(best, std::abs(poly.evaluate(x)));
  }
  return best;
}

}  // namespace hlb
