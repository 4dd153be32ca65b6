#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hlb/forms.hpp"
#include "hlb/summation.hpp"

namespace hlb {

/// SplitMix64 stream; portable and trivially seedable, so per-start streams
/// derived from (master seed, start index) are reproducible everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1), 53-bit.
  double next_double() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (the cosine half only).
  double next_normal() {
    const double u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  static std::uint64_t hash(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    return s.next();
  }

 private:
  std::uint64_t state_;
};

struct OptimizeConfig {
  double p = 2.0;  // l_p exponent, may be INFINITY
  int starts = 64;
  std::uint64_t master_seed = 0;
  double sweep_tol = 1e-10;  // relative improvement per full sweep
  int max_sweeps = 500;
  int threads = 0;  // 0 = hardware concurrency; never affects the result

  void validate() const {
    if (!(p >= 1.0)) throw std::invalid_argument("optimize: requires p >= 1");
    if (starts < 1) throw std::invalid_argument("optimize: needs at least one start");
    if (!(sweep_tol > 0.0)) throw std::invalid_argument("optimize: sweep_tol must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("optimize: max_sweeps must be positive");
  }
};

struct StartRecord {
  std::uint64_t seed = 0;
  double value = 0.0;
  int sweeps = 0;
  bool converged = false;
  int degenerate_retries = 0;
};

struct OptimizeResult {
  double best_value = 0.0;
  std::vector<std::vector<double>> witness;
  std::vector<StartRecord> per_start;
  double converged_fraction = 0.0;
  // provenance
  double p = 0.0;
  int starts = 0;
  std::uint64_t master_seed = 0;
};

/// Closed-form maximizer of <c, x> over the unit l_p ball.
/// For finite p > 1: x_i = sign(c_i) |c_i|^(p*-1) / ||c||_{p*}^(p*-1) and the
/// value is ||c||_{p*}.  At p = inf: x_i = sign(c_i) (sign(0) := +1),
/// value ||c||_1.  At p = 1 all mass goes on one maximal coordinate,
/// lowest index on ties, value ||c||_inf.
inline std::pair<std::vector<double>, double> dual_argmax(std::span<const double> c, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("dual_argmax: requires p >= 1");
  double big = 0.0;
  for (double ci : c) big = std::max(big, std::abs(ci));
  if (big == 0.0) throw std::invalid_argument("dual_argmax: zero vector");

  std::vector<double> x(c.size(), 0.0);
  if (std::isinf(p)) {
    double value = 0.0;
    std::vector<double> mags(c.begin(), c.end());
    for (std::size_t i = 0; i < c.size(); ++i) {
      x[i] = c[i] < 0.0 ? -1.0 : 1.0;
      mags[i] = std::abs(c[i]);
    }
    value = pairwise_sum(mags);
    return {std::move(x), value};
  }
  if (p == 1.0) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (std::abs(c[i]) > std::abs(c[arg])) arg = i;
    x[arg] = c[arg] < 0.0 ? -1.0 : 1.0;
    return {std::move(x), std::abs(c[arg])};
  }

  const double ps = p / (p - 1.0);
  std::vector<double> powers(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) powers[i] = std::pow(std::abs(c[i]) / big, ps);
  const double s = pairwise_sum(powers);
  const double value = big * std::pow(s, 1.0 / ps);
  const double denom = std::pow(s, (ps - 1.0) / ps);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double u = std::pow(std::abs(c[i]) / big, ps - 1.0) / denom;
    x[i] = c[i] < 0.0 ? -u : u;
  }
  return {std::move(x), value};
}

struct AscentOutcome {
  double value = 0.0;
  std::vector<std::vector<double>> witness;
  int sweeps = 0;
  bool converged = false;
  bool degenerate = false;
  std::vector<double> trace;  // objective after every slot update
};

/// Cyclic maximization over argument slots: each slot subproblem is linear,
/// solved exactly on the l_p ball by dual_argmax, so the objective sequence
/// |T(args)| is non-decreasing.  Stops when a full sweep improves by less
/// than sweep_tol relatively, or at max_sweeps.
inline AscentOutcome alternating_ascent(const FormExpr& expr, const OptimizeConfig& config,
                                        std::vector<std::vector<double>> start) {
  const int m = expr.degree();
  AscentOutcome out;
  out.witness = std::move(start);
  for (auto& v : out.witness) {
    const double n = lp_norm(v, config.p);
    if (n == 0.0) {
      out.degenerate = true;
      return out;
    }
    for (double& xi : v) xi /= n;
  }

  double prev = std::abs(expr.evaluate(out.witness));
  double value = prev;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    for (int k = 0; k < m; ++k) {
      const int slot = expr.slots()[k];
      const std::vector<double> c = expr.slot_coefficients(out.witness, slot);
      double big = 0.0;
      for (double ci : c) big = std::max(big, std::abs(ci));
      if (big == 0.0) {
        out.degenerate = true;
        out.value = value;
        out.sweeps = sweep;
        return out;
      }
      auto [x, val] = dual_argmax(c, config.p);
      out.witness[k] = std::move(x);
      value = val;
      out.trace.push_back(value);
    }
    out.sweeps = sweep;
    if (value - prev <= config.sweep_tol * std::max(1.0, value)) {
      out.converged = true;
      break;
    }
    prev = value;
  }
  out.value = std::abs(expr.evaluate(out.witness));
  return out;
}

namespace detail {

inline std::vector<std::vector<double>> random_start(const FormExpr& expr, double p,
                                                     SplitMix64& rng) {
  std::vector<std::vector<double>> args;
  args.reserve(expr.degree());
  for (int d : expr.dims()) {
    std::vector<double> v(static_cast<std::size_t>(d));
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& xi : v) {
        const double g = rng.next_normal();
        xi = g * g * g;  // heavy tails push starts toward ball extreme points
      }
      norm = lp_norm(v, p);
    }
    for (double& xi : v) xi /= norm;
    args.push_back(std::move(v));
  }
  return args;
}

}  // namespace detail

/// Multi-start lower estimate of ||T|| = sup |T(x^(1),...,x^(m))| over
/// products of unit l_p balls.  Per-start randomness is derived only from
/// (master_seed, start index) and the reduction is a max, so the result is
/// bit-identical for a fixed config regardless of thread count.  Starts
/// whose sweep degenerates (a zero slot functional) are retried up to three
/// times from fresh randomness and recorded either way.
inline OptimizeResult sup_norm(const FormExpr& expr, const OptimizeConfig& config) {
  config.validate();
  OptimizeResult result;
  result.p = config.p;
  result.starts = config.starts;
  result.master_seed = config.master_seed;
  result.per_start.resize(static_cast<std::size_t>(config.starts));

  std::vector<AscentOutcome> outcomes(static_cast<std::size_t>(config.starts));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.starts) return;
      std::uint64_t seed = SplitMix64::hash(config.master_seed, static_cast<std::uint64_t>(i));
      StartRecord rec;
      rec.seed = seed;
      AscentOutcome outcome;
      for (int attempt = 0; attempt <= 3; ++attempt) {
        SplitMix64 rng(seed);
        outcome = alternating_ascent(expr, config, detail::random_start(expr, config.p, rng));
        if (!outcome.degenerate) break;
        ++rec.degenerate_retries;
        seed = SplitMix64::hash(rec.seed, static_cast<std::uint64_t>(attempt + 1));
      }
      rec.value = outcome.value;
      rec.sweeps = outcome.sweeps;
      rec.converged = outcome.converged;
      result.per_start[static_cast<std::size_t>(i)] = rec;
      outcomes[static_cast<std::size_t>(i)] = std::move(outcome);
    }
  };

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, config.starts));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int best = 0, converged = 0;
  for (int i = 0; i < config.starts; ++i) {
    if (outcomes[static_cast<std::size_t>(i)].value >
        outcomes[static_cast<std::size_t>(best)].value)
      best = i;
    if (result.per_start[static_cast<std::size_t>(i)].converged) ++converged;
  }
  result.best_value = outcomes[static_cast<std::size_t>(best)].value;
  result.witness = std::move(outcomes[static_cast<std::size_t>(best)].witness);
  result.converged_fraction = static_cast<double>(converged) / config.starts;
  return result;
}

/// Exact norm of the 2x2 Hadamard-type bilinear form on l_p (p >= 2):
/// sup over [0,1] of ((1+x)^{p*} + (1-x)^{p*})^{1/p*} / (1+x^p)^{1/p},
/// located by a 1024-point grid scan plus golden-section refinement.
inline double clarkson_sup(double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("clarkson_sup: requires p >= 2");
  if (std::isinf(p)) return 2.0;  // numerator is 2, denominator max(1, x) = 1
  const double ps = p / (p - 1.0);
  const auto f = [p, ps](double x) {
    const double num = std::pow(std::pow(1.0 + x, ps) + std::pow(1.0 - x, ps), 1.0 / ps);
    return num / std::pow(1.0 + std::pow(x, p), 1.0 / p);
  };

  constexpr int kGrid = 1024;
  double best_x = 0.0, best_f = f(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double a = std::max(0.0, best_x - 1.0 / kGrid);
  double b = std::min(1.0, best_x + 1.0 / kGrid);
  const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - (b - a) * inv_gr;
  double d = a + (b - a) * inv_gr;
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_gr;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_gr;
      fd = f(d);
    }
    best_f = std::max(best_f, std::max(fc, fd));
  }
  return best_f;
}

/// Exact sup of |T| over l_inf balls: a multilinear form attains its maximum
/// at +-1 sign vectors.  The slot with the largest dimension is resolved by
/// the l_1 norm of its partial functional, the rest are enumerated.
/// Requires the total coordinate count to be at most 24.
inline double brute_force_linf_norm(const FormExpr& expr) {
  const auto& dims = expr.dims();
  int total = 0, widest = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    total += dims[k];
    if (dims[k] > dims[static_cast<std::size_t>(widest)]) widest = static_cast<int>(k);
  }
  if (total > 24) throw std::length_error("brute_force_linf_norm: too large");

  std::vector<std::vector<double>> args;
  args.reserve(dims.size());
  for (int d : dims) args.emplace_back(static_cast<std::size_t>(d), 1.0);

  int sign_bits = 0;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (static_cast<int>(k) != widest) sign_bits += dims[k];

  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << sign_bits); ++mask) {
    std::uint64_t bits = mask;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (static_cast<int>(k) == widest) continue;
      for (int i = 0; i < dims[k]; ++i) {
        args[k][static_cast<std::size_t>(i)] = (bits & 1) ? -1.0 : 1.0;
        bits >>= 1;
      }
    }
    const std::vector<double> c = expr.slot_coefficients(args, expr.slots()[widest]);
    double sum = 0.0;
    for (double ci : c) sum += std::abs(ci);
    best = std::max(best, sum);
  }
  return best;
}

/// {"best": v, "witness": [[...],...], "starts": N, "seed": s,
///  "per_start": [[seed, value, sweeps], ...]}
inline nlohmann::json optimize_result_to_json(const OptimizeResult& r) {
  nlohmann::json per_start = nlohmann::json::array();
  for (const auto& rec : r.per_start)
    per_start.push_back({rec.seed, rec.value, rec.sweeps});
  return {{"best", r.best_value},
          {"witness", r.witness},
          {"starts", r.starts},
          {"seed", r.master_seed},
          {"per_start", per_start}};
}

inline OptimizeResult optimize_result_from_json(const nlohmann::json& j) {
  OptimizeResult r;
  r.best_value = j.at("best").get<double>();
  r.witness = j.at("witness").get<std::vector<std::vector<double>>>();
  r.starts = j.at("starts").get<int>();
  r.master_seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("per_start")) {
    StartRecord rec;
    rec.seed = e.at(0).get<std::uint64_t>();
    rec.value = e.at(1).get<double>();
    rec.sweeps = e.at(2).get<int>();
    r.per_start.push_back(rec);
  }
  return r;
}

}  // namespace hlb
