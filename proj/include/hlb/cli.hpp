#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlb/bounds.hpp"
#include "hlb/cache.hpp"
#include "hlb/forms.hpp"
#include "hlb/norms.hpp"
#include "hlb/optimizer.hpp"
#include "hlb/polynomials.hpp"
#include "hlb/reference.hpp"
#include "hlb/version.hpp"

namespace hlb::cli {

inline constexpr std::uint64_t kDefaultSeed = 0x484C2015ULL;
inline constexpr const char* kDefaultCacheDir = ".hlb-cache";

enum class Format { kMd, kCsv, kJson };

inline std::optional<Format> parse_format(std::string_view text) {
  if (text == "md") return Format::kMd;
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  return std::nullopt;
}

struct CommandResult {
  int exit_code = 0;
  std::string output;
  nlohmann::json manifest;
};

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest_hex(std::string_view s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

/// Round half away from zero at `digits` decimals, for table display.
inline double round_half_up(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::floor(v * scale + 0.5) / scale;
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, round_half_up(v, digits));
  return buf;
}

namespace detail {

inline void write_manifest_file(const std::string& cache_dir, const std::string& command,
                                const nlohmann::json& manifest) {
  std::error_code ec;
  const std::filesystem::path dir = std::filesystem::path(cache_dir) / "manifests";
  std::filesystem::create_directories(dir, ec);
  if (ec) return;
  std::string slug = command;
  for (char& ch : slug)
    if (ch == ' ') ch = '-';
  std::ofstream out(dir / (slug + "-" + manifest.at("output_digest").get<std::string>() + ".json"));
  out << manifest.dump(1) << '\n';
}

inline OptimizeResult cached_sup_norm(const FormExpr& expr, const std::string& family, int m,
                                      const ExtReal& p, const OptimizeConfig& config,
                                      const std::string& cache_dir, bool compute_if_missing,
                                      bool* found) {
  ResultCache cache(cache_dir);
  ResultCache::Key key{family, m, p, config.starts, config.master_seed, config.sweep_tol};
  if (auto hit = cache.load(key)) {
    if (found) *found = true;
    return *hit;
  }
  if (!compute_if_missing) {
    if (found) *found = false;
    return {};
  }
  OptimizeResult result = sup_norm(expr, config);
  cache.store(key, result);
  if (found) *found = true;
  return result;
}

}  // namespace detail

// ---- table ----------------------------------------------------------------

struct TableOptions {
  std::string name;  // "dell99" (inductive family) or "t44" (shifted products)
  int starts = 64;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-10;
  int max_sweeps = 500;
  Format format = Format::kMd;
  std::string cache_dir = kDefaultCacheDir;
  bool include_heavy = false;
  int min_m = 0;  // 0 = family default
  int max_m = 0;
  int threads = 0;
};

struct TableRow {
  int m = 0;
  ExtReal p;
  double numerator = 0.0;
  std::optional<double> norm;  // absent when a heavy row was skipped
  double bound = 0.0;
  std::optional<double> certified_bound;
  double ref_norm = 0.0;
  double ref_bound = 0.0;
  double rel_dev = 0.0;
  std::uint64_t seed = 0;
};

inline CommandResult cmd_table(const TableOptions& opt) {
  const bool tilde_family = opt.name == "t44";
  if (!tilde_family && opt.name != "dell99")
    return {2, "unknown table '" + opt.name + "' (expected dell99 or t44)\n", {}};

  std::vector<int> ms;
  if (tilde_family) {
    ms = {4, 8, 16};
  } else {
    const int lo = opt.min_m > 0 ? opt.min_m : 2;
    const int hi = opt.max_m > 0 ? opt.max_m : 5;
    if (lo < 2 || hi > 9 || lo > hi)
      return {2, "dell99 rows must lie in m = 2..9\n", {}};
    for (int m = lo; m <= hi; ++m) ms.push_back(m);
  }

  std::vector<TableRow> rows;
  for (int m : ms) {
    TableRow row;
    row.m = m;
    row.p = ExtReal(Rational(2 * m));
    row.seed = opt.seed;
    const auto ref = tilde_family ? reference::tilde_row(m) : reference::littlewood_row(m);
    row.ref_norm = ref->norm;
    row.ref_bound = ref->bound;

    const FormExpr expr = tilde_family ? make_tilde(m) : make_littlewood(m);
    OptimizeConfig config;
    config.p = 2.0 * m;
    config.starts = opt.starts;
    config.master_seed = opt.seed;
    config.sweep_tol = opt.tol;
    config.max_sweeps = opt.max_sweeps;
    config.threads = opt.threads;

    const bool heavy = tilde_family && m == 16;
    bool found = false;
    OptimizeResult result = detail::cached_sup_norm(expr, tilde_family ? "tilde" : "littlewood",
                                                    m, row.p, config, opt.cache_dir,
                                                    /*compute_if_missing=*/!heavy || opt.include_heavy,
                                                    &found);
    const double rho = hl_exponent(m, row.p);
    row.numerator = std::pow(static_cast<double>(expr.analytic_nonzeros()), 1.0 / rho);
    if (found) {
      std::optional<double> upper;
      if (!tilde_family) upper = std::exp2(m - 2) * clarkson_sup(2.0 * m);
      const BoundRecord record = bound_numeric(expr, m, row.p, result, upper);
      row.norm = result.best_value;
      row.bound = record.bound;
      row.certified_bound = record.certified_bound;
      row.rel_dev = (result.best_value - row.ref_norm) / row.ref_norm;
    }
    rows.push_back(row);
  }

  // body in the requested format
  std::ostringstream body;
  body.precision(17);
  if (opt.format == Format::kMd) {
    body << "| m | p | numerator | norm | bound | ref norm | ref bound | rel dev |\n";
    body << "|---|---|-----------|------|-------|----------|-----------|---------|\n";
    for (const auto& row : rows) {
      body << "| " << row.m << " | " << row.p.str() << " | " << fixed(row.numerator, 2) << " | ";
      if (row.norm)
        body << fixed(*row.norm, 2) << " | " << fixed(row.bound, 3) << " | ";
      else
        body << "- | - | ";
      body << fixed(row.ref_norm, 2) << " | " << fixed(row.ref_bound, 3) << " | ";
      if (row.norm)
        body << fixed(100.0 * row.rel_dev, 3) << "% |\n";
      else
        body << "- |\n";
    }
  } else if (opt.format == Format::kCsv) {
    body << "m,p_num,p_den,numerator,norm,bound,ref_norm,ref_bound,rel_dev,seed\n";
    for (const auto& row : rows) {
      body << row.m << ',' << row.p.exact()->num << ',' << row.p.exact()->den << ','
           << row.numerator << ',';
      if (row.norm)
        body << *row.norm << ',' << row.bound << ',';
      else
        body << ",,";
      body << row.ref_norm << ',' << row.ref_bound << ',';
      if (row.norm) body << row.rel_dev;
      body << ',' << row.seed << '\n';
    }
  } else {
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json j{{"m", row.m},
                       {"p", {{"num", row.p.exact()->num}, {"den", row.p.exact()->den}}},
                       {"numerator", row.numerator},
                       {"ref_norm", row.ref_norm},
                       {"ref_bound", row.ref_bound},
                       {"seed", row.seed}};
      if (row.norm) {
        j["norm"] = *row.norm;
        j["bound"] = row.bound;
        j["rel_dev"] = row.rel_dev;
        if (row.certified_bound) j["certified_bound"] = *row.certified_bound;
      } else {
        j["norm"] = nullptr;
      }
      jrows.push_back(j);
    }
    body << jrows.dump(1) << '\n';
  }

  const std::string digest = digest_hex(body.str());
  nlohmann::json manifest{{"command", "table " + opt.name},
                          {"config",
                           {{"starts", opt.starts},
                            {"seed", opt.seed},
                            {"tol", opt.tol},
                            {"max_sweeps", opt.max_sweeps},
                            {"include_heavy", opt.include_heavy},
                            {"rows", ms},
                            {"format", opt.format == Format::kMd    ? "md"
                                       : opt.format == Format::kCsv ? "csv"
                                                                    : "json"}}},
                          {"version", kVersion},
                          {"output_digest", digest}};
  detail::write_manifest_file(opt.cache_dir, "table " + opt.name, manifest);

  CommandResult result;
  result.manifest = manifest;
  if (opt.format == Format::kJson) {
    nlohmann::json wrapper{{"table", opt.name},
                           {"rows", nlohmann::json::parse(body.str())},
                           {"manifest", manifest}};
    result.output = wrapper.dump(1) + "\n";
  } else if (opt.format == Format::kMd) {
    result.output = body.str() + "\nmanifest " + digest + " (version " + kVersion + ")\n";
  } else {
    result.output = body.str();
  }
  return result;
}

// ---- bound ----------------------------------------------------------------

struct BoundOptions {
  std::string method;  // clarkson | dimant | numeric | gbh-jfapel | gbh-thispel | poly
  int m = 2;
  std::optional<ExtReal> p;
  double alpha = 2.0;
  int n = 1;
  std::string family = "littlewood";  // for numeric
  int starts = 64;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-10;
  int max_sweeps = 500;
  Format format = Format::kMd;
  std::string cache_dir = kDefaultCacheDir;
  int threads = 0;
};

inline CommandResult cmd_bound(const BoundOptions& opt) {
  BoundRecord record;
  try {
    if (opt.method == "clarkson") {
      if (!opt.p) return {2, "bound clarkson needs --p\n", {}};
      record = bound_clarkson(opt.m, *opt.p);
    } else if (opt.method == "dimant") {
      if (!opt.p) return {2, "bound dimant needs --p\n", {}};
      record = bound_dimant(opt.m, *opt.p);
    } else if (opt.method == "gbh-jfapel") {
      record = bound_gbh_jfapel(opt.m, opt.alpha);
    } else if (opt.method == "gbh-thispel") {
      record = bound_gbh_thispel(opt.m, opt.alpha);
    } else if (opt.method == "poly") {
      record = bound_poly(opt.m, opt.n);
    } else if (opt.method == "numeric") {
      const bool tilde_family = opt.family == "tilde";
      if (!tilde_family && opt.family != "littlewood")
        return {2, "unknown family '" + opt.family + "'\n", {}};
      const ExtReal p = opt.p ? *opt.p : ExtReal(Rational(2 * opt.m));
      const FormExpr expr = tilde_family ? make_tilde(opt.m) : make_littlewood(opt.m);
      OptimizeConfig config;
      config.p = p.value();
      config.starts = opt.starts;
      config.master_seed = opt.seed;
      config.sweep_tol = opt.tol;
      config.max_sweeps = opt.max_sweeps;
      config.threads = opt.threads;
      const OptimizeResult norm = detail::cached_sup_norm(
          expr, opt.family, opt.m, p, config, opt.cache_dir, true, nullptr);
      std::optional<double> upper;
      if (!tilde_family && (p.is_inf() || p.value() >= 2.0))
        upper = std::exp2(opt.m - 2) * clarkson_sup(p.value());
      record = bound_numeric(expr, opt.m, p, norm, upper);
    } else {
      return {2, "unknown method '" + opt.method + "'\n", {}};
    }
  } catch (const std::exception& e) {
    return {2, std::string("error: ") + e.what() + "\n", {}};
  }

  std::ostringstream body;
  body.precision(17);
  if (opt.format == Format::kCsv) {
    body << bound_record_csv_header() << '\n' << to_csv_row(record) << '\n';
  } else if (opt.format == Format::kJson) {
    body << to_json(record).dump(1) << '\n';
  } else {
    body << "method " << to_string(record.method) << "  m=" << record.m;
    if (!(record.method == BoundMethod::kPoly)) body << "  p=" << record.p.str();
    body << "\nnumerator " << fixed(record.numerator, 6) << "  norm " << fixed(record.norm, 6)
         << "\nbound " << fixed(record.bound, 6) << "\n";
    if (record.certified_bound) body << "certified bound " << fixed(*record.certified_bound, 6) << "\n";
    if (!record.note.empty()) body << "note: " << record.note << "\n";
  }

  const std::string digest = digest_hex(body.str());
  nlohmann::json manifest{{"command", "bound " + opt.method},
                          {"config",
                           {{"m", opt.m},
                            {"p", opt.p ? opt.p->str() : "default"},
                            {"alpha", opt.alpha},
                            {"n", opt.n},
                            {"family", opt.family},
                            {"starts", opt.starts},
                            {"seed", opt.seed},
                            {"tol", opt.tol}}},
                          {"version", kVersion},
                          {"output_digest", digest}};
  detail::write_manifest_file(opt.cache_dir, "bound " + opt.method, manifest);
  return {0, body.str(), manifest};
}

// ---- verify ---------------------------------------------------------------

struct VerifyOptions {
  std::string suite;  // optimal3 | sandwich | oracles | eqm
  int max_m = 4;
  int max_n = 8;
  int starts = 64;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

inline CommandResult cmd_verify(const VerifyOptions& opt) {
  std::ostringstream out;
  out.precision(12);
  bool ok = true;
  const auto line = [&](bool pass, const std::string& text) {
    out << (pass ? "PASS " : "FAIL ") << text << '\n';
    ok = ok && pass;
  };

  if (opt.suite == "optimal3") {
    const OptimalThreeReport report = verify_three_linear_optimal();
    for (const auto& row : report.rows) {
      std::ostringstream text;
      text.precision(15);
      text << "q=(";
      for (std::size_t i = 0; i < row.q.size(); ++i)
        text << (i ? "," : "") << row.q[i];
      text << ") via " << row.mechanism << ": lower=" << row.lower << " upper=" << row.upper;
      line(row.ok, text.str());
    }
  } else if (opt.suite == "sandwich") {
    const double ps[] = {4.0, 8.0, std::numeric_limits<double>::infinity()};
    for (int m = 2; m <= std::max(2, std::min(opt.max_m, 5)); ++m) {
      for (double p : ps) {
        if (p < 2.0 * m && !std::isinf(p)) continue;
        OptimizeConfig config;
        config.p = std::isinf(p) ? p : std::max(p, 2.0 * m);
        config.starts = opt.starts;
        config.master_seed = opt.seed;
        config.threads = opt.threads;
        const OptimizeResult r = sup_norm(make_littlewood(m), config);
        const double cap = std::exp2(m - 2) * clarkson_sup(config.p);
        std::ostringstream text;
        text.precision(12);
        text << "m=" << m << " p=" << (std::isinf(config.p) ? std::string("inf")
                                                            : std::to_string(config.p))
             << ": best " << r.best_value << " <= " << cap;
        line(r.best_value <= cap + 1e-9, text.str());
      }
    }
  } else if (opt.suite == "oracles") {
    for (double p : {4.0, 8.0, 16.0}) {
      OptimizeConfig config;
      config.p = p;
      config.starts = opt.starts;
      config.master_seed = opt.seed;
      config.threads = opt.threads;
      const double found = sup_norm(make_littlewood(2), config).best_value;
      const double exact = clarkson_sup(p);
      std::ostringstream text;
      text.precision(12);
      text << "bilinear p=" << p << ": multi-start " << found << " vs closed form " << exact;
      line(std::abs(found - exact) <= 1e-4, text.str());
    }
    for (int m : {2, 3, 4}) {
      OptimizeConfig config;
      config.p = std::numeric_limits<double>::infinity();
      config.starts = opt.starts;
      config.master_seed = opt.seed;
      config.threads = opt.threads;
      const FormExpr expr = make_littlewood(m);
      const double found = sup_norm(expr, config).best_value;
      const double exact = brute_force_linf_norm(expr);
      std::ostringstream text;
      text.precision(12);
      text << "corner oracle m=" << m << ": multi-start " << found << " vs exact " << exact;
      line(std::abs(found - exact) <= 1e-9, text.str());
    }
    {
      // ascent traces must be non-decreasing
      const FormExpr expr = make_littlewood(3);
      OptimizeConfig config;
      config.p = 6.0;
      int violations = 0;
      for (int i = 0; i < 100; ++i) {
        SplitMix64 rng(SplitMix64::hash(opt.seed, 1000 + static_cast<std::uint64_t>(i)));
        const AscentOutcome outcome =
            alternating_ascent(expr, config, hlb::detail::random_start(expr, config.p, rng));
        for (std::size_t t = 1; t < outcome.trace.size(); ++t)
          if (outcome.trace[t] < outcome.trace[t - 1] * (1.0 - 1e-12)) ++violations;
      }
      line(violations == 0,
           "ascent monotonicity on 100 random starts, violations=" + std::to_string(violations));
    }
  } else if (opt.suite == "eqm") {
    for (int m = 1; m <= opt.max_m; ++m) {
      for (int n = 1; n <= opt.max_n; ++n) {
        if (n * (1 << m) > 16) continue;
        const EqMCheck check = check_eq_m(m, n);
        std::ostringstream text;
        text.precision(12);
        text << "m=" << m << " n=" << n << ": |Q^n|_inf = " << check.lhs
             << " >= " << check.rhs;
        line(check.holds, text.str());
      }
    }
  } else {
    return {2, "unknown suite '" + opt.suite + "'\n", {}};
  }

  nlohmann::json manifest{{"command", "verify " + opt.suite},
                          {"config",
                           {{"max_m", opt.max_m},
                            {"max_n", opt.max_n},
                            {"starts", opt.starts},
                            {"seed", opt.seed}}},
                          {"version", kVersion},
                          {"output_digest", digest_hex(out.str())}};
  return {ok ? 0 : 1, out.str(), manifest};
}

}  // namespace hlb::cli
