// hlb — lower bounds for multilinear and polynomial Hardy–Littlewood
// inequality constants.
//
//   hlb table dell99 --starts 128
//   hlb table t44 --include-heavy
//   hlb bound --method clarkson --m 2 --p 4
//   hlb bound --method dimant --m 2 --p 7/2
//   hlb bound --method gbh-thispel --m 3 --alpha 2
//   hlb bound --method numeric --family tilde --m 8 --p 16
//   hlb verify optimal3
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hlb/cli.hpp"

namespace {

std::uint64_t parse_seed(const std::string& text) {
  return std::stoull(text, nullptr, 0);  // accepts decimal and 0x-prefixed hex
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lower bounds for Hardy-Littlewood inequality constants"};
  app.require_subcommand(1);

  std::string format_text = "md";
  std::string seed_text;
  std::string p_text;
  std::string cache_dir = hlb::cli::kDefaultCacheDir;
  int starts = 64;
  double tol = 1e-10;
  int threads = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--starts", starts, "independent optimizer starts");
    cmd->add_option("--seed", seed_text, "master seed (decimal or 0x hex)");
    cmd->add_option("--tol", tol, "relative sweep improvement tolerance");
    cmd->add_option("--format", format_text, "output format: md, csv or json")
        ->check(CLI::IsMember({"md", "csv", "json"}));
    cmd->add_option("--cache-dir", cache_dir, "optimizer result cache directory");
    cmd->add_option("--threads", threads, "worker threads (0 = auto; never changes results)");
  };

  // table
  auto* table = app.add_subcommand("table", "reproduce a norm/bound table");
  std::string table_name;
  bool include_heavy = false;
  int min_m = 0, max_m = 0;
  table->add_option("name", table_name, "dell99 or t44")->required();
  table->add_flag("--include-heavy", include_heavy, "compute the m=16 shifted-product row");
  table->add_option("--min-m", min_m, "first row (dell99)");
  table->add_option("--max-m", max_m, "last row (dell99)");
  add_common(table);

  // bound
  auto* bound = app.add_subcommand("bound", "evaluate one lower-bound formula");
  std::string method, family = "littlewood";
  int m = 2, n = 1;
  double alpha = 2.0;
  bound->add_option("--method", method,
                    "clarkson | dimant | numeric | gbh-jfapel | gbh-thispel | poly")
      ->required();
  bound->add_option("--m", m, "degree");
  bound->add_option("--p", p_text, "exponent p: a/b, decimal, or inf");
  bound->add_option("--alpha", alpha, "alpha for the mixed-exponent bounds");
  bound->add_option("--n", n, "block power for the polynomial bound");
  bound->add_option("--family", family, "numeric family: littlewood or tilde");
  add_common(bound);

  // verify
  auto* verify = app.add_subcommand("verify", "run a cross-check suite");
  std::string suite;
  int vmax_m = 4, vmax_n = 8;
  verify->add_option("suite", suite, "optimal3 | sandwich | oracles | eqm")->required();
  verify->add_option("--max-m", vmax_m, "eqm/sandwich degree cap");
  verify->add_option("--max-n", vmax_n, "eqm power cap");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::uint64_t seed = hlb::cli::kDefaultSeed;
  if (!seed_text.empty()) {
    try {
      seed = parse_seed(seed_text);
    } catch (const std::exception&) {
      std::cerr << "bad --seed value\n";
      return 2;
    }
  }
  const auto format = hlb::cli::parse_format(format_text);

  hlb::cli::CommandResult result;
  try {
    if (table->parsed()) {
      hlb::cli::TableOptions opt;
      opt.name = table_name;
      opt.starts = starts;
      opt.seed = seed;
      opt.tol = tol;
      opt.format = *format;
      opt.cache_dir = cache_dir;
      opt.include_heavy = include_heavy;
      opt.min_m = min_m;
      opt.max_m = max_m;
      opt.threads = threads;
      result = hlb::cli::cmd_table(opt);
    } else if (bound->parsed()) {
      hlb::cli::BoundOptions opt;
      opt.method = method;
      opt.m = m;
      if (!p_text.empty()) opt.p = hlb::ExtReal::parse(p_text);
      opt.alpha = alpha;
      opt.n = n;
      opt.family = family;
      opt.starts = starts;
      opt.seed = seed;
      opt.tol = tol;
      opt.format = *format;
      opt.cache_dir = cache_dir;
      opt.threads = threads;
      result = hlb::cli::cmd_bound(opt);
    } else {
      hlb::cli::VerifyOptions opt;
      opt.suite = suite;
      opt.max_m = vmax_m;
      opt.max_n = vmax_n;
      opt.starts = starts;
      opt.seed = seed;
      opt.threads = threads;
      result = hlb::cli::cmd_verify(opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  std::fputs(result.output.c_str(), result.exit_code == 2 ? stderr : stdout);
  return result.exit_code;
}
