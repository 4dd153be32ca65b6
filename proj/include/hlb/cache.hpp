#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hlb/optimizer.hpp"
#include "hlb/rational.hpp"
#include "hlb/version.hpp"

namespace hlb {

/// File-backed cache for optimizer runs, keyed by
/// (family, m, p, starts, seed, tol).  Entries from a different artifact
/// version are ignored.
class ResultCache {
 public:
  explicit ResultCache(std::string dir) : dir_(std::move(dir)) {}

  struct Key {
    std::string family;
    int m = 0;
    ExtReal p;
    int starts = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;

    std::string filename() const {
      std::ostringstream name;
      name << family << "_m" << m << "_p";
      if (p.is_inf()) {
        name << "inf";
      } else if (p.exact()) {
        name << p.exact()->num << "-" << p.exact()->den;
      } else {
        char p_text[32];
        std::snprintf(p_text, sizeof(p_text), "%.17g", p.value());
        name << p_text;
      }
      char tol_text[32];
      std::snprintf(tol_text, sizeof(tol_text), "%.3e", tol);
      name << "_n" << starts << "_s" << seed << "_t" << tol_text << ".json";
      return name.str();
    }
  };

  std::optional<OptimizeResult> load(const Key& key) const {
    const std::filesystem::path path = std::filesystem::path(dir_) / key.filename();
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
      nlohmann::json j;
      in >> j;
      if (j.at("version").get<std::string>() != kVersion) return std::nullopt;
      return optimize_result_from_json(j.at("result"));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  void store(const Key& key, const OptimizeResult& result) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const std::filesystem::path path = std::filesystem::path(dir_) / key.filename();
    nlohmann::json j{{"version", kVersion},
                     {"family", key.family},
                     {"m", key.m},
                     {"p", key.p.str()},
                     {"starts", key.starts},
                     {"seed", key.seed},
                     {"tol", key.tol},
                     {"result", optimize_result_to_json(result)}};
    std::ofstream out(path);
    out << j.dump(1) << '\n';
  }

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

}  // namespace hlb
