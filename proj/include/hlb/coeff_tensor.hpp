#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace hlb {

/// Sparse multi-index -> coefficient map for an m-linear form.  Indices are
/// 1-based throughout, matching the usual e_{j_1},...,e_{j_m} notation.
/// Stored coefficients are always nonzero.
class CoeffTensor {
 public:
  using Index = std::vector<int>;

  CoeffTensor() = default;
  CoeffTensor(int degree, std::vector<int> dims) : degree_(degree), dims_(std::move(dims)) {
    if (degree_ < 1 || static_cast<int>(dims_.size()) != degree_)
      throw std::invalid_argument("coeff tensor: dims must match degree");
    for (int d : dims_)
      if (d < 1) throw std::invalid_argument("coeff tensor: dimensions must be positive");
  }

  int degree() const { return degree_; }
  const std::vector<int>& dims() const { return dims_; }
  const std::map<Index, double>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  void set(const Index& idx, double value) {
    check_index(idx);
    if (value == 0.0)
      entries_.erase(idx);
    else
      entries_[idx] = value;
  }

  /// Adds into an entry, erasing it if the result cancels to zero.
  void add(const Index& idx, double value) {
    check_index(idx);
    auto it = entries_.find(idx);
    if (it == entries_.end()) {
      if (value != 0.0) entries_.emplace(idx, value);
      return;
    }
    it->second += value;
    if (it->second == 0.0) entries_.erase(it);
  }

  double at(const Index& idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? 0.0 : it->second;
  }

  /// Exact multilinear evaluation: sum_c c * prod_k args[k][idx_k].
  double evaluate(std::span<const std::vector<double>> args) const {
    if (static_cast<int>(args.size()) != degree_)
      throw std::invalid_argument("coeff tensor: argument count mismatch");
    for (int k = 0; k < degree_; ++k)
      if (static_cast<int>(args[k].size()) < dims_[k])
        throw std::invalid_argument("coeff tensor: argument too short");
    double total = 0.0;
    for (const auto& [idx, c] : entries_) {
      double term = c;
      for (int k = 0; k < degree_; ++k) term *= args[k][idx[k] - 1];
      total += term;
    }
    return total;
  }

  bool operator==(const CoeffTensor& other) const {
    return degree_ == other.degree_ && dims_ == other.dims_ && entries_ == other.entries_;
  }

  /// {"degree": m, "dims": [...], "entries": [{"idx": [...], "c": v}, ...]},
  /// entries in lexicographic index order.
  nlohmann::json to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [idx, c] : entries_) entries.push_back({{"idx", idx}, {"c", c}});
    return {{"degree", degree_}, {"dims", dims_}, {"entries", entries}};
  }

  static CoeffTensor from_json(const nlohmann::json& j) {
    CoeffTensor t(j.at("degree").get<int>(), j.at("dims").get<std::vector<int>>());
    for (const auto& e : j.at("entries"))
      t.set(e.at("idx").get<Index>(), e.at("c").get<double>());
    return t;
  }

 private:
  void check_index(const Index& idx) const {
    if (static_cast<int>(idx.size()) != degree_)
      throw std::invalid_argument("coeff tensor: index length mismatch");
    for (int k = 0; k < degree_; ++k)
      if (idx[k] < 1 || idx[k] > dims_[k])
        throw std::out_of_range("coeff tensor: index out of range");
  }

  int degree_ = 0;
  std::vector<int> dims_;
  std::map<Index, double> entries_;
};

}  // namespace hlb
