#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hlb/coeff_tensor.hpp"

namespace hlb {

inline constexpr std::int64_t kDefaultExpandLimit = std::int64_t{1} << 24;

/// Compositional representation of an m-linear form.  A form is a tree of
///   Leaf    — sparse coefficient tensor over an ordered list of slots,
///   Sum     — signed terms sharing one slot signature,
///   Product — factors on disjoint slot sets,
///   Shift   — one argument pre-transformed by the backward shift
///             (B^d x)_i = x_{i+d}.
/// Values are immutable after construction and cheap to copy (shared nodes),
/// so the shifted-product families scale to 2^30 coefficients without ever
/// enumerating them.  Slot ids and tensor indices are 1-based.
class FormExpr {
 public:
  /// slots must be strictly increasing and match the tensor's degree.
  static FormExpr leaf(std::vector<int> slots, CoeffTensor coeffs) {
    if (slots.size() != static_cast<std::size_t>(coeffs.degree()))
      throw std::invalid_argument("form leaf: slot count must equal tensor degree");
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i] < 1) throw std::invalid_argument("form leaf: slot ids are 1-based");
      if (i > 0 && slots[i] <= slots[i - 1])
        throw std::invalid_argument("form leaf: slots must be strictly increasing");
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::kLeaf;
    node->slots = std::move(slots);
    node->dims = coeffs.dims();
    node->coeffs = std::move(coeffs);
    return FormExpr(std::move(node));
  }

  /// All terms must share one slot signature; ambient dimensions are the
  /// per-slot maxima over the terms.
  static FormExpr sum(std::vector<std::pair<int, FormExpr>> terms) {
    if (terms.empty()) throw std::invalid_argument("form sum: needs at least one term");
    for (const auto& [sign, term] : terms)
      if (sign != 1 && sign != -1) throw std::invalid_argument("form sum: signs must be +-1");
    auto node = std::make_shared<Node>();
    node->kind = Kind::kSum;
    node->slots = terms.front().second.slots();
    node->dims = terms.front().second.dims();
    for (std::size_t i = 1; i < terms.size(); ++i) {
      if (terms[i].second.slots() != node->slots)
        throw std::invalid_argument("form sum: terms must share one slot signature");
      for (std::size_t k = 0; k < node->dims.size(); ++k)
        node->dims[k] = std::max(node->dims[k], terms[i].second.dims()[k]);
    }
    node->terms.reserve(terms.size());
    for (auto& [sign, term] : terms) node->terms.emplace_back(sign, term.node_);
    return FormExpr(std::move(node));
  }

  /// Factors must live on disjoint slot sets; the signature is their union.
  static FormExpr product(const FormExpr& left, const FormExpr& right) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::kProduct;
    const auto& ls = left.slots();
    const auto& rs = right.slots();
    std::size_t i = 0, j = 0;
    while (i < ls.size() || j < rs.size()) {
      if (j == rs.size() || (i < ls.size() && ls[i] < rs[j])) {
        node->slots.push_back(ls[i]);
        node->dims.push_back(left.dims()[i]);
        ++i;
      } else if (i == ls.size() || rs[j] < ls[i]) {
        node->slots.push_back(rs[j]);
        node->dims.push_back(right.dims()[j]);
        ++j;
      } else {
        throw std::invalid_argument("form product: factor slot sets must be disjoint");
      }
    }
    node->left = left.node_;
    node->right = right.node_;
    return FormExpr(std::move(node));
  }

  /// The argument at `slot` is read through B^offset, so the ambient
  /// dimension of that slot grows by the offset.
  static FormExpr shift(const FormExpr& inner, int slot, int offset) {
    if (offset < 0) throw std::invalid_argument("form shift: offset must be nonnegative");
    const auto& slots = inner.slots();
    const auto pos = std::find(slots.begin(), slots.end(), slot);
    if (pos == slots.end()) throw std::invalid_argument("form shift: no such slot");
    auto node = std::make_shared<Node>();
    node->kind = Kind::kShift;
    node->slots = slots;
    node->dims = inner.dims();
    node->dims[pos - slots.begin()] += offset;
    node->inner = inner.node_;
    node->shift_slot = slot;
    node->shift_offset = offset;
    return FormExpr(std::move(node));
  }

  /// Every slot wrapped by a shift of its own current ambient dimension;
  /// moves the form onto the next coordinate block.
  static FormExpr shift_all(const FormExpr& expr) {
    FormExpr out = expr;
    const std::vector<int> slots = expr.slots();
    const std::vector<int> dims = expr.dims();
    for (std::size_t i = 0; i < slots.size(); ++i) out = shift(out, slots[i], dims[i]);
    return out;
  }

  const std::vector<int>& slots() const { return node_->slots; }
  const std::vector<int>& dims() const { return node_->dims; }
  int degree() const { return static_cast<int>(node_->slots.size()); }

  int dim(int slot) const {
    const auto& s = node_->slots;
    const auto pos = std::find(s.begin(), s.end(), slot);
    if (pos == s.end()) throw std::invalid_argument("form: no such slot");
    return node_->dims[pos - s.begin()];
  }

  /// Exact multilinear evaluation by structural recursion.  One argument per
  /// slot, in signature order; each argument's length must equal the slot's
  /// ambient dimension.
  double evaluate(std::span<const std::vector<double>> args) const {
    Workspace ws = make_workspace(args);
    return eval_node(*node_, ws);
  }

  /// The vector c with c_i = evaluate(args with e_i in slot `slot`); the
  /// entry supplied for that slot is ignored.  evaluate(args) == <c, x> for
  /// the argument x at that slot, by multilinearity.
  std::vector<double> slot_coefficients(std::span<const std::vector<double>> args,
                                        int slot) const {
    Workspace ws = make_workspace(args, /*lenient_slot=*/slot);
    std::vector<double> out(static_cast<std::size_t>(dim(slot)), 0.0);
    accumulate_slot(*node_, ws, slot, 1.0, out);
    return out;
  }

  /// Nonzero count implied by the structure: products multiply counts and
  /// sums add them, which is exact for the disjoint-support families built
  /// here and an upper bound otherwise.
  std::int64_t analytic_nonzeros() const { return count_node(*node_); }

  /// True when every stored leaf coefficient is +-1.
  bool unit_coefficients() const { return unit_node(*node_); }

  /// Exact sparse expansion; evaluating the result reproduces evaluate().
  /// Refuses when the analytic count exceeds `limit`.
  CoeffTensor expand(std::int64_t limit = kDefaultExpandLimit) const {
    if (analytic_nonzeros() > limit)
      throw std::length_error("form expand: too large");
    CoeffTensor out(degree(), dims());
    for (auto& [idx, c] : expand_node(*node_)) out.add(idx, c);
    return out;
  }

 private:
  enum class Kind { kLeaf, kSum, kProduct, kShift };

  struct Node {
    Kind kind;
    std::vector<int> slots;  // sorted ascending
    std::vector<int> dims;   // ambient dimension per slot, aligned with slots
    CoeffTensor coeffs;                                              // leaf
    std::vector<std::pair<int, std::shared_ptr<const Node>>> terms;  // sum
    std::shared_ptr<const Node> left, right;                         // product
    std::shared_ptr<const Node> inner;                               // shift
    int shift_slot = 0;
    int shift_offset = 0;
  };

  struct Workspace {
    std::vector<const std::vector<double>*> by_slot;  // indexed by slot id
    std::vector<int> offsets;                         // accumulated shifts
  };

  explicit FormExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  int max_slot() const { return node_->slots.back(); }

  Workspace make_workspace(std::span<const std::vector<double>> args,
                           int lenient_slot = 0) const {
    const auto& s = node_->slots;
    if (args.size() != s.size())
      throw std::invalid_argument("form: one argument per slot required");
    Workspace ws;
    ws.by_slot.assign(static_cast<std::size_t>(max_slot()) + 1, nullptr);
    ws.offsets.assign(static_cast<std::size_t>(max_slot()) + 1, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != lenient_slot &&
          static_cast<int>(args[i].size()) != node_->dims[i])
        throw std::invalid_argument("form: argument length must equal the slot dimension");
      ws.by_slot[s[i]] = &args[i];
    }
    return ws;
  }

  // Reads coordinate `idx` (1-based, pre-shift) of the argument at `slot`;
  // coordinates shifted past the end are zero.
  static double read(const Workspace& ws, int slot, int idx) {
    const auto& v = *ws.by_slot[slot];
    const std::size_t i = static_cast<std::size_t>(idx + ws.offsets[slot] - 1);
    return i < v.size() ? v[i] : 0.0;
  }

  static double eval_node(const Node& n, Workspace& ws) {
    switch (n.kind) {
      case Kind::kLeaf: {
        double total = 0.0;
        for (const auto& [idx, c] : n.coeffs.entries()) {
          double term = c;
          for (std::size_t a = 0; a < n.slots.size() && term != 0.0; ++a)
            term *= read(ws, n.slots[a], idx[a]);
          total += term;
        }
        return total;
      }
      case Kind::kSum: {
        double total = 0.0;
        for (const auto& [sign, term] : n.terms) total += sign * eval_node(*term, ws);
        return total;
      }
      case Kind::kProduct:
        return eval_node(*n.left, ws) * eval_node(*n.right, ws);
      case Kind::kShift: {
        ws.offsets[n.shift_slot] += n.shift_offset;
        const double v = eval_node(*n.inner, ws);
        ws.offsets[n.shift_slot] -= n.shift_offset;
        return v;
      }
    }
    return 0.0;
  }

  static bool node_has_slot(const Node& n, int slot) {
    return std::find(n.slots.begin(), n.slots.end(), slot) != n.slots.end();
  }

  static void accumulate_slot(const Node& n, Workspace& ws, int slot, double scale,
                              std::vector<double>& out) {
    if (scale == 0.0) return;
    switch (n.kind) {
      case Kind::kLeaf: {
        std::size_t axis = 0;
        while (n.slots[axis] != slot) ++axis;
        for (const auto& [idx, c] : n.coeffs.entries()) {
          double term = scale * c;
          for (std::size_t a = 0; a < n.slots.size() && term != 0.0; ++a)
            if (a != axis) term *= read(ws, n.slots[a], idx[a]);
          if (term == 0.0) continue;
          const std::size_t i = static_cast<std::size_t>(idx[axis] + ws.offsets[slot] - 1);
          if (i < out.size()) out[i] += term;
        }
        return;
      }
      case Kind::kSum:
        for (const auto& [sign, term] : n.terms)
          accumulate_slot(*term, ws, slot, sign * scale, out);
        return;
      case Kind::kProduct:
        if (node_has_slot(*n.left, slot))
          accumulate_slot(*n.left, ws, slot, scale * eval_node(*n.right, ws), out);
        else
          accumulate_slot(*n.right, ws, slot, scale * eval_node(*n.left, ws), out);
        return;
      case Kind::kShift:
        ws.offsets[n.shift_slot] += n.shift_offset;
        accumulate_slot(*n.inner, ws, slot, scale, out);
        ws.offsets[n.shift_slot] -= n.shift_offset;
        return;
    }
  }

  static std::int64_t count_node(const Node& n) {
    switch (n.kind) {
      case Kind::kLeaf:
        return static_cast<std::int64_t>(n.coeffs.nnz());
      case Kind::kSum: {
        std::int64_t total = 0;
        for (const auto& [sign, term] : n.terms) total += count_node(*term);
        return total;
      }
      case Kind::kProduct:
        return count_node(*n.left) * count_node(*n.right);
      case Kind::kShift:
        return count_node(*n.inner);
    }
    return 0;
  }

  static bool unit_node(const Node& n) {
    switch (n.kind) {
      case Kind::kLeaf:
        for (const auto& [idx, c] : n.coeffs.entries())
          if (c != 1.0 && c != -1.0) return false;
        return true;
      case Kind::kSum:
        for (const auto& [sign, term] : n.terms)
          if (!unit_node(*term)) return false;
        return true;
      case Kind::kProduct:
        return unit_node(*n.left) && unit_node(*n.right);
      case Kind::kShift:
        return unit_node(*n.inner);
    }
    return false;
  }

  // Expanded entries keyed in the node's own (sorted) slot order.
  using SparseMap = std::map<CoeffTensor::Index, double>;

  static void merge_into(SparseMap& dst, const CoeffTensor::Index& idx, double value) {
    auto it = dst.find(idx);
    if (it == dst.end()) {
      if (value != 0.0) dst.emplace(idx, value);
    } else {
      it->second += value;
      if (it->second == 0.0) dst.erase(it);
    }
  }

  static SparseMap expand_node(const Node& n) {
    switch (n.kind) {
      case Kind::kLeaf: {
        SparseMap out;
        for (const auto& [idx, c] : n.coeffs.entries()) out.emplace(idx, c);
        return out;
      }
      case Kind::kSum: {
        SparseMap out;
        for (const auto& [sign, term] : n.terms)
          for (const auto& [idx, c] : expand_node(*term)) merge_into(out, idx, sign * c);
        return out;
      }
      case Kind::kProduct: {
        const SparseMap lhs = expand_node(*n.left);
        const SparseMap rhs = expand_node(*n.right);
        // interleave factor indices into the merged sorted slot order
        std::vector<std::size_t> lpos, rpos;
        for (std::size_t i = 0; i < n.slots.size(); ++i) {
          if (node_has_slot(*n.left, n.slots[i]))
            lpos.push_back(i);
          else
            rpos.push_back(i);
        }
        SparseMap out;
        CoeffTensor::Index idx(n.slots.size(), 0);
        for (const auto& [li, lc] : lhs) {
          for (std::size_t a = 0; a < lpos.size(); ++a) idx[lpos[a]] = li[a];
          for (const auto& [ri, rc] : rhs) {
            for (std::size_t a = 0; a < rpos.size(); ++a) idx[rpos[a]] = ri[a];
            merge_into(out, idx, lc * rc);
          }
        }
        return out;
      }
      case Kind::kShift: {
        SparseMap inner = expand_node(*n.inner);
        std::size_t axis = 0;
        while (n.slots[axis] != n.shift_slot) ++axis;
        SparseMap out;
        for (const auto& [idx, c] : inner) {
          CoeffTensor::Index moved = idx;
          moved[axis] += n.shift_offset;
          out.emplace(std::move(moved), c);
        }
        return out;
      }
    }
    return {};
  }

  std::shared_ptr<const Node> node_;
};

/// The inductively defined m-linear form on shrinking coordinate blocks:
/// the bilinear seed x_1y_1 + x_1y_2 + x_2y_1 - x_2y_2 combined at each
/// level with (x_1 +- x_2) factors in the new slot, the minus branch acting
/// through backward shifts.  Slot k has ambient dimension 2^(m-1) for k = 1
/// and 2^(m-k+1) for k >= 2; the expansion has exactly 4^(m-1) nonzero
/// coefficients, all +-1.
inline FormExpr make_littlewood(int m) {
  if (m < 2) throw std::invalid_argument("make_littlewood: m must be >= 2");
  CoeffTensor seed(2, {2, 2});
  seed.set({1, 1}, 1.0);
  seed.set({1, 2}, 1.0);
  seed.set({2, 1}, 1.0);
  seed.set({2, 2}, -1.0);
  FormExpr t = FormExpr::leaf({1, 2}, std::move(seed));
  for (int level = 3; level <= m; ++level) {
    CoeffTensor plus(1, {2}), minus(1, {2});
    plus.set({1}, 1.0);
    plus.set({2}, 1.0);
    minus.set({1}, 1.0);
    minus.set({2}, -1.0);
    FormExpr shifted = FormExpr::shift_all(t);
    t = FormExpr::sum({
        {+1, FormExpr::product(t, FormExpr::leaf({level}, std::move(plus)))},
        {+1, FormExpr::product(shifted, FormExpr::leaf({level}, std::move(minus)))},
    });
  }
  return t;
}

namespace detail {

inline FormExpr make_tilde_block(int m, int first_slot) {
  if (m == 2) {
    CoeffTensor seed(2, {2, 2});
    seed.set({1, 1}, 1.0);
    seed.set({1, 2}, 1.0);
    seed.set({2, 1}, 1.0);
    seed.set({2, 2}, -1.0);
    return FormExpr::leaf({first_slot, first_slot + 1}, std::move(seed));
  }
  const int half = m / 2;
  const FormExpr u = make_tilde_block(half, first_slot);
  const FormExpr v = make_tilde_block(half, first_slot + half);
  const FormExpr su = FormExpr::shift_all(u);
  const FormExpr sv = FormExpr::shift_all(v);
  return FormExpr::sum({
      {+1, FormExpr::product(u, v)},
      {+1, FormExpr::product(u, sv)},
      {+1, FormExpr::product(su, v)},
      {-1, FormExpr::product(su, sv)},
  });
}

}  // namespace detail

/// The doubled-product family: each level is the four-term signed
/// combination (+,+,+,-) of products of two half-degree copies on disjoint
/// slot halves, the shifted copies acting on the next coordinate block.
/// All m slots have ambient dimension m, and the nonzero coefficient counts
/// are 4, 64, 2^14, 2^30 for m = 2, 4, 8, 16.
inline FormExpr make_tilde(int m) {
  if (m < 2 || (m & (m - 1)) != 0)
    throw std::invalid_argument("make_tilde: m must be 2 or a power of two >= 4");
  return detail::make_tilde_block(m, 1);
}

}  // namespace hlb
