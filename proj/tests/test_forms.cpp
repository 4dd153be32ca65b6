#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "hlb/forms.hpp"
#include "test_util.hpp"

using hlb::CoeffTensor;
using hlb::FormExpr;
using hlb::make_littlewood;
using hlb::make_tilde;

namespace {

std::vector<std::vector<double>> basis_args(const FormExpr& expr, const std::vector<int>& which) {
  std::vector<std::vector<double>> args;
  for (std::size_t k = 0; k < expr.dims().size(); ++k) {
    std::vector<double> v(static_cast<std::size_t>(expr.dims()[k]), 0.0);
    v[static_cast<std::size_t>(which[k] - 1)] = 1.0;
    args.push_back(std::move(v));
  }
  return args;
}

}  // namespace

TEST_CASE("bilinear seed expands to the signed 2x2 matrix") {
  const CoeffTensor t = make_littlewood(2).expand();
  REQUIRE(t.nnz() == 4);
  CHECK(t.at({1, 1}) == 1.0);
  CHECK(t.at({1, 2}) == 1.0);
  CHECK(t.at({2, 1}) == 1.0);
  CHECK(t.at({2, 2}) == -1.0);
}

TEST_CASE("inductive family counts and dimensions") {
  CHECK(make_littlewood(3).expand().nnz() == 16);
  const FormExpr t4 = make_littlewood(4);
  CHECK(t4.dims() == std::vector<int>{8, 8, 4, 2});
  const CoeffTensor expanded = t4.expand();
  REQUIRE(expanded.nnz() == 64);
  for (const auto& [idx, c] : expanded.entries()) CHECK(std::abs(c) == 1.0);
  CHECK(t4.analytic_nonzeros() == 64);
  CHECK(t4.unit_coefficients());
  CHECK_THROWS_AS(make_littlewood(1), std::invalid_argument);
}

TEST_CASE("shifted-product family counts without enumeration") {
  CHECK(make_tilde(2).expand() == make_littlewood(2).expand());
  CHECK(make_tilde(4).analytic_nonzeros() == 64);
  CHECK(make_tilde(8).analytic_nonzeros() == std::int64_t{1} << 14);
  CHECK(make_tilde(16).analytic_nonzeros() == std::int64_t{1} << 30);
  CHECK(make_tilde(16).unit_coefficients());
  CHECK(make_tilde(16).dims() == std::vector<int>(16, 16));  // 256 coordinates in total
  CHECK_THROWS_AS(make_tilde(3), std::invalid_argument);
  CHECK_THROWS_AS(make_tilde(6), std::invalid_argument);
  CHECK_THROWS_AS(make_tilde(16).expand(), std::length_error);
}

TEST_CASE("degree-3 expansion matches the displayed pattern term by term") {
  // (z1+z2) T_2(x,y) + (z1-z2) T_2(B^2 x, B^2 y)
  const CoeffTensor t2 = make_littlewood(2).expand();
  const CoeffTensor t3 = make_littlewood(3).expand();
  REQUIRE(t3.nnz() == 16);
  for (const auto& [idx, c] : t2.entries()) {
    CHECK(t3.at({idx[0], idx[1], 1}) == c);
    CHECK(t3.at({idx[0], idx[1], 2}) == c);
    CHECK(t3.at({idx[0] + 2, idx[1] + 2, 1}) == c);
    CHECK(t3.at({idx[0] + 2, idx[1] + 2, 2}) == -c);
  }
}

TEST_CASE("expanded nonzero counts equal the analytic counts") {
  for (int m = 2; m <= 5; ++m) {
    const FormExpr t = make_littlewood(m);
    CHECK(static_cast<std::int64_t>(t.expand().nnz()) == t.analytic_nonzeros());
  }
  for (int m : {4, 8}) {
    const FormExpr t = make_tilde(m);
    CHECK(static_cast<std::int64_t>(t.expand().nnz()) == t.analytic_nonzeros());
  }
}

TEST_CASE("the two degree-4 families differ as tensors") {
  const CoeffTensor a = make_littlewood(4).expand();
  const CoeffTensor b = make_tilde(4).expand();
  CHECK(a.nnz() == 64);
  CHECK(b.nnz() == 64);
  for (const auto& [idx, c] : b.entries()) CHECK(std::abs(c) == 1.0);
  CHECK(!(a == b));
}

TEST_CASE("evaluate matches hand expansions") {
  const FormExpr t2 = make_littlewood(2);
  CHECK(t2.evaluate(basis_args(t2, {1, 1})) == 1.0);
  CHECK(t2.evaluate(std::vector<std::vector<double>>{{1, 1}, {1, 0}}) == 2.0);

  const FormExpr t3 = make_littlewood(3);
  // third coordinate block only reacts to the shifted branch
  std::vector<std::vector<double>> args{{0, 0, 1, 0}, {0, 0, 1, 0}, {1, -1}};
  CHECK(t3.evaluate(args) == 2.0);

  CHECK_THROWS_AS(t2.evaluate(std::vector<std::vector<double>>{{1, 0, 0}, {1, 0}}),
                  std::invalid_argument);
}

TEST_CASE("slot coefficients read the partial linear form") {
  const FormExpr t2 = make_littlewood(2);
  std::vector<std::vector<double>> args{{0, 0}, {1, 0}};
  CHECK(t2.slot_coefficients(args, 1) == std::vector<double>{1, 1});
  args = {{1, 1}, {0, 0}};
  CHECK(t2.slot_coefficients(args, 2) == std::vector<double>{2, 0});
  CHECK_THROWS_AS(t2.slot_coefficients(args, 3), std::invalid_argument);
}

TEST_CASE("slot coefficients are the gradient of a multilinear form") {
  const FormExpr t3 = make_littlewood(3);
  hlb::SplitMix64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto args = test_util::random_args(rng, t3.dims());
    for (int k = 1; k <= 3; ++k) {
      const std::vector<double> c = t3.slot_coefficients(args, k);
      double dot = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) dot += c[i] * args[static_cast<std::size_t>(k - 1)][i];
      CHECK_THAT(dot, Catch::Matchers::WithinAbs(t3.evaluate(args), 1e-12 * (1.0 + std::abs(dot))));
    }
  }
}

TEST_CASE("evaluate is linear in every slot") {
  const FormExpr t4 = make_tilde(4);
  hlb::SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto args = test_util::random_args(rng, t4.dims());
    const int k = trial % 4;
    const double alpha = rng.next_normal(), beta = rng.next_normal();
    const auto x = test_util::random_vector(rng, t4.dims()[static_cast<std::size_t>(k)]);
    const auto y = test_util::random_vector(rng, t4.dims()[static_cast<std::size_t>(k)]);
    auto combo = args;
    for (std::size_t i = 0; i < x.size(); ++i)
      combo[static_cast<std::size_t>(k)][i] = alpha * x[i] + beta * y[i];
    auto ax = args, ay = args;
    ax[static_cast<std::size_t>(k)] = x;
    ay[static_cast<std::size_t>(k)] = y;
    const double lhs = t4.evaluate(combo);
    const double rhs = alpha * t4.evaluate(ax) + beta * t4.evaluate(ay);
    CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12 * (1.0 + std::abs(rhs))));
  }
}

TEST_CASE("backward shift rewires coordinates with zero padding") {
  const FormExpr t2 = make_littlewood(2);
  const FormExpr shifted = FormExpr::shift(t2, 1, 3);
  CHECK(shifted.dims() == std::vector<int>{5, 2});
  hlb::SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = test_util::random_vector(rng, 5);
    const auto y = test_util::random_vector(rng, 2);
    // (B^3 x)_i = x_{i+3}
    const std::vector<double> bx{x[3], x[4]};
    CHECK_THAT(shifted.evaluate(std::vector<std::vector<double>>{x, y}),
               Catch::Matchers::WithinAbs(
                   t2.evaluate(std::vector<std::vector<double>>{bx, y}), 1e-12));
  }
}

TEST_CASE("expansion round-trips against structural evaluation") {
  for (const FormExpr& expr : {make_tilde(4), make_littlewood(4)}) {
    const CoeffTensor expanded = expr.expand();
    hlb::SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto args = test_util::random_args(rng, expr.dims());
      const double direct = expr.evaluate(args);
      const double via_tensor = expanded.evaluate(args);
      CHECK_THAT(direct,
                 Catch::Matchers::WithinAbs(via_tensor, 1e-11 * (1.0 + std::abs(via_tensor))));
    }
  }
}

TEST_CASE("construction rejects malformed trees") {
  const FormExpr t2 = make_littlewood(2);
  CHECK_THROWS_AS(FormExpr::product(t2, t2), std::invalid_argument);  // same slots
  CHECK_THROWS_AS(FormExpr::sum({{+1, t2}, {-1, FormExpr::shift(make_littlewood(3), 3, 0)}}),
                  std::invalid_argument);  // mismatched signatures
  CHECK_THROWS_AS(FormExpr::sum({{+2, t2}}), std::invalid_argument);
  CHECK_THROWS_AS(FormExpr::shift(t2, 5, 1), std::invalid_argument);
  CoeffTensor bad(2, {2, 2});
  bad.set({1, 1}, 1.0);
  CHECK_THROWS_AS(FormExpr::leaf({2, 1}, bad), std::invalid_argument);
}

TEST_CASE("coefficient tensor serialization is 1-based and ordered") {
  const CoeffTensor t = make_littlewood(3).expand();
  const nlohmann::json j = t.to_json();
  CHECK(j.at("degree") == 3);
  CHECK(j.at("dims") == std::vector<int>{4, 4, 2});
  const auto& entries = j.at("entries");
  REQUIRE(entries.size() == 16);
  CHECK(entries.front().at("idx") == std::vector<int>{1, 1, 1});
  // lexicographic order of the index tuples
  for (std::size_t i = 1; i < entries.size(); ++i)
    CHECK(entries[i - 1].at("idx").get<std::vector<int>>() <
          entries[i].at("idx").get<std::vector<int>>());
  CHECK(CoeffTensor::from_json(j) == t);
}
