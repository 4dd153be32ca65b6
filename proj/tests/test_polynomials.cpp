#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hlb/polynomials.hpp"
#include "test_util.hpp"

using hlb::Polynomial;
using hlb::check_eq_m;
using hlb::make_Q;
using hlb::poly_coeff_norm;
using hlb::poly_pow;

TEST_CASE("base difference-of-squares polynomial") {
  const Polynomial q2 = make_Q(2);
  REQUIRE(q2.entries.size() == 2);
  CHECK(q2.entries.at({2, 0}) == 1);
  CHECK(q2.entries.at({0, 2}) == -1);
  CHECK_THROWS_AS(make_Q(3), std::invalid_argument);
  CHECK_THROWS_AS(make_Q(0), std::invalid_argument);
}

TEST_CASE("one doubling step expands as expected") {
  const Polynomial q4 = make_Q(4);
  REQUIRE(q4.entries.size() == 6);
  CHECK(q4.entries.at({4, 0, 0, 0}) == 1);
  CHECK(q4.entries.at({2, 2, 0, 0}) == -2);
  CHECK(q4.entries.at({0, 4, 0, 0}) == 1);
  CHECK(q4.entries.at({0, 0, 4, 0}) == -1);
  CHECK(q4.entries.at({0, 0, 2, 2}) == 2);
  CHECK(q4.entries.at({0, 0, 0, 4}) == -1);
}

TEST_CASE("next doubling counted by the squaring oracle") {
  const Polynomial q8 = make_Q(8);
  const Polynomial q4_sq = poly_pow(make_Q(4), 2);
  CHECK(q8.entries.size() == 2 * q4_sq.entries.size());
  CHECK(q8.degree == 8);
  CHECK(q8.nvars == 8);
}

TEST_CASE("powers of the base polynomial follow the binomial theorem") {
  const Polynomial sq = poly_pow(make_Q(2), 2);
  REQUIRE(sq.entries.size() == 3);
  CHECK(sq.entries.at({4, 0}) == 1);
  CHECK(sq.entries.at({2, 2}) == -2);
  CHECK(sq.entries.at({0, 4}) == 1);
  CHECK(poly_coeff_norm(sq, std::numeric_limits<double>::infinity()) == 2.0);

  for (int n = 1; n <= 10; ++n) {
    const Polynomial pn = poly_pow(make_Q(2), n);
    CHECK(hlb::poly_max_abs_coeff(pn) == test_util::binomial(n, n / 2));
  }

  const Polynomial q2 = make_Q(2);
  CHECK(poly_pow(q2, 1).entries == q2.entries);
  CHECK_THROWS_AS(poly_pow(q2, 0), std::invalid_argument);
  CHECK_THROWS_AS(poly_pow(make_Q(8), 2, /*term_cap=*/10), std::length_error);
}

TEST_CASE("evaluation properties") {
  hlb::SplitMix64 rng(13);
  const Polynomial q4 = make_Q(4);
  const Polynomial q4_cubed = poly_pow(q4, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = test_util::random_vector(rng, 4);
    // homogeneity; absolute floor covers cancellation near the zero set
    const double lambda = rng.next_normal();
    const double scaled = std::pow(lambda, 4) * q4.evaluate(x);
    CHECK_THAT(q4.evaluate(std::vector<double>{lambda * x[0], lambda * x[1], lambda * x[2],
                                               lambda * x[3]}),
               Catch::Matchers::WithinAbs(scaled, 1e-9 * (1.0 + std::abs(scaled))));
    // powers distribute over evaluation
    const double cubed = std::pow(q4.evaluate(x), 3);
    CHECK_THAT(q4_cubed.evaluate(x),
               Catch::Matchers::WithinAbs(cubed, 1e-9 * (1.0 + std::abs(cubed))));
  }
}

TEST_CASE("coefficient norms dominate the sup coefficient") {
  hlb::SplitMix64 rng(19);
  CHECK(poly_coeff_norm(make_Q(2), std::numeric_limits<double>::infinity()) == 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Polynomial p(3, 4);
    for (int k = 0; k < 6; ++k) {
      const int a = static_cast<int>(rng.next() % 5);
      const int b = static_cast<int>(rng.next() % (5 - a));
      p.add({a, b, 4 - a - b}, static_cast<std::int64_t>(rng.next() % 19) - 9);
    }
    if (p.entries.empty()) continue;
    const double sup = poly_coeff_norm(p, std::numeric_limits<double>::infinity());
    for (double q : {4.0 / 3.0, 2.0}) CHECK(poly_coeff_norm(p, q) >= sup - 1e-12);
  }
}

TEST_CASE("coefficient growth inequality by exact expansion") {
  const hlb::EqMCheck a = check_eq_m(1, 2);
  CHECK(a.lhs == 2);
  CHECK(a.holds);  // 2 >= 4/3
  const hlb::EqMCheck b = check_eq_m(2, 1);
  CHECK(b.lhs == 2);
  CHECK(b.holds);  // 2 >= (2/2)^3 = 1
  const hlb::EqMCheck c = check_eq_m(2, 2);
  CHECK(c.holds);
  CHECK(c.rhs == Catch::Approx(std::pow(4.0 / 3.0, 3.0)));

  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n * (1 << m) <= 16; ++n) CHECK(check_eq_m(m, n).holds);
}

TEST_CASE("the Q family has unit norm on every l_p ball, p >= 2") {
  for (int d : {2, 4, 8}) {
    const Polynomial q = make_Q(d);
    // exact at p = inf: even exponents reduce the ball max to a 0/1 grid
    CHECK(hlb::poly_grid_linf_max(q) == 1.0);
    // attained at the first basis vector
    std::vector<double> e1(static_cast<std::size_t>(d), 0.0);
    e1[0] = 1.0;
    CHECK(q.evaluate(e1) == 1.0);
    // feasible ascent never exceeds it at finite p
    for (double p : {2.0, 4.0}) {
      const double found = hlb::poly_sup_norm_ball(q, p, 16, 404);
      CHECK(found <= 1.0 + 1e-6);
      CHECK(found > 0.5);
    }
  }
}

TEST_CASE("polynomial serialization") {
  const Polynomial q4 = make_Q(4);
  const nlohmann::json j = q4.to_json();
  CHECK(j.at("nvars") == 4);
  CHECK(j.at("degree") == 4);
  CHECK(j.at("entries").size() == 6);
  const Polynomial back = Polynomial::from_json(j);
  CHECK(back.entries == q4.entries);
  CHECK_THROWS_AS(Polynomial(2, 2).add({1, 0}, 1), std::invalid_argument);  // not homogeneous
}
