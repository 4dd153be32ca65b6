#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "hlb/forms.hpp"
#include "hlb/norms.hpp"
#include "test_util.hpp"

using hlb::CoeffTensor;
using hlb::ExtReal;
using hlb::Rational;
using hlb::coeff_lq;
using hlb::hl_exponent;
using hlb::make_littlewood;
using hlb::make_tilde;
using hlb::mixed_norm;
using hlb::validate_exponents;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("optimal summability exponent") {
  CHECK_THAT(hl_exponent(2, ExtReal::infinity()), Catch::Matchers::WithinAbs(4.0 / 3.0, 1e-15));
  CHECK_THAT(hl_exponent(3, ExtReal(Rational(6))), Catch::Matchers::WithinAbs(2.0, 1e-15));
  CHECK_THAT(hl_exponent(2, ExtReal(Rational(7, 2))), Catch::Matchers::WithinAbs(7.0 / 3.0, 1e-15));
  // both branches agree at p = 2m
  CHECK_THAT(hl_exponent(4, ExtReal(8.0)), Catch::Matchers::WithinAbs(2.0, 1e-15));
  CHECK_THROWS_AS(hl_exponent(3, ExtReal(3.0)), std::domain_error);
  const Rational rho = hlb::hl_exponent_exact(2, ExtReal(Rational(7, 2)));
  CHECK(rho == Rational(7, 3));
  CHECK(hlb::hl_exponent_exact(5, ExtReal::infinity()) == Rational(10, 6));
}

TEST_CASE("coefficient norms of the families") {
  const CoeffTensor t2 = make_littlewood(2).expand();
  CHECK_THAT(coeff_lq(t2, 4.0 / 3.0), Catch::Matchers::WithinAbs(std::pow(4.0, 0.75), 1e-12));
  for (int m = 2; m <= 5; ++m) {
    const CoeffTensor tm = make_littlewood(m).expand();
    CHECK_THAT(coeff_lq(tm, 2.0), Catch::Matchers::WithinAbs(std::exp2(m - 1), 1e-10));
  }
  CHECK_THAT(coeff_lq(make_tilde(8).expand(), 2.0), Catch::Matchers::WithinAbs(128.0, 1e-8));
  CHECK(coeff_lq(t2, kInf) == 1.0);
  CHECK_THROWS_AS(coeff_lq(t2, 0.5), std::invalid_argument);
}

TEST_CASE("mixed norm frozen values") {
  const CoeffTensor t3 = make_littlewood(3).expand();
  const double v = mixed_norm(t3, std::vector<double>{4.0 / 3.0, 2.0, 4.0 / 3.0});
  CHECK_THAT(v, Catch::Matchers::WithinAbs(std::pow(2.0, 2.75), 1e-12));

  const CoeffTensor t2 = make_littlewood(2).expand();
  for (double q : {1.0, 4.0 / 3.0, 2.0}) {
    CHECK_THAT(mixed_norm(t2, std::vector<double>{q, q}),
               Catch::Matchers::WithinAbs(coeff_lq(t2, q), 1e-12));
  }
  CHECK_THAT(mixed_norm(t2, std::vector<double>{1.0, 2.0}),
             Catch::Matchers::WithinAbs(2.0 * std::sqrt(2.0), 1e-12));
  CHECK_THROWS_AS(mixed_norm(t2, std::vector<double>{2.0}), std::invalid_argument);
}

TEST_CASE("mixed norm of the inductive family has a closed form") {
  // 2^((m-1)/q_1 + 1/q_2 + ... + 1/q_m), verified independently by hand
  hlb::SplitMix64 rng(17);
  for (int m : {3, 4, 5}) {
    const CoeffTensor tm = make_littlewood(m).expand();
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> q(static_cast<std::size_t>(m));
      double expo = 0.0;
      for (int i = 0; i < m; ++i) {
        q[static_cast<std::size_t>(i)] = 1.0 + rng.next_double();
        expo += (i == 0 ? m - 1.0 : 1.0) / q[static_cast<std::size_t>(i)];
      }
      CHECK_THAT(mixed_norm(tm, q),
                 Catch::Matchers::WithinRel(std::exp2(expo), 1e-12));
    }
  }
}

TEST_CASE("mixed norm agrees with dense nested loops") {
  hlb::SplitMix64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::vector<double>> a(3, std::vector<double>(4));
    for (auto& row : a)
      for (double& x : row) x = rng.next_normal();
    const CoeffTensor t = test_util::tensor_from_matrix(a);
    const double q1 = 1.0 + rng.next_double(), q2 = 1.0 + rng.next_double();
    CHECK_THAT(mixed_norm(t, std::vector<double>{q1, q2}),
               Catch::Matchers::WithinRel(test_util::dense_mixed_norm_2(a, q1, q2), 1e-12));
  }
}

TEST_CASE("mixed norm is monotone decreasing in the exponents") {
  hlb::SplitMix64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::vector<double>> a(3, std::vector<double>(3));
    for (auto& row : a)
      for (double& x : row) x = rng.next_normal();
    const CoeffTensor t = test_util::tensor_from_matrix(a);
    const double q1 = 1.0 + rng.next_double(), q2 = 1.0 + rng.next_double();
    const double r1 = q1 + rng.next_double(), r2 = q2 + rng.next_double();
    CHECK(mixed_norm(t, std::vector<double>{q1, q2}) >=
          mixed_norm(t, std::vector<double>{r1, r2}) - 1e-12);
  }
}

TEST_CASE("two-index Minkowski inequality") {
  // for r <= s: swapping the smaller exponent to the inner position can
  // only decrease the value: mixed(A^T, (s, r)) <= mixed(A, (r, s))
  hlb::SplitMix64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::vector<double>> a(4, std::vector<double>(3));
    std::vector<std::vector<double>> at(3, std::vector<double>(4));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j) {
        a[i][j] = rng.next_normal();
        at[j][i] = a[i][j];
      }
    const double r = 1.0 + rng.next_double();
    const double s = r + rng.next_double();
    const double lhs = test_util::dense_mixed_norm_2(at, s, r);
    const double rhs = test_util::dense_mixed_norm_2(a, r, s);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
    // and the implementation agrees with the dense oracle on both sides
    CHECK_THAT(mixed_norm(test_util::tensor_from_matrix(at), std::vector<double>{s, r}),
               Catch::Matchers::WithinRel(lhs, 1e-12));
  }
}

TEST_CASE("coefficient norm is permutation symmetric, mixed norm is not") {
  const CoeffTensor t3 = make_littlewood(3).expand();
  // permute slots (1,2,3) -> (3,1,2) of the tensor
  CoeffTensor perm(3, {2, 4, 4});
  for (const auto& [idx, c] : t3.entries()) perm.set({idx[2], idx[0], idx[1]}, c);
  for (double q : {1.0, 1.5, 2.0})
    CHECK_THAT(coeff_lq(perm, q), Catch::Matchers::WithinRel(coeff_lq(t3, q), 1e-12));

  // witness: moving the outermost exponent changes the value ...
  const double a = mixed_norm(t3, std::vector<double>{4.0 / 3.0, 4.0 / 3.0, 2.0});
  const double b = mixed_norm(t3, std::vector<double>{2.0, 4.0 / 3.0, 4.0 / 3.0});
  CHECK(std::abs(a - b) > 0.1);
  // ... while swapping only the two inner exponents happens to preserve it
  // for this family: both orders give exactly 2^(11/4)
  const double c = mixed_norm(t3, std::vector<double>{4.0 / 3.0, 2.0, 4.0 / 3.0});
  CHECK_THAT(a, Catch::Matchers::WithinAbs(c, 1e-12));
  CHECK_THAT(a, Catch::Matchers::WithinAbs(std::pow(2.0, 2.75), 1e-12));
}

TEST_CASE("exponent vector admissibility") {
  const auto ok = validate_exponents(std::vector<double>{4.0 / 3.0, 4.0 / 3.0, 2.0}, 3,
                                     ExtReal::infinity());
  CHECK(ok.ok);

  // companion vector from the beta formula at alpha = 4/3
  const double beta = hlb::gbh_beta(4.0 / 3.0, 3);
  CHECK_THAT(beta, Catch::Matchers::WithinAbs(1.6, 1e-15));
  CHECK(validate_exponents(std::vector<double>{4.0 / 3.0, beta, beta}, 3, ExtReal::infinity()).ok);

  // beta at alpha = 2, m = 3 is 4/3, giving the admissible (4/3, 4/3, 2)
  CHECK_THAT(hlb::gbh_beta(2.0, 3), Catch::Matchers::WithinAbs(4.0 / 3.0, 1e-15));
  CHECK(validate_exponents(std::vector<double>{hlb::gbh_beta(2.0, 3), hlb::gbh_beta(2.0, 3), 2.0},
                           3, ExtReal::infinity())
            .ok);
  // (8/5, 8/5, 2) is NOT admissible: the inverse sum is 7/4, not 2
  CHECK(!validate_exponents(std::vector<double>{1.6, 1.6, 2.0}, 3, ExtReal::infinity()).ok);

  const auto bad_sum = validate_exponents(std::vector<double>{1.0, 1.0, 1.0}, 3, ExtReal::infinity());
  CHECK(!bad_sum.ok);
  CHECK(bad_sum.diagnostic.find("sum") != std::string::npos);

  const auto bad_len = validate_exponents(std::vector<double>{1.0, 2.0}, 3, ExtReal::infinity());
  CHECK(!bad_len.ok);

  // finite p tightens the lower end of the admissible box
  const auto below = validate_exponents(std::vector<double>{1.1, 2.0, 2.0, 2.0}, 4,
                                        ExtReal(Rational(8)));
  CHECK(!below.ok);

  // gbh_beta degenerates to the symmetric exponent at alpha = 2m/(m+1)
  for (int m : {3, 4, 5}) {
    const double alpha = 2.0 * m / (m + 1.0);
    CHECK_THAT(hlb::gbh_beta(alpha, m), Catch::Matchers::WithinAbs(alpha, 1e-12));
  }
}
