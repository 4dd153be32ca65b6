#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace hlb {

/// Exact rational with 64-bit components, normalized (den > 0, gcd = 1).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }
  explicit Rational(std::int64_t n) : num(n), den(1) {}

  void normalize() {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
};

/// Extended real in (0, +inf], remembering an exact rational form when one
/// was supplied.  Used for the exponent parameter p and for mixed-norm
/// exponents, so that values such as 199999/1000 enter formulas without
/// decimal parsing loss.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double v) : value_(v) {
    if (std::isinf(v)) { infinite_ = true; value_ = std::numeric_limits<double>::infinity(); }
  }
  ExtReal(const Rational& r) : value_(r.value()), exact_(r) {}
  ExtReal(int n) : ExtReal(Rational(n)) {}

  static ExtReal infinity() {
    ExtReal e;
    e.infinite_ = true;
    e.value_ = std::numeric_limits<double>::infinity();
    return e;
  }

  /// Accepts "inf", "a/b", or a decimal literal.
  static ExtReal parse(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "INF") return infinity();
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const std::int64_t n = std::stoll(text.substr(0, slash));
      const std::int64_t d = std::stoll(text.substr(slash + 1));
      return ExtReal(Rational(n, d));
    }
    // integer literals stay exact
    try {
      std::size_t pos = 0;
      const std::int64_t n = std::stoll(text, &pos);
      if (pos == text.size()) return ExtReal(Rational(n));
    } catch (const std::exception&) {
    }
    return ExtReal(std::stod(text));
  }

  bool is_inf() const { return infinite_; }
  double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }
  const std::optional<Rational>& exact() const { return exact_; }

  /// Conjugate exponent p* with 1/p + 1/p* = 1 (p > 1; p = inf gives 1).
  ExtReal conjugate() const {
    if (infinite_) return ExtReal(Rational(1));
    if (value_ <= 1.0) throw std::domain_error("conjugate: requires p > 1");
    if (exact_) return ExtReal(Rational(exact_->num, exact_->num - exact_->den));
    return ExtReal(value_ / (value_ - 1.0));
  }

  std::string str() const {
    if (infinite_) return "inf";
    if (exact_) {
      if (exact_->den == 1) return std::to_string(exact_->num);
      return std::to_string(exact_->num) + "/" + std::to_string(exact_->den);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value_);
    return buf;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
  std::optional<Rational> exact_;
};

}  // namespace hlb
