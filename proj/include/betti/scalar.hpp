#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

namespace betti {

using Rational = mpq_class;
using Complex = std::complex<double>;

enum class ScalarMode { exact, floating };

const char* to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view text);

// Arithmetic hooks used by the templated linear algebra. Rational is the
// exact field; Complex carries a tolerance for zero tests.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational conj(const Rational& x) { return x; }
  static double real(const Rational& x) { return x.get_d(); }
  static double abs(const Rational& x) { return std::fabs(x.get_d()); }
  static bool is_zero(const Rational& x, double) { return sgn(x) == 0; }
  static bool is_positive(const Rational& x, double) { return sgn(x) > 0; }
  static Rational from(const Rational& x) { return x; }
  static Rational one() { return Rational(1); }
  static Rational zero() { return Rational(0); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex conj(const Complex& x) { return std::conj(x); }
  static double real(const Complex& x) { return x.real(); }
  static double abs(const Complex& x) { return std::abs(x); }
  static bool is_zero(const Complex& x, double tol) { return std::abs(x) <= tol; }
  static bool is_positive(const Complex& x, double tol) { return x.real() > tol; }
  static Complex from(const Rational& x) { return Complex(x.get_d(), 0.0); }
  static Complex one() { return Complex(1.0, 0.0); }
  static Complex zero() { return Complex(0.0, 0.0); }
};

// A result value in whichever mode produced it.
class Scalar {
 public:
  Scalar() : value_(Rational(0)) {}
  Scalar(Rational q) : value_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
  Scalar(Complex z) : value_(z) {}              // NOLINT(google-explicit-constructor)

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  const Rational& rational() const { return std::get<Rational>(value_); }
  Complex complex() const;
  double real() const { return complex().real(); }

  // "p/q" in exact mode, "re" or "re+imi" otherwise.
  std::string to_string() const;
  nlohmann::json to_json() const;

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.value_ == b.value_; }

 private:
  std::variant<Rational, Complex> value_;
};

// Always "p/q", including integers ("0/1").
std::string rational_to_string(const Rational& q);

// Accepts "p/q", integers. Throws Error(invalid_argument) otherwise.
Rational parse_rational(std::string_view text);

// Accepts a rational, a decimal float, or a complex "re+imi" / "imi".
// Returns a Rational when the text has no decimal point or exponent.
Scalar parse_scalar(std::string_view text);

}  // namespace betti
