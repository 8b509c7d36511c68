#include "betti/scalar.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "betti/error.hpp"

namespace betti {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::unknown_generator: return "unknown_generator";
    case ErrorCode::empty_generators: return "empty_generators";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::validation: return "validation";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
    case ErrorCode::undecidable: return "undecidable";
    case ErrorCode::route_disagreement: return "route_disagreement";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

const char* to_string(ScalarMode mode) { return mode == ScalarMode::exact ? "exact" : "float"; }

ScalarMode parse_scalar_mode(std::string_view text) {
  if (text == "exact") return ScalarMode::exact;
  if (text == "float") return ScalarMode::floating;
  throw Error(ErrorCode::invalid_argument, "unknown mode '" + std::string(text) + "'");
}

Complex Scalar::complex() const {
  if (is_exact()) return Complex(rational().get_d(), 0.0);
  return std::get<Complex>(value_);
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string rational_to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string Scalar::to_string() const {
  if (is_exact()) return rational_to_string(rational());
  const Complex z = std::get<Complex>(value_);
  if (z.imag() == 0.0) return format_double(z.real());
  std::string im = format_double(z.imag());
  if (im[0] != '-') im = "+" + im;
  return format_double(z.real()) + im + "i";
}

nlohmann::json Scalar::to_json() const {
  if (is_exact()) return rational_to_string(rational());
  const Complex z = std::get<Complex>(value_);
  return nlohmann::json::array({z.real(), z.imag()});
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_text(std::string_view s) {
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

double parse_double(std::string_view s) {
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size())
    throw Error(ErrorCode::invalid_argument, "malformed number '" + buf + "'");
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  const auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  num = trim(num);
  den = trim(den);
  if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-' || den[0] == '+')
    throw Error(ErrorCode::invalid_argument, "malformed rational '" + std::string(text) + "'");
  std::string n(num);
  if (n[0] == '+') n.erase(0, 1);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw Error(ErrorCode::invalid_argument, "zero denominator in '" + std::string(text) + "'");
  Rational q(mpz_class(n, 10), d);
  q.canonicalize();
  return q;
}

Scalar parse_scalar(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw Error(ErrorCode::invalid_argument, "empty scalar");
  if (s.back() == 'i') {
    std::string_view body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not the leading one and not an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
      if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    double re = 0.0;
    std::string_view im = body;
    if (split != std::string_view::npos) {
      re = parse_double(body.substr(0, split));
      im = body.substr(split);
    }
    double imv = 1.0;
    if (im == "+" || im.empty()) imv = 1.0;
    else if (im == "-") imv = -1.0;
    else imv = parse_double(im);
    return Scalar(Complex(re, imv));
  }
  if (s.find_first_of(".eE") == std::string_view::npos) return Scalar(parse_rational(s));
  return Scalar(Complex(parse_double(s), 0.0));
}

}  // namespace betti
