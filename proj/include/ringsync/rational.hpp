#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/rational_adaptor.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ringsync {

// Exact rational number, always normalized (lowest terms, positive denominator).
// Expression templates are off so that mixed expressions behave like plain values.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

// Reduces x into [0, 1).
inline Rational mod_one(const Rational& x) {
  const BigInt& num = boost::multiprecision::numerator(x);
  const BigInt& den = boost::multiprecision::denominator(x);
  BigInt r = num % den;
  if (r < 0) r += den;
  return Rational(r, den);
}

// "p/q" or "p"; whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [](std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer in rational");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("malformed rational");
    for (std::size_t j = i; j < s.size(); ++j)
      if (s[j] < '0' || s[j] > '9') throw std::invalid_argument("malformed rational: " + std::string(s));
    return BigInt(std::string(s));
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(parse_int(text.substr(0, slash)), den);
}

inline std::string to_string(const Rational& x) {
  const BigInt& den = boost::multiprecision::denominator(x);
  std::string out = boost::multiprecision::numerator(x).str();
  if (den != 1) out += "/" + den.str();
  return out;
}

inline Rational sum(std::span<const Rational> xs) {
  Rational total = 0;
  for (const auto& x : xs) total += x;
  return total;
}

}  // namespace ringsync
