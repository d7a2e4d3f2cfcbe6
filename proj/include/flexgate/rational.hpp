#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace flexgate {

// Exact rational with 64-bit components, always normalized (gcd 1, den > 0).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  bool is_zero() const { return num == 0; }

  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
};

// Parses "p/q" or "p". Throws ParseError on malformed input.
Rational parse_rational(const std::string& s);

// Continued-fraction reconstruction: the first convergent p/q of x with
// |x - p/q| <= accept_tol * max(1, |x|) and q <= max_denominator, or nullopt.
// The acceptance tolerance must sit well below the ~1/q^2 approximation floor
// of irrational targets for the rejection to be meaningful.
std::optional<Rational> rational_reconstruct(double x, std::int64_t max_denominator,
                                             double accept_tol);

}  // namespace flexgate
