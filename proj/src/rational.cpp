#include "flexgate/rational.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flexgate/errors.hpp"

namespace flexgate {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw InvalidParams("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator*(const Rational& a, const Rational& b) {
  // Cross-reduce before multiplying to keep intermediates small.
  const std::int64_t g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
  const std::int64_t g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
  return Rational((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
}

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    size_t used = 0;
    if (slash == std::string::npos) {
      const std::int64_t n = std::stoll(s, &used);
      if (used != s.size()) throw ParseError("trailing characters in rational: '" + s + "'");
      return Rational(n, 1);
    }
    const std::int64_t n = std::stoll(s.substr(0, slash), &used);
    if (used != slash) throw ParseError("malformed rational numerator: '" + s + "'");
    const std::int64_t d = std::stoll(s.substr(slash + 1), &used);
    if (used != s.size() - slash - 1) throw ParseError("malformed rational denominator: '" + s + "'");
    return Rational(n, d);
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed rational: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw ParseError("rational out of 64-bit range: '" + s + "'");
  }
}

std::optional<Rational> rational_reconstruct(double x, std::int64_t max_denominator,
                                             double accept_tol) {
  if (!std::isfinite(x) || max_denominator < 1) return std::nullopt;
  const double tol = accept_tol * std::max(1.0, std::abs(x));
  const double ax = std::abs(x);

  std::int64_t p_prev = 0, q_prev = 1;  // h_{-2}, k_{-2}
  std::int64_t p = 1, q = 0;            // h_{-1}, k_{-1}
  double y = ax;
  for (int iter = 0; iter < 64; ++iter) {
    const double fa = std::floor(y);
    if (fa > 4.0e18) return std::nullopt;
    const std::int64_t a = static_cast<std::int64_t>(fa);
    if (p > 0 && a > (4'000'000'000'000'000'000LL - p_prev) / p) break;
    const std::int64_t p_next = a * p + p_prev;
    const std::int64_t q_next = a * q + q_prev;
    if (q_next > max_denominator) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    const double err = std::abs(ax - static_cast<double>(p) / static_cast<double>(q));
    if (err <= tol) return Rational(x < 0 ? -p : p, q);
    const double frac = y - fa;
    if (frac <= 0.0) break;
    y = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace flexgate
