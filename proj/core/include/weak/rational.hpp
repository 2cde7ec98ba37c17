#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace weak {

/// Arbitrary-precision rational, always kept canonical.
using Rational = mpq_class;

/// Parses "p/q", "p" or a finite decimal such as "0.75" into a canonical rational.
Rational parse_rational(std::string_view text);

/// "p/q" or "p" when the denominator is one.
std::string to_string(const Rational& q);

/// Exact square root when both numerator and denominator are perfect squares.
std::optional<Rational> exact_sqrt(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double x) { return x == 0.0; }

}  // namespace weak
