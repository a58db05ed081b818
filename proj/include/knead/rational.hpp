#ifndef KNEAD_RATIONAL_HPP
#define KNEAD_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace knead {

/// Exact rational arithmetic is delegated to GMP. Everything on a certified
/// path is an mpq_class; doubles appear only in diagnostics.
using Rational = mpq_class;

/// Parse "p/q", an integer, or a decimal/scientific literal ("0.25", "1e-3")
/// into an exact rational. Throws Error("syntax") on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is one).
std::string to_fraction_string(const Rational& q);

/// Decimal string with `digits` places after the point, rounded toward
/// -infinity (round_up = false) or +infinity (round_up = true), so a printed
/// [lo, hi] pair still encloses the exact interval.
std::string to_decimal_string(const Rational& q, int digits, bool round_up);

Rational pow_rational(const Rational& base, unsigned long exp);

inline Rational rational_from_parts(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// 2^-e as an exact rational.
Rational pow2_neg(unsigned long e);

int sign(const Rational& q);

} // namespace knead

#endif
