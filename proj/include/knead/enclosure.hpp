#ifndef KNEAD_ENCLOSURE_HPP
#define KNEAD_ENCLOSURE_HPP

#include "knead/rational.hpp"

#include <string>

namespace knead {

/// Closed interval with exact rational endpoints. Operations that leave the
/// rational field (logarithms) round outward, so a true value contained in
/// the inputs is always contained in the result.
struct Enclosure {
    Rational lo;
    Rational hi;

    Enclosure() : lo(0), hi(0) {}
    Enclosure(Rational a, Rational b);

    static Enclosure point(const Rational& v) { return Enclosure(v, v); }

    Rational width() const { return hi - lo; }
    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    bool is_point() const { return lo == hi; }

    bool operator==(const Enclosure& o) const { return lo == o.lo && hi == o.hi; }
};

/// Natural log of a positive rational, bracketed by dyadic rationals from
/// MPFR directed rounding at `prec` bits.
Enclosure log_enclosure(const Rational& x, unsigned prec = 128);

/// Outward ln over an interval; requires x.lo > 0.
Enclosure log_enclosure(const Enclosure& x, unsigned prec = 128);

/// Outward quotient a / b for b.lo > 0 and a.lo >= 0 (exact rational division).
Enclosure div_outward(const Enclosure& a, const Enclosure& b);

/// Outward product for nonnegative intervals.
Enclosure mul_outward(const Enclosure& a, const Enclosure& b);

Enclosure intersect(const Enclosure& a, const Enclosure& b);

std::string format_enclosure_json(const Enclosure& e, int decimal_digits = 15);

} // namespace knead

#endif
