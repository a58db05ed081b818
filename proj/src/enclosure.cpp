#include "knead/enclosure.hpp"

#include "knead/error.hpp"

#include <mpfr.h>

namespace knead {

Enclosure::Enclosure(Rational a, Rational b) : lo(std::move(a)), hi(std::move(b)) {
    if (lo > hi) raise("domain", "enclosure endpoints out of order");
}

namespace {

// Exact conversion of an MPFR value (a dyadic rational) back into mpq.
Rational mpfr_to_rational(const mpfr_t x) {
    if (mpfr_zero_p(x)) return Rational(0);
    mpz_class mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), x);
    Rational q(mant);
    if (e >= 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e));
        q *= Rational(p);
    } else {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(-e));
        q /= Rational(p);
    }
    return q;
}

Rational log_directed(const Rational& x, unsigned prec, mpfr_rnd_t rnd) {
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_set_q(t, x.get_mpq_t(), rnd);
    mpfr_log(t, t, rnd);
    Rational r = mpfr_to_rational(t);
    mpfr_clear(t);
    return r;
}

} // namespace

Enclosure log_enclosure(const Rational& x, unsigned prec) {
    if (x <= 0) raise("domain", "log of nonpositive value");
    if (x == 1) return Enclosure::point(Rational(0));
    return Enclosure(log_directed(x, prec, MPFR_RNDD), log_directed(x, prec, MPFR_RNDU));
}

Enclosure log_enclosure(const Enclosure& x, unsigned prec) {
    if (x.lo <= 0) raise("domain", "log of interval touching zero");
    return Enclosure(log_directed(x.lo, prec, MPFR_RNDD), log_directed(x.hi, prec, MPFR_RNDU));
}

Enclosure div_outward(const Enclosure& a, const Enclosure& b) {
    if (b.lo <= 0) raise("domain", "division by interval touching zero");
    if (a.lo < 0) raise("domain", "div_outward expects nonnegative numerator");
    return Enclosure(a.lo / b.hi, a.hi / b.lo);
}

Enclosure mul_outward(const Enclosure& a, const Enclosure& b) {
    if (a.lo < 0 || b.lo < 0) raise("domain", "mul_outward expects nonnegative intervals");
    return Enclosure(a.lo * b.lo, a.hi * b.hi);
}

Enclosure intersect(const Enclosure& a, const Enclosure& b) {
    Rational lo = std::max(a.lo, b.lo);
    Rational hi = std::min(a.hi, b.hi);
    if (lo > hi) raise("internal", "empty enclosure intersection");
    return Enclosure(lo, hi);
}

std::string format_enclosure_json(const Enclosure& e, int decimal_digits) {
    std::string out = "{\"lo\":\"" + to_fraction_string(e.lo) + "\",\"hi\":\"" + to_fraction_string(e.hi) +
                      "\",\"lo_decimal\":\"" + to_decimal_string(e.lo, decimal_digits, false) +
                      "\",\"hi_decimal\":\"" + to_decimal_string(e.hi, decimal_digits, true) + "\"}";
    return out;
}

} // namespace knead
