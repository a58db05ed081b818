#include "knead/rational.hpp"

#include "knead/error.hpp"

#include <algorithm>
#include <cctype>

namespace knead {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) raise("syntax", "empty rational literal");

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = (s[0] == '-');
        s.erase(s.begin());
    }
    if (s.empty()) raise("syntax", "sign without digits in rational literal");

    auto slash = s.find('/');
    Rational value;
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) raise("syntax", "malformed fraction: " + std::string(text));
        mpz_class n(num, 10), d(den, 10);
        if (d == 0) raise("syntax", "zero denominator: " + std::string(text));
        value = Rational(n, d);
        value.canonicalize();
    } else {
        // decimal / scientific
        long exp10 = 0;
        auto epos = s.find_first_of("eE");
        if (epos != std::string::npos) {
            std::string es = s.substr(epos + 1);
            s = s.substr(0, epos);
            if (es.empty()) raise("syntax", "malformed exponent: " + std::string(text));
            bool eneg = false;
            if (es[0] == '+' || es[0] == '-') {
                eneg = (es[0] == '-');
                es.erase(es.begin());
            }
            if (!all_digits(es) || es.size() > 6) raise("syntax", "malformed exponent: " + std::string(text));
            exp10 = std::stol(es);
            if (eneg) exp10 = -exp10;
        }
        auto dot = s.find('.');
        std::string digits = s;
        if (dot != std::string::npos) {
            digits = s.substr(0, dot) + s.substr(dot + 1);
            exp10 -= static_cast<long>(s.size() - dot - 1);
        }
        if (!all_digits(digits)) raise("syntax", "malformed rational literal: " + std::string(text));
        mpz_class n(digits, 10);
        value = Rational(n);
        if (exp10 > 0) {
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10));
            value *= Rational(p);
        } else if (exp10 < 0) {
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(-exp10));
            value /= Rational(p);
        }
    }
    if (negative) value = -value;
    return value;
}

std::string to_fraction_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal_string(const Rational& q, int digits, bool round_up) {
    if (digits < 0) digits = 0;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    Rational scaled = q * Rational(scale);
    mpz_class n;
    if (round_up) {
        mpz_cdiv_q(n.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    } else {
        mpz_fdiv_q(n.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    }
    bool neg = n < 0;
    mpz_class a = abs(n);
    std::string body = a.get_str();
    if (static_cast<int>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
    std::string out;
    if (neg) out = "-";
    out += body.substr(0, body.size() - digits);
    if (digits > 0) {
        out += ".";
        out += body.substr(body.size() - digits);
    }
    return out;
}

Rational pow_rational(const Rational& base, unsigned long exp) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), base.get_num().get_mpz_t(), exp);
    mpz_pow_ui(d.get_mpz_t(), base.get_den().get_mpz_t(), exp);
    Rational q(n, d);
    q.canonicalize();
    return q;
}

Rational pow2_neg(unsigned long e) {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 2, e);
    Rational q(mpz_class(1), d);
    q.canonicalize();
    return q;
}

int sign(const Rational& q) { return sgn(q); }

} // namespace knead
