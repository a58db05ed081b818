#include "knead/beta.hpp"

#include "knead/error.hpp"

#include <algorithm>

namespace knead {

namespace {

mpz_class floor_rational(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f;
}

} // namespace

ExpansionDigits beta_expand_one(const Enclosure& beta, std::size_t n) {
    if (beta.lo <= 1) raise("out_of_range", "beta_expand_one requires beta > 1");
    ExpansionDigits out;
    out.digits.reserve(n);
    Rational tlo(1), thi(1); // remainder enclosure, starts at exactly 1
    for (std::size_t i = 0; i < n; ++i) {
        if (tlo == 0 && thi == 0) {
            out.digits.push_back(0);
            continue;
        }
        Rational ulo = beta.lo * tlo;
        Rational uhi = beta.hi * thi;
        mpz_class flo = floor_rational(ulo);
        mpz_class fhi = floor_rational(uhi);
        if (flo != fhi) {
            raise("precision", "digit " + std::to_string(i + 1) +
                                   " of the expansion of 1 is undecidable at this enclosure width; refine beta");
        }
        out.digits.push_back(static_cast<int>(flo.get_si()));
        tlo = ulo - Rational(flo);
        thi = uhi - Rational(flo);
    }
    out.truncated = !(tlo == 0 && thi == 0);
    return out;
}

int g_sign(const Seq& s, const Rational& beta) {
    // g(beta) = sum_{i>=1} s_i beta^-i - 1, with the periodic tail summed in
    // closed form: tail = beta^-P * (sum_j s_{P+j} beta^-j) * beta^Q/(beta^Q - 1).
    const Rational inv = Rational(1) / beta;
    Rational acc(0);
    Rational p(1);
    for (std::size_t i = 0; i < s.pre.size(); ++i) {
        p *= inv;
        acc += Rational(s.pre[i]) * p;
    }
    if (!s.per.empty()) {
        Rational cyc(0), q(1);
        for (std::size_t j = 0; j < s.per.size(); ++j) {
            q *= inv;
            cyc += Rational(s.per[j]) * q;
        }
        // p currently equals beta^-P; q equals beta^-Q.
        Rational denom = Rational(1) - q;
        acc += p * cyc / denom;
    }
    return sign(acc - 1);
}

Enclosure beta_from_kneading(const Seq& s, const Rational& tol) {
    if (!is_kneading(s)) raise("not_kneading", "beta_from_kneading requires a kneading sequence");
    if (tol <= 0) raise("domain", "tolerance must be positive");
    Seq ten = Seq::make(s.m, {1}, {});
    if (s == ten) raise("degenerate", "expansion 10^inf forces beta <= 1");

    // g is strictly decreasing on (1, m+1); g(1+) > 0 for every kneading
    // s != 10^inf and g(m+1) < 0, so the root is bracketed. The lower bracket
    // starts at 1 and is never evaluated there.
    Rational lo(1);
    Rational hi(s.m + 1);
    if (g_sign(s, hi) >= 0) raise("internal", "g(m+1) >= 0 for a kneading sequence");
    while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        int sg = g_sign(s, mid);
        if (sg == 0) return Enclosure::point(mid);
        if (sg > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Enclosure(lo, hi);
}

bool parry_membership(const Seq& s, const Seq& one_exp) {
    if (s.m != one_exp.m) raise("alphabet_mismatch", "parry_membership across different alphabets");
    if (one_exp.pre.empty() && one_exp.per.empty()) raise("domain", "expansion of 1 cannot be 0^inf");
    if (!is_kneading(one_exp)) raise("not_kneading", "one_exp is not a valid expansion of 1");
    Seq bound = one_exp;
    bool strict = true;
    if (one_exp.is_finite()) {
        // 1_beta = i1..iM 0^inf: substitute the periodic bound
        // (i1..i_{M-1}(iM - 1))^inf, compared non-strictly (the shift is the
        // closure of the expansions).
        std::vector<int> w = one_exp.pre;
        w.back() -= 1; // canonical finite form has a nonzero final digit
        bound = Seq::make(one_exp.m, {}, std::move(w));
        strict = false;
    }
    const std::size_t tails = std::max<std::size_t>(1, s.tail_count());
    for (std::size_t n = 1; n <= tails; ++n) {
        Ordering o = lex_compare(shift(s, n), bound);
        if (o == Ordering::Greater) return false;
        if (strict && o == Ordering::Equal) return false;
    }
    return true;
}

BetaShiftSpec make_beta_shift(const Seq& one_expansion, const Rational& tol) {
    BetaShiftSpec spec;
    spec.beta = beta_from_kneading(one_expansion, tol);
    spec.one_expansion = one_expansion;
    spec.truncated = false;
    return spec;
}

BetaShiftSpec make_beta_shift(const Enclosure& beta, std::size_t digits) {
    BetaShiftSpec spec;
    spec.beta = beta;
    ExpansionDigits d = beta_expand_one(beta, digits);
    int m = 1;
    for (int s : d.digits) m = std::max(m, s);
    spec.one_expansion = Seq::make(m, d.digits, {});
    spec.truncated = d.truncated;
    return spec;
}

bool parry_membership(const Seq& s, const BetaShiftSpec& shift_spec) {
    if (shift_spec.truncated) {
        raise("domain", "membership needs the full expansion of 1, not a truncated prefix");
    }
    return parry_membership(s, shift_spec.one_expansion);
}

Enclosure holder_exponent(const Enclosure& beta1, const Enclosure& beta2) {
    if (beta1.lo <= 1 || beta2.lo <= 1) raise("domain", "holder_exponent requires bases > 1");
    if (beta1.lo > beta2.hi) raise("domain", "holder_exponent requires beta1 <= beta2");
    if (beta1 == beta2 && beta1.is_point()) return Enclosure::point(Rational(1));
    Enclosure l1 = log_enclosure(beta1);
    Enclosure l2 = log_enclosure(beta2);
    Enclosure q = div_outward(l1, l2);
    if (q.hi > 1) q.hi = 1; // ln b1 / ln b2 <= 1 under the precondition
    if (q.lo > q.hi) q.lo = q.hi;
    return q;
}

namespace {

Seq left_c_witness(const Seq& e, int k) {
    // Witness ladders below a one-sided right endpoint e, per its shape.
    Seq ten = Seq::make(e.m, {1}, {});
    if (lex_compare(e, ten) != Ordering::Greater) {
        raise("empty_case", "no witness family below an endpoint <= 10^inf");
    }
    const int e1 = e.digit(0);
    std::vector<int> block;
    if (e1 > 1) {
        block.assign(static_cast<std::size_t>(k), e1 - 1);
        return Seq::make(e.m, std::move(block), {});
    }
    // e1 = 1 and some later digit hits 1 again (e > 10^inf); l is its position.
    std::size_t l = 1;
    while (e.digit(l) == 0) ++l;
    ++l; // 1-based position of the second nonzero digit
    if (l == 2) {
        for (int i = 0; i < k; ++i) {
            block.push_back(1);
            block.push_back(0);
        }
        return Seq::make(e.m, std::move(block), {});
    }
    for (int i = 0; i < k; ++i) {
        block.push_back(1);
        block.insert(block.end(), l - 1, 0);
    }
    return Seq::make(e.m, std::move(block), {});
}

Seq interval_cd_witness(const Seq& c, const Seq& d, int k) {
    const int c1 = c.digit(0);
    const int d1 = d.digit(0);
    if (d1 <= c1) raise("empty_case", "survivor set empty when d1 <= c1");
    if (c1 + 1 > c.m) raise("empty_case", "no room above c1 in the alphabet");
    if (d1 >= c1 + 2) {
        std::vector<int> pre(static_cast<std::size_t>(k), c1 + 1);
        return Seq::make(c.m, std::move(pre), {c1});
    }
    // d1 = c1 + 1: require d above the critical threshold (c1+1)c1^inf.
    Seq threshold = Seq::make(d.m, {c1 + 1}, {c1});
    if (lex_compare(d, threshold) != Ordering::Greater) {
        raise("empty_case", "survivor set empty at or below the critical threshold");
    }
    // Count leading (c1+1)-digits of d.
    std::size_t l0 = 0;
    while (d.digit(l0) == c1 + 1) ++l0;
    std::vector<int> pre;
    if (l0 >= 2) {
        pre.insert(pre.end(), l0 - 1, c1 + 1);
        pre.insert(pre.end(), static_cast<std::size_t>(k), c1);
        pre.push_back(c1 + 1);
    } else {
        // d = (c1+1) c1^t (c1+1) ...: t digits of c1 before the second bump.
        std::size_t t = 0;
        while (d.digit(1 + t) == c1) ++t;
        pre.push_back(c1 + 1);
        pre.insert(pre.end(), t + static_cast<std::size_t>(k), c1);
        pre.push_back(c1 + 1);
    }
    return Seq::make(c.m, std::move(pre), {c1});
}

} // namespace

Seq lower_bound_witness(const LowerBoundFamily& family, int k) {
    if (k < 1) raise("domain", "witness index must be >= 1");
    switch (family.kind) {
        case FamilyKind::Full: {
            std::vector<int> pre(static_cast<std::size_t>(k), 1);
            return Seq::make(family.m, std::move(pre), {});
        }
        case FamilyKind::LeftC: {
            if (!family.c) raise("domain", "left_c family needs its endpoint sequence");
            return left_c_witness(*family.c, k);
        }
        case FamilyKind::IntervalCd: {
            if (!family.c || !family.d) raise("domain", "interval_cd family needs both endpoints");
            return interval_cd_witness(*family.c, *family.d, k);
        }
    }
    raise("internal", "unknown family kind");
}

Enclosure dimension_lower_bound_ratio(const LowerBoundFamily& family, int k, const Rational& tol) {
    if (k < 2) raise("domain", "ratio needs witnesses at k-1 and k");
    Seq wa = lower_bound_witness(family, k - 1);
    Seq wb = lower_bound_witness(family, k);
    Enclosure ba = beta_from_kneading(wa, tol);
    Enclosure bb = beta_from_kneading(wb, tol);
    if (lex_compare(wa, wb) == Ordering::Greater) std::swap(ba, bb);
    return holder_exponent(ba, bb);
}

} // namespace knead
