#include "knead/beta.hpp"

#include "knead/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace knead;

namespace {

Seq S(const char* text, int m = 1) { return parse_seq(text, m); }

// Independent oracle: greedy digits of 1 under t -> beta*t - floor(beta*t)
// for an exact rational beta.
std::vector<int> greedy_digits_oracle(const Rational& beta, std::size_t n) {
    std::vector<int> out;
    Rational t(1);
    for (std::size_t i = 0; i < n; ++i) {
        Rational u = beta * t;
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), u.get_num().get_mpz_t(), u.get_den().get_mpz_t());
        out.push_back(static_cast<int>(f.get_si()));
        t = u - Rational(f);
    }
    return out;
}

// Truncated-series evaluation of g with a certified tail bound; used to
// verify root containment independently of the closed-form route.
bool root_certainly_outside(const Seq& s, const Enclosure& e, std::size_t terms) {
    auto partial = [&](const Rational& beta) -> Rational {
        Rational acc(0), p(1);
        for (std::size_t i = 0; i < terms; ++i) {
            p /= beta;
            acc += Rational(s.digit(i)) * p;
        }
        return acc - 1;
    };
    auto tail_bound = [&](const Rational& beta) -> Rational {
        Rational p = pow_rational(Rational(1) / beta, static_cast<unsigned long>(terms));
        return Rational(s.m) * p / (beta - 1);
    };
    // g decreasing; the root escapes [lo, hi] iff g(lo) < 0 or g(hi) > 0 certainly.
    bool below = partial(e.lo) + tail_bound(e.lo) < 0;
    bool above = partial(e.hi) > 0;
    return below || above;
}

std::vector<Seq> random_periodic_kneading(std::mt19937& rng, int count, int max_m, std::size_t max_word) {
    std::vector<Seq> out;
    std::uniform_int_distribution<int> mdist(1, max_m);
    while (static_cast<int>(out.size()) < count) {
        int m = mdist(rng);
        std::uniform_int_distribution<int> sym(0, m);
        std::uniform_int_distribution<std::size_t> plen(0, max_word / 2), qlen(1, max_word);
        std::vector<int> pre(plen(rng)), per(qlen(rng));
        for (int& d : pre) d = sym(rng);
        for (int& d : per) d = sym(rng);
        Seq s = Seq::make(m, pre, per);
        if (s.is_finite() || !is_kneading(s)) continue;
        if (std::find(out.begin(), out.end(), s) != out.end()) continue;
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_SUITE_BEGIN("beta");

TEST_CASE("beta_expand_one on exact rational bases") {
    ExpansionDigits e = beta_expand_one(Enclosure::point(Rational(3, 2)), 9);
    CHECK(e.digits == std::vector<int>{1, 0, 1, 0, 0, 0, 0, 0, 1});
    CHECK(e.truncated);
    CHECK(e.digits == greedy_digits_oracle(Rational(3, 2), 9));

    ExpansionDigits two = beta_expand_one(Enclosure::point(Rational(2)), 4);
    CHECK(two.digits == std::vector<int>{2, 0, 0, 0});
    CHECK(!two.truncated);

    CHECK_THROWS_AS(beta_expand_one(Enclosure::point(Rational(1)), 3), Error);
}

TEST_CASE("beta_expand_one digit certification near the golden ratio") {
    // A width-1e-12 enclosure straddling phi cannot certify digit 2: the
    // expansion jumps from 10111... to 110... across phi.
    Rational lo = parse_rational("1.618033988749894");
    Rational hi = parse_rational("1.618033988749895");
    CHECK_THROWS_AS(beta_expand_one(Enclosure(lo, hi), 6), Error);
    // An enclosure certified to sit just above phi decides 110000.
    Rational lo2 = parse_rational("1.6180339887498949025");
    Rational hi2 = lo2 + parse_rational("1e-18");
    Rational gate = (2 * lo2 - 1) * (2 * lo2 - 1);
    CHECK(gate > 5); // lo2 > phi, exactly
    ExpansionDigits g = beta_expand_one(Enclosure(lo2, hi2), 6);
    CHECK(g.digits == std::vector<int>{1, 1, 0, 0, 0, 0});
}

TEST_CASE("beta_from_kneading closed forms") {
    Rational tol = parse_rational("1e-12");
    Enclosure phi = beta_from_kneading(S("110"), tol);
    CHECK(phi.width() <= tol);
    // phi = (1+sqrt 5)/2: certified containment via (2x-1)^2 vs 5
    Rational glo = (2 * phi.lo - 1) * (2 * phi.lo - 1);
    Rational ghi = (2 * phi.hi - 1) * (2 * phi.hi - 1);
    CHECK(glo <= 5);
    CHECK(ghi >= 5);

    Enclosure trib = beta_from_kneading(S("1110"), tol);
    auto p3 = [](const Rational& x) -> Rational { return x * x * x - x * x - x - 1; };
    CHECK(p3(trib.lo) <= 0);
    CHECK(p3(trib.hi) >= 0);

    Enclosure e = beta_from_kneading(S("1(10)"), tol);
    auto q3 = [](const Rational& x) -> Rational { return x * x * x - x * x - 2 * x + 1; };
    CHECK(q3(e.lo) <= 0);
    CHECK(q3(e.hi) >= 0);
    CHECK(e.lo > parse_rational("1.8019"));
    CHECK(e.hi < parse_rational("1.8020"));

    CHECK_THROWS_AS(beta_from_kneading(S("1"), tol), Error);
    CHECK_THROWS_AS(beta_from_kneading(S("(10)"), tol), Error);

    // integer base hits the root exactly
    Enclosure two = beta_from_kneading(S("2", 2), tol);
    CHECK(two.is_point());
    CHECK(two.lo == 2);
}

TEST_CASE("beta_from_kneading soundness against a truncated-series oracle") {
    std::mt19937 rng(424242);
    Rational tol = parse_rational("1e-25");
    for (const Seq& s : random_periodic_kneading(rng, 20, 2, 8)) {
        Enclosure e = beta_from_kneading(s, tol);
        CHECK(e.width() <= tol);
        CHECK(!root_certainly_outside(s, e, 220));
    }
}

TEST_CASE("Parry round trip and monotonicity") {
    std::mt19937 rng(777);
    Rational tol = parse_rational("1e-30");
    std::vector<Seq> seqs = random_periodic_kneading(rng, 20, 2, 8);
    std::vector<std::pair<Seq, Enclosure>> solved;
    for (const Seq& s : seqs) {
        Enclosure beta = beta_from_kneading(s, tol);
        ExpansionDigits d = beta_expand_one(beta, 50);
        for (std::size_t i = 0; i < 50; ++i) {
            REQUIRE(d.digits[i] == s.digit(i));
        }
        solved.emplace_back(s, beta);
    }
    for (std::size_t i = 0; i < solved.size(); ++i) {
        for (std::size_t j = 0; j < solved.size(); ++j) {
            if (solved[i].first.m != solved[j].first.m) continue;
            if (lex_compare(solved[i].first, solved[j].first) == Ordering::Less) {
                CHECK(solved[i].second.hi < solved[j].second.lo);
            }
        }
    }
}

TEST_CASE("parry_membership examples") {
    CHECK(parry_membership(S("(10)"), S("110")));
    CHECK(!parry_membership(Seq::constant(1, 1), S("110")));
    CHECK(parry_membership(Seq::zeros(1), S("110")));
    CHECK(parry_membership(Seq::zeros(1), S("1")));
    // (10)^inf is the substituted bound of 110^inf, not an expansion of 1
    CHECK_THROWS_AS(parry_membership(S("0"), S("(10)")), Error);
    // strict criterion for non-finite expansions of 1
    CHECK(!parry_membership(S("01(10)"), S("1(10)")));
    CHECK(parry_membership(S("0(01)"), S("1(10)")));
    CHECK_THROWS_AS(parry_membership(S("0"), S("(01)")), Error);
}

TEST_CASE("beta-shift specs round-trip between base and expansion") {
    Rational tol = parse_rational("1e-20");
    BetaShiftSpec spec = make_beta_shift(S("110"), tol);
    CHECK(!spec.truncated);
    CHECK(parry_membership(S("(10)"), spec));
    CHECK(!parry_membership(Seq::constant(1, 1), spec));

    BetaShiftSpec from_base = make_beta_shift(Enclosure::point(Rational(2)), 8);
    CHECK(!from_base.truncated);
    CHECK(from_base.one_expansion == parse_seq("2", 2));

    BetaShiftSpec partial = make_beta_shift(Enclosure::point(Rational(3, 2)), 8);
    CHECK(partial.truncated);
    CHECK_THROWS_AS(parry_membership(S("0"), partial), Error);
}

TEST_CASE("tails of an expansion of 1 belong to its shift") {
    std::mt19937 rng(31415);
    for (const Seq& one : random_periodic_kneading(rng, 10, 2, 6)) {
        for (std::size_t n = 1; n <= one.tail_count(); ++n) {
            CHECK(parry_membership(shift(one, n), one));
        }
    }
}

TEST_CASE("holder_exponent") {
    Enclosure one = holder_exponent(Enclosure::point(Rational(2)), Enclosure::point(Rational(2)));
    CHECK(one.lo == 1);
    CHECK(one.hi == 1);

    Rational tol = parse_rational("1e-12");
    Enclosure phi = beta_from_kneading(S("110"), tol);
    Enclosure trib = beta_from_kneading(S("1110"), tol);
    Enclosure tetra = beta_from_kneading(S("11110"), tol);

    Rational b1lo = parse_rational("0.7877"), b1hi = parse_rational("0.7897");
    Rational b2lo = parse_rational("0.9273"), b2hi = parse_rational("0.9293");
    Enclosure h1 = holder_exponent(phi, trib);
    CHECK(h1.lo >= b1lo);
    CHECK(h1.hi <= b1hi);
    Enclosure h2 = holder_exponent(trib, tetra);
    CHECK(h2.lo >= b2lo);
    CHECK(h2.hi <= b2hi);

    CHECK_THROWS_AS(holder_exponent(Enclosure::point(Rational(1)), Enclosure::point(Rational(2))), Error);
}

TEST_CASE("lower_bound_witness families") {
    LowerBoundFamily full{FamilyKind::Full, 1, {}, {}};
    CHECK(lower_bound_witness(full, 3) == S("111"));

    LowerBoundFamily icd;
    icd.kind = FamilyKind::IntervalCd;
    icd.m = 2;
    icd.c = Seq::zeros(2);
    icd.d = S("2", 2);
    CHECK(lower_bound_witness(icd, 2) == S("11", 2));

    LowerBoundFamily leftc;
    leftc.kind = FamilyKind::LeftC;
    leftc.m = 2;
    leftc.c = S("2", 2);
    CHECK(lower_bound_witness(leftc, 4) == S("1111", 2));

    // generated witnesses are kneading
    for (int k = 1; k <= 6; ++k) {
        CHECK(is_kneading(lower_bound_witness(full, k)));
        CHECK(is_kneading(lower_bound_witness(icd, k)));
        CHECK(is_kneading(lower_bound_witness(leftc, k)));
    }

    LowerBoundFamily bad;
    bad.kind = FamilyKind::IntervalCd;
    bad.m = 1;
    bad.c = Seq::zeros(1);
    bad.d = S("1"); // the critical threshold itself
    CHECK_THROWS_AS(lower_bound_witness(bad, 2), Error);

    LowerBoundFamily low;
    low.kind = FamilyKind::LeftC;
    low.m = 1;
    low.c = S("1");
    CHECK_THROWS_AS(lower_bound_witness(low, 2), Error);
}

TEST_CASE("interval_cd witnesses track the shape of d") {
    // d = (10)^inf: second bump after one low digit
    LowerBoundFamily fam;
    fam.kind = FamilyKind::IntervalCd;
    fam.m = 1;
    fam.c = Seq::zeros(1);
    fam.d = S("(10)");
    Seq w2 = lower_bound_witness(fam, 2);
    CHECK(is_kneading(w2));
    CHECK(lex_compare(w2, *fam.d) == Ordering::Less);
    // d with a leading run of bumps
    fam.d = S("110");
    Seq v2 = lower_bound_witness(fam, 2);
    CHECK(is_kneading(v2));
    CHECK(lex_compare(v2, *fam.d) == Ordering::Less);
}

TEST_CASE("dimension_lower_bound_ratio ladder for the full family") {
    LowerBoundFamily full{FamilyKind::Full, 1, {}, {}};
    Rational tol = parse_rational("1e-12");
    Rational b1lo = parse_rational("0.7877"), b1hi = parse_rational("0.7897");
    Rational b2lo = parse_rational("0.9273"), b2hi = parse_rational("0.9293");
    Enclosure r3 = dimension_lower_bound_ratio(full, 3, tol);
    CHECK(r3.lo >= b1lo);
    CHECK(r3.hi <= b1hi);
    Enclosure r4 = dimension_lower_bound_ratio(full, 4, tol);
    CHECK(r4.lo >= b2lo);
    CHECK(r4.hi <= b2hi);

    Rational prev(0);
    for (int k = 3; k <= 8; ++k) {
        Enclosure r = dimension_lower_bound_ratio(full, k, tol);
        CHECK(r.lo >= prev); // nondecreasing ladder
        prev = r.lo;
    }
    Enclosure r8 = dimension_lower_bound_ratio(full, 8, tol);
    CHECK(r8.lo > parse_rational("0.95"));

    // k = 2 needs the degenerate witness 10^inf
    CHECK_THROWS_AS(dimension_lower_bound_ratio(full, 2, tol), Error);
}

TEST_SUITE_END();
