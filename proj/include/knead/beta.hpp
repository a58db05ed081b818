#ifndef KNEAD_BETA_HPP
#define KNEAD_BETA_HPP

#include "knead/enclosure.hpp"
#include "knead/seq.hpp"

#include <optional>
#include <vector>

namespace knead {

/// Digits of the greedy expansion of 1 in base beta. `truncated` is false
/// exactly when the remainder reached 0, i.e. the expansion is finite and the
/// returned digits followed by 0^inf are the whole of 1_beta.
struct ExpansionDigits {
    std::vector<int> digits;
    bool truncated = true;
};

/// A beta-shift described by its base and expansion of 1.
struct BetaShiftSpec {
    Enclosure beta;
    Seq one_expansion;
    bool truncated = false;
};

/// Beta-shift from an eventually periodic expansion of 1 (beta solved to
/// width tol), or from a base enclosure (digits of 1_beta computed up to
/// `digits`, truncated flag set when the expansion continues).
BetaShiftSpec make_beta_shift(const Seq& one_expansion, const Rational& tol);
BetaShiftSpec make_beta_shift(const Enclosure& beta, std::size_t digits);

bool parry_membership(const Seq& s, const BetaShiftSpec& shift_spec);

/// First n digits of the greedy expansion of 1, each digit certified by
/// interval arithmetic: the enclosure of beta*t must not straddle an integer
/// at emission time. Throws Error("precision") when a digit is undecidable at
/// the given enclosure width and Error("out_of_range") when beta.lo <= 1.
ExpansionDigits beta_expand_one(const Enclosure& beta, std::size_t n);

/// The unique beta in (1, m+1) whose expansion of 1 is the kneading sequence
/// s, enclosed to width <= tol by bisection on the closed rational form of
/// g(beta) = sum s_i beta^-i - 1. Throws Error("degenerate") when s forces
/// beta <= 1 (s = 10^inf) and Error("not_kneading") otherwise.
Enclosure beta_from_kneading(const Seq& s, const Rational& tol);

/// Sign of g(beta) = sum s_i beta^-i - 1 at a rational beta > 1, via the
/// exact finite-sum-plus-geometric-tail form.
int g_sign(const Seq& s, const Rational& beta);

/// Parry membership of s in the beta-shift with the given expansion of 1.
/// For infinite one_exp the criterion is the strict bound sigma^n(s) < 1_beta
/// for all n >= 1; when 1_beta is finite (i1..iM then 0^inf) the substituted
/// periodic bound (i1..i_{M-1}(iM - 1))^inf is used non-strictly, matching
/// the closure of the shift.
bool parry_membership(const Seq& s, const Seq& one_exp);

/// Outward enclosure of ln(beta1) / ln(beta2); requires 1 < beta1 <= beta2.
Enclosure holder_exponent(const Enclosure& beta1, const Enclosure& beta2);

enum class FamilyKind { Full, LeftC, IntervalCd };

/// Witness family for the lower-bound ladders. Full needs only the alphabet;
/// LeftC is keyed on the right endpoint of a one-sided hole; IntervalCd on
/// both endpoints (d kneading).
struct LowerBoundFamily {
    FamilyKind kind = FamilyKind::Full;
    int m = 1;
    std::optional<Seq> c;
    std::optional<Seq> d;
};

/// k-th witness kneading sequence of the family. Throws Error("empty_case")
/// when the corresponding survivor set is empty (e.g. d1 = c1, or an endpoint
/// at or below the critical threshold).
Seq lower_bound_witness(const LowerBoundFamily& family, int k);

/// ln beta(w_{k-1}) / ln beta(w_k) for consecutive witnesses: a certified
/// lower bound for the corresponding dimension ratio, approaching 1 in k.
Enclosure dimension_lower_bound_ratio(const LowerBoundFamily& family, int k, const Rational& tol);

} // namespace knead

#endif
