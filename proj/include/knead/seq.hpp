#ifndef KNEAD_SEQ_HPP
#define KNEAD_SEQ_HPP

#include "knead/rational.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace knead {

enum class Ordering { Less = -1, Equal = 0, Greater = 1 };

/// Finite word over the alphabet {0, ..., m}.
struct Word {
    int m = 1;
    std::vector<int> syms;

    std::size_t size() const { return syms.size(); }
    bool operator==(const Word&) const = default;
};

/// Eventually periodic sequence over {0, ..., m} in canonical
/// (preperiod, period) form:
///   - the period is primitive (not a power of a shorter word),
///   - the last preperiod symbol differs from the last period symbol,
///   - an empty period denotes a trailing 0^inf tail, and the preperiod then
///     carries no trailing zeros.
/// Two sequences are equal as digit streams iff their canonical forms are
/// structurally identical.
struct Seq {
    int m = 1;
    std::vector<int> pre;
    std::vector<int> per;

    /// Canonicalizing factory; validates symbol range.
    static Seq make(int m, std::vector<int> pre, std::vector<int> per);
    static Seq zeros(int m) { return make(m, {}, {}); }
    static Seq constant(int m, int digit) { return make(m, {}, {digit}); }

    /// Digit at 0-based index, following the periodic tail (or 0^inf).
    int digit(std::size_t i) const;

    /// Number of shifts after which tails provably repeat: |pre| + |per|.
    std::size_t tail_count() const { return pre.size() + per.size(); }

    /// True when the sequence ends in 0^inf.
    bool is_finite() const { return per.empty(); }

    bool operator==(const Seq&) const = default;
};

/// Parse a sequence literal: `digits`, `digits(digits)`, or `(digits)`.
/// Bare digits mean digits followed by 0^inf. For m <= 9 each digit is one
/// character; for m >= 10 symbols are comma-separated integers in the same
/// shape. Result is canonical.
Seq parse_seq(std::string_view text, int m);

/// Canonical literal using the same grammar; round-trips through parse_seq.
std::string format_seq(const Seq& s);

/// Lexicographic order on digit streams. Decided by comparing at most
/// |a.pre| + |b.pre| + lcm(|a.per|, |b.per|) + 1 digits.
Ordering lex_compare(const Seq& a, const Seq& b);

Seq shift(const Seq& x, std::size_t n);

/// Digitwise m-complement; order-reversing involution.
Seq tilde_invert(const Seq& x);

/// True iff every tail sigma^n(x), n >= 1, is strictly below x.
bool is_kneading(const Seq& x);

/// For non-kneading c != m^inf, the least kneading sequence d > c: no
/// kneading sequence lies strictly between c and d. Kneading input is
/// returned unchanged.
Seq minimal_kneading_above(const Seq& c);

struct StabilityInfo {
    std::size_t i0 = 0; // 1-based index of the first minimal digit
    Rational radius;    // 2^-i0
};

/// For kneading c: the prefix length i0 through which the left endpoint may
/// be perturbed without changing the survivor sets, with metric radius 2^-i0.
StabilityInfo left_endpoint_stability(const Seq& c);

} // namespace knead

#endif
