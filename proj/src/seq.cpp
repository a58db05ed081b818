#include "knead/seq.hpp"

#include "knead/error.hpp"

#include <algorithm>
#include <numeric>

namespace knead {

namespace {

void check_symbols(int m, const std::vector<int>& syms) {
    if (m < 1) raise("out_of_range", "alphabet bound m must be >= 1");
    for (int s : syms) {
        if (s < 0 || s > m) {
            raise("out_of_range",
                  "symbol " + std::to_string(s) + " outside alphabet {0..." + std::to_string(m) + "}");
        }
    }
}

std::vector<int> primitive_root(const std::vector<int>& w) {
    const std::size_t n = w.size();
    for (std::size_t p = 1; p <= n / 2; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) {
            ok = (w[i] == w[i - p]);
        }
        if (ok) return std::vector<int>(w.begin(), w.begin() + p);
    }
    return w;
}

} // namespace

Seq Seq::make(int m, std::vector<int> pre, std::vector<int> per) {
    check_symbols(m, pre);
    check_symbols(m, per);
    if (!per.empty()) per = primitive_root(per);
    // Absorb: while the last preperiod symbol equals the last period symbol,
    // the preperiod can be shortened by rotating the period right.
    while (!pre.empty() && !per.empty() && pre.back() == per.back()) {
        pre.pop_back();
        std::rotate(per.rbegin(), per.rbegin() + 1, per.rend());
    }
    if (per.size() == 1 && per[0] == 0) per.clear();
    if (per.empty()) {
        while (!pre.empty() && pre.back() == 0) pre.pop_back();
    }
    Seq s;
    s.m = m;
    s.pre = std::move(pre);
    s.per = std::move(per);
    return s;
}

int Seq::digit(std::size_t i) const {
    if (i < pre.size()) return pre[i];
    if (per.empty()) return 0;
    return per[(i - pre.size()) % per.size()];
}

Seq parse_seq(std::string_view text, int m) {
    if (m < 1) raise("out_of_range", "alphabet bound m must be >= 1");
    auto open = text.find('(');
    auto close = text.find(')');
    std::string_view pre_part, per_part;
    bool has_paren = (open != std::string_view::npos);
    if (has_paren) {
        if (close == std::string_view::npos || close != text.size() - 1 || close < open) {
            raise("syntax", "malformed sequence literal: " + std::string(text));
        }
        pre_part = text.substr(0, open);
        per_part = text.substr(open + 1, close - open - 1);
        if (per_part.empty()) raise("syntax", "empty period in literal: " + std::string(text));
    } else {
        if (close != std::string_view::npos) raise("syntax", "unmatched ')' in literal: " + std::string(text));
        pre_part = text;
    }
    if (pre_part.empty() && per_part.empty()) raise("syntax", "empty sequence literal");

    auto parse_digits = [&](std::string_view part) {
        std::vector<int> out;
        if (part.empty()) return out;
        if (m <= 9) {
            for (char ch : part) {
                if (ch < '0' || ch > '9') raise("syntax", "invalid digit character in literal");
                out.push_back(ch - '0');
            }
        } else {
            std::size_t pos = 0;
            while (pos < part.size()) {
                std::size_t comma = part.find(',', pos);
                std::string_view tok = part.substr(pos, comma == std::string_view::npos ? part.size() - pos : comma - pos);
                if (tok.empty()) raise("syntax", "empty symbol in comma-separated literal");
                int v = 0;
                for (char ch : tok) {
                    if (ch < '0' || ch > '9') raise("syntax", "invalid symbol in literal");
                    v = v * 10 + (ch - '0');
                    if (v > m) break;
                }
                out.push_back(v);
                if (comma == std::string_view::npos) break;
                pos = comma + 1;
                if (pos == part.size()) raise("syntax", "trailing comma in literal");
            }
        }
        return out;
    };

    return Seq::make(m, parse_digits(pre_part), parse_digits(per_part));
}

std::string format_seq(const Seq& s) {
    auto digits_to_string = [&](const std::vector<int>& ds) {
        std::string out;
        bool first = true;
        for (int d : ds) {
            if (s.m > 9 && !first) out += ",";
            out += std::to_string(d);
            first = false;
        }
        return out;
    };
    if (s.pre.empty() && s.per.empty()) return "0";
    std::string out = digits_to_string(s.pre);
    if (!s.per.empty()) {
        out += "(" + digits_to_string(s.per) + ")";
    }
    return out;
}

Ordering lex_compare(const Seq& a, const Seq& b) {
    if (a.m != b.m) raise("alphabet_mismatch", "lex_compare across different alphabets");
    const std::size_t la = a.per.empty() ? 1 : a.per.size();
    const std::size_t lb = b.per.empty() ? 1 : b.per.size();
    const std::size_t bound = a.pre.size() + b.pre.size() + std::lcm(la, lb) + 1;
    for (std::size_t i = 0; i < bound; ++i) {
        int da = a.digit(i), db = b.digit(i);
        if (da < db) return Ordering::Less;
        if (da > db) return Ordering::Greater;
    }
    return Ordering::Equal;
}

Seq shift(const Seq& x, std::size_t n) {
    if (n == 0) return x;
    if (n < x.pre.size()) {
        std::vector<int> pre(x.pre.begin() + static_cast<std::ptrdiff_t>(n), x.pre.end());
        return Seq::make(x.m, std::move(pre), x.per);
    }
    if (x.per.empty()) return Seq::zeros(x.m);
    std::size_t r = (n - x.pre.size()) % x.per.size();
    std::vector<int> per(x.per.begin() + static_cast<std::ptrdiff_t>(r), x.per.end());
    per.insert(per.end(), x.per.begin(), x.per.begin() + static_cast<std::ptrdiff_t>(r));
    return Seq::make(x.m, {}, std::move(per));
}

Seq tilde_invert(const Seq& x) {
    std::vector<int> pre(x.pre), per(x.per);
    for (int& d : pre) d = x.m - d;
    if (per.empty()) {
        per = {x.m}; // the implicit 0^inf tail complements to m^inf
    } else {
        for (int& d : per) d = x.m - d;
    }
    return Seq::make(x.m, std::move(pre), std::move(per));
}

bool is_kneading(const Seq& x) {
    const std::size_t tails = std::max<std::size_t>(1, x.tail_count());
    for (std::size_t n = 1; n <= tails; ++n) {
        if (lex_compare(shift(x, n), x) != Ordering::Less) return false;
    }
    return true;
}

Seq minimal_kneading_above(const Seq& c) {
    if (is_kneading(c)) return c;
    if (c == Seq::constant(c.m, c.m)) {
        raise("out_of_range", "no kneading sequence above m^inf");
    }
    const std::size_t bound = c.tail_count() + 1;
    for (std::size_t l = 1; l <= bound; ++l) {
        if (lex_compare(shift(c, l), c) == Ordering::Less) continue;
        // l is the least index with sigma^l(c) >= c; bump digit l and cut.
        std::vector<int> pre;
        pre.reserve(l);
        for (std::size_t i = 0; i + 1 < l; ++i) pre.push_back(c.digit(i));
        int bumped = c.digit(l - 1) + 1;
        if (bumped > c.m) raise("internal", "minimal_kneading_above produced an out-of-range digit");
        pre.push_back(bumped);
        Seq d = Seq::make(c.m, std::move(pre), {});
        if (!is_kneading(d)) raise("internal", "minimal_kneading_above produced a non-kneading sequence");
        return d;
    }
    raise("internal", "non-kneading sequence has no shift above itself within the tail bound");
}

StabilityInfo left_endpoint_stability(const Seq& c) {
    if (!is_kneading(c)) raise("not_kneading", "left_endpoint_stability requires a kneading sequence");
    int cmin = c.digit(0);
    const std::size_t scan = c.tail_count() + 1; // +1 reaches the 0^inf tail of finite sequences
    for (std::size_t i = 0; i < scan; ++i) cmin = std::min(cmin, c.digit(i));
    std::size_t idx = 0;
    while (c.digit(idx) != cmin) ++idx;
    StabilityInfo info;
    info.i0 = idx + 1;
    info.radius = pow2_neg(static_cast<unsigned long>(info.i0));
    return info;
}

} // namespace knead
