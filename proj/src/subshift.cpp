#include "knead/subshift.hpp"

#include "knead/error.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace knead {

IntervalConstraint IntervalConstraint::make(Seq c, Seq d) {
    if (c.m != d.m) raise("alphabet_mismatch", "interval endpoints over different alphabets");
    if (lex_compare(c, d) != Ordering::Less) raise("domain", "interval constraint requires c < d");
    IntervalConstraint ic;
    ic.m = c.m;
    ic.c = std::move(c);
    ic.d = std::move(d);
    return ic;
}

std::uint64_t default_max_blocks() {
    static std::uint64_t cached = [] {
        if (const char* env = std::getenv("KNEAD_MAX_BLOCKS")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v >= 16) return static_cast<std::uint64_t>(v);
        }
        return std::uint64_t(1) << 22;
    }();
    return cached;
}

namespace {

// Precomputed window bounds: the first `n` digits of each endpoint plus the
// lengths at which a comparison against the endpoint is already decided by a
// window (the tail beyond is 0^inf for c, m^inf for d).
struct WindowBounds {
    int m = 1;
    int n = 0;
    std::vector<int> cdig, ddig;
    std::size_t c_zero_tail_from; // c.digit(i) == 0 for all i >= this
    std::size_t d_m_tail_from;    // d.digit(i) == m for all i >= this

    WindowBounds(const IntervalConstraint& ic, int len) : m(ic.m), n(len) {
        cdig.resize(static_cast<std::size_t>(len));
        ddig.resize(static_cast<std::size_t>(len));
        for (int i = 0; i < len; ++i) {
            cdig[static_cast<std::size_t>(i)] = ic.c.digit(static_cast<std::size_t>(i));
            ddig[static_cast<std::size_t>(i)] = ic.d.digit(static_cast<std::size_t>(i));
        }
        c_zero_tail_from = ic.c.is_finite() ? ic.c.pre.size() : static_cast<std::size_t>(-1);
        bool d_mtail = ic.d.per.size() == 1 && ic.d.per[0] == ic.m;
        d_m_tail_from = d_mtail ? ic.d.pre.size() : static_cast<std::size_t>(-1);
    }

    // Admissibility of the digits w[0..len) as a window system.
    // strict = inner rule: the full window (i = 0) may not merely reach a
    // bound prefix unless the comparison is decided by the bound's constant
    // tail within the window.
    bool admissible(const int* w, int len, bool strict) const {
        for (int i = 0; i < len; ++i) {
            const int L = len - i;
            // compare w[i..] with c-prefix of length L
            int cmp = 0;
            for (int j = 0; j < L; ++j) {
                int a = w[i + j], b = cdig[static_cast<std::size_t>(j)];
                if (a != b) {
                    cmp = (a < b) ? -1 : 1;
                    break;
                }
            }
            if (cmp < 0) return false;
            if (cmp == 0 && strict && i == 0 && static_cast<std::size_t>(L) < c_zero_tail_from) return false;
            cmp = 0;
            for (int j = 0; j < L; ++j) {
                int a = w[i + j], b = ddig[static_cast<std::size_t>(j)];
                if (a != b) {
                    cmp = (a < b) ? -1 : 1;
                    break;
                }
            }
            if (cmp > 0) return false;
            if (cmp == 0 && strict && i == 0 && static_cast<std::size_t>(L) < d_m_tail_from) return false;
        }
        return true;
    }
};

std::uint64_t checked_pow(std::uint64_t base, int k, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int i = 0; i < k; ++i) {
        if (total > cap / base) raise("budget", "block enumeration exceeds KNEAD_MAX_BLOCKS");
        total *= base;
    }
    return total;
}

// Scan a code range [begin, end) with an odometer, appending admissible codes.
void scan_range(const WindowBounds& wb, int k, bool strict, std::uint64_t begin, std::uint64_t end,
                std::vector<std::uint64_t>& out) {
    const std::uint64_t base = static_cast<std::uint64_t>(wb.m) + 1;
    std::vector<int> digits(static_cast<std::size_t>(k));
    std::uint64_t c = begin;
    for (int i = k - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = static_cast<int>((c % base));
        c /= base;
    }
    for (std::uint64_t code = begin; code < end; ++code) {
        if (code != begin) {
            int p = k - 1;
            while (true) {
                if (++digits[static_cast<std::size_t>(p)] < static_cast<int>(base)) break;
                digits[static_cast<std::size_t>(p)] = 0;
                --p;
            }
        }
        if (wb.admissible(digits.data(), k, strict)) out.push_back(code);
    }
}

std::vector<std::uint64_t> scan_blocks(const IntervalConstraint& ic, int k, bool strict, ExecPolicy pol,
                                       std::uint64_t max_blocks) {
    const std::uint64_t base = static_cast<std::uint64_t>(ic.m) + 1;
    const std::uint64_t total = checked_pow(base, k, max_blocks);
    WindowBounds wb(ic, k);
    if (pol == ExecPolicy::Serial || total < 4096) {
        std::vector<std::uint64_t> out;
        scan_range(wb, k, strict, 0, total, out);
        return out;
    }
    const int chunks = 64;
    std::vector<std::vector<std::uint64_t>> parts(chunks);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < chunks; ++t) {
        std::uint64_t begin = total * static_cast<std::uint64_t>(t) / chunks;
        std::uint64_t end = total * (static_cast<std::uint64_t>(t) + 1) / chunks;
        scan_range(wb, k, strict, begin, end, parts[static_cast<std::size_t>(t)]);
    }
    std::vector<std::uint64_t> out;
    std::size_t sz = 0;
    for (const auto& p : parts) sz += p.size();
    out.reserve(sz);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

TransferGraph build_sft(const IntervalConstraint& ic, int k, bool strict, ExecPolicy pol,
                        std::uint64_t max_blocks) {
    TransferGraph g;
    g.m = ic.m;
    g.k = k;
    g.blocks = scan_blocks(ic, k, strict, pol, max_blocks);
    const std::uint64_t base = static_cast<std::uint64_t>(ic.m) + 1;
    std::uint64_t nk1 = 1;
    for (int i = 0; i < k - 1; ++i) nk1 *= base;
    WindowBounds wb(ic, k + 1);

    const std::int64_t nv = static_cast<std::int64_t>(g.blocks.size());
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> parts;
    auto emit_edges = [&](std::int64_t ui, std::vector<std::pair<std::uint32_t, std::uint32_t>>& sink,
                          std::vector<int>& scratch) {
        const std::uint64_t ucode = g.blocks[static_cast<std::size_t>(ui)];
        Word uw = decode_word(ucode, ic.m, k);
        scratch.assign(uw.syms.begin(), uw.syms.end());
        scratch.push_back(0);
        const std::uint64_t suffix = (ucode % nk1) * base;
        for (int a = 0; a <= ic.m; ++a) {
            std::size_t vi = g.find_block(suffix + static_cast<std::uint64_t>(a));
            if (vi == TransferGraph::npos) continue;
            scratch[static_cast<std::size_t>(k)] = a;
            // u and v already certify every proper suffix window; only the
            // joined (k+1)-window is new.
            if (wb.admissible(scratch.data(), k + 1, strict)) {
                sink.emplace_back(static_cast<std::uint32_t>(ui), static_cast<std::uint32_t>(vi));
            }
        }
    };
    if (pol == ExecPolicy::Serial || nv < 4096) {
        std::vector<int> scratch;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::int64_t ui = 0; ui < nv; ++ui) emit_edges(ui, edges, scratch);
        g.edges = std::move(edges);
    } else {
        const int chunks = 64;
        parts.resize(chunks);
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < chunks; ++t) {
            std::vector<int> scratch;
            std::int64_t begin = nv * t / chunks;
            std::int64_t end = nv * (t + 1) / chunks;
            for (std::int64_t ui = begin; ui < end; ++ui) {
                emit_edges(ui, parts[static_cast<std::size_t>(t)], scratch);
            }
        }
        std::size_t sz = 0;
        for (const auto& p : parts) sz += p.size();
        g.edges.reserve(sz);
        for (const auto& p : parts) g.edges.insert(g.edges.end(), p.begin(), p.end());
    }
    return trimmed(g);
}

} // namespace

std::vector<Word> allowed_blocks(const IntervalConstraint& ic, int k, ExecPolicy pol,
                                 std::uint64_t max_blocks) {
    if (k < 1) raise("domain", "block length must be >= 1");
    std::vector<std::uint64_t> codes = scan_blocks(ic, k, /*strict=*/false, pol, max_blocks);
    std::vector<Word> out;
    out.reserve(codes.size());
    for (std::uint64_t c : codes) out.push_back(decode_word(c, ic.m, k));
    return out;
}

TransferGraph outer_sft(const IntervalConstraint& ic, int k, ExecPolicy pol, std::uint64_t max_blocks) {
    if (k < 1) raise("domain", "block length must be >= 1");
    return build_sft(ic, k, /*strict=*/false, pol, max_blocks);
}

TransferGraph inner_sft(const IntervalConstraint& ic, int k, ExecPolicy pol, std::uint64_t max_blocks) {
    if (k < 1) raise("domain", "block length must be >= 1");
    return build_sft(ic, k, /*strict=*/true, pol, max_blocks);
}

const char* to_string(CriticalClass c) {
    switch (c) {
        case CriticalClass::Empty: return "empty";
        case CriticalClass::Zero: return "zero";
        case CriticalClass::Positive: return "positive";
    }
    return "?";
}

CriticalResult classify_critical(const IntervalConstraint& ic, bool normalize, const Rational& witness_tol) {
    CriticalResult res;
    const int c1 = ic.c.digit(0);
    if (ic.d.digit(0) == c1) {
        res.cls = CriticalClass::Empty;
        res.normalized_d = ic.d;
        return res;
    }
    Seq dk = ic.d;
    const Seq top = Seq::constant(ic.m, ic.m);
    if (!is_kneading(dk) && !(dk == top)) {
        if (!normalize) raise("not_kneading", "d is not a kneading sequence");
        dk = minimal_kneading_above(dk);
    }
    res.normalized_d = dk;
    // c1 < d1 <= m, so the threshold digit c1+1 is in range.
    Seq threshold = Seq::make(ic.m, {c1 + 1}, {c1});
    if (lex_compare(dk, threshold) != Ordering::Greater) {
        res.cls = CriticalClass::Zero;
        return res;
    }
    res.cls = CriticalClass::Positive;

    // Smallest run length n whose maximal orbit ((c1+1) c1^n)^inf stays below d.
    const std::size_t n_bound = dk.tail_count() + 2;
    int n = 0;
    for (std::size_t probe = 1; probe <= n_bound; ++probe) {
        std::vector<int> block;
        block.push_back(c1 + 1);
        block.insert(block.end(), probe, c1);
        Seq orbit = Seq::make(ic.m, {}, std::move(block));
        if (lex_compare(orbit, dk) != Ordering::Greater) {
            n = static_cast<int>(probe);
            break;
        }
    }
    if (n == 0) raise("internal", "no witness run length found above the threshold");
    res.witness_run = n;

    std::vector<Word> forbidden;
    for (int s = 0; s <= ic.m; ++s) {
        if (s != c1 && s != c1 + 1) forbidden.push_back(Word{ic.m, {s}});
    }
    for (int j = 0; j < n; ++j) {
        std::vector<int> w;
        w.push_back(c1 + 1);
        w.insert(w.end(), static_cast<std::size_t>(j), c1);
        w.push_back(c1 + 1);
        forbidden.push_back(Word{ic.m, std::move(w)});
    }
    TransferGraph witness = trimmed(from_forbidden_words(ic.m, forbidden));
    res.witness_entropy = perron_enclosure(witness, witness_tol).value;
    res.witness = std::move(witness);
    return res;
}

int default_k_cap(int m) {
    if (m == 1) return 18;
    if (m == 2) return 12;
    const std::uint64_t budget = default_max_blocks();
    std::uint64_t total = 1;
    const std::uint64_t base = static_cast<std::uint64_t>(m) + 1;
    int k = 0;
    while (total <= budget / base) {
        total *= base;
        ++k;
    }
    return std::max(3, k);
}

DimensionResult dimension(const IntervalConstraint& ic, const DimensionOptions& opt) {
    if (opt.tol <= 0) raise("domain", "tolerance must be positive");
    DimensionResult res;
    CriticalResult cls = classify_critical(ic);
    res.cls = cls.cls;
    if (cls.cls != CriticalClass::Positive) {
        // At or below the critical threshold the survivor set is at most
        // countable; the enclosure is exactly [0, 0].
        res.value = Enclosure(Rational(0), Rational(0));
        res.converged = true;
        return res;
    }

    const std::uint64_t max_blocks = opt.max_blocks ? opt.max_blocks : default_max_blocks();
    const int cap = opt.k_cap > 0 ? opt.k_cap : default_k_cap(ic.m);
    const int k0 = std::max(2, static_cast<int>(std::min<std::size_t>(12, std::max(ic.c.pre.size(), ic.d.pre.size()))));

    Enclosure ln_base = log_enclosure(Rational(ic.m + 1));
    Rational tol_entropy = opt.tol * ln_base.lo / 4;

    Rational lower_e(0);
    Rational upper_e = ln_base.hi;
    // The run-length witness sits inside the survivor set whenever no digit
    // of c exceeds c1 (its tails all dominate c), giving an entropy floor.
    if (cls.witness_entropy &&
        lex_compare(ic.c, Seq::constant(ic.m, ic.c.digit(0))) != Ordering::Greater) {
        lower_e = std::max(lower_e, cls.witness_entropy->lo);
    }
    const std::uint64_t base = static_cast<std::uint64_t>(ic.m) + 1;
    for (int k = k0; k <= cap; ++k) {
        // budget check before enumerating (m+1)^k codes
        {
            std::uint64_t total = 1;
            bool over = false;
            for (int i = 0; i < k; ++i) {
                if (total > max_blocks / base) {
                    over = true;
                    break;
                }
                total *= base;
            }
            if (over) break;
        }
        TransferGraph inner = inner_sft(ic, k, opt.pol, max_blocks);
        TransferGraph outer = outer_sft(ic, k, opt.pol, max_blocks);
        EntropyEnclosure ei = perron_enclosure(inner, tol_entropy, opt.pol);
        EntropyEnclosure eo = perron_enclosure(outer, tol_entropy, opt.pol);
        lower_e = std::max(lower_e, ei.value.lo);
        upper_e = std::min(upper_e, eo.value.hi);
        res.steps.push_back(DimensionStep{k, ei.value, eo.value, inner.vertex_count(), outer.vertex_count()});
        res.k_reached = k;

        Rational dlo = lower_e / ln_base.hi;
        Rational dhi = upper_e / ln_base.lo;
        if (dlo < 0) dlo = 0;
        if (dhi > 1) dhi = 1;
        if (dhi < dlo) dhi = dlo; // rounding slack on a tight sandwich
        res.value = Enclosure(dlo, dhi);
        if (res.value.width() <= opt.tol) {
            res.converged = true;
            break;
        }
    }
    if (res.steps.empty()) {
        Rational dlo = lower_e / ln_base.hi;
        if (dlo < 0) dlo = 0;
        if (dlo > 1) dlo = 1;
        res.value = Enclosure(dlo, Rational(1));
        res.k_reached = 0;
    }
    return res;
}

EqualityReport equality_experiment(const IntervalConstraint& ic, const Rational& tol, int k_max,
                                   const DimensionOptions& opt) {
    EqualityReport rep;
    DimensionOptions dopt = opt;
    dopt.tol = tol;
    rep.survivor = dimension(ic, dopt);
    if (rep.survivor.cls == CriticalClass::Empty || rep.survivor.cls == CriticalClass::Zero) {
        rep.ambient = Enclosure(Rational(0), Rational(0));
        return rep;
    }

    const Seq zero = Seq::zeros(ic.m);
    const Seq top = Seq::constant(ic.m, ic.m);
    LowerBoundFamily fam;
    fam.m = ic.m;
    Rational beta_tol = tol / 16;
    if (ic.d == top) {
        fam.kind = FamilyKind::Full;
        rep.ambient = Enclosure::point(Rational(1));
    } else {
        Seq dk = is_kneading(ic.d) ? ic.d : minimal_kneading_above(ic.d);
        Enclosure beta_d = beta_from_kneading(dk, beta_tol);
        rep.ambient = div_outward(log_enclosure(beta_d), log_enclosure(Rational(ic.m + 1)));
        if (rep.ambient.hi > 1) rep.ambient.hi = 1;
        if (ic.c == zero) {
            fam.kind = FamilyKind::LeftC;
            fam.c = dk;
        } else {
            fam.kind = FamilyKind::IntervalCd;
            fam.c = ic.c;
            fam.d = dk;
        }
    }
    rep.family = fam.kind;

    for (int k = 2; k <= k_max; ++k) {
        EqualityRow row;
        row.k = k;
        try {
            row.ratio = dimension_lower_bound_ratio(fam, k, beta_tol);
        } catch (const Error& e) {
            if (e.code() == "degenerate") continue; // first rungs of some ladders
            throw;
        }
        row.scaled = mul_outward(row.ratio, rep.ambient);
        if (row.scaled.hi > 1) row.scaled.hi = 1;
        row.gap = rep.survivor.value.hi - row.scaled.lo;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace knead
