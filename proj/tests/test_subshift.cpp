#include "knead/subshift.hpp"

#include "knead/error.hpp"

#include <doctest.h>

#include <optional>
#include <random>

using namespace knead;

namespace {

Seq S(const char* text, int m = 1) { return parse_seq(text, m); }

IntervalConstraint IC(const char* c, const char* d, int m = 1) {
    return IntervalConstraint::make(S(c, m), S(d, m));
}

// Brute-force filter straight from the window definition, independent of the
// production scan: a block is allowed iff no suffix window falls
// lexicographically below the c-prefix or above the d-prefix of its length.
bool naive_window_ok(const IntervalConstraint& ic, const std::vector<int>& w) {
    const int k = static_cast<int>(w.size());
    for (int i = 0; i < k; ++i) {
        int cmp_c = 0;
        for (int j = 0; i + j < k; ++j) {
            int a = w[static_cast<std::size_t>(i + j)];
            int b = ic.c.digit(static_cast<std::size_t>(j));
            if (a != b) {
                cmp_c = a < b ? -1 : 1;
                break;
            }
        }
        if (cmp_c < 0) return false;
        int cmp_d = 0;
        for (int j = 0; i + j < k; ++j) {
            int a = w[static_cast<std::size_t>(i + j)];
            int b = ic.d.digit(static_cast<std::size_t>(j));
            if (a != b) {
                cmp_d = a < b ? -1 : 1;
                break;
            }
        }
        if (cmp_d > 0) return false;
    }
    return true;
}

std::vector<Word> oracle_allowed_blocks(const IntervalConstraint& ic, int k) {
    std::vector<Word> out;
    std::vector<int> w(static_cast<std::size_t>(k), 0);
    while (true) {
        if (naive_window_ok(ic, w)) out.push_back(Word{ic.m, w});
        int p = k - 1;
        while (p >= 0 && w[static_cast<std::size_t>(p)] == ic.m) {
            w[static_cast<std::size_t>(p)] = 0;
            --p;
        }
        if (p < 0) break;
        ++w[static_cast<std::size_t>(p)];
    }
    return out;
}

bool lambda_below_phi(const Enclosure& lambda) {
    // x < phi  <=>  (2x-1)^2 < 5 for x >= 1/2
    Rational t = (2 * lambda.hi - 1) * (2 * lambda.hi - 1);
    return t < 5;
}

bool encloses_phi(const Enclosure& lambda) {
    Rational a = (2 * lambda.lo - 1) * (2 * lambda.lo - 1);
    Rational b = (2 * lambda.hi - 1) * (2 * lambda.hi - 1);
    return a <= 5 && b >= 5;
}

std::optional<IntervalConstraint> random_ic(std::mt19937& rng, int m) {
    std::uniform_int_distribution<int> sym(0, m);
    std::uniform_int_distribution<std::size_t> plen(0, 4), qlen(0, 4);
    auto mk = [&]() {
        std::vector<int> pre(plen(rng)), per(qlen(rng));
        for (int& d : pre) d = sym(rng);
        for (int& d : per) d = sym(rng);
        return Seq::make(m, pre, per);
    };
    Seq a = mk(), b = mk();
    Ordering o = lex_compare(a, b);
    if (o == Ordering::Equal) return std::nullopt;
    if (o == Ordering::Greater) std::swap(a, b);
    return IntervalConstraint::make(a, b);
}

} // namespace

TEST_SUITE_BEGIN("subshift");

TEST_CASE("allowed_blocks examples") {
    auto blocks = allowed_blocks(IC("0", "(10)"), 2);
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0].syms == std::vector<int>{0, 0});
    CHECK(blocks[1].syms == std::vector<int>{0, 1});
    CHECK(blocks[2].syms == std::vector<int>{1, 0});

    CHECK(allowed_blocks(IC("0", "(10)"), 3).size() == 5);
    CHECK(allowed_blocks(IC("0", "(1)"), 3).size() == 8);
}

TEST_CASE("allowed_blocks equals the brute-force oracle") {
    std::mt19937 rng(90210);
    int tested = 0;
    while (tested < 50) {
        int m = 1 + (tested % 2);
        auto ic = random_ic(rng, m);
        if (!ic) continue;
        ++tested;
        for (int k : {1, 2, 3, 5, 7}) {
            auto fast = allowed_blocks(*ic, k);
            auto slow = oracle_allowed_blocks(*ic, k);
            REQUIRE(fast.size() == slow.size());
            for (std::size_t i = 0; i < fast.size(); ++i) REQUIRE(fast[i].syms == slow[i].syms);
        }
    }
}

TEST_CASE("outer_sft golden mean at k=2") {
    TransferGraph g = outer_sft(IC("0", "(10)"), 2);
    CHECK(g.vertex_count() == 3);
    CHECK(g.edge_count() == 5);
    PerronResult pr = perron_lambda(g, parse_rational("1e-9"));
    CHECK(pr.has_cycle);
    CHECK(encloses_phi(pr.lambda));
}

TEST_CASE("outer_sft full shift has exact integer radius") {
    for (int k = 1; k <= 4; ++k) {
        TransferGraph g = outer_sft(IC("0", "(2)", 2), k);
        PerronResult pr = perron_lambda(g, parse_rational("1e-9"));
        CHECK(pr.lambda.is_point());
        CHECK(pr.lambda.lo == 3);
        EntropyEnclosure e = perron_enclosure(g, parse_rational("1e-9"));
        Enclosure ln3 = log_enclosure(Rational(3));
        CHECK(e.value.lo <= ln3.lo);
        CHECK(e.value.hi >= ln3.hi);
    }
}

TEST_CASE("outer_sft on an empty survivor set") {
    // tails must start >= 10^inf and stay <= 110^inf: impossible
    TransferGraph g = outer_sft(IC("1", "110"), 3);
    EntropyEnclosure e = perron_enclosure(g, parse_rational("1e-9"));
    CHECK(e.value.lo == 0);
    CHECK(e.value.hi == 0);
}

TEST_CASE("inner_sft golden mean") {
    TransferGraph g3 = inner_sft(IC("0", "(10)"), 3);
    CHECK(g3.vertex_count() == 4); // 101 cut by strictness, 011/110/111 decided above
    PerronResult p3 = perron_lambda(g3, parse_rational("1e-9"));
    CHECK(lambda_below_phi(p3.lambda));

    Rational prev(0);
    for (int k = 3; k <= 9; ++k) {
        PerronResult pk = perron_lambda(inner_sft(IC("0", "(10)"), k), parse_rational("1e-9"));
        CHECK(lambda_below_phi(pk.lambda));
        CHECK(pk.lambda.lo >= prev - parse_rational("1e-8"));
        prev = pk.lambda.lo;
    }
}

TEST_CASE("inner_sft degenerate tight interval is trivial") {
    TransferGraph g = inner_sft(IC("0", "1"), 4);
    EntropyEnclosure e = perron_enclosure(g, parse_rational("1e-9"));
    CHECK(e.value.lo == 0);
    CHECK(e.value.hi == 0);
}

TEST_CASE("inner_sft full interval keeps the full graph") {
    // both bounds decide through their constant tails, so nothing is cut
    TransferGraph g = inner_sft(IC("0", "(1)"), 2);
    CHECK(g.vertex_count() == 4);
    PerronResult pr = perron_lambda(g, parse_rational("1e-9"));
    CHECK(pr.lambda.is_point());
    CHECK(pr.lambda.lo == 2);
}

TEST_CASE("perron on hand-built graphs") {
    TransferGraph loop;
    loop.m = 1;
    loop.k = 1;
    loop.blocks = {0};
    loop.edges = {{0, 0}};
    EntropyEnclosure e = perron_enclosure(loop, parse_rational("1e-9"));
    CHECK(e.value.lo == 0);
    CHECK(e.value.hi == 0);

    TransferGraph path;
    path.m = 1;
    path.k = 1;
    path.blocks = {0, 1};
    path.edges = {{0, 1}};
    PerronResult pr = perron_lambda(path, parse_rational("1e-9"));
    CHECK(!pr.has_cycle);
    EntropyEnclosure pe = perron_enclosure(path, parse_rational("1e-9"));
    CHECK(pe.value.hi == 0);
}

TEST_CASE("sandwich and monotonicity on sample constraints") {
    Rational tol = parse_rational("1e-8");
    for (const char* d : {"(10)", "(110)", "11(10)"}) {
        IntervalConstraint ic = IC("0", d);
        Rational prev_inner(0);
        Rational prev_outer(100);
        for (int k = 3; k <= 8; ++k) {
            EntropyEnclosure ei = perron_enclosure(inner_sft(ic, k), tol);
            EntropyEnclosure eo = perron_enclosure(outer_sft(ic, k), tol);
            CHECK(ei.value.lo <= eo.value.hi + tol);
            CHECK(ei.value.lo >= prev_inner - tol);
            CHECK(eo.value.hi <= prev_outer + tol);
            prev_inner = ei.value.lo;
            prev_outer = eo.value.hi;
        }
    }
}

TEST_CASE("dimension of the golden-mean hole") {
    DimensionOptions opt;
    opt.tol = parse_rational("1e-3");
    DimensionResult r = dimension(IC("0", "(10)"), opt);
    CHECK(r.converged);
    CHECK(r.cls == CriticalClass::Positive);
    CHECK(r.value.width() <= opt.tol);
    // ln(phi)/ln(2) = 0.69424191363061730...
    CHECK(r.value.lo <= parse_rational("0.6942419137"));
    CHECK(r.value.hi >= parse_rational("0.6942419136"));
}

TEST_CASE("dimension of the full shift") {
    DimensionOptions opt;
    opt.tol = parse_rational("1e-3");
    DimensionResult r = dimension(IC("0", "(1)"), opt);
    CHECK(r.converged);
    CHECK(r.value.hi == 1);
    CHECK(r.value.lo >= 1 - opt.tol);
}

TEST_CASE("dimension of a countable survivor set") {
    DimensionOptions opt;
    opt.tol = parse_rational("1e-3");
    DimensionResult r = dimension(IC("0", "1"), opt);
    CHECK(r.cls == CriticalClass::Zero);
    CHECK(r.value.lo == 0);
    CHECK(r.value.hi == 0);
    CHECK(r.converged);
}

TEST_CASE("classify_critical examples") {
    CriticalResult zero = classify_critical(IC("0", "1"));
    CHECK(zero.cls == CriticalClass::Zero);

    CriticalResult pos = classify_critical(IC("0", "(10)"));
    CHECK(pos.cls == CriticalClass::Positive);
    CHECK(pos.witness_run == 1);
    REQUIRE(pos.witness_entropy.has_value());
    // witness S_1 is the golden-mean SFT: entropy ln(phi)
    Enclosure lam = perron_lambda(*pos.witness, parse_rational("1e-9")).lambda;
    CHECK(encloses_phi(lam));

    CriticalResult empty = classify_critical(IntervalConstraint::make(S("(1)", 2), S("12", 2)));
    CHECK(empty.cls == CriticalClass::Empty);

    // d1 = c1 takes precedence over normalization
    CriticalResult collapsed = classify_critical(IC("0", "011"));
    CHECK(collapsed.cls == CriticalClass::Empty);

    // normalization of a non-kneading right endpoint
    CriticalResult norm = classify_critical(IC("0", "10011"));
    CHECK(norm.cls == CriticalClass::Positive);
    CHECK(norm.normalized_d == S("101"));
    CHECK_THROWS_AS(classify_critical(IC("0", "10011"), false), Error);

    // d = m^inf needs no normalization
    CriticalResult full = classify_critical(IC("0", "(1)"));
    CHECK(full.cls == CriticalClass::Positive);
}

TEST_CASE("classify_critical matches the threshold on a word grid") {
    // all length-5 binary words as d = w 0^inf against c = 0^inf
    for (int code = 1; code < 32; ++code) {
        std::vector<int> w(5);
        for (int i = 0; i < 5; ++i) w[static_cast<std::size_t>(i)] = (code >> (4 - i)) & 1;
        Seq d = Seq::make(1, w, {});
        if (d == Seq::zeros(1)) continue;
        IntervalConstraint ic = IntervalConstraint::make(Seq::zeros(1), d);
        CriticalResult r = classify_critical(ic);
        if (d.digit(0) == 0) {
            CHECK(r.cls == CriticalClass::Empty);
        } else {
            Seq dk = is_kneading(d) ? d : minimal_kneading_above(d);
            bool above = lex_compare(dk, S("1")) == Ordering::Greater;
            CHECK(r.cls == (above ? CriticalClass::Positive : CriticalClass::Zero));
        }
        if (r.cls == CriticalClass::Positive) {
            REQUIRE(r.witness_entropy.has_value());
            CHECK(r.witness_entropy->lo > 0);
        }
    }
}

TEST_CASE("critical classes agree with the numeric dimension near the threshold") {
    DimensionOptions opt;
    opt.tol = parse_rational("1e-2");
    opt.k_cap = 12;
    for (const char* d : {"1", "1001", "101", "11"}) {
        IntervalConstraint ic = IC("0", d);
        CriticalResult cls = classify_critical(ic);
        DimensionResult r = dimension(ic, opt);
        if (cls.cls == CriticalClass::Zero) {
            CHECK(r.value.hi <= parse_rational("1e-2"));
        } else {
            CHECK(r.value.lo > 0);
        }
    }
}

TEST_CASE("sft_contains") {
    TransferGraph golden = outer_sft(IC("0", "(10)"), 2);
    TransferGraph full = outer_sft(IC("0", "(1)"), 2);
    CHECK(sft_contains(golden, full));
    CHECK(!sft_contains(full, golden));
    CHECK(sft_contains(golden, golden));
    // refinement across different block lengths
    TransferGraph golden4 = outer_sft(IC("0", "(10)"), 4);
    CHECK(sft_contains(golden4, golden));
    CHECK(sft_contains(golden, golden4));
    // edge-level constraints are respected
    TransferGraph no101 = from_forbidden_words(1, {Word{1, {1, 0, 1}}});
    CHECK(sft_contains(no101, full));
    CHECK(!sft_contains(full, no101));
    CHECK(!sft_contains(golden, no101));
}

TEST_CASE("dimension monotone under interval inclusion") {
    DimensionOptions opt;
    opt.tol = parse_rational("1e-2");
    opt.k_cap = 10;
    DimensionResult small = dimension(IC("0", "(100)"), opt);
    DimensionResult big = dimension(IC("0", "(10)"), opt);
    CHECK(small.value.hi <= big.value.hi + 2 * opt.tol);
    DimensionResult bigger = dimension(IC("0", "(1)"), opt);
    CHECK(big.value.hi <= bigger.value.hi + 2 * opt.tol);
}

TEST_CASE("left-endpoint stability leaves the dimension unchanged") {
    // c = 10^inf is kneading with i0 = 2; perturbing beyond the first two
    // digits must not move the survivor set (m = 2 keeps the interval rich).
    StabilityInfo st = left_endpoint_stability(S("10", 2));
    CHECK(st.i0 == 2);
    DimensionOptions opt;
    opt.tol = parse_rational("1e-2");
    opt.k_cap = 9;
    DimensionResult base = dimension(IntervalConstraint::make(S("10", 2), S("(21)", 2)), opt);
    DimensionResult pert = dimension(IntervalConstraint::make(S("102", 2), S("(21)", 2)), opt);
    DimensionResult pert2 = dimension(IntervalConstraint::make(S("1012", 2), S("(21)", 2)), opt);
    Rational slack = 2 * opt.tol;
    CHECK(base.value.hi <= pert.value.hi + slack);
    CHECK(pert.value.hi <= base.value.hi + slack);
    CHECK(base.value.lo <= pert2.value.lo + slack);
    CHECK(pert2.value.lo <= base.value.lo + slack);
}

TEST_CASE("higher-block recoding preserves the spectral radius") {
    TransferGraph golden = outer_sft(IC("0", "(10)"), 2);
    Rational tol = parse_rational("1e-9");
    PerronResult base = perron_lambda(golden, tol);
    for (int K = 3; K <= 7; ++K) {
        PerronResult ref = perron_lambda(refine(golden, K), tol);
        CHECK(encloses_phi(ref.lambda));
        CHECK(ref.lambda.lo <= base.lambda.hi);
        CHECK(ref.lambda.hi >= base.lambda.lo);
    }
}

TEST_CASE("digit complement mirrors the survivor dimension") {
    // tails in [c, d] correspond under the complement to tails in
    // [tilde(d), tilde(c)], so the two dimensions agree
    DimensionOptions opt;
    opt.tol = parse_rational("1e-3");
    struct Pair {
        const char* c;
        const char* d;
    };
    for (const Pair& p : {Pair{"0", "(10)"}, Pair{"0", "(110)"}, Pair{"00(10)", "(1)"}}) {
        IntervalConstraint ic = IC(p.c, p.d);
        IntervalConstraint mirrored =
            IntervalConstraint::make(tilde_invert(ic.d), tilde_invert(ic.c));
        DimensionResult a = dimension(ic, opt);
        DimensionResult b = dimension(mirrored, opt);
        Rational slack = 2 * opt.tol;
        CHECK(a.value.hi <= b.value.hi + slack);
        CHECK(b.value.hi <= a.value.hi + slack);
        CHECK(a.value.lo <= b.value.lo + slack);
        CHECK(b.value.lo <= a.value.lo + slack);
    }
}

TEST_CASE("graph serialization round trip") {
    TransferGraph g = outer_sft(IC("0", "(10)"), 3);
    std::string text = serialize_graph(g);
    TransferGraph h = parse_graph(text);
    CHECK(h.m == g.m);
    CHECK(h.k == g.k);
    CHECK(h.blocks == g.blocks);
    CHECK(h.edges == g.edges);
    CHECK_THROWS_AS(parse_graph("bogus"), Error);
}

TEST_CASE("equality_experiment on the golden-mean hole") {
    EqualityReport rep = equality_experiment(IC("0", "(10)"), parse_rational("1e-3"), 8);
    CHECK(rep.survivor.converged);
    CHECK(rep.family == FamilyKind::LeftC);
    REQUIRE(rep.rows.size() >= 3);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].ratio.lo >= rep.rows[i - 1].ratio.lo - parse_rational("1e-9"));
        CHECK(rep.rows[i].gap <= rep.rows[i - 1].gap + parse_rational("1e-9"));
    }
    // scaled bounds stay below the survivor enclosure (certified lower bounds)
    for (const auto& row : rep.rows) {
        CHECK(row.scaled.lo <= rep.survivor.value.hi);
    }
}

TEST_CASE("equality_experiment on the full shift") {
    EqualityReport rep = equality_experiment(IC("0", "(1)"), parse_rational("1e-3"), 8);
    CHECK(rep.family == FamilyKind::Full);
    CHECK(rep.ambient.lo == 1);
    REQUIRE(!rep.rows.empty());
    const EqualityRow& last = rep.rows.back();
    CHECK(last.k == 8);
    CHECK(last.scaled.lo >= parse_rational("0.95"));
    CHECK(last.gap <= parse_rational("0.05"));
}

TEST_CASE("equality_experiment on an empty interval") {
    EqualityReport rep = equality_experiment(IntervalConstraint::make(S("(1)", 2), S("12", 2)),
                                             parse_rational("1e-3"), 6);
    CHECK(rep.survivor.cls == CriticalClass::Empty);
    CHECK(rep.survivor.value.hi == 0);
    CHECK(rep.rows.empty());
    CHECK(rep.ambient.hi == 0);
}

TEST_CASE("block budget is enforced") {
    CHECK_THROWS_AS(allowed_blocks(IC("0", "(10)"), 10, ExecPolicy::Serial, 64), Error);
}

TEST_SUITE_END();
