#include "knead/circle.hpp"

#include "knead/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>

namespace knead {

namespace {

Rational wrap1(Rational x) {
    // reduce into [0, 1)
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return x - Rational(f);
}

} // namespace

Rational PiecewiseLinearMarkovMap::expansion() const {
    Rational g = branches.front().slope;
    for (const auto& b : branches) g = std::min(g, b.slope);
    return g;
}

int PiecewiseLinearMarkovMap::branch_of(const Rational& x) const {
    if (x < 0 || x >= 1) raise("domain", "point outside [0,1)");
    // half-open convention [x_{i-1}, x_i)
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    return static_cast<int>(it - breakpoints.begin()) - 1;
}

Rational PiecewiseLinearMarkovMap::apply(const Rational& x) const {
    const AffineBranch& b = branches[static_cast<std::size_t>(branch_of(x))];
    return b.slope * x + b.intercept;
}

Rational PiecewiseLinearMarkovMap::inverse(int branch, const Rational& y) const {
    const AffineBranch& b = branches[static_cast<std::size_t>(branch)];
    return (y - b.intercept) / b.slope;
}

PiecewiseLinearMarkovMap PiecewiseLinearMarkovMap::doubling() { return linear_full(1); }

PiecewiseLinearMarkovMap PiecewiseLinearMarkovMap::linear_full(int m) {
    PiecewiseLinearMarkovMap f;
    const int d = m + 1;
    for (int i = 0; i <= d; ++i) f.breakpoints.push_back(Rational(i, d));
    for (int i = 0; i < d; ++i) f.branches.push_back(AffineBranch{Rational(d), Rational(-i)});
    return f;
}

namespace {

void validate_map(const PiecewiseLinearMarkovMap& f) {
    if (f.branches.empty() || f.breakpoints.size() != f.branches.size() + 1) {
        raise("syntax", "map needs d branches and d+1 breakpoints");
    }
    if (f.breakpoints.front() != 0 || f.breakpoints.back() != 1) {
        raise("syntax", "breakpoints must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i + 1 < f.breakpoints.size(); ++i) {
        if (!(f.breakpoints[i] < f.breakpoints[i + 1])) raise("syntax", "breakpoints must be strictly increasing");
    }
    for (std::size_t i = 0; i < f.branches.size(); ++i) {
        const AffineBranch& b = f.branches[i];
        if (b.slope < 0) raise("domain", "orientation-reversing branches are not supported");
        if (b.slope <= 1) raise("domain", "branch slope must exceed 1 (expanding map)");
        if (b.slope * f.breakpoints[i] + b.intercept != 0 || b.slope * f.breakpoints[i + 1] + b.intercept != 1) {
            raise("syntax", "branch " + std::to_string(i) + " does not map its fundamental interval onto [0,1)");
        }
    }
}

} // namespace

PiecewiseLinearMarkovMap PiecewiseLinearMarkovMap::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise("syntax", std::string("map file is not valid JSON: ") + e.what());
    }
    PiecewiseLinearMarkovMap f;
    try {
        for (const auto& bp : j.at("breakpoints")) f.breakpoints.push_back(parse_rational(bp.get<std::string>()));
        for (const auto& br : j.at("branches")) {
            f.branches.push_back(AffineBranch{parse_rational(br.at("slope").get<std::string>()),
                                              parse_rational(br.at("intercept").get<std::string>())});
        }
        if (j.contains("m") && j.at("m").get<int>() != f.alphabet_bound()) {
            raise("syntax", "field m disagrees with the branch count");
        }
    } catch (const nlohmann::json::exception& e) {
        raise("syntax", std::string("malformed map file: ") + e.what());
    }
    validate_map(f);
    return f;
}

std::string PiecewiseLinearMarkovMap::to_json() const {
    nlohmann::json j;
    j["m"] = alphabet_bound();
    for (const auto& bp : breakpoints) j["breakpoints"].push_back(to_fraction_string(bp));
    for (const auto& br : branches) {
        j["branches"].push_back({{"slope", to_fraction_string(br.slope)}, {"intercept", to_fraction_string(br.intercept)}});
    }
    return j.dump();
}

IntervalCover IntervalCover::make(int depth, std::vector<Arc> raw) {
    for (const Arc& a : raw) {
        if (a.lo > a.hi || a.lo < 0 || a.hi > 1) raise("domain", "arc outside [0,1] or reversed");
    }
    std::sort(raw.begin(), raw.end(), [](const Arc& a, const Arc& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    IntervalCover out;
    out.depth = depth;
    for (Arc& a : raw) {
        if (!out.arcs.empty() && a.lo <= out.arcs.back().hi) {
            out.arcs.back().hi = std::max(out.arcs.back().hi, a.hi);
        } else {
            out.arcs.push_back(std::move(a));
        }
    }
    return out;
}

Rational IntervalCover::total_length() const {
    Rational len(0);
    for (const Arc& a : arcs) len += a.hi - a.lo;
    return len;
}

bool IntervalCover::contains_point(const Rational& x) const {
    for (const Arc& a : arcs) {
        if (a.lo <= x && x <= a.hi) return true;
    }
    // seam: 0 and 1 are the same point
    if (x == 0 && !arcs.empty() && arcs.back().hi == 1) return true;
    if (x == 1 && !arcs.empty() && arcs.front().lo == 0) return true;
    return false;
}

std::string IntervalCover::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const Arc& a : arcs) j.push_back({to_fraction_string(a.lo), to_fraction_string(a.hi)});
    return j.dump();
}

Word itinerary(const PiecewiseLinearMarkovMap& f, const Rational& x, int k) {
    if (x < 0 || x >= 1) raise("domain", "itinerary point must lie in [0,1)");
    Word w;
    w.m = f.alphabet_bound();
    Rational y = x;
    for (int i = 0; i < k; ++i) {
        int s = f.branch_of(y);
        w.syms.push_back(s);
        const AffineBranch& b = f.branches[static_cast<std::size_t>(s)];
        y = b.slope * y + b.intercept;
    }
    return w;
}

Enclosure decode(const PiecewiseLinearMarkovMap& f, const Word& w) {
    if (w.m != f.alphabet_bound()) raise("alphabet_mismatch", "word alphabet does not match the map");
    Rational lo(0), hi(1);
    for (auto it = w.syms.rbegin(); it != w.syms.rend(); ++it) {
        if (*it < 0 || *it > w.m) raise("out_of_range", "itinerary symbol out of range");
        lo = f.inverse(*it, lo);
        hi = f.inverse(*it, hi);
    }
    return Enclosure(lo, hi);
}

Enclosure decode(const PiecewiseLinearMarkovMap& f, const Seq& s) {
    if (s.m != f.alphabet_bound()) raise("alphabet_mismatch", "sequence alphabet does not match the map");
    Rational point;
    if (s.per.empty()) {
        point = 0; // fixed point of the leftmost branch
    } else {
        // fixed point of the affine composition along one period
        Rational A(1), B(0);
        for (auto it = s.per.rbegin(); it != s.per.rend(); ++it) {
            const AffineBranch& b = f.branches[static_cast<std::size_t>(*it)];
            A /= b.slope;
            B = (B - b.intercept) / b.slope;
        }
        point = B / (Rational(1) - A);
    }
    for (auto it = s.pre.rbegin(); it != s.pre.rend(); ++it) {
        point = f.inverse(*it, point);
    }
    return Enclosure::point(point);
}

Enclosure conjugacy_eval(const PiecewiseLinearMarkovMap& f, const PiecewiseLinearMarkovMap& g,
                         const Rational& x, int k) {
    if (f.branches.size() != g.branches.size()) {
        raise("alphabet_mismatch", "conjugacy requires the same number of fundamental intervals");
    }
    return decode(g, itinerary(f, x, k));
}

IntervalCover sft_cover(const PiecewiseLinearMarkovMap& f, const TransferGraph& g) {
    if (g.m != f.alphabet_bound()) raise("alphabet_mismatch", "graph alphabet does not match the map");
    TransferGraph t = trimmed(g);
    std::vector<Arc> arcs;
    arcs.reserve(t.vertex_count());
    for (std::size_t i = 0; i < t.vertex_count(); ++i) {
        Enclosure e = decode(f, t.block_word(i));
        arcs.push_back(Arc{e.lo, e.hi});
    }
    return IntervalCover::make(t.k, std::move(arcs));
}

IntervalCover map_image_cover(const PiecewiseLinearMarkovMap& f, const Rational& eps,
                              const IntervalCover& cov) {
    std::vector<Arc> out;
    auto push_rotated = [&](Rational lo, Rational hi) {
        lo += eps;
        hi += eps;
        Rational slo = wrap1(lo);
        Rational shift = slo - lo;
        lo = slo;
        hi += shift;
        if (hi <= 1) {
            out.push_back(Arc{lo, hi});
        } else {
            out.push_back(Arc{lo, Rational(1)});
            out.push_back(Arc{Rational(0), hi - 1});
        }
    };
    for (const Arc& a : cov.arcs) {
        // split at interior breakpoints, image each affine piece
        Rational cur = a.lo;
        while (true) {
            int br = (cur == 1) ? f.alphabet_bound() : f.branch_of(cur);
            const Rational& right = f.breakpoints[static_cast<std::size_t>(br) + 1];
            Rational end = std::min(a.hi, right);
            const AffineBranch& b = f.branches[static_cast<std::size_t>(br)];
            push_rotated(b.slope * cur + b.intercept, b.slope * end + b.intercept);
            if (end == a.hi) break;
            cur = end;
        }
    }
    return IntervalCover::make(cov.depth, std::move(out));
}

Rational cover_min_distance(const IntervalCover& a, const IntervalCover& b) {
    if (a.empty() || b.empty()) raise("empty_cover", "distance of an empty cover");
    Rational best(1);
    for (const Arc& x : a.arcs) {
        for (const Arc& y : b.arcs) {
            if (std::max(x.lo, y.lo) <= std::min(x.hi, y.hi)) return Rational(0);
            Rational fwd = wrap1(y.lo - x.hi);
            Rational bwd = wrap1(x.lo - y.hi);
            best = std::min(best, std::min(fwd, bwd));
            if (best == 0) return best;
        }
    }
    return best;
}

bool cover_contains(const IntervalCover& inner, const IntervalCover& outer) {
    if (inner.empty()) return true;
    if (outer.empty()) return false;
    // effective outer arcs with the seam join expressed on [0, 2)
    std::vector<Arc> eff = outer.arcs;
    if (eff.size() >= 2 && eff.front().lo == 0 && eff.back().hi == 1) {
        Arc joined{eff.back().lo, eff.front().hi + 1};
        eff.erase(eff.begin());
        eff.pop_back();
        eff.push_back(joined);
    } else if (eff.size() == 1 && eff.front().lo == 0 && eff.front().hi == 1) {
        return true;
    }
    for (const Arc& x : inner.arcs) {
        bool ok = false;
        for (const Arc& o : eff) {
            if ((o.lo <= x.lo && x.hi <= o.hi) || (o.lo <= x.lo + 1 && x.hi + 1 <= o.hi)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

namespace {

// sup over points of `a` of the circle distance to the set `b`
Rational directed_hausdorff(const IntervalCover& a, const IntervalCover& b) {
    // complement gaps of b, expressed on [0, 2) so the wrap gap is one piece
    std::vector<Arc> gaps;
    const auto& arcs = b.arcs;
    for (std::size_t i = 0; i + 1 < arcs.size(); ++i) {
        if (arcs[i].hi < arcs[i + 1].lo) gaps.push_back(Arc{arcs[i].hi, arcs[i + 1].lo});
    }
    Rational wrap_lo = arcs.back().hi;
    Rational wrap_hi = arcs.front().lo + 1;
    if (wrap_lo < wrap_hi) gaps.push_back(Arc{wrap_lo, wrap_hi});
    if (gaps.empty()) return Rational(0);

    Rational best(0);
    auto consider = [&](const Rational& x, const Arc& gap) {
        Rational d = std::min(x - gap.lo, gap.hi - x);
        best = std::max(best, d);
    };
    for (const Arc& arc : a.arcs) {
        for (int sh = 0; sh <= 1; ++sh) {
            Arc s{arc.lo + sh, arc.hi + sh};
            for (const Arc& gap : gaps) {
                Rational lo = std::max(s.lo, gap.lo);
                Rational hi = std::min(s.hi, gap.hi);
                if (lo > hi) continue;
                consider(lo, gap);
                consider(hi, gap);
                Rational mid = (gap.lo + gap.hi) / 2;
                if (lo <= mid && mid <= hi) consider(mid, gap);
            }
        }
    }
    return best;
}

} // namespace

Enclosure hausdorff_distance(const IntervalCover& a, const IntervalCover& b) {
    if (a.empty() || b.empty()) raise("empty_cover", "Hausdorff distance of an empty cover");
    Rational d = std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
    return Enclosure::point(d);
}

const char* to_string(JointVerdict v) {
    switch (v) {
        case JointVerdict::CertifiedDisjoint: return "certified_disjoint";
        case JointVerdict::OverlapWitness: return "overlap_witness";
        case JointVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// Periodic points of the SFT realized by `g` whose period divides max_period,
// as exact rationals, ascending.
std::vector<Rational> periodic_points(const PiecewiseLinearMarkovMap& f, const TransferGraph& g,
                                      int max_period) {
    std::vector<Rational> pts;
    const int k = g.k;
    const std::uint64_t base = static_cast<std::uint64_t>(g.m) + 1;
    for (int p = 1; p <= max_period; ++p) {
        std::uint64_t np = 1;
        bool over = false;
        for (int i = 0; i < p; ++i) {
            if (np > (std::uint64_t(1) << 22) / base) {
                over = true;
                break;
            }
            np *= base;
        }
        if (over) break; // wide alphabets: stop the search at this period
        std::vector<int> u(static_cast<std::size_t>(p));
        for (std::uint64_t code = 0; code < np; ++code) {
            std::uint64_t c = code;
            for (int i = p - 1; i >= 0; --i) {
                u[static_cast<std::size_t>(i)] = static_cast<int>(c % base);
                c /= base;
            }
            // cyclic window check: every k-window a vertex, consecutive pairs edges
            std::vector<std::size_t> vidx(static_cast<std::size_t>(p));
            bool ok = true;
            for (int i = 0; i < p && ok; ++i) {
                std::uint64_t w = 0;
                for (int j = 0; j < k; ++j) w = w * base + static_cast<std::uint64_t>(u[static_cast<std::size_t>((i + j) % p)]);
                std::size_t idx = g.find_block(w);
                if (idx == TransferGraph::npos) ok = false;
                vidx[static_cast<std::size_t>(i)] = idx;
            }
            for (int i = 0; i < p && ok; ++i) {
                auto e = std::make_pair(static_cast<std::uint32_t>(vidx[static_cast<std::size_t>(i)]),
                                        static_cast<std::uint32_t>(vidx[static_cast<std::size_t>((i + 1) % p)]));
                ok = std::binary_search(g.edges.begin(), g.edges.end(), e);
            }
            if (!ok) continue;
            Seq s = Seq::make(g.m, {}, u);
            pts.push_back(decode(f, s).lo);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Decide membership of the point q in the realized SFT by following its
// exact orbit until it repeats; empty optional when the orbit does not
// close within the budget.
std::optional<bool> orbit_membership(const PiecewiseLinearMarkovMap& f, const TransferGraph& g,
                                     const Rational& q, std::size_t budget = 4096) {
    std::map<Rational, std::size_t> seen;
    std::vector<int> syms;
    Rational y = q;
    std::size_t pre = 0, cycle = 0;
    while (syms.size() < budget) {
        auto it = seen.find(y);
        if (it != seen.end()) {
            pre = it->second;
            cycle = syms.size() - pre;
            break;
        }
        seen.emplace(y, syms.size());
        int s = f.branch_of(y);
        syms.push_back(s);
        const AffineBranch& b = f.branches[static_cast<std::size_t>(s)];
        y = b.slope * y + b.intercept;
    }
    if (cycle == 0) return std::nullopt;
    // check all k- and (k+1)-windows over preperiod plus one full cycle
    const int k = g.k;
    auto sym_at = [&](std::size_t i) {
        if (i < syms.size()) return syms[i];
        return syms[pre + (i - pre) % cycle];
    };
    const std::uint64_t base = static_cast<std::uint64_t>(g.m) + 1;
    std::size_t prev_idx = TransferGraph::npos;
    for (std::size_t i = 0; i < pre + cycle; ++i) {
        std::uint64_t w = 0;
        for (int j = 0; j < k; ++j) w = w * base + static_cast<std::uint64_t>(sym_at(i + static_cast<std::size_t>(j)));
        std::size_t idx = g.find_block(w);
        if (idx == TransferGraph::npos) return false;
        if (i > 0) {
            auto e = std::make_pair(static_cast<std::uint32_t>(prev_idx), static_cast<std::uint32_t>(idx));
            if (!std::binary_search(g.edges.begin(), g.edges.end(), e)) return false;
        }
        prev_idx = idx;
    }
    // closing edge of the cycle
    {
        std::uint64_t w0 = 0, w1 = 0;
        std::size_t i0 = pre + cycle, i1 = pre + cycle - 1;
        for (int j = 0; j < k; ++j) {
            w0 = w0 * base + static_cast<std::uint64_t>(sym_at(i0 + static_cast<std::size_t>(j)));
            w1 = w1 * base + static_cast<std::uint64_t>(sym_at(i1 + static_cast<std::size_t>(j)));
        }
        std::size_t a = g.find_block(w1), b = g.find_block(w0);
        if (a == TransferGraph::npos || b == TransferGraph::npos) return false;
        auto e = std::make_pair(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
        if (!std::binary_search(g.edges.begin(), g.edges.end(), e)) return false;
    }
    return true;
}

} // namespace

JointResult joint_check(const PiecewiseLinearMarkovMap& f, const TransferGraph& target,
                        const Rational& eps, int depth, int max_period) {
    if (target.m != f.alphabet_bound()) raise("alphabet_mismatch", "target alphabet does not match the map");
    TransferGraph g = trimmed(depth > target.k ? refine(target, depth) : target);
    if (g.empty()) raise("empty_cover", "target SFT realizes the empty set");

    JointResult res;
    IntervalCover cover = sft_cover(f, g);
    IntervalCover image = map_image_cover(f, eps, cover);
    Rational gap = cover_min_distance(cover, image);
    if (gap > 0) {
        res.verdict = JointVerdict::CertifiedDisjoint;
        res.gap = gap;
        return res;
    }

    for (const Rational& p : periodic_points(f, g, max_period)) {
        Rational x = wrap1(p - eps);
        for (int br = 0; br <= f.alphabet_bound(); ++br) {
            Rational q = f.inverse(br, x);
            if (q == 1) q = 0;
            auto member = orbit_membership(f, g, q);
            if (member.has_value() && *member) {
                res.verdict = JointVerdict::OverlapWitness;
                res.witness_point = p;
                res.witness_preimage = q;
                return res;
            }
        }
    }
    res.verdict = JointVerdict::Inconclusive;
    return res;
}

MaximalityResult maximality_epsilon(const TransferGraph& sigma, const PiecewiseLinearMarkovMap& f) {
    if (sigma.m != f.alphabet_bound()) raise("alphabet_mismatch", "graph alphabet does not match the map");
    TransferGraph g = trimmed(sigma);
    if (g.empty()) raise("empty_cover", "maximality neighborhood of an empty SFT");

    const std::uint64_t base = static_cast<std::uint64_t>(g.m) + 1;
    const int k = g.k;
    std::uint64_t nk1 = 1;
    for (int i = 0; i < k - 1; ++i) nk1 *= base;

    // Forbidden words live at depth k+1 when some overlap edge is missing,
    // otherwise at the vertex depth k.
    bool edge_constrained = false;
    for (std::uint32_t ui = 0; ui < g.blocks.size() && !edge_constrained; ++ui) {
        std::uint64_t suffix = (g.blocks[ui] % nk1) * base;
        for (int a = 0; a <= g.m; ++a) {
            std::size_t vi = g.find_block(suffix + static_cast<std::uint64_t>(a));
            if (vi == TransferGraph::npos) continue;
            auto e = std::make_pair(ui, static_cast<std::uint32_t>(vi));
            if (!std::binary_search(g.edges.begin(), g.edges.end(), e)) {
                edge_constrained = true;
                break;
            }
        }
    }
    const int r0 = edge_constrained ? k + 1 : k;

    std::vector<std::uint64_t> blocks_r0;
    if (r0 == k) {
        blocks_r0 = g.blocks;
    } else {
        blocks_r0.reserve(g.edges.size());
        for (auto [u, v] : g.edges) {
            blocks_r0.push_back(g.blocks[u] * base + g.blocks[v] % base);
        }
        std::sort(blocks_r0.begin(), blocks_r0.end());
    }

    std::uint64_t nr = 1;
    for (int i = 0; i < r0; ++i) nr *= base;

    MaximalityResult out;
    out.r0 = r0;
    bool first = true;
    std::vector<Arc> cyl(blocks_r0.size());
    for (std::size_t i = 0; i < blocks_r0.size(); ++i) {
        Enclosure e = decode(f, decode_word(blocks_r0[i], g.m, r0));
        cyl[i] = Arc{e.lo, e.hi};
        Rational diam = e.hi - e.lo;
        if (first || diam < out.min_cylinder) {
            out.min_cylinder = diam;
            first = false;
        }
    }
    out.epsilon = out.min_cylinder / 3;

    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < blocks_r0.size(); ++i) {
        std::uint64_t code = blocks_r0[i];
        std::uint64_t left = (code + nr - 1) % nr;
        std::uint64_t right = (code + 1) % nr;
        bool left_ok = std::binary_search(blocks_r0.begin(), blocks_r0.end(), left);
        bool right_ok = std::binary_search(blocks_r0.begin(), blocks_r0.end(), right);
        Rational lo = cyl[i].lo - (left_ok ? Rational(0) : out.epsilon);
        Rational hi = cyl[i].hi + (right_ok ? Rational(0) : out.epsilon);
        if (lo < 0) {
            arcs.push_back(Arc{lo + 1, Rational(1)});
            lo = 0;
        }
        if (hi > 1) {
            arcs.push_back(Arc{Rational(0), hi - 1});
            hi = 1;
        }
        arcs.push_back(Arc{lo, hi});
    }
    out.neighborhood = IntervalCover::make(r0, std::move(arcs));
    return out;
}

} // namespace knead
