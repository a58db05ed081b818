#include "knead/transfer_graph.hpp"

#include "knead/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace knead {

std::uint64_t encode_word(const Word& w) {
    const std::uint64_t base = static_cast<std::uint64_t>(w.m) + 1;
    std::uint64_t code = 0;
    for (int s : w.syms) code = code * base + static_cast<std::uint64_t>(s);
    return code;
}

Word decode_word(std::uint64_t code, int m, int k) {
    const std::uint64_t base = static_cast<std::uint64_t>(m) + 1;
    Word w;
    w.m = m;
    w.syms.assign(static_cast<std::size_t>(k), 0);
    for (int i = k - 1; i >= 0; --i) {
        w.syms[static_cast<std::size_t>(i)] = static_cast<int>(code % base);
        code /= base;
    }
    return w;
}

Word TransferGraph::block_word(std::size_t idx) const { return decode_word(blocks[idx], m, k); }

std::string TransferGraph::block_string(std::size_t idx) const {
    Word w = block_word(idx);
    std::string out;
    bool first = true;
    for (int s : w.syms) {
        if (m > 9 && !first) out += ",";
        out += std::to_string(s);
        first = false;
    }
    return out;
}

std::size_t TransferGraph::find_block(std::uint64_t code) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), code);
    if (it == blocks.end() || *it != code) return npos;
    return static_cast<std::size_t>(it - blocks.begin());
}

TransferGraph trimmed(const TransferGraph& g) {
    const std::size_t n = g.blocks.size();
    std::vector<std::uint32_t> indeg(n, 0), outdeg(n, 0);
    for (auto [u, v] : g.edges) {
        ++outdeg[u];
        ++indeg[v];
    }
    std::vector<bool> dead(n, false);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indeg[i] == 0 || outdeg[i] == 0) {
            dead[i] = true;
            queue.push_back(i);
        }
    }
    // adjacency for decremental removal
    std::vector<std::vector<std::uint32_t>> succ(n), pred(n);
    for (auto [u, v] : g.edges) {
        succ[u].push_back(v);
        pred[v].push_back(u);
    }
    while (!queue.empty()) {
        std::uint32_t x = queue.back();
        queue.pop_back();
        for (std::uint32_t v : succ[x]) {
            if (!dead[v] && --indeg[v] == 0) {
                dead[v] = true;
                queue.push_back(v);
            }
        }
        for (std::uint32_t u : pred[x]) {
            if (!dead[u] && --outdeg[u] == 0) {
                dead[u] = true;
                queue.push_back(u);
            }
        }
    }
    TransferGraph out;
    out.m = g.m;
    out.k = g.k;
    std::vector<std::uint32_t> remap(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!dead[i]) {
            remap[i] = static_cast<std::uint32_t>(out.blocks.size());
            out.blocks.push_back(g.blocks[i]);
        }
    }
    for (auto [u, v] : g.edges) {
        if (!dead[u] && !dead[v]) out.edges.emplace_back(remap[u], remap[v]);
    }
    return out;
}

TransferGraph refine(const TransferGraph& g, int target_k) {
    if (target_k < g.k) raise("domain", "refine cannot coarsen a transfer graph");
    TransferGraph cur = g;
    const std::uint64_t base = static_cast<std::uint64_t>(g.m) + 1;
    while (cur.k < target_k) {
        TransferGraph next;
        next.m = cur.m;
        next.k = cur.k + 1;
        // New vertices are the edge words; edge order equals code order.
        next.blocks.reserve(cur.edges.size());
        for (auto [u, v] : cur.edges) {
            std::uint64_t last = cur.blocks[v] % base;
            next.blocks.push_back(cur.blocks[u] * base + last);
        }
        // New edges join consecutive old edges through their shared vertex.
        std::vector<std::vector<std::uint32_t>> out_edges(cur.blocks.size());
        for (std::uint32_t e = 0; e < cur.edges.size(); ++e) {
            out_edges[cur.edges[e].first].push_back(e);
        }
        for (std::uint32_t e = 0; e < cur.edges.size(); ++e) {
            for (std::uint32_t f : out_edges[cur.edges[e].second]) {
                next.edges.emplace_back(e, f);
            }
        }
        std::sort(next.edges.begin(), next.edges.end());
        cur = std::move(next);
    }
    return cur;
}

namespace {

bool contains_factor(const std::vector<int>& word, const Word& f) {
    if (f.syms.empty() || f.syms.size() > word.size()) return false;
    for (std::size_t i = 0; i + f.syms.size() <= word.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < f.syms.size() && hit; ++j) {
            hit = (word[i + j] == f.syms[j]);
        }
        if (hit) return true;
    }
    return false;
}

} // namespace

TransferGraph from_forbidden_words(int m, const std::vector<Word>& forbidden, std::uint64_t max_blocks) {
    std::size_t maxlen = 1;
    for (const Word& w : forbidden) {
        if (w.m != m) raise("alphabet_mismatch", "forbidden word over a different alphabet");
        if (w.syms.empty()) raise("domain", "empty forbidden word");
        maxlen = std::max(maxlen, w.syms.size());
    }
    const int k = static_cast<int>(std::max<std::size_t>(1, maxlen - 1));
    const std::uint64_t base = static_cast<std::uint64_t>(m) + 1;
    std::uint64_t total = 1;
    for (int i = 0; i < k + 1; ++i) {
        if (total > max_blocks / base) raise("budget", "forbidden-word SFT exceeds the block budget");
        total *= base;
    }

    TransferGraph g;
    g.m = m;
    g.k = k;
    std::uint64_t nk = 1;
    for (int i = 0; i < k; ++i) nk *= base;
    std::vector<int> word;
    for (std::uint64_t code = 0; code < nk; ++code) {
        word = decode_word(code, m, k).syms;
        bool ok = true;
        for (const Word& f : forbidden) {
            if (contains_factor(word, f)) {
                ok = false;
                break;
            }
        }
        if (ok) g.blocks.push_back(code);
    }
    for (std::uint32_t ui = 0; ui < g.blocks.size(); ++ui) {
        std::uint64_t suffix = (g.blocks[ui] % (nk / base)) * base;
        Word uw = decode_word(g.blocks[ui], m, k);
        for (int a = 0; a <= m; ++a) {
            std::uint64_t vcode = suffix + static_cast<std::uint64_t>(a);
            std::size_t vi = g.find_block(vcode);
            if (vi == TransferGraph::npos) continue;
            std::vector<int> joined = uw.syms;
            joined.push_back(a);
            bool ok = true;
            for (const Word& f : forbidden) {
                if (contains_factor(joined, f)) {
                    ok = false;
                    break;
                }
            }
            if (ok) g.edges.emplace_back(ui, static_cast<std::uint32_t>(vi));
        }
    }
    return g;
}

void matvec_plus_identity(const std::vector<std::uint32_t>& offsets,
                          const std::vector<std::uint32_t>& targets,
                          const std::vector<mpz_class>& v, std::vector<mpz_class>& w,
                          ExecPolicy pol) {
    const std::int64_t n = static_cast<std::int64_t>(v.size());
    w.resize(v.size());
    if (pol == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            mpz_class acc = v[static_cast<std::size_t>(i)];
            for (std::uint32_t e = offsets[static_cast<std::size_t>(i)];
                 e < offsets[static_cast<std::size_t>(i) + 1]; ++e) {
                acc += v[targets[e]];
            }
            w[static_cast<std::size_t>(i)] = std::move(acc);
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            mpz_class acc = v[static_cast<std::size_t>(i)];
            for (std::uint32_t e = offsets[static_cast<std::size_t>(i)];
                 e < offsets[static_cast<std::size_t>(i) + 1]; ++e) {
                acc += v[targets[e]];
            }
            w[static_cast<std::size_t>(i)] = std::move(acc);
        }
    }
}

namespace {

// Iterative Tarjan SCC; returns component id per vertex.
std::vector<std::uint32_t> tarjan_scc(std::size_t n,
                                      const std::vector<std::uint32_t>& offsets,
                                      const std::vector<std::uint32_t>& targets,
                                      std::uint32_t& comp_count) {
    constexpr std::uint32_t UNSET = 0xffffffffu;
    std::vector<std::uint32_t> index(n, UNSET), low(n, 0), comp(n, UNSET);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    struct Frame {
        std::uint32_t v;
        std::uint32_t edge;
    };
    std::vector<Frame> call;
    std::uint32_t next_index = 0;
    comp_count = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != UNSET) continue;
        call.push_back({root, offsets[root]});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& fr = call.back();
            if (fr.edge < offsets[fr.v + 1]) {
                std::uint32_t wv = targets[fr.edge++];
                if (index[wv] == UNSET) {
                    index[wv] = low[wv] = next_index++;
                    stack.push_back(wv);
                    on_stack[wv] = true;
                    call.push_back({wv, offsets[wv]});
                } else if (on_stack[wv]) {
                    low[fr.v] = std::min(low[fr.v], index[wv]);
                }
            } else {
                std::uint32_t v = fr.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
                if (low[v] == index[v]) {
                    while (true) {
                        std::uint32_t wv = stack.back();
                        stack.pop_back();
                        on_stack[wv] = false;
                        comp[wv] = comp_count;
                        if (wv == v) break;
                    }
                    ++comp_count;
                }
            }
        }
    }
    return comp;
}

} // namespace

PerronResult perron_lambda(const TransferGraph& graph, const Rational& entropy_tol, ExecPolicy pol) {
    PerronResult result;
    TransferGraph g = trimmed(graph);
    if (g.empty()) return result;

    const std::size_t n = g.blocks.size();
    std::vector<std::uint32_t> offsets(n + 1, 0), targets(g.edges.size());
    for (auto [u, v] : g.edges) ++offsets[u + 1];
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    {
        std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
        for (auto [u, v] : g.edges) targets[cursor[u]++] = v;
    }

    std::uint32_t comp_count = 0;
    std::vector<std::uint32_t> comp = tarjan_scc(n, offsets, targets, comp_count);

    // Gather vertices per component; only components with an internal cycle
    // contribute (size >= 2, or a single vertex with a self-loop).
    std::vector<std::vector<std::uint32_t>> members(comp_count);
    for (std::uint32_t v = 0; v < n; ++v) members[comp[v]].push_back(v);

    bool have = false;
    Rational best_lo(0), best_hi(0);
    for (std::uint32_t c = 0; c < comp_count; ++c) {
        const auto& verts = members[c];
        bool cyclic = verts.size() >= 2;
        if (!cyclic) {
            std::uint32_t v = verts[0];
            for (std::uint32_t e = offsets[v]; e < offsets[v + 1] && !cyclic; ++e) {
                cyclic = (targets[e] == v);
            }
        }
        if (!cyclic) continue;

        // Component CSR, local indices; iterate B = A + I (primitive).
        const std::size_t cn = verts.size();
        std::vector<std::uint32_t> local(n, 0);
        for (std::uint32_t i = 0; i < cn; ++i) local[verts[i]] = i;
        std::vector<std::uint32_t> coff(cn + 1, 0), ctgt;
        for (std::uint32_t i = 0; i < cn; ++i) {
            std::uint32_t v = verts[i];
            for (std::uint32_t e = offsets[v]; e < offsets[v + 1]; ++e) {
                if (comp[targets[e]] == c) ++coff[i + 1];
            }
        }
        for (std::size_t i = 0; i < cn; ++i) coff[i + 1] += coff[i];
        ctgt.resize(coff[cn]);
        {
            std::vector<std::uint32_t> cursor(coff.begin(), coff.end() - 1);
            for (std::uint32_t i = 0; i < cn; ++i) {
                std::uint32_t v = verts[i];
                for (std::uint32_t e = offsets[v]; e < offsets[v + 1]; ++e) {
                    if (comp[targets[e]] == c) ctgt[cursor[i]++] = local[targets[e]];
                }
            }
        }

        std::vector<mpz_class> v(cn, mpz_class(1)), w;
        Rational lo(1), hi(g.m + 2); // lambda(B) bounds; B = A + I
        const std::size_t max_iter = 4096;
        std::size_t iter = 0;
        while (iter < max_iter) {
            ++iter;
            matvec_plus_identity(coff, ctgt, v, w, pol);
            Rational it_lo, it_hi;
            bool first = true;
            for (std::size_t i = 0; i < cn; ++i) {
                Rational r(w[i], v[i]);
                r.canonicalize();
                if (first) {
                    it_lo = it_hi = r;
                    first = false;
                } else {
                    if (r < it_lo) it_lo = r;
                    if (r > it_hi) it_hi = r;
                }
            }
            lo = std::max(lo, it_lo);
            hi = std::min(hi, it_hi);
            v.swap(w);
            // ln-width of lambda(A) = ln(hi-1) - ln(lo-1) <= (hi-lo)/(lo-1).
            if (lo > 1 && hi - lo <= entropy_tol * (lo - 1)) break;
            // Keep integer sizes bounded; any positive vector is admissible.
            std::size_t min_bits = SIZE_MAX;
            std::size_t max_bits = 0;
            for (const auto& x : v) {
                std::size_t b = mpz_sizeinbase(x.get_mpz_t(), 2);
                min_bits = std::min(min_bits, b);
                max_bits = std::max(max_bits, b);
            }
            if (max_bits > 512 && min_bits > 64) {
                const auto shiftn = static_cast<mp_bitcnt_t>(min_bits - 64);
                for (auto& x : v) {
                    mpz_fdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), shiftn);
                    if (x == 0) x = 1;
                }
            }
        }
        result.iterations += iter;
        Rational alo = lo - 1, ahi = hi - 1;
        if (!have || alo > best_lo) best_lo = alo;
        if (!have || ahi > best_hi) best_hi = ahi;
        have = true;
    }

    if (!have) return result; // no cycles: empty shift space, entropy 0
    result.has_cycle = true;
    result.lambda = Enclosure(std::min(best_lo, best_hi), best_hi);
    return result;
}

EntropyEnclosure perron_enclosure(const TransferGraph& g, const Rational& tol, ExecPolicy pol) {
    EntropyEnclosure out;
    TransferGraph t = trimmed(g);
    out.graph_size = t.vertex_count();
    out.k = g.k;
    PerronResult pr = perron_lambda(t, tol, pol);
    if (!pr.has_cycle) {
        out.value = Enclosure(Rational(0), Rational(0));
        return out;
    }
    if (pr.lambda.is_point() && pr.lambda.lo == 1) {
        out.value = Enclosure(Rational(0), Rational(0));
        return out;
    }
    out.value = log_enclosure(pr.lambda);
    if (out.value.lo < 0) out.value.lo = 0; // lambda >= 1 on cyclic graphs
    return out;
}

bool sft_contains(const TransferGraph& sub, const TransferGraph& super) {
    if (sub.m != super.m) raise("alphabet_mismatch", "sft_contains across different alphabets");
    const int K = std::max(sub.k, super.k) + 1; // edge constraints become vertex constraints
    TransferGraph a = trimmed(refine(sub, K));
    TransferGraph b = trimmed(refine(super, K));
    for (std::uint64_t code : a.blocks) {
        if (b.find_block(code) == TransferGraph::npos) return false;
    }
    return true;
}

std::string serialize_graph(const TransferGraph& g) {
    std::ostringstream out;
    out << "knead-graph " << g.m << " " << g.k << " " << g.blocks.size() << " " << g.edges.size() << "\n";
    for (std::size_t i = 0; i < g.blocks.size(); ++i) out << g.block_string(i) << "\n";
    for (auto [u, v] : g.edges) out << u << " " << v << "\n";
    return out.str();
}

TransferGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    TransferGraph g;
    std::size_t nv = 0, ne = 0;
    in >> magic >> g.m >> g.k >> nv >> ne;
    if (magic != "knead-graph" || !in) raise("syntax", "not a knead-graph serialization");
    for (std::size_t i = 0; i < nv; ++i) {
        std::string tok;
        in >> tok;
        if (!in) raise("syntax", "truncated vertex list");
        Word w;
        w.m = g.m;
        if (g.m <= 9) {
            for (char ch : tok) {
                if (ch < '0' || ch > '9') raise("syntax", "bad block digit");
                w.syms.push_back(ch - '0');
            }
        } else {
            std::size_t pos = 0;
            while (pos < tok.size()) {
                std::size_t comma = tok.find(',', pos);
                std::string t = tok.substr(pos, comma == std::string::npos ? tok.size() - pos : comma - pos);
                w.syms.push_back(std::stoi(t));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        if (static_cast<int>(w.syms.size()) != g.k) raise("syntax", "block length mismatch");
        g.blocks.push_back(encode_word(w));
    }
    for (std::size_t i = 0; i < ne; ++i) {
        std::uint32_t u, v;
        in >> u >> v;
        if (!in) raise("syntax", "truncated edge list");
        if (u >= nv || v >= nv) raise("syntax", "edge endpoint out of range");
        g.edges.emplace_back(u, v);
    }
    if (!std::is_sorted(g.blocks.begin(), g.blocks.end())) raise("syntax", "vertex blocks must be sorted");
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

} // namespace knead
