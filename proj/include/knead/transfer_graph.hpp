#ifndef KNEAD_TRANSFER_GRAPH_HPP
#define KNEAD_TRANSFER_GRAPH_HPP

#include "knead/enclosure.hpp"
#include "knead/seq.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace knead {

/// Execution policy for the data-parallel kernels. Serial and Parallel are
/// bit-identical by construction; the serial path is the reference the tests
/// and the benchmark compare against.
enum class ExecPolicy { Serial, Parallel };

/// Vertex set of allowed k-blocks with overlap edges: u -> v iff
/// u2..uk = v1..v_{k-1} and the joined (k+1)-block is allowed. Blocks are
/// stored as base-(m+1) codes in ascending order, so block order is the
/// lexicographic order on fixed-length words.
struct TransferGraph {
    int m = 1;
    int k = 1;
    std::vector<std::uint64_t> blocks;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::size_t vertex_count() const { return blocks.size(); }
    std::size_t edge_count() const { return edges.size(); }
    bool empty() const { return blocks.empty(); }

    Word block_word(std::size_t idx) const;
    std::string block_string(std::size_t idx) const;

    /// Index of a block code, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t find_block(std::uint64_t code) const;
};

std::uint64_t encode_word(const Word& w);
Word decode_word(std::uint64_t code, int m, int k);

/// Iteratively removes vertices with no incoming or no outgoing edge, so
/// every remaining vertex lies on a bi-infinite path. Entropy is unchanged.
TransferGraph trimmed(const TransferGraph& g);

/// Same shift space presented on blocks of length target_k >= g.k
/// (higher-block recoding).
TransferGraph refine(const TransferGraph& g, int target_k);

/// SFT from a finite set of forbidden factors, at block length
/// max(1, longest forbidden word - 1).
TransferGraph from_forbidden_words(int m, const std::vector<Word>& forbidden,
                                   std::uint64_t max_blocks = (1ull << 22));

struct PerronResult {
    Enclosure lambda;      // spectral radius of the trimmed graph
    bool has_cycle = false;
    std::size_t iterations = 0;
};

/// Certified spectral-radius enclosure: SCC condensation, then power
/// iteration with Collatz-Wielandt bounds on A + I per nontrivial component,
/// in exact integer/rational arithmetic. `entropy_tol` bounds the width of
/// ln(lambda). Graphs without cycles report has_cycle = false.
PerronResult perron_lambda(const TransferGraph& g, const Rational& entropy_tol,
                           ExecPolicy pol = ExecPolicy::Parallel);

struct EntropyEnclosure {
    Enclosure value;            // natural-log units
    std::size_t graph_size = 0; // vertex count after trimming
    int k = 0;                  // truncation depth
};

/// ln of the Perron enclosure; cycle-free (or empty) graphs yield [0, 0].
EntropyEnclosure perron_enclosure(const TransferGraph& g, const Rational& tol,
                                  ExecPolicy pol = ExecPolicy::Parallel);

/// True iff the shift space of `sub` is contained in the shift space of
/// `super`: both graphs are recoded one past the deeper block length (so
/// edge constraints become vertex constraints), trimmed, and the surviving
/// blocks of sub are looked up among super's.
bool sft_contains(const TransferGraph& sub, const TransferGraph& super);

/// Adjacency-list text format: header "knead-graph m k nv ne", one vertex
/// block per line, then one "u v" index pair per edge.
std::string serialize_graph(const TransferGraph& g);
TransferGraph parse_graph(const std::string& text);

/// w = (A + I) v in CSR form; the hot kernel behind perron_lambda. Exposed
/// for the equivalence tests and the benchmark.
void matvec_plus_identity(const std::vector<std::uint32_t>& offsets,
                          const std::vector<std::uint32_t>& targets,
                          const std::vector<mpz_class>& v, std::vector<mpz_class>& w,
                          ExecPolicy pol);

} // namespace knead

#endif
