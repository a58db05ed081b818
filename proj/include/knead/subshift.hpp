#ifndef KNEAD_SUBSHIFT_HPP
#define KNEAD_SUBSHIFT_HPP

#include "knead/beta.hpp"
#include "knead/transfer_graph.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace knead {

/// The survivor-set constraint: all tails stay in [c, d].
struct IntervalConstraint {
    Seq c;
    Seq d;
    int m = 1;

    static IntervalConstraint make(Seq c, Seq d);
};

std::uint64_t default_max_blocks(); // KNEAD_MAX_BLOCKS, default 2^22

/// All k-blocks whose suffix windows sit between the equal-length prefixes of
/// c and d (window equal to a bound prefix admissible: extendability cannot
/// be refuted at finite depth). Equals the brute-force filter over all
/// (m+1)^k words.
std::vector<Word> allowed_blocks(const IntervalConstraint& ic, int k,
                                 ExecPolicy pol = ExecPolicy::Parallel,
                                 std::uint64_t max_blocks = default_max_blocks());

/// Depth-k outer truncation: its shift space contains the survivor set, and
/// its entropy is nonincreasing in k. Trimmed.
TransferGraph outer_sft(const IntervalConstraint& ic, int k,
                        ExecPolicy pol = ExecPolicy::Parallel,
                        std::uint64_t max_blocks = default_max_blocks());

/// Depth-k inner truncation: windows that merely reach a bound prefix are cut
/// (a full-depth window equal to the c-prefix stays admissible when c ends in
/// 0^inf within the window, where the comparison is already decided). Its
/// shift space is contained in the survivor set; entropy nondecreasing in k.
TransferGraph inner_sft(const IntervalConstraint& ic, int k,
                        ExecPolicy pol = ExecPolicy::Parallel,
                        std::uint64_t max_blocks = default_max_blocks());

enum class CriticalClass { Empty, Zero, Positive };

const char* to_string(CriticalClass c);

struct CriticalResult {
    CriticalClass cls = CriticalClass::Empty;
    Seq normalized_d;                      // d, or the minimal kneading sequence above it
    int witness_run = 0;                   // n of the witness run-length SFT
    std::optional<TransferGraph> witness;  // present when positive
    std::optional<Enclosure> witness_entropy;
};

/// Critical-point classification against the threshold (c1+1) c1^inf:
/// empty when d1 = c1 (the alphabet collapses), zero at or below the
/// threshold, positive above it, with a run-length witness SFT of certified
/// positive entropy. Non-kneading d is replaced by the minimal kneading
/// sequence above it (the survivor dimensions agree); pass normalize = false
/// to reject such d instead.
CriticalResult classify_critical(const IntervalConstraint& ic, bool normalize = true,
                                 const Rational& witness_tol = Rational(1, 1000000));

struct DimensionStep {
    int k = 0;
    Enclosure inner_entropy;
    Enclosure outer_entropy;
    std::size_t inner_vertices = 0;
    std::size_t outer_vertices = 0;
};

struct DimensionOptions {
    Rational tol = Rational(1, 1000);
    int k_cap = 0;                  // 0: default cap for the alphabet
    std::uint64_t max_blocks = 0;   // 0: KNEAD_MAX_BLOCKS
    ExecPolicy pol = ExecPolicy::Parallel;
};

struct DimensionResult {
    Enclosure value;
    int k_reached = 0;
    bool converged = false;
    CriticalClass cls = CriticalClass::Positive;
    std::vector<DimensionStep> steps;
};

int default_k_cap(int m);

/// Certified dimension of the survivor set in base m+1: refines the
/// inner/outer sandwich over k until the enclosure width reaches tol or the
/// depth cap; the true dimension always lies in the returned enclosure.
/// Classes empty/zero return [0, 0] directly from the critical-point
/// criterion (the depth-k sandwich upper bound converges, but too slowly to
/// be useful there).
DimensionResult dimension(const IntervalConstraint& ic, const DimensionOptions& opt = {});

struct EqualityRow {
    int k = 0;
    Enclosure ratio;
    Enclosure scaled;
    Rational gap; // survivor-side upper bound minus scaled lower bound
};

struct EqualityReport {
    DimensionResult survivor;
    Enclosure ambient;
    FamilyKind family = FamilyKind::Full;
    std::vector<EqualityRow> rows;
};

/// Side-by-side run of the survivor-set enclosure and the right-endpoint
/// lower-bound ladder, scaled by the ambient beta-shift dimension
/// ln(beta_d)/ln(m+1). The certified gap between the two shrinks in k.
EqualityReport equality_experiment(const IntervalConstraint& ic, const Rational& tol, int k_max,
                                   const DimensionOptions& opt = {});

} // namespace knead

#endif
