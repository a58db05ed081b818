#ifndef KNEAD_CIRCLE_HPP
#define KNEAD_CIRCLE_HPP

#include "knead/enclosure.hpp"
#include "knead/transfer_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace knead {

struct AffineBranch {
    Rational slope;
    Rational intercept;
};

/// Full-branch expanding Markov map of the circle with rational data: each
/// branch maps its fundamental interval [x_{i-1}, x_i) affinely onto [0, 1)
/// with slope >= gamma > 1. Orientation-reversing branches are rejected.
struct PiecewiseLinearMarkovMap {
    std::vector<Rational> breakpoints; // 0 = x_0 < ... < x_d = 1
    std::vector<AffineBranch> branches;

    int alphabet_bound() const { return static_cast<int>(branches.size()) - 1; }
    Rational expansion() const; // gamma = min slope

    /// Branch index containing x under the half-open convention.
    int branch_of(const Rational& x) const;
    Rational apply(const Rational& x) const;
    /// Inverse of branch i on [0, 1].
    Rational inverse(int branch, const Rational& y) const;

    static PiecewiseLinearMarkovMap doubling();
    static PiecewiseLinearMarkovMap linear_full(int m); // x -> (m+1) x mod 1

    /// Map definition file: {"m": 1, "breakpoints": ["0","1/2","1"],
    /// "branches": [{"slope":"2","intercept":"0"}, ...]} with rationals as
    /// "p/q" or decimal strings.
    static PiecewiseLinearMarkovMap from_json(const std::string& text);
    std::string to_json() const;
};

struct Arc {
    Rational lo;
    Rational hi;
};

/// Finite union of closed circle arcs with exact rational endpoints, stored
/// normalized: sorted, pairwise disjoint, inside [0, 1]. The seam 0 == 1 is
/// handled by the metric operations.
struct IntervalCover {
    int depth = 0;
    std::vector<Arc> arcs;

    static IntervalCover make(int depth, std::vector<Arc> raw); // normalizes
    bool empty() const { return arcs.empty(); }
    Rational total_length() const;
    bool contains_point(const Rational& x) const;
    std::string to_json() const;
};

/// k-symbol itinerary of x in exact arithmetic (half-open convention at
/// breakpoints).
Word itinerary(const PiecewiseLinearMarkovMap& f, const Rational& x, int k);

/// Nested-interval enclosure of the points with the given itinerary; width
/// <= gamma^-k.
Enclosure decode(const PiecewiseLinearMarkovMap& f, const Word& w);

/// Exact decoded point of an eventually periodic itinerary (affine
/// fixed-point equation).
Enclosure decode(const PiecewiseLinearMarkovMap& f, const Seq& s);

/// Conjugacy h = chi_g o chi_f^{-1} evaluated through a depth-k itinerary;
/// both maps must have the same number of fundamental intervals.
Enclosure conjugacy_eval(const PiecewiseLinearMarkovMap& f, const PiecewiseLinearMarkovMap& g,
                         const Rational& x, int k);

/// Union of the depth-k cylinder intervals of the graph's extendable blocks.
IntervalCover sft_cover(const PiecewiseLinearMarkovMap& f, const TransferGraph& g);

/// Exact image of a cover under the map composed with a rigid rotation eps.
IntervalCover map_image_cover(const PiecewiseLinearMarkovMap& f, const Rational& eps,
                              const IntervalCover& cov);

/// Exact minimum circle distance between two arc unions (0 when they meet).
Rational cover_min_distance(const IntervalCover& a, const IntervalCover& b);

/// inner subseteq outer as point sets on the circle.
bool cover_contains(const IntervalCover& inner, const IntervalCover& outer);

/// Exact Hausdorff distance between two nonempty arc unions under d_[0,1).
Enclosure hausdorff_distance(const IntervalCover& a, const IntervalCover& b);

enum class JointVerdict { CertifiedDisjoint, OverlapWitness, Inconclusive };

const char* to_string(JointVerdict v);

struct JointResult {
    JointVerdict verdict = JointVerdict::Inconclusive;
    std::optional<Rational> gap;                 // certified_disjoint
    std::optional<Rational> witness_point;       // overlap: periodic point p in K
    std::optional<Rational> witness_preimage;    // q in K with f(q) + eps = p
};

/// Certified check of (f + eps)(K) against K for the SFT realized by
/// `target`: positive cover distance certifies disjointness; an exactly
/// computed periodic point of K that is the shifted image of a point of K is
/// an overlap witness; otherwise inconclusive (refine the depth).
JointResult joint_check(const PiecewiseLinearMarkovMap& f, const TransferGraph& target,
                        const Rational& eps, int depth, int max_period = 8);

struct MaximalityResult {
    Rational epsilon;
    IntervalCover neighborhood;
    int r0 = 0;               // forbidden-word depth used
    Rational min_cylinder;    // minimal allowed-cylinder diameter at r0
};

/// The maximality neighborhood of an SFT: epsilon is a third of the minimal
/// allowed-cylinder diameter at the forbidden-word depth, and the
/// neighborhood extends each allowed cylinder on exactly the sides adjacent
/// to forbidden words. Any invariant SFT whose cover fits inside it is
/// contained in sigma.
MaximalityResult maximality_epsilon(const TransferGraph& sigma, const PiecewiseLinearMarkovMap& f);

} // namespace knead

#endif
