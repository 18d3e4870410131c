#pragma once

#include <optional>
#include <variant>

#include "cremona/lattice.hpp"

namespace cremona {

// A plane system of dimension zero is a single curve; positive-dimensional
// systems behave differently at general points (multiplicity 0 instead of 1),
// which matters for elementary transformations at general points.
enum class SystemKind { Curve, System };

struct PlaneSystem {
    Int degree = 0;
    Cluster cluster;
    MultiplicityVector mult;
    SystemKind kind = SystemKind::Curve;
    bool irreducible = true;  // asserted, not certified
    bool degenerate = false;  // set when normalization had to discard fixed parts

    Int mult_of(const PointId& id) const;
};

struct HirzebruchSystem {
    Int n = 0;
    Int k = 0;
    Int h = 0; // class kE + hF
    Cluster cluster;
    MultiplicityVector mult;
    SystemKind kind = SystemKind::Curve;
    bool irreducible = true;
    bool degenerate = false;

    Int mult_of(const PointId& id) const;
};

using AnySystem = std::variant<PlaneSystem, HirzebruchSystem>;

BlowupLattice lattice_of(const PlaneSystem& s);
BlowupLattice lattice_of(const HirzebruchSystem& s);
DivisorClass class_of(const PlaneSystem& s);
DivisorClass class_of(const HirzebruchSystem& s);

void require_valid(const PlaneSystem& s, const std::string& context);
void require_valid(const HirzebruchSystem& s, const std::string& context);

// Plane: d(d+3)/2 - sum m_i(m_i+1)/2. Hirzebruch: (k+1)(h+1) - n k(k+1)/2 - 1
// - sum m_i(m_i+1)/2. Exact under the generic-position assumption, a lower
// bound otherwise.
Int virtual_dimension(const PlaneSystem& s);
Int virtual_dimension(const HirzebruchSystem& s);
Int virtual_dimension(const AnySystem& s);

Int arithmetic_genus(const PlaneSystem& s);
Int arithmetic_genus(const HirzebruchSystem& s);
Int arithmetic_genus(const AnySystem& s);

// Drops points whose shifted multiplicity becomes <= 0, unloads, prunes
// multiplicity-zero leaves. Empty (nullopt) when the degree part goes negative
// or the unloaded virtual dimension is negative.
std::optional<PlaneSystem> adjoint(const PlaneSystem& s, Int m);
std::optional<HirzebruchSystem> adjoint(const HirzebruchSystem& s, Int m);
std::optional<AnySystem> adjoint(const AnySystem& s, Int m);

// The shifted system regardless of its virtual dimension; nullopt only when
// the degree part goes negative. Effectivity of special systems is decided
// by the Zariski certificates in the classification layer.
std::optional<AnySystem> adjoint_unchecked(const AnySystem& s, Int m);

struct AdjointChain {
    std::vector<AnySystem> systems; // ad_0 = L, ad_1, ..., ad_m
    Int m = 0;                      // last nonempty index
    Int alpha = 0;                  // virtual dimension of ad_m
    bool generic_assumed = true;
};

AdjointChain adjoint_chain(const AnySystem& s);

// Kumar-Murthy: the pair presents the line case iff the first and second
// adjoints are both empty.
bool is_line_case(const AnySystem& s);

// Jung: d >= m1+m2+m3 with multiplicities sorted descending (missing ones 0).
bool is_noether_type(const PlaneSystem& s);

// All base points of multiplicity nu > k/2 (k = d - mult at the maximal
// point p) are infinitely near to p, and d - 3[k/2] > sum (nu_i - [k/2]).
bool is_admissible(const PlaneSystem& s);

// Maximal-multiplicity point; proper points win ties, then cluster order.
std::optional<PointId> max_mult_point(const PlaneSystem& s);

// Removes multiplicity-zero childless points that no group or proximity
// reference needs, and drops vacuous collinear groups.
void prune_zero_points(Cluster& c, MultiplicityVector& m);

// Canonical structural signature: equal up to renaming of point ids.
std::string canonical_signature(const PlaneSystem& s);
std::string canonical_signature(const HirzebruchSystem& s);

PlaneSystem scaled(const PlaneSystem& s, Int factor);

} // namespace cremona
