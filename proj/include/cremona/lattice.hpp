#pragma once

#include <vector>

#include "cremona/cluster.hpp"

namespace cremona {

enum class SurfaceBase { P2, Fn };

// Picard lattice of a blow-up of P^2 or of a Hirzebruch surface F_n at the
// points of a cluster. Basis: (H, Z_1..Z_r) for the plane, (E, F, Z_1..Z_r)
// for F_n, where the Z_i are total transforms of the exceptional curves.
// Intersection form: H^2=1; E^2=-n, E.F=1, F^2=0; Z_i^2=-1; mixed products 0.
struct BlowupLattice {
    SurfaceBase base = SurfaceBase::P2;
    Int n = 0; // only for Fn
    Cluster cluster;

    size_t rank() const { return (base == SurfaceBase::P2 ? 1 : 2) + cluster.nodes.size(); }
    size_t z_offset() const { return base == SurfaceBase::P2 ? 1 : 2; }
    size_t z_index(const PointId& id) const;
};

struct DivisorClass {
    std::vector<Int> c;

    bool operator==(const DivisorClass&) const = default;
    bool is_zero() const;
    DivisorClass operator-(const DivisorClass& o) const;
    DivisorClass operator+(const DivisorClass& o) const;
};

DivisorClass zero_class(const BlowupLattice& L);
DivisorClass plane_class(const BlowupLattice& L, Int degree, const MultiplicityVector& m);
DivisorClass hirzebruch_class(const BlowupLattice& L, Int k, Int h, const MultiplicityVector& m);

Int intersect(const BlowupLattice& L, const DivisorClass& a, const DivisorClass& b);

// -3H + sum Z_i on plane blow-ups; -2E - (2+n)F + sum Z_i on F_n blow-ups.
DivisorClass canonical_class(const BlowupLattice& L);

// Arithmetic genus by adjunction: 1 + (D^2 + D.K)/2.
Int genus(const BlowupLattice& L, const DivisorClass& D);

// E'_i = Z_i - sum_j q_ij Z_j with q_ij = 1 iff p_j proximate to p_i.
std::vector<DivisorClass> strict_exceptional_classes(const BlowupLattice& L);

// The pure class D' = D - sum h_i E'_i with D'.E'_i >= 0 for all i and the
// h_i >= 0 minimal, found by repeated subtraction.
DivisorClass effective_multiplicities_oracle(const BlowupLattice& L, const DivisorClass& D);

} // namespace cremona
