#include "cremona/lattice.hpp"

namespace cremona {

size_t BlowupLattice::z_index(const PointId& id) const {
    int i = cluster.index_of(id);
    if (i < 0) throw ValidationError("lattice: unknown point id '" + id + "'");
    return z_offset() + static_cast<size_t>(i);
}

bool DivisorClass::is_zero() const {
    for (Int v : c)
        if (v != 0) return false;
    return true;
}

DivisorClass DivisorClass::operator-(const DivisorClass& o) const {
    if (c.size() != o.c.size()) throw InternalError("divisor class dimension mismatch");
    DivisorClass r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = checked_add(r.c[i], -o.c[i]);
    return r;
}

DivisorClass DivisorClass::operator+(const DivisorClass& o) const {
    if (c.size() != o.c.size()) throw InternalError("divisor class dimension mismatch");
    DivisorClass r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = checked_add(r.c[i], o.c[i]);
    return r;
}

DivisorClass zero_class(const BlowupLattice& L) { return DivisorClass{std::vector<Int>(L.rank(), 0)}; }

static void fill_mults(const BlowupLattice& L, DivisorClass& D, const MultiplicityVector& m) {
    for (const auto& [id, v] : m) D.c[L.z_index(id)] = -v;
}

DivisorClass plane_class(const BlowupLattice& L, Int degree, const MultiplicityVector& m) {
    if (L.base != SurfaceBase::P2) throw InternalError("plane_class on a Hirzebruch lattice");
    DivisorClass D = zero_class(L);
    D.c[0] = degree;
    fill_mults(L, D, m);
    return D;
}

DivisorClass hirzebruch_class(const BlowupLattice& L, Int k, Int h, const MultiplicityVector& m) {
    if (L.base != SurfaceBase::Fn) throw InternalError("hirzebruch_class on a plane lattice");
    DivisorClass D = zero_class(L);
    D.c[0] = k;
    D.c[1] = h;
    fill_mults(L, D, m);
    return D;
}

Int intersect(const BlowupLattice& L, const DivisorClass& a, const DivisorClass& b) {
    if (a.c.size() != L.rank() || b.c.size() != L.rank())
        throw ValidationError("divisor class dimension does not match lattice rank");
    Int total = 0;
    if (L.base == SurfaceBase::P2) {
        total = checked_mul(a.c[0], b.c[0]);
    } else {
        // (kE+hF).(k'E+h'F) = -n k k' + k h' + h k'
        total = checked_add(checked_mul(-L.n, checked_mul(a.c[0], b.c[0])),
                            checked_add(checked_mul(a.c[0], b.c[1]), checked_mul(a.c[1], b.c[0])));
    }
    for (size_t i = L.z_offset(); i < L.rank(); ++i)
        total = checked_add(total, -checked_mul(a.c[i], b.c[i]));
    return total;
}

DivisorClass canonical_class(const BlowupLattice& L) {
    DivisorClass K = zero_class(L);
    if (L.base == SurfaceBase::P2) {
        K.c[0] = -3;
    } else {
        K.c[0] = -2;
        K.c[1] = -(2 + L.n);
    }
    for (size_t i = L.z_offset(); i < L.rank(); ++i) K.c[i] = 1;
    return K;
}

Int genus(const BlowupLattice& L, const DivisorClass& D) {
    Int dd = intersect(L, D, D);
    Int dk = intersect(L, D, canonical_class(L));
    Int s = checked_add(dd, dk);
    if (s % 2 != 0) throw InternalError("adjunction sum is odd");
    return 1 + s / 2;
}

std::vector<DivisorClass> strict_exceptional_classes(const BlowupLattice& L) {
    std::vector<DivisorClass> out;
    for (const auto& n : L.cluster.nodes) {
        DivisorClass e = zero_class(L);
        e.c[L.z_index(n.id)] = 1;
        for (const auto& j : L.cluster.proximate_points_of(n.id)) e.c[L.z_index(j)] = -1;
        out.push_back(e);
    }
    return out;
}

DivisorClass effective_multiplicities_oracle(const BlowupLattice& L, const DivisorClass& D) {
    if (D.c.empty() || D.c[0] < 0)
        throw ValidationError("effective multiplicities oracle needs a non-negative degree part");
    auto excs = strict_exceptional_classes(L);
    DivisorClass cur = D;
    Int bound = 1;
    for (size_t i = L.z_offset(); i < L.rank(); ++i)
        bound = checked_add(bound, checked_mul(cur.c[i], cur.c[i]));
    for (Int it = 0; it <= bound; ++it) {
        bool changed = false;
        for (const auto& e : excs) {
            if (intersect(L, cur, e) < 0) {
                cur = cur - e;
                changed = true;
                break;
            }
        }
        if (!changed) return cur;
    }
    throw InternalError("effective multiplicities oracle exceeded its iteration bound");
}

} // namespace cremona
