#include "cremona/systems.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace cremona {

Int PlaneSystem::mult_of(const PointId& id) const {
    auto it = mult.find(id);
    return it == mult.end() ? 0 : it->second;
}

Int HirzebruchSystem::mult_of(const PointId& id) const {
    auto it = mult.find(id);
    return it == mult.end() ? 0 : it->second;
}

BlowupLattice lattice_of(const PlaneSystem& s) { return BlowupLattice{SurfaceBase::P2, 0, s.cluster}; }

BlowupLattice lattice_of(const HirzebruchSystem& s) {
    return BlowupLattice{SurfaceBase::Fn, s.n, s.cluster};
}

DivisorClass class_of(const PlaneSystem& s) { return plane_class(lattice_of(s), s.degree, s.mult); }

DivisorClass class_of(const HirzebruchSystem& s) {
    return hirzebruch_class(lattice_of(s), s.k, s.h, s.mult);
}

static void require_mult_keys(const Cluster& c, const MultiplicityVector& m,
                              const std::string& context) {
    if (m.size() != c.nodes.size())
        throw ValidationError(context + ": multiplicity keys do not match cluster points");
    for (const auto& [id, _] : m)
        if (!c.has(id)) throw ValidationError(context + ": multiplicity for unknown id '" + id + "'");
}

void require_valid(const PlaneSystem& s, const std::string& context) {
    require_valid(s.cluster, context);
    require_mult_keys(s.cluster, s.mult, context);
    if (s.degree < 0) throw ValidationError(context + ": negative degree");
}

void require_valid(const HirzebruchSystem& s, const std::string& context) {
    require_valid(s.cluster, context);
    require_mult_keys(s.cluster, s.mult, context);
    if (s.n < 0) throw ValidationError(context + ": negative Hirzebruch index");
}

Int virtual_dimension(const PlaneSystem& s) {
    Int v = checked_mul(s.degree, s.degree + 3) / 2;
    for (const auto& [_, m] : s.mult) v -= checked_mul(m, m + 1) / 2;
    return v;
}

Int virtual_dimension(const HirzebruchSystem& s) {
    Int v = checked_mul(s.k + 1, s.h + 1) - checked_mul(s.n, checked_mul(s.k, s.k + 1)) / 2 - 1;
    for (const auto& [_, m] : s.mult) v -= checked_mul(m, m + 1) / 2;
    return v;
}

Int virtual_dimension(const AnySystem& s) {
    return std::visit([](const auto& x) { return virtual_dimension(x); }, s);
}

Int arithmetic_genus(const PlaneSystem& s) { return genus(lattice_of(s), class_of(s)); }
Int arithmetic_genus(const HirzebruchSystem& s) { return genus(lattice_of(s), class_of(s)); }
Int arithmetic_genus(const AnySystem& s) {
    return std::visit([](const auto& x) { return arithmetic_genus(x); }, s);
}

void prune_zero_points(Cluster& c, MultiplicityVector& m) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = c.nodes.size(); i-- > 0;) {
            const PointId id = c.nodes[i].id;
            if (m.at(id) != 0) continue;
            if (!c.children_of(id).empty()) continue;
            if (!c.proximate_points_of(id).empty()) continue;
            m.erase(id);
            c.nodes.erase(c.nodes.begin() + i);
            for (auto& g : c.collinear) g.erase(std::remove(g.begin(), g.end(), id), g.end());
            changed = true;
        }
    }
    // A group is vacuous once it constrains at most two proper points.
    for (size_t gi = c.collinear.size(); gi-- > 0;) {
        auto& g = c.collinear[gi];
        bool has_near = false;
        for (const auto& id : g)
            if (c.has(id) && !c.is_proper(id)) has_near = true;
        if (g.size() < 3 && !has_near) c.collinear.erase(c.collinear.begin() + gi);
    }
}

static MultiplicityVector shifted_mults(const Cluster& c, const MultiplicityVector& mult, Int m) {
    MultiplicityVector out;
    for (const auto& n : c.nodes) {
        Int v = mult.at(n.id) - m;
        out[n.id] = v > 0 ? v : 0;
    }
    return out;
}

std::optional<PlaneSystem> adjoint(const PlaneSystem& s, Int m) {
    if (m < 1) throw ValidationError("adjoint order must be >= 1");
    PlaneSystem out = s;
    out.degree = s.degree - 3 * m;
    if (out.degree < 0) return std::nullopt;
    out.mult = shifted_mults(s.cluster, s.mult, m);
    out.mult = unload(out.cluster, out.mult);
    prune_zero_points(out.cluster, out.mult);
    if (virtual_dimension(out) < 0) return std::nullopt;
    out.kind = SystemKind::System;
    return out;
}

std::optional<HirzebruchSystem> adjoint(const HirzebruchSystem& s, Int m) {
    if (m < 1) throw ValidationError("adjoint order must be >= 1");
    HirzebruchSystem out = s;
    out.k = s.k - 2 * m;
    out.h = s.h - (2 + s.n) * m;
    if (out.k < 0 || out.h < 0) return std::nullopt;
    out.mult = shifted_mults(s.cluster, s.mult, m);
    out.mult = unload(out.cluster, out.mult);
    prune_zero_points(out.cluster, out.mult);
    if (virtual_dimension(out) < 0) return std::nullopt;
    out.kind = SystemKind::System;
    return out;
}

std::optional<AnySystem> adjoint(const AnySystem& s, Int m) {
    return std::visit([&](const auto& x) -> std::optional<AnySystem> {
        auto a = adjoint(x, m);
        if (!a) return std::nullopt;
        return AnySystem{*a};
    }, s);
}

std::optional<AnySystem> adjoint_unchecked(const AnySystem& s, Int m) {
    if (m < 1) throw ValidationError("adjoint order must be >= 1");
    if (const auto* ps = std::get_if<PlaneSystem>(&s)) {
        PlaneSystem out = *ps;
        out.degree = ps->degree - 3 * m;
        if (out.degree < 0) return std::nullopt;
        out.mult = shifted_mults(ps->cluster, ps->mult, m);
        out.mult = unload(out.cluster, out.mult);
        prune_zero_points(out.cluster, out.mult);
        out.kind = SystemKind::System;
        return AnySystem{out};
    }
    const auto& hs = std::get<HirzebruchSystem>(s);
    HirzebruchSystem out = hs;
    out.k = hs.k - 2 * m;
    out.h = hs.h - (2 + hs.n) * m;
    if (out.k < 0 || out.h < 0) return std::nullopt;
    out.mult = shifted_mults(hs.cluster, hs.mult, m);
    out.mult = unload(out.cluster, out.mult);
    prune_zero_points(out.cluster, out.mult);
    out.kind = SystemKind::System;
    return AnySystem{out};
}

AdjointChain adjoint_chain(const AnySystem& s) {
    AdjointChain chain;
    chain.systems.push_back(s);
    Int guard = 0;
    std::visit([&](const auto& x) { guard = (x.cluster.nodes.size() + 2) * 16; }, s);
    if (auto d0 = std::visit([](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PlaneSystem>) return x.degree;
            else return x.k + x.h;
        }, s); d0 >= 0)
        guard += d0;
    while (true) {
        auto next = adjoint(chain.systems.back(), 1);
        if (!next) break;
        chain.systems.push_back(*next);
        if (static_cast<Int>(chain.systems.size()) > guard + 2)
            throw InternalError("adjoint chain did not terminate");
    }
    chain.m = static_cast<Int>(chain.systems.size()) - 1;
    chain.alpha = virtual_dimension(chain.systems.back());
    return chain;
}

bool is_line_case(const AnySystem& s) {
    return !adjoint(s, 1).has_value() && !adjoint(s, 2).has_value();
}

bool is_noether_type(const PlaneSystem& s) {
    std::vector<Int> ms;
    for (const auto& [_, m] : s.mult) ms.push_back(m);
    std::sort(ms.begin(), ms.end(), std::greater<>());
    ms.resize(std::max<size_t>(ms.size(), 3), 0);
    return s.degree >= ms[0] + ms[1] + ms[2];
}

std::optional<PointId> max_mult_point(const PlaneSystem& s) {
    std::optional<PointId> best;
    Int best_m = -1;
    bool best_proper = false;
    for (const auto& n : s.cluster.nodes) {
        Int m = s.mult_of(n.id);
        bool proper = !n.predecessor.has_value();
        if (m > best_m || (m == best_m && proper && !best_proper)) {
            best = n.id;
            best_m = m;
            best_proper = proper;
        }
    }
    return best;
}

bool is_admissible(const PlaneSystem& s) {
    auto p = max_mult_point(s);
    if (!p) throw ValidationError("is_admissible: system has no base points");
    Int k = s.degree - s.mult_of(*p);
    // Doubled arithmetic: the condition is stated for even k and extended to
    // odd k through the double of the system, which makes admissibility
    // invariant under taking multiples.
    Int excess2 = 0;
    for (const auto& n : s.cluster.nodes) {
        if (n.id == *p) continue;
        Int nu = s.mult_of(n.id);
        if (2 * nu <= k) continue;
        auto anc = s.cluster.ancestors_of(n.id);
        if (std::find(anc.begin(), anc.end(), *p) == anc.end()) return false;
        excess2 += 2 * nu - k;
    }
    return 2 * s.degree - 3 * k > excess2;
}

PlaneSystem scaled(const PlaneSystem& s, Int factor) {
    PlaneSystem out = s;
    out.degree = checked_mul(s.degree, factor);
    for (auto& [_, m] : out.mult) m = checked_mul(m, factor);
    out.kind = SystemKind::System;
    return out;
}

// ---------------------------------------------------------------------------
// Canonical signatures
// ---------------------------------------------------------------------------

namespace {

struct SigBuilder {
    const Cluster& c;
    const MultiplicityVector& mult;
    std::map<PointId, int> canon_index;

    std::string node_sig(const PointId& id) {
        const PointNode& n = c.at(id);
        std::ostringstream os;
        os << "(m" << (mult.count(id) ? mult.at(id) : 0);
        if (n.flags.on_E) os << "E";
        if (n.flags.on_fiber_strict) os << "T";
        // Satellite target encoded as the number of steps up the predecessor
        // chain, which is rename-invariant.
        for (const auto& t : n.proximate_to) {
            if (n.predecessor && t == *n.predecessor) continue;
            auto anc = c.ancestors_of(id);
            auto it = std::find(anc.begin(), anc.end(), t);
            os << "@" << (it == anc.end() ? -1 : static_cast<int>(it - anc.begin()) + 1);
        }
        std::vector<std::string> kids;
        for (const auto& ch : c.children_of(id)) kids.push_back(node_sig(ch));
        std::sort(kids.begin(), kids.end());
        for (const auto& k : kids) os << k;
        os << ")";
        return os.str();
    }
};

std::string cluster_signature(const Cluster& c, const MultiplicityVector& mult) {
    SigBuilder b{c, mult, {}};
    struct Root {
        std::string sig;
        PointId id;
        std::optional<std::string> fiber;
    };
    std::vector<Root> roots;
    for (const auto& n : c.nodes)
        if (!n.predecessor) roots.push_back({b.node_sig(n.id), n.id, n.flags.fiber});
    // Points sharing a fiber must sort together so fiber structure is
    // rename-invariant; encode shared fibers by the sorted member signatures.
    std::map<std::string, std::vector<std::string>> fibers;
    for (const auto& r : roots)
        if (r.fiber) fibers[*r.fiber].push_back(r.sig);
    std::vector<std::string> fiber_sigs;
    for (auto& [_, v] : fibers)
        if (v.size() > 1) {
            std::sort(v.begin(), v.end());
            std::string s = "{f:";
            for (const auto& x : v) s += x;
            fiber_sigs.push_back(s + "}");
        }
    std::vector<std::string> root_sigs;
    for (const auto& r : roots) root_sigs.push_back(r.sig);
    std::sort(root_sigs.begin(), root_sigs.end());
    std::sort(fiber_sigs.begin(), fiber_sigs.end());

    // Collinear groups: sorted lists of member node signatures. Signatures of
    // distinct points can coincide, which only weakens canonicity, never
    // soundness of equality checks used for memoization.
    std::vector<std::string> group_sigs;
    for (const auto& g : c.collinear) {
        std::vector<std::string> mem;
        for (const auto& id : g)
            if (c.has(id)) mem.push_back(b.node_sig(id));
        std::sort(mem.begin(), mem.end());
        std::string s = "{l:";
        for (const auto& x : mem) s += x;
        group_sigs.push_back(s + "}");
    }
    std::sort(group_sigs.begin(), group_sigs.end());

    std::string out;
    for (const auto& s : root_sigs) out += s;
    for (const auto& s : fiber_sigs) out += s;
    for (const auto& s : group_sigs) out += s;
    return out;
}

} // namespace

std::string canonical_signature(const PlaneSystem& s) {
    std::ostringstream os;
    os << "P2:d" << s.degree << ":" << cluster_signature(s.cluster, s.mult);
    return os.str();
}

std::string canonical_signature(const HirzebruchSystem& s) {
    std::ostringstream os;
    os << "F" << s.n << ":k" << s.k << ":h" << s.h << ":" << cluster_signature(s.cluster, s.mult);
    return os.str();
}

} // namespace cremona
