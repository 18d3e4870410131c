#include "cremona/transforms.hpp"

#include <algorithm>
#include <set>

namespace cremona {

bool is_homaloidal(const PlaneSystem& net) {
    require_valid(net, "is_homaloidal");
    Int d = net.degree;
    Int sum = 0, sumsq = 0;
    for (const auto& [_, a] : net.mult) {
        sum = checked_add(sum, a);
        sumsq = checked_add(sumsq, checked_mul(a, a));
        if (a < 0) return false;
    }
    if (checked_mul(d, d) - 1 != sumsq) return false;
    if (3 * (d - 1) != sum) return false;
    for (const auto& [_, def] : proximity_defects(net.cluster, net.mult))
        if (def < 0) return false;
    return true;
}

PointId net_base_point(const PlaneSystem& net) {
    std::optional<PointId> best;
    Int best_m = -1;
    for (const auto& n : net.cluster.nodes) {
        if (n.predecessor) continue;
        Int m = net.mult_of(n.id);
        if (m > best_m) {
            best = n.id;
            best_m = m;
        }
    }
    if (!best) throw ValidationError("net has no proper base point");
    // The maximal multiplicity always sits at a proper point: proximity forces
    // equality along the predecessor chain of any maximal point.
    for (const auto& [_, a] : net.mult)
        if (a > best_m) throw InternalError("maximal net multiplicity at an infinitely near point only");
    return *best;
}

Simplicity simplicity(const PlaneSystem& net) {
    PointId p0 = net_base_point(net);
    Int d = net.degree;
    Int a0 = net.mult_of(p0);
    Simplicity out{d - a0, 0, 0};
    for (const auto& n : net.cluster.nodes) {
        if (n.id == p0) continue;
        if (2 * net.mult_of(n.id) > out.k) {
            out.h += 1;
            bool prox_p0 = std::find(n.proximate_to.begin(), n.proximate_to.end(), p0) !=
                           n.proximate_to.end();
            if (prox_p0 && n.predecessor && *n.predecessor != p0) out.s += 1;
        }
    }
    return out;
}

void validate_anchoring(const PlaneSystem& L, const PlaneSystem& net, const NetAnchoring& a) {
    std::set<PointId> used;
    for (const auto& [np, sp] : a.map) {
        if (!net.cluster.has(np)) throw ValidationError("anchor references unknown net point '" + np + "'");
        if (!L.cluster.has(sp)) throw ValidationError("anchor references unknown system point '" + sp + "'");
        if (!used.insert(sp).second) throw ValidationError("anchoring is not injective at '" + sp + "'");
    }
    for (const auto& [np, sp] : a.map) {
        const PointNode& nn = net.cluster.at(np);
        const PointNode& sn = L.cluster.at(sp);
        if (nn.predecessor) {
            auto it = a.map.find(*nn.predecessor);
            if (it == a.map.end())
                throw ValidationError("anchored point '" + np + "' has an unanchored predecessor");
            if (!sn.predecessor || *sn.predecessor != it->second)
                throw ValidationError("anchoring does not preserve the predecessor of '" + np + "'");
        } else if (sn.predecessor) {
            throw ValidationError("proper net point '" + np + "' anchored to an infinitely near point");
        }
        for (const auto& t : nn.proximate_to) {
            auto it = a.map.find(t);
            if (it == a.map.end()) continue;
            if (std::find(sn.proximate_to.begin(), sn.proximate_to.end(), it->second) ==
                sn.proximate_to.end())
                throw ValidationError("anchoring does not preserve proximity of '" + np + "'");
        }
    }
}

Int virtual_image_degree(const PlaneSystem& L, const PlaneSystem& net, const NetAnchoring& a) {
    validate_anchoring(L, net, a);
    Int total = checked_mul(L.degree, net.degree);
    for (const auto& [np, sp] : a.map)
        total = checked_add(total, -checked_mul(net.mult_of(np), L.mult_of(sp)));
    return total;
}

// ---------------------------------------------------------------------------
// Quadratic transformations
// ---------------------------------------------------------------------------

namespace {

enum class QuadPattern { Proper, Tangent, Osculating }; // A, B, C

struct QuadContext {
    PlaneSystem sys; // working copy with fresh centers materialized
    std::array<PointId, 3> c;
    QuadPattern pattern = QuadPattern::Proper;
    std::array<PointId, 3> q; // new fundamental points: q[i] opposite c[j],c[k]

    int center_index(const PointId& id) const {
        for (int i = 0; i < 3; ++i)
            if (c[i] == id) return i;
        return -1;
    }
};

PointId materialize_center(PlaneSystem& sys, const CenterSpec& spec, const char* role) {
    switch (spec.kind) {
        case CenterSpec::Kind::Existing:
            if (!sys.cluster.has(spec.id))
                throw ValidationError(std::string("quadratic center (") + role + ") unknown id '" +
                                      spec.id + "'");
            return spec.id;
        case CenterSpec::Kind::FreshProper: {
            PointId id = sys.cluster.fresh_id("x");
            PointNode n;
            n.id = id;
            n.flags.general = true;
            sys.cluster.nodes.push_back(n);
            sys.mult[id] = spec.fresh_mult;
            return id;
        }
        case CenterSpec::Kind::FreshNear: {
            if (!sys.cluster.has(spec.near_of))
                throw ValidationError("fresh near-point center over unknown id '" + spec.near_of + "'");
            PointId id = sys.cluster.fresh_id("t");
            PointNode n;
            n.id = id;
            n.predecessor = spec.near_of;
            n.proximate_to = {spec.near_of};
            n.flags.general = true;
            sys.cluster.nodes.push_back(n);
            sys.mult[id] = spec.fresh_mult;
            return id;
        }
    }
    throw InternalError("unreachable center kind");
}

bool in_some_group(const Cluster& cl, const std::vector<PointId>& members) {
    for (const auto& g : cl.collinear) {
        bool all = true;
        for (const auto& m : members)
            if (!cl.in_group(g, m)) all = false;
        if (all) return true;
    }
    return false;
}

// Index of the (unique) group containing all of `members`, -1 if none.
int group_with(const Cluster& cl, const std::vector<PointId>& members) {
    int found = -1;
    for (size_t gi = 0; gi < cl.collinear.size(); ++gi) {
        bool all = true;
        for (const auto& m : members)
            if (!cl.in_group(cl.collinear[gi], m)) all = false;
        if (all) {
            if (found >= 0) throw ValidationError("points lie in two distinct collinear groups");
            found = static_cast<int>(gi);
        }
    }
    return found;
}

QuadContext detect_pattern(const PlaneSystem& L, const std::array<CenterSpec, 3>& centers) {
    QuadContext ctx;
    ctx.sys = L;
    const char* roles[3] = {"first", "second", "third"};
    std::array<PointId, 3> raw;
    for (int i = 0; i < 3; ++i) raw[i] = materialize_center(ctx.sys, centers[i], roles[i]);
    if (raw[0] == raw[1] || raw[0] == raw[2] || raw[1] == raw[2])
        throw ValidationError("quadratic centers must be three distinct points");

    const Cluster& cl = ctx.sys.cluster;
    auto pred_of = [&](const PointId& id) { return cl.at(id).predecessor; };
    // Predecessors of centers must themselves be centers, else the quadratic
    // net violates proximity at the missing predecessor.
    for (const auto& id : raw) {
        auto p = pred_of(id);
        if (p && std::find(raw.begin(), raw.end(), *p) == raw.end())
            throw ValidationError("center '" + id + "' is infinitely near a non-center point");
    }
    std::vector<std::pair<int, int>> edges; // (child, parent) indices into raw
    for (int i = 0; i < 3; ++i) {
        auto p = pred_of(raw[i]);
        if (!p) continue;
        for (int j = 0; j < 3; ++j)
            if (raw[j] == *p) edges.push_back({i, j});
    }
    if (edges.empty()) {
        ctx.pattern = QuadPattern::Proper;
        ctx.c = raw;
        if (group_with(cl, {raw[0], raw[1], raw[2]}) >= 0)
            throw ValidationError("quadratic centers are collinear");
    } else if (edges.size() == 1) {
        ctx.pattern = QuadPattern::Tangent;
        int child = edges[0].first, parent = edges[0].second;
        int third = 3 - child - parent;
        ctx.c = {raw[parent], raw[child], raw[third]};
        if (pred_of(ctx.c[2]))
            throw ValidationError("invalid center configuration: two separate infinitely near chains");
        if (cl.at(ctx.c[1]).proximate_to.size() > 1)
            throw ValidationError("invalid center configuration: satellite center");
        if (group_with(cl, {ctx.c[0], ctx.c[1], ctx.c[2]}) >= 0)
            throw ValidationError("quadratic centers are collinear (third point on the tangent line)");
    } else if (edges.size() == 2) {
        ctx.pattern = QuadPattern::Osculating;
        // Chain c2 >1 c1 >1 c0.
        int mid = -1;
        for (int i = 0; i < 3; ++i) {
            bool is_child = false, is_parent = false;
            for (auto [a, b] : edges) {
                if (a == i) is_child = true;
                if (b == i) is_parent = true;
            }
            if (is_child && is_parent) mid = i;
        }
        if (mid < 0) throw ValidationError("invalid center configuration: two points near one center");
        int top = -1, root = -1;
        for (auto [a, b] : edges) {
            if (b == mid) top = a;
            if (a == mid) root = b;
        }
        ctx.c = {raw[root], raw[mid], raw[top]};
        if (cl.at(ctx.c[1]).proximate_to.size() > 1)
            throw ValidationError("invalid center configuration: satellite center");
        const PointNode& c2n = cl.at(ctx.c[2]);
        if (std::find(c2n.proximate_to.begin(), c2n.proximate_to.end(), ctx.c[0]) !=
            c2n.proximate_to.end())
            throw ValidationError(
                "invalid center configuration: third center satellite to the first");
        if (group_with(cl, {ctx.c[0], ctx.c[1], ctx.c[2]}) >= 0)
            throw ValidationError("quadratic centers are collinear (osculating line declared)");
    } else {
        throw ValidationError("invalid center configuration: forbidden infinitely-near pattern");
    }
    return ctx;
}

struct ImageSpec {
    std::optional<PointId> pred;
    std::vector<PointId> prox;
    std::vector<int> joins; // indices into the new-group table
};

void add_unique(std::vector<PointId>& v, const PointId& id) {
    if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
}

} // namespace

QuadResult apply_quadratic(const PlaneSystem& L, const std::array<CenterSpec, 3>& centers) {
    require_valid(L, "apply_quadratic");
    QuadContext ctx = detect_pattern(L, centers);
    const Cluster& cl = ctx.sys.cluster;
    const PointId c0 = ctx.c[0], c1 = ctx.c[1], c2 = ctx.c[2];

    Int d = ctx.sys.degree;
    Int a0 = ctx.sys.mult_of(c0), a1 = ctx.sys.mult_of(c1), a2 = ctx.sys.mult_of(c2);

    Cluster out;
    MultiplicityVector mult;
    for (int i = 0; i < 3; ++i) ctx.q[i] = cl.fresh_id("q" + std::to_string(i));
    const PointId q0 = ctx.q[0], q1 = ctx.q[1], q2 = ctx.q[2];
    {
        PointNode n0, n1, n2;
        n0.id = q0;
        n1.id = q1;
        n2.id = q2;
        if (ctx.pattern != QuadPattern::Proper) {
            n1.predecessor = q0;
            n1.proximate_to = {q0};
        }
        if (ctx.pattern == QuadPattern::Osculating) {
            n2.predecessor = q1;
            n2.proximate_to = {q1};
        }
        out.nodes.push_back(n0);
        out.nodes.push_back(n1);
        out.nodes.push_back(n2);
        mult[q0] = d - a1 - a2;
        mult[q1] = d - a0 - a2;
        mult[q2] = d - a0 - a1;
    }

    // New-group table. Groups are created lazily and emitted when joined.
    // Proper pattern: group i is the line through q_j, q_k (image of E_i).
    // Tangent pattern: group 0 = line through q0, q2 (image of E_1);
    //                  group 1 = line through q0 towards q1 (image of E_2).
    // Osculating: group 0 = line through q0 towards q1 (image of E_2).
    std::vector<std::vector<PointId>> new_groups;
    std::vector<bool> joined;
    if (ctx.pattern == QuadPattern::Proper) {
        new_groups = {{q1, q2}, {q0, q2}, {q0, q1}};
    } else if (ctx.pattern == QuadPattern::Tangent) {
        new_groups = {{q0, q2}, {q0, q1}};
    } else {
        new_groups = {{q0, q1}};
    }
    joined.assign(new_groups.size(), false);

    // Old-group classification.
    struct OldGroup {
        std::vector<int> centers; // roles of centers contained in it
        bool dissolve = false;
    };
    std::vector<OldGroup> oginfo(cl.collinear.size());
    for (size_t gi = 0; gi < cl.collinear.size(); ++gi) {
        for (int r = 0; r < 3; ++r)
            if (cl.in_group(cl.collinear[gi], ctx.c[r])) oginfo[gi].centers.push_back(r);
    }

    auto groups_of = [&](const PointId& id) {
        std::vector<int> out_g;
        for (size_t gi = 0; gi < cl.collinear.size(); ++gi)
            if (cl.in_group(cl.collinear[gi], id)) out_g.push_back(static_cast<int>(gi));
        return out_g;
    };

    std::map<PointId, ImageSpec> plan;
    for (const auto& n : cl.nodes) {
        if (ctx.center_index(n.id) >= 0) continue;
        ImageSpec spec;
        auto gs = groups_of(n.id);
        auto member_of_centers = [&](std::initializer_list<int> roles) -> int {
            for (int gi : gs) {
                bool all = true;
                for (int r : roles)
                    if (std::find(oginfo[gi].centers.begin(), oginfo[gi].centers.end(), r) ==
                        oginfo[gi].centers.end())
                        all = false;
                if (all) return gi;
            }
            return -1;
        };

        int predc = n.predecessor ? ctx.center_index(*n.predecessor) : -1;
        bool sat_c0 = std::find(n.proximate_to.begin(), n.proximate_to.end(), c0) !=
                      n.proximate_to.end();
        bool sat_c1 = std::find(n.proximate_to.begin(), n.proximate_to.end(), c1) !=
                      n.proximate_to.end();

        if (ctx.pattern == QuadPattern::Proper) {
            if (predc >= 0) {
                int i = predc;
                int jrole = -1;
                for (int r = 0; r < 3; ++r)
                    if (r != i && member_of_centers({i, r}) >= 0) jrole = r;
                if (jrole >= 0) {
                    // direction at c_i along the contracted line c_i-c_j
                    int k = 3 - i - jrole;
                    spec.pred = ctx.q[k];
                    spec.joins.push_back(i);
                } else {
                    spec.joins.push_back(i); // proper point on the image line of E_i
                }
            } else if (!n.predecessor) {
                for (int a = 0; a < 3; ++a)
                    for (int b = a + 1; b < 3; ++b)
                        if (member_of_centers({a, b}) >= 0) spec.pred = ctx.q[3 - a - b];
            } else {
                spec.pred = *n.predecessor;
                // deeper member of a contracted line: satellite to the
                // contraction point
                for (int a = 0; a < 3; ++a)
                    for (int b = a + 1; b < 3; ++b)
                        if (member_of_centers({a, b}) >= 0) add_unique(spec.prox, ctx.q[3 - a - b]);
            }
            for (const auto& t : n.proximate_to) {
                if (n.predecessor && t == *n.predecessor) continue;
                int tc = ctx.center_index(t);
                if (tc >= 0)
                    spec.joins.push_back(tc); // tangent to the image line of E_tc
                else
                    add_unique(spec.prox, t);
            }
        } else if (ctx.pattern == QuadPattern::Tangent) {
            bool on_g02 = member_of_centers({0, 2}) >= 0;
            bool on_g01 = member_of_centers({0, 1}) >= 0;
            if (predc == 0) {
                if (on_g01)
                    throw ValidationError("two distinct directions declared on the tangent line");
                if (on_g02) {
                    spec.pred = q1;
                    add_unique(spec.prox, q0); // satellite to the image root
                } else {
                    spec.pred = q0;
                }
            } else if (predc == 1) {
                if (sat_c0 && on_g01)
                    throw ValidationError("inconsistent position: satellite and on the tangent line");
                if (sat_c0) {
                    spec.pred = q0; // satellite resolved to a free direction
                    spec.joins.push_back(0);
                } else if (on_g01) {
                    spec.pred = q2;
                    spec.joins.push_back(0);
                } else {
                    spec.joins.push_back(0); // proper point on the line q0-q2
                }
            } else if (predc == 2) {
                if (on_g02) {
                    spec.pred = q1;
                    spec.joins.push_back(1);
                } else {
                    spec.joins.push_back(1); // proper point on the tangent-line image
                }
            } else if (!n.predecessor) {
                if (on_g02)
                    spec.pred = q1;
                else if (on_g01)
                    spec.pred = q2;
            } else {
                spec.pred = *n.predecessor;
                if (on_g02) add_unique(spec.prox, q1);
                if (on_g01) add_unique(spec.prox, q2);
            }
            for (const auto& t : n.proximate_to) {
                if (n.predecessor && t == *n.predecessor) continue;
                if (t == c0) {
                    if (predc != 1) add_unique(spec.prox, q0);
                } else if (t == c1) {
                    spec.joins.push_back(0);
                } else if (t == c2) {
                    spec.joins.push_back(1);
                } else {
                    add_unique(spec.prox, t);
                }
            }
        } else { // Osculating
            bool on_g01 = member_of_centers({0, 1}) >= 0;
            if (predc == 0) {
                if (on_g01)
                    throw ValidationError("two distinct directions declared on the tangent line");
                spec.pred = q0;
            } else if (predc == 1) {
                if (sat_c0 && on_g01)
                    throw ValidationError("inconsistent position: satellite and on the tangent line");
                if (sat_c0) {
                    spec.pred = q1;
                    add_unique(spec.prox, q0);
                } else if (on_g01) {
                    spec.pred = q2;
                    add_unique(spec.prox, q1); // satellite over the deepest image point
                } else {
                    spec.pred = q1;
                }
            } else if (predc == 2) {
                if (sat_c1) {
                    spec.pred = q1;
                    spec.joins.push_back(0);
                } else {
                    spec.joins.push_back(0); // proper on the tangent-line image
                }
            } else if (!n.predecessor) {
                if (on_g01) spec.pred = q2;
            } else {
                spec.pred = *n.predecessor;
                if (on_g01) add_unique(spec.prox, q2);
            }
            for (const auto& t : n.proximate_to) {
                if (n.predecessor && t == *n.predecessor) continue;
                if (t == c0) {
                    if (predc != 1) add_unique(spec.prox, q0);
                } else if (t == c1) {
                    if (predc != 2 && predc != 1) add_unique(spec.prox, q1);
                } else if (t == c2) {
                    spec.joins.push_back(0);
                } else {
                    add_unique(spec.prox, t);
                }
            }
        }
        if (spec.pred &&
            std::find(spec.prox.begin(), spec.prox.end(), *spec.pred) == spec.prox.end())
            spec.prox.insert(spec.prox.begin(), *spec.pred);
        plan[n.id] = spec;
    }

    // Emit carried points in the old order; q0..q2 are already in place.
    for (const auto& n : cl.nodes) {
        if (ctx.center_index(n.id) >= 0) continue;
        const ImageSpec& spec = plan[n.id];
        PointNode m;
        m.id = n.id;
        m.predecessor = spec.pred;
        m.proximate_to = spec.prox;
        m.flags.general = n.flags.general;
        out.nodes.push_back(m);
        mult[n.id] = ctx.sys.mult_of(n.id);
        for (int j : spec.joins) {
            add_unique(new_groups[j], n.id);
            joined[j] = true;
        }
    }

    // Rewrite surviving old groups.
    for (size_t gi = 0; gi < cl.collinear.size(); ++gi) {
        const auto& roles = oginfo[gi].centers;
        bool drop = false;
        if (ctx.pattern == QuadPattern::Proper) {
            drop = roles.size() != 1 && !roles.empty();
            if (roles.empty()) drop = true; // line through no center maps to a conic
        } else if (ctx.pattern == QuadPattern::Tangent) {
            // {c0,c2} and {c0,c1} dissolve; single-center groups survive.
            drop = roles.empty() || roles.size() >= 2;
        } else {
            drop = roles.empty() || roles.size() >= 2;
        }
        if (drop) continue;
        std::vector<PointId> g;
        for (const auto& id : cl.collinear[gi]) {
            int r = ctx.center_index(id);
            if (r >= 0)
                g.push_back(ctx.q[r]);
            else
                g.push_back(id);
        }
        out.collinear.push_back(g);
    }
    for (size_t j = 0; j < new_groups.size(); ++j)
        if (joined[j]) out.collinear.push_back(new_groups[j]);

    QuadResult res;
    res.fundamental = ctx.q;
    res.image.kind = ctx.sys.kind;
    res.image.irreducible = ctx.sys.irreducible;
    res.image.degree = 2 * d - a0 - a1 - a2;
    if (res.image.degree < 0)
        throw ValidationError("quadratic image has negative degree");
    res.image.cluster = out;
    res.image.mult = mult;
    require_valid(res.image.cluster, "apply_quadratic image");

    bool negative = false;
    for (const auto& [_, v] : mult)
        if (v < 0) negative = true;
    auto unloaded = unload(res.image.cluster, res.image.mult);
    res.normalized = negative || unloaded != res.image.mult;
    res.image.mult = unloaded;
    res.image.degenerate = ctx.sys.degenerate || res.normalized;
    prune_zero_points(res.image.cluster, res.image.mult);
    return res;
}

// ---------------------------------------------------------------------------
// Plane <-> F_1 moves
// ---------------------------------------------------------------------------

HirzebruchSystem blow_up_max_point(const PlaneSystem& L, const std::optional<PointId>& at) {
    require_valid(L, "blow_up_max_point");
    PlaneSystem sys = L;
    PointId p0;
    if (at) {
        p0 = *at;
        if (!sys.cluster.has(p0)) throw ValidationError("blow-up point '" + p0 + "' unknown");
    } else {
        auto best = max_mult_point(sys);
        if (best) {
            p0 = *best;
        } else {
            p0 = sys.cluster.fresh_id("p0");
            PointNode n;
            n.id = p0;
            n.flags.general = true;
            sys.cluster.nodes.push_back(n);
            sys.mult[p0] = 0;
        }
    }
    if (!sys.cluster.is_proper(p0))
        throw ValidationError("blow-up point '" + p0 + "' is not a proper point");

    HirzebruchSystem out;
    out.n = 1;
    out.k = sys.degree - sys.mult_of(p0);
    out.h = sys.degree;
    out.kind = sys.kind;
    out.irreducible = sys.irreducible;
    out.degenerate = sys.degenerate;

    const Cluster& cl = sys.cluster;
    // Fiber ids from the collinear groups through p0.
    std::map<PointId, std::string> fiber_of; // member id -> fiber id
    std::map<PointId, bool> tangent_member;  // deeper in-group members
    int fiber_counter = 0;
    for (const auto& g : cl.collinear) {
        if (!cl.in_group(g, p0)) continue;
        std::string f = "f" + std::to_string(fiber_counter++);
        for (const auto& id : g) {
            if (id == p0) continue;
            const PointNode& n = cl.at(id);
            bool is_direction = n.predecessor && *n.predecessor == p0;
            bool is_proper = !n.predecessor.has_value();
            if (is_proper || is_direction)
                fiber_of[id] = f;
            else
                tangent_member[id] = true;
        }
    }

    for (const auto& n : cl.nodes) {
        if (n.id == p0) continue;
        PointNode m;
        m.id = n.id;
        m.flags.general = n.flags.general;
        bool child_of_p0 = n.predecessor && *n.predecessor == p0;
        if (child_of_p0) {
            m.flags.on_E = true;
            auto it = fiber_of.find(n.id);
            m.flags.fiber = it != fiber_of.end() ? it->second : ("f" + std::to_string(fiber_counter++));
        } else if (!n.predecessor) {
            auto it = fiber_of.find(n.id);
            m.flags.fiber = it != fiber_of.end() ? it->second : ("f" + std::to_string(fiber_counter++));
        } else {
            m.predecessor = n.predecessor;
        }
        for (const auto& t : n.proximate_to) {
            if (t == p0) {
                if (!child_of_p0) m.flags.on_E = true; // satellite to p0: on the strict E
                continue;
            }
            m.proximate_to.push_back(t);
        }
        if (tangent_member.count(n.id)) m.flags.on_fiber_strict = true;
        out.cluster.nodes.push_back(m);
        out.mult[n.id] = sys.mult_of(n.id);
    }
    require_valid(out.cluster, "blow_up_max_point image");
    if (genus(lattice_of(out), class_of(out)) != arithmetic_genus(sys))
        throw InternalError("blow-up does not preserve arithmetic genus");
    return out;
}

PlaneSystem contract_E1(const HirzebruchSystem& S) {
    require_valid(S, "contract_E1");
    if (S.n != 1) throw ValidationError("contract_E1 requires n = 1");
    if (!S.cluster.collinear.empty())
        throw ValidationError("collinear groups are not supported on Hirzebruch surfaces");
    for (const auto& n : S.cluster.nodes)
        if (!n.predecessor && n.flags.on_E && S.mult_of(n.id) > S.k)
            throw ValidationError("E splits off: on-E point of multiplicity above k");

    PlaneSystem out;
    out.degree = S.h;
    out.kind = S.kind;
    out.irreducible = S.irreducible;
    out.degenerate = S.degenerate;

    PointId p0 = S.cluster.fresh_id("p0");
    {
        PointNode n;
        n.id = p0;
        out.cluster.nodes.push_back(n);
        out.mult[p0] = S.h - S.k;
    }
    for (const auto& n : S.cluster.nodes) {
        PointNode m;
        m.id = n.id;
        m.flags.general = n.flags.general;
        m.predecessor = n.predecessor;
        m.proximate_to = n.proximate_to;
        if (!n.predecessor && n.flags.on_E) {
            m.predecessor = p0;
            m.proximate_to = {p0};
        } else if (n.predecessor && n.flags.on_E) {
            // tangent to E along the chain: satellite to p0 now
            add_unique(m.proximate_to, p0);
        }
        out.cluster.nodes.push_back(m);
        out.mult[n.id] = S.mult_of(n.id);
    }
    // Fibers become lines through p0.
    std::map<std::string, std::vector<PointId>> fibers;
    for (const auto& n : S.cluster.nodes)
        if (!n.predecessor && n.flags.fiber) fibers[*n.flags.fiber].push_back(n.id);
    for (const auto& [f, members] : fibers) {
        std::vector<PointId> g{p0};
        for (const auto& id : members) g.push_back(id);
        // carry fiber-tangency chains into the group
        std::function<void(const PointId&)> add_tangents = [&](const PointId& root) {
            for (const auto& ch : S.cluster.children_of(root))
                if (S.cluster.at(ch).flags.on_fiber_strict) {
                    g.push_back(ch);
                    add_tangents(ch);
                }
        };
        for (const auto& id : members) add_tangents(id);
        // a line through p0 with a single further point carries no constraint
        if (g.size() >= 3) out.cluster.collinear.push_back(g);
    }
    for (auto& n : out.cluster.nodes) {
        n.flags.on_E = false;
        n.flags.on_fiber_strict = false;
        n.flags.fiber.reset();
    }
    require_valid(out.cluster, "contract_E1 image");
    if (arithmetic_genus(out) != genus(lattice_of(S), class_of(S)))
        throw InternalError("contraction does not preserve arithmetic genus");
    return out;
}

// ---------------------------------------------------------------------------
// Elementary transformations
// ---------------------------------------------------------------------------

ElmResult elementary_transform(const HirzebruchSystem& S, const CenterSpec& at) {
    require_valid(S, "elementary_transform");
    HirzebruchSystem sys = S;
    auto fresh_fiber = [&]() {
        std::set<std::string> used;
        for (const auto& n : sys.cluster.nodes)
            if (n.flags.fiber) used.insert(*n.flags.fiber);
        for (int i = 0;; ++i) {
            std::string f = "gf" + std::to_string(i);
            if (!used.count(f)) return f;
        }
    };
    PointId p;
    switch (at.kind) {
        case CenterSpec::Kind::Existing:
            p = at.id;
            if (!sys.cluster.has(p)) throw ValidationError("elm center '" + p + "' unknown");
            break;
        case CenterSpec::Kind::FreshProper: {
            p = sys.cluster.fresh_id("g");
            PointNode n;
            n.id = p;
            n.flags.general = true;
            n.flags.fiber = fresh_fiber();
            sys.cluster.nodes.push_back(n);
            sys.mult[p] = at.fresh_mult;
            break;
        }
        case CenterSpec::Kind::FreshNear:
            throw ValidationError("elm center must be a proper point");
    }
    if (!sys.cluster.is_proper(p)) throw ValidationError("elm center '" + p + "' is not proper");
    Int mu = sys.mult_of(p);
    if (mu > sys.k) throw ValidationError("fiber splits: elm center multiplicity above k");

    // On F_0 every point lies on a member of the section family; the elm
    // raises to F_1 with the section re-chosen through the center. Points of
    // the previously distinguished member land on a positive section, so
    // their on-E marks go away.
    if (sys.n == 0 && !sys.cluster.at(p).flags.on_E) {
        for (auto& node : sys.cluster.nodes) node.flags.on_E = false;
    }
    const bool on_e = sys.cluster.at(p).flags.on_E || sys.n == 0;
    const std::string fiber =
        sys.cluster.at(p).flags.fiber ? *sys.cluster.at(p).flags.fiber : fresh_fiber();

    ElmResult res;
    res.image.n = on_e ? sys.n + 1 : sys.n - 1;
    res.image.k = sys.k;
    res.image.h = on_e ? sys.h + sys.k - mu : sys.h - mu;
    res.image.kind = sys.kind;
    res.image.irreducible = sys.irreducible;
    res.image.degenerate = sys.degenerate;

    Cluster& out = res.image.cluster;
    MultiplicityVector& mult = res.image.mult;

    PointId star = sys.cluster.fresh_id("e");
    res.created = star;
    {
        PointNode n;
        n.id = star;
        n.flags.on_E = !on_e;
        n.flags.fiber = fiber;
        out.nodes.push_back(n);
        mult[star] = sys.k - mu;
    }

    const Cluster& cl = sys.cluster;
    // Points whose subtree sits over the contracted fiber: p's children and
    // the other points on the same fiber.
    std::set<PointId> fiber_roots; // proper points on the fiber, p excluded
    for (const auto& n : cl.nodes)
        if (!n.predecessor && n.id != p && n.flags.fiber && *n.flags.fiber == fiber)
            fiber_roots.insert(n.id);

    std::function<bool(const PointId&)> over_point = [&](const PointId& id) -> bool {
        const PointNode& n = cl.at(id);
        if (!n.predecessor) return false;
        if (*n.predecessor == p || fiber_roots.count(*n.predecessor)) return true;
        return over_point(*n.predecessor);
    };

    for (const auto& n : cl.nodes) {
        if (n.id == p) continue;
        PointNode m;
        m.id = n.id;
        m.flags = n.flags;
        m.predecessor = n.predecessor;
        m.proximate_to = n.proximate_to;

        bool child_of_p = n.predecessor && *n.predecessor == p;
        bool fiber_root = fiber_roots.count(n.id) > 0;

        if (child_of_p) {
            if (n.flags.on_fiber_strict) {
                // direction along the fiber: lands at the new point, along the
                // image fiber
                m.predecessor = star;
                m.proximate_to = {star};
                m.flags.on_fiber_strict = true;
                m.flags.on_E = false;
            } else if (n.flags.on_E) {
                // direction along E at p (p on E): proper point on E and on
                // the new fiber
                m.predecessor.reset();
                m.proximate_to.clear();
                m.flags.on_E = true;
                m.flags.fiber = fiber;
                m.flags.on_fiber_strict = false;
            } else {
                m.predecessor.reset();
                m.proximate_to.clear();
                m.flags.on_E = false;
                m.flags.fiber = fiber;
                m.flags.on_fiber_strict = false;
            }
        } else if (fiber_root) {
            // other proper point of the contracted fiber
            m.predecessor = star;
            m.proximate_to = {star};
            // a point on E and on the fiber becomes the E-direction at star
            m.flags.on_E = n.flags.on_E;
            m.flags.fiber.reset();
            m.flags.on_fiber_strict = false;
        } else if (n.predecessor && (over_point(n.id))) {
            // members of subtrees over the fiber: swap fiber-tangency and
            // proximity-to-p marks
            bool was_sat_p = std::find(n.proximate_to.begin(), n.proximate_to.end(), p) !=
                             n.proximate_to.end();
            bool was_fiber_tangent = n.flags.on_fiber_strict;
            m.proximate_to.clear();
            for (const auto& t : n.proximate_to)
                if (t != p) m.proximate_to.push_back(t);
            m.flags.on_fiber_strict = was_sat_p;
            if (was_fiber_tangent) add_unique(m.proximate_to, star);
        } else {
            // untouched subtree; drop proximity to p if any leaked (p proper:
            // satellites to p require a chain over p, handled above)
            m.proximate_to.erase(std::remove(m.proximate_to.begin(), m.proximate_to.end(), p),
                                 m.proximate_to.end());
        }
        out.nodes.push_back(m);
        mult[n.id] = sys.mult_of(n.id);
    }

    // Topological order: star precedes everything (it is first); children of
    // star come from proper points, order preserved otherwise.
    require_valid(out, "elementary_transform image");

    bool changed_mults = false;
    {
        auto unloaded = unload(out, mult);
        changed_mults = unloaded != mult;
        mult = unloaded;
    }
    if (changed_mults) {
        res.image.degenerate = true;
    } else {
        if (genus(lattice_of(res.image), class_of(res.image)) !=
            genus(lattice_of(sys), class_of(sys)))
            throw InternalError("elementary transformation does not preserve arithmetic genus");
    }
    prune_zero_points(out, mult);
    return res;
}

} // namespace cremona
