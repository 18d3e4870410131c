#include "cremona/minimize.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace cremona {

std::string to_string(PairCase c) {
    switch (c) {
        case PairCase::LINE: return "LINE";
        case PairCase::DP1: return "DP1";
        case PairCase::DP2: return "DP2";
        case PairCase::R: return "R";
        case PairCase::B1: return "B1";
        case PairCase::B2: return "B2";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Nefification
// ---------------------------------------------------------------------------

namespace {

// Pure (-1)-classes aH - sum b_i Z_i with a <= cap: a^2+1 = sum b_i^2 and
// 3a-1 = sum b_i, proximity-compatible, b_i in [0, max(a-1,1)].
void enumerate_minus_one_classes(const BlowupLattice& L, Int cap,
                                 std::vector<DivisorClass>& out) {
    if (L.base != SurfaceBase::P2) return;
    size_t r = L.cluster.nodes.size();
    for (Int a = 1; a <= cap; ++a) {
        Int want_sum = 3 * a - 1;
        Int want_sq = a * a + 1;
        Int bmax = std::max<Int>(a - 1, 1);
        std::vector<Int> b(r, 0);
        std::function<void(size_t, Int, Int)> rec = [&](size_t i, Int sum, Int sq) {
            if (sum > want_sum || sq > want_sq) return;
            Int left = static_cast<Int>(r - i);
            if (sum + left * bmax < want_sum) return;
            if (left > 0 && sq + (want_sum - sum) * (want_sum - sum) / left +
                                ((want_sum - sum) % left != 0 ? 0 : 0) >
                                want_sq + bmax * (want_sum - sum))
                ; // weak bound; the exact cut below dominates
            if (i == r) {
                if (sum == want_sum && sq == want_sq) {
                    DivisorClass D = zero_class(L);
                    D.c[0] = a;
                    for (size_t t = 0; t < r; ++t) D.c[L.z_offset() + t] = -b[t];
                    // proximity of the class itself
                    bool pure = true;
                    for (const auto& e : strict_exceptional_classes(L))
                        if (intersect(L, D, e) < 0) pure = false;
                    if (pure) out.push_back(D);
                }
                return;
            }
            for (Int v = 0; v <= bmax; ++v) {
                b[i] = v;
                rec(i + 1, sum + v, sq + v * v);
            }
            b[i] = 0;
        };
        rec(0, 0, 0);
    }
}

std::vector<DivisorClass> nef_candidates(const AnySystem& sys, const BlowupLattice& L) {
    std::vector<DivisorClass> cand = strict_exceptional_classes(L);
    const Cluster& cl = L.cluster;
    auto z = [&](const PointId& id) { return L.z_index(id); };
    if (L.base == SurfaceBase::P2) {
        // lines through pairs: proper-proper and (p, q >1 p)
        for (size_t i = 0; i < cl.nodes.size(); ++i) {
            for (size_t j = i + 1; j < cl.nodes.size(); ++j) {
                const PointNode& A = cl.nodes[i];
                const PointNode& B = cl.nodes[j];
                bool ok = (!A.predecessor && !B.predecessor) ||
                          (B.predecessor && *B.predecessor == A.id && !A.predecessor) ||
                          (A.predecessor && *A.predecessor == B.id && !B.predecessor);
                if (!ok) continue;
                DivisorClass D = zero_class(L);
                D.c[0] = 1;
                D.c[z(A.id)] = -1;
                D.c[z(B.id)] = -1;
                cand.push_back(D);
            }
        }
        // declared collinear groups
        for (const auto& g : cl.collinear) {
            DivisorClass D = zero_class(L);
            D.c[0] = 1;
            for (const auto& id : g)
                if (cl.has(id)) D.c[z(id)] = -1;
            cand.push_back(D);
        }
        Int deg = std::get<PlaneSystem>(sys).degree;
        enumerate_minus_one_classes(L, std::min<Int>(std::max<Int>(deg, 1), 6), cand);
    } else {
        // fibers through each proper point (with declared fiber mates and
        // fiber-tangent chains)
        std::set<std::string> seen_fibers;
        for (const auto& n : cl.nodes) {
            if (n.predecessor || !n.flags.fiber) continue;
            if (!seen_fibers.insert(*n.flags.fiber).second) continue;
            DivisorClass D = zero_class(L);
            D.c[1] = 1; // F
            std::function<void(const PointId&)> mark = [&](const PointId& root) {
                D.c[z(root)] = -1;
                for (const auto& ch : cl.children_of(root))
                    if (cl.at(ch).flags.on_fiber_strict) mark(ch);
            };
            for (const auto& q : cl.nodes)
                if (!q.predecessor && q.flags.fiber && *q.flags.fiber == *n.flags.fiber)
                    mark(q.id);
            cand.push_back(D);
        }
        // the negative section with its tangency chains
        DivisorClass E = zero_class(L);
        E.c[0] = 1;
        std::function<void(const PointId&)> marke = [&](const PointId& root) {
            E.c[z(root)] = -1;
            for (const auto& ch : cl.children_of(root))
                if (cl.at(ch).flags.on_E) marke(ch);
        };
        for (const auto& q : cl.nodes)
            if (!q.predecessor && q.flags.on_E) marke(q.id);
        cand.push_back(E);
    }
    return cand;
}

} // namespace

std::optional<NefifyResult> try_nefify(const AnySystem& sys) {
    NefifyResult res;
    res.lattice = std::visit([](const auto& s) { return lattice_of(s); }, sys);
    DivisorClass D = std::visit([](const auto& s) { return class_of(s); }, sys);
    auto cand = nef_candidates(sys, res.lattice);
    Int guard = 16;
    for (Int v : D.c) guard = checked_add(guard, v >= 0 ? v : -v);
    guard = checked_mul(guard, 8);
    for (Int it = 0;; ++it) {
        if (it > guard) return std::nullopt; // drifted out of the effective cone
        if (D.c[0] < 0) return std::nullopt;
        if (res.lattice.base == SurfaceBase::Fn && D.c[1] < 0) return std::nullopt;
        bool changed = false;
        for (const auto& th : cand) {
            if (intersect(res.lattice, D, th) < 0) {
                D = D - th;
                bool merged = false;
                for (auto& [cls, times] : res.negative)
                    if (cls == th) {
                        times += 1;
                        merged = true;
                    }
                if (!merged) res.negative.push_back({th, 1});
                changed = true;
                break;
            }
        }
        if (!changed) break;
    }
    res.P = D;
    res.p_square = intersect(res.lattice, D, D);
    return res;
}

NefifyResult nefify(const AnySystem& last_adjoint) {
    auto r = try_nefify(last_adjoint);
    if (!r) throw InternalError("nefify: input class is not effective");
    return *r;
}

bool certified_effective(const AnySystem& sys) {
    if (virtual_dimension(sys) >= 0) return true;
    auto nf = try_nefify(sys);
    if (!nf) return false;
    if (nf->P.is_zero()) return true;
    if (nf->p_square < 0) return false;
    Int pk = intersect(nf->lattice, nf->P, canonical_class(nf->lattice));
    return nf->p_square - pk >= 0; // chi(P) - 1 >= 0
}

RobustChain robust_adjoint_chain(const AnySystem& input) {
    RobustChain chain;
    chain.last = input;
    AnySystem cur = input;
    for (Int k = 1; k < 4096; ++k) {
        auto next = adjoint_unchecked(cur, 1);
        if (!next || !certified_effective(*next)) break;
        cur = *next;
        chain.m = k;
        chain.last = cur;
    }
    if (chain.m > 0) {
        chain.nef = nefify(chain.last);
        if (chain.nef.P.is_zero()) {
            chain.alpha = 0;
        } else if (chain.nef.p_square == 0) {
            Int pk = intersect(chain.nef.lattice, chain.nef.P, canonical_class(chain.nef.lattice));
            if (pk >= 0 || pk % 2 != 0)
                throw InternalError("ruled nef part with unexpected canonical degree");
            chain.alpha = -pk / 2;
        } else {
            chain.alpha = chain.nef.p_square + 1;
        }
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Sharp / flat / natural models
// ---------------------------------------------------------------------------

namespace {

Int max_mult(const HirzebruchSystem& S) {
    Int m1 = 0;
    for (const auto& [_, v] : S.mult) m1 = std::max(m1, v);
    return m1;
}

std::optional<PointId> first_point_with(const HirzebruchSystem& S,
                                        const std::function<bool(const PointNode&, Int)>& pred) {
    for (const auto& n : S.cluster.nodes)
        if (pred(n, S.mult_of(n.id))) return n.id;
    return std::nullopt;
}

} // namespace

HirzebruchSystem swap_rulings(const HirzebruchSystem& S) {
    if (S.n != 0) throw ValidationError("swap_rulings requires F_0");
    HirzebruchSystem out = S;
    std::swap(out.k, out.h);
    int fresh = 0;
    for (auto& n : out.cluster.nodes) {
        if (!n.predecessor) {
            n.flags.fiber = n.flags.on_E ? std::string("fe") : ("fs" + std::to_string(fresh++));
            n.flags.on_E = false;
            n.flags.on_fiber_strict = false;
        } else {
            // tangency to the old section becomes tangency to the new fiber
            n.flags.on_fiber_strict = n.flags.on_E;
            n.flags.on_E = false;
            n.flags.fiber.reset();
        }
    }
    if (genus(lattice_of(out), class_of(out)) != genus(lattice_of(S), class_of(S)))
        throw InternalError("swap_rulings does not preserve arithmetic genus");
    return out;
}

SharpStatus sharp_status(const HirzebruchSystem& S) {
    SharpStatus st;
    Int m1 = max_mult(S);
    if (S.n >= 2) {
        st.sharp = S.k >= 2 * m1;
        st.sharpsharp = S.k > 2 * m1;
    } else if (S.n == 1) {
        st.sharp = S.k >= 2 * m1 && S.h - S.k >= m1;
        st.sharpsharp = S.k > 2 * m1 && S.h - S.k >= m1;
    } else {
        st.sharp = S.k >= 2 * m1 && S.h >= 2 * m1;
        st.sharpsharp = S.k > 2 * m1 && S.h > 2 * m1;
    }
    // natural: k = 2m+eps with m >= 1, no base point of multiplicity
    // >= 2m+eps-1, and no singular base point along E. Independent of
    // sharpness.
    bool sing_on_E = false;
    bool huge = false;
    for (const auto& n : S.cluster.nodes) {
        if (n.flags.on_E && S.mult_of(n.id) >= 2) sing_on_E = true;
        if (S.mult_of(n.id) >= S.k - 1) huge = true;
    }
    st.natural = S.k >= 2 && !huge && !sing_on_E;
    return st;
}

std::pair<HirzebruchSystem, SharpStatus> sharp_model(const HirzebruchSystem& S) {
    HirzebruchSystem cur = S;
    for (int guard = 0; guard < 500; ++guard) {
        if (cur.n == 0 && cur.k > cur.h) cur = swap_rulings(cur);
        Int m1 = max_mult(cur);
        if (2 * m1 > cur.k) {
            auto p = first_point_with(cur, [&](const PointNode& n, Int m) {
                return !n.predecessor.has_value() && 2 * m > cur.k && m == m1;
            });
            if (!p)
                p = first_point_with(cur, [&](const PointNode& n, Int m) {
                    return !n.predecessor.has_value() && 2 * m > cur.k;
                });
            if (!p)
                throw InternalError("sharp_model: violating multiplicity at no proper point");
            cur = elementary_transform(cur, CenterSpec::existing(*p)).image;
            continue;
        }
        if (cur.n == 1 && cur.h - cur.k < m1) {
            // re-center: the contraction point would not carry the maximum
            PlaneSystem plane = contract_E1(cur);
            cur = blow_up_max_point(plane);
            continue;
        }
        SharpStatus st = sharp_status(cur);
        if (st.sharp) return {cur, st};
    }
    throw InternalError("sharp_model did not converge");
}

std::pair<HirzebruchSystem, SharpStatus> flat_model(const HirzebruchSystem& S) {
    auto [cur, st] = sharp_model(S);
    for (int guard = 0; guard < 200; ++guard) {
        if (cur.n == 0) break;
        if (cur.k % 2 != 0) break;
        auto p = first_point_with(cur, [&](const PointNode& n, Int m) {
            return !n.predecessor.has_value() && !n.flags.on_E && 2 * m == cur.k;
        });
        if (!p) break;
        cur = elementary_transform(cur, CenterSpec::existing(*p)).image;
        if (cur.n == 0 && cur.k > cur.h) cur = swap_rulings(cur);
    }
    SharpStatus st2 = sharp_status(cur);
    if (!st2.sharp) throw InternalError("flat_model lost sharpness");
    st2.flat_index = cur.n;
    return {cur, st2};
}

std::pair<HirzebruchSystem, SharpStatus> natural_model(const HirzebruchSystem& S) {
    auto [cur, st] = flat_model(S);
    Int flat_index = st.flat_index;
    for (int guard = 0; guard < 200; ++guard) {
        auto p = first_point_with(cur, [&](const PointNode& n, Int m) {
            return !n.predecessor.has_value() && n.flags.on_E && m >= 2;
        });
        if (!p) break;
        cur = elementary_transform(cur, CenterSpec::existing(*p)).image;
    }
    SharpStatus st2 = sharp_status(cur);
    st2.flat_index = flat_index;
    if (!st2.natural)
        throw InternalError("natural_model did not reach a natural form");
    return {cur, st2};
}

// ---------------------------------------------------------------------------
// Forests and good clusters
// ---------------------------------------------------------------------------

namespace {

void grow_tree(const HirzebruchSystem& sys, const PointId& p, Int depth_left,
               ForestComponent& comp, size_t vertex) {
    if (depth_left <= 0) return;
    auto elm = elementary_transform(sys, CenterSpec::existing(p));
    const std::string fiber = *elm.image.cluster.at(elm.created).flags.fiber;
    for (const auto& n : elm.image.cluster.nodes) {
        if (n.predecessor || n.flags.on_E) continue;
        if (!n.flags.fiber || *n.flags.fiber != fiber) continue;
        if (n.id == elm.created) continue;
        if (elm.image.mult_of(n.id) < 2) continue;
        ForestVertex v;
        v.weight = elm.image.mult_of(n.id);
        v.point = n.id;
        comp.vertices.push_back(v);
        size_t idx = comp.vertices.size() - 1;
        comp.vertices[vertex].children.push_back(idx);
        grow_tree(elm.image, n.id, depth_left - 1, comp, idx);
    }
}

} // namespace

WeightedForest build_forest(const HirzebruchSystem& natural) {
    if (natural.n < 2) throw ValidationError("build_forest requires n >= 2");
    SharpStatus st = sharp_status(natural);
    if (!st.natural) throw ValidationError("build_forest requires a natural model");
    WeightedForest f;
    std::set<std::string> fibers_done;
    for (const auto& n : natural.cluster.nodes) {
        if (n.predecessor || n.flags.on_E) continue;
        if (natural.mult_of(n.id) < 2) continue;
        if (!n.flags.fiber)
            throw ValidationError("build_forest: singular point '" + n.id + "' has no fiber id");
        if (!fibers_done.insert(*n.flags.fiber).second) continue;
        ForestComponent comp;
        comp.vertices.push_back(ForestVertex{0, std::nullopt, false, {}});
        for (const auto& q : natural.cluster.nodes) {
            if (q.predecessor || q.flags.on_E) continue;
            if (!q.flags.fiber || *q.flags.fiber != *n.flags.fiber) continue;
            if (natural.mult_of(q.id) < 2) continue;
            ForestVertex v;
            v.weight = natural.mult_of(q.id);
            v.point = q.id;
            comp.vertices.push_back(v);
            size_t idx = comp.vertices.size() - 1;
            comp.vertices[0].children.push_back(idx);
            grow_tree(natural, q.id, natural.n - 2, comp, idx);
        }
        f.components.push_back(comp);
    }
    // the n-1 general-point components
    Int w = natural.kind == SystemKind::Curve ? 1 : 0;
    for (Int i = 0; i < natural.n - 1; ++i) {
        ForestComponent comp;
        comp.vertices.push_back(ForestVertex{0, std::nullopt, false, {1}});
        comp.vertices.push_back(ForestVertex{w, std::nullopt, true, {}});
        f.components.push_back(comp);
    }
    return f;
}

std::string forest_to_dot(const WeightedForest& f) {
    std::ostringstream os;
    os << "digraph forest {\n";
    int id = 0;
    for (size_t ci = 0; ci < f.components.size(); ++ci) {
        const auto& comp = f.components[ci];
        std::vector<int> names(comp.vertices.size());
        for (size_t vi = 0; vi < comp.vertices.size(); ++vi) {
            names[vi] = id++;
            const auto& v = comp.vertices[vi];
            os << "  n" << names[vi] << " [label=\"" << v.weight;
            if (v.point) os << " (" << *v.point << ")";
            if (v.general) os << " (general)";
            os << "\"];\n";
        }
        for (size_t vi = 0; vi < comp.vertices.size(); ++vi)
            for (size_t ch : comp.vertices[vi].children)
                os << "  n" << names[vi] << " -> n" << names[ch] << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::vector<GoodCluster> good_clusters(const WeightedForest& f, Int n) {
    // chains per component: root-descending paths of length >= 1
    struct Chain {
        std::vector<GoodChainStep> steps;
        Int weight = 0;
    };
    std::vector<std::vector<Chain>> options(f.components.size());
    for (size_t ci = 0; ci < f.components.size(); ++ci) {
        const auto& comp = f.components[ci];
        std::function<void(size_t, Chain)> walk = [&](size_t v, Chain cur) {
            for (size_t ch : comp.vertices[v].children) {
                Chain next = cur;
                next.steps.push_back(GoodChainStep{comp.vertices[ch].point,
                                                   comp.vertices[ch].weight});
                next.weight += comp.vertices[ch].weight;
                options[ci].push_back(next);
                walk(ch, next);
            }
        };
        walk(0, Chain{});
    }

    std::vector<GoodCluster> best;
    Int best_weight = -1;
    std::vector<const Chain*> picked;
    std::function<void(size_t, Int, Int)> rec = [&](size_t ci, Int len, Int weight) {
        if (len > n - 1) return;
        if (ci == f.components.size()) {
            if (len != n - 1) return;
            if (weight < best_weight) return;
            if (weight > best_weight) {
                best_weight = weight;
                best.clear();
            }
            GoodCluster gc;
            gc.weight = weight;
            for (const Chain* c : picked) {
                gc.chains.push_back(c->steps);
                for (const auto& s : c->steps) gc.sequence.push_back(s.weight);
            }
            std::sort(gc.sequence.begin(), gc.sequence.end(), std::greater<>());
            best.push_back(gc);
            return;
        }
        rec(ci + 1, len, weight); // skip this component
        for (const auto& c : options[ci]) {
            picked.push_back(&c);
            rec(ci + 1, len + static_cast<Int>(c.steps.size()), weight + c.weight);
            picked.pop_back();
        }
    };
    rec(0, 0, 0);
    // dedupe by multiplicity sequence
    std::vector<GoodCluster> out;
    std::set<std::vector<Int>> seen;
    for (auto& gc : best)
        if (seen.insert(gc.sequence).second) out.push_back(gc);
    return out;
}

std::vector<MinimalModel> good_plane_models(const HirzebruchSystem& natural,
                                            const std::vector<GoodCluster>& clusters,
                                            const std::string& type_tag) {
    std::vector<MinimalModel> out;
    for (const auto& gc : clusters) {
        HirzebruchSystem cur = natural;
        for (const auto& chain : gc.chains) {
            for (const auto& step : chain) {
                CenterSpec c = step.point ? CenterSpec::existing(*step.point)
                                          : CenterSpec::fresh(step.weight);
                cur = elementary_transform(cur, c).image;
            }
        }
        if (cur.n != 1)
            throw InternalError("good cluster of the wrong length: did not land on F_1");
        MinimalModel m;
        m.type_tag = type_tag;
        m.system = contract_E1(cur);
        out.push_back(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

bool has_base_points(const AnySystem& s) {
    return std::visit([](const auto& x) {
        for (const auto& [_, m] : x.mult)
            if (m > 0) return true;
        return false;
    }, s);
}

PlaneSystem line_model() {
    PlaneSystem l;
    l.degree = 1;
    return l;
}

// Del Pezzo normalization of a plane model: degree-lowering quadratics at
// base-point triples until degree 3m.
PlaneSystem dp_normalize_plane(PlaneSystem cur, Int m) {
    for (int guard = 0; guard < 64 && cur.degree > 3 * m; ++guard) {
        std::vector<PointId> pts;
        for (const auto& n : cur.cluster.nodes) pts.push_back(n.id);
        Int bestsum = -1;
        std::array<PointId, 3> bestc;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                for (size_t l = j + 1; l < pts.size(); ++l) {
                    Int s = cur.mult_of(pts[i]) + cur.mult_of(pts[j]) + cur.mult_of(pts[l]);
                    if (s <= cur.degree || s <= bestsum) continue;
                    try {
                        apply_quadratic(cur, {CenterSpec::existing(pts[i]),
                                              CenterSpec::existing(pts[j]),
                                              CenterSpec::existing(pts[l])});
                    } catch (const ValidationError&) {
                        continue;
                    }
                    bestsum = s;
                    bestc = {pts[i], pts[j], pts[l]};
                }
        if (bestsum < 0)
            throw InternalError("del Pezzo case: no degree-lowering quadratic found");
        cur = apply_quadratic(cur, {CenterSpec::existing(bestc[0]), CenterSpec::existing(bestc[1]),
                                    CenterSpec::existing(bestc[2])}).image;
    }
    if (cur.degree != 3 * m)
        throw InternalError("del Pezzo normalization did not reach degree 3m");
    return cur;
}

std::string dp1_caveat(const PlaneSystem& s, Int m) {
    int at_m = 0;
    for (const auto& [_, v] : s.mult)
        if (v == m) ++at_m;
    if (at_m >= 3)
        return "three points of multiplicity m: equivalent but non-isomorphic models may exist";
    return "";
}

} // namespace

RationalClassification classify_rational_system(const AnySystem& input) {
    if (std::visit([](const auto& s) { return arithmetic_genus(s); }, input) != 0)
        throw ValidationError("classify_rational_system requires arithmetic genus 0");
    Int dim = virtual_dimension(input);
    if (dim < 1) throw ValidationError("classify_rational_system requires positive dimension");

    BlowupLattice lat = std::visit([](const auto& s) { return lattice_of(s); }, input);
    DivisorClass D = std::visit([](const auto& s) { return class_of(s); }, input);
    Int d2 = intersect(lat, D, D);
    RationalClassification res;
    if (d2 == 0) {
        res.tag = "(i)";
        PlaneSystem l;
        l.degree = 1;
        PointNode p;
        p.id = "p";
        l.cluster.nodes.push_back(p);
        l.mult["p"] = 1;
        l.kind = SystemKind::System;
        res.model = l;
        res.dimension = 1;
        return res;
    }

    if (std::holds_alternative<PlaneSystem>(input)) {
        const auto& P = std::get<PlaneSystem>(input);
        if (!has_base_points(AnySystem{P})) {
            if (P.degree == 1 || P.degree == 2) {
                res.tag = "(ii)";
                PlaneSystem l;
                l.degree = P.degree;
                l.kind = SystemKind::System;
                res.model = l;
                res.dimension = virtual_dimension(l);
                return res;
            }
            throw ValidationError("base point free plane system of degree > 2 is not a last nef form");
        }
        return classify_rational_system(AnySystem{blow_up_max_point(P)});
    }

    HirzebruchSystem S = std::get<HirzebruchSystem>(input);
    if (has_base_points(AnySystem{S}))
        throw ValidationError("classify_rational_system: nef input with base points unsupported");
    if (S.n == 1 && S.h == S.k) {
        // E is contracted by the map; the image sits on the plane
        return classify_rational_system(AnySystem{contract_E1(S)});
    }
    if (S.k != 1)
        throw ValidationError("classify_rational_system: expected a scroll class kE+hF with k=1");
    if (S.n == 1) {
        res.tag = "(iii)";
        res.model = contract_E1(S);
        res.dimension = virtual_dimension(res.model);
        return res;
    }
    if (S.n == 0) {
        auto r = elementary_transform(S, CenterSpec::fresh(0));
        res.tag = "(iv)";
        res.model = contract_E1(r.image);
        res.dimension = virtual_dimension(res.model);
        return res;
    }
    HirzebruchSystem cur = S;
    while (cur.n > 1) cur = elementary_transform(cur, CenterSpec::fresh(0)).image;
    res.tag = "(v)";
    res.model = contract_E1(cur);
    res.dimension = virtual_dimension(res.model);
    return res;
}

namespace {

struct FlatOutcome {
    HirzebruchSystem flat;
    SharpStatus status;
};

FlatOutcome flat_of_input(const AnySystem& input, const AnySystem& last_adjoint) {
    if (std::holds_alternative<HirzebruchSystem>(input))
        return [&] {
            auto [f, st] = flat_model(std::get<HirzebruchSystem>(input));
            return FlatOutcome{f, st};
        }();
    const auto& P = std::get<PlaneSystem>(input);
    const auto& adm = std::get<PlaneSystem>(last_adjoint);
    std::optional<PointId> at;
    if (auto mp = max_mult_point(adm); mp && adm.mult_of(*mp) > 0) at = *mp;
    auto f1 = blow_up_max_point(P, at);
    auto [f, st] = flat_model(f1);
    return FlatOutcome{f, st};
}

} // namespace

ClassificationResult classify(const AnySystem& input) {
    ClassificationResult res;
    res.model = input;
    // degenerate short-circuit
    bool empty_input = std::visit([](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlaneSystem>) return s.degree <= 0;
        else return s.k < 0 || s.h < 0 || (s.k == 0 && s.h == 0);
    }, input);
    if (empty_input) {
        res.c = PairCase::LINE;
        res.m = 0;
        res.alpha = 0;
        res.model = line_model();
        return res;
    }

    RobustChain chain = robust_adjoint_chain(input);
    if (chain.m == 0) {
        // Kumar-Murthy: the line case needs the second adjoint empty as well.
        auto ad2 = adjoint_unchecked(input, 2);
        if (ad2 && certified_effective(*ad2))
            throw InternalError("inconsistent adjoint chain: ad_1 empty but ad_2 effective");
        res.c = PairCase::LINE;
        res.m = 0;
        res.alpha = 0;
        res.model = line_model();
        return res;
    }
    res.m = chain.m;
    res.alpha = chain.alpha;
    const AnySystem& adm = chain.last;

    if (res.alpha == 0) {
        // del Pezzo case
        if (std::holds_alternative<PlaneSystem>(input)) {
            res.c = PairCase::DP1;
            PlaneSystem model = dp_normalize_plane(std::get<PlaneSystem>(input), res.m);
            res.uniqueness_caveat = dp1_caveat(model, res.m);
            res.model = model;
            res.n = 0;
            return res;
        }
        HirzebruchSystem cur = std::get<HirzebruchSystem>(input);
        for (int guard = 0; guard < 64; ++guard) {
            if (cur.n == 0 && cur.k > cur.h) cur = swap_rulings(cur);
            if (cur.n == 1) {
                res.c = PairCase::DP1;
                PlaneSystem model = dp_normalize_plane(contract_E1(cur), res.m);
                res.uniqueness_caveat = dp1_caveat(model, res.m);
                res.model = model;
                res.n = 0;
                return res;
            }
            auto p = first_point_with(cur, [&](const PointNode& n, Int m) {
                return !n.predecessor.has_value() && m == res.m;
            });
            if (p) {
                cur = elementary_transform(cur, CenterSpec::existing(*p)).image;
                continue;
            }
            if (cur.n == 0 || cur.n == 2) {
                if (cur.k != 2 * res.m || cur.h != (2 + cur.n) * res.m)
                    throw InternalError("del Pezzo F-form has an unexpected class");
                res.c = PairCase::DP2;
                res.n = cur.n;
                res.model = cur;
                return res;
            }
            throw InternalError("del Pezzo case: unexpected Hirzebruch index");
        }
        throw InternalError("del Pezzo normalization did not converge");
    }

    // alpha > 0: ruled or big, decided by the nef part of the last adjoint
    const NefifyResult& nf = chain.nef;
    if (nf.P.is_zero())
        throw InternalError("inconsistent invariants: alpha > 0 with zero nef part");
    if (nf.p_square < 0)
        throw InternalError("nefify produced a negative nef part");

    if (nf.p_square == 0) {
        res.c = PairCase::R;
        FlatOutcome fo = flat_of_input(input, adm);
        if (fo.flat.k != 2 * res.m)
            throw InternalError("ruled case: flat model class is not 2m");
        if (fo.flat.h != (2 + fo.flat.n) * res.m + res.alpha)
            throw InternalError("ruled case: flat model fiber degree mismatch");
        if (fo.flat.n > 2 + res.alpha / res.m)
            throw InternalError("ruled case: flat index exceeds 2 + [alpha/m]");
        res.n = fo.flat.n;
        res.model = fo.flat;
        int at_m = 0;
        for (const auto& [_, v] : fo.flat.mult)
            if (v == res.m) ++at_m;
        if (res.m == 1 && fo.flat.kind == SystemKind::Curve) at_m = 2; // every curve point
        if (at_m >= 2)
            res.uniqueness_caveat =
                "two or more points of multiplicity m: equivalent non-isomorphic models may exist";
        return res;
    }

    // big case: is the nef part a full plane system L(j)?
    bool plane_P = false;
    Int j = 0;
    if (std::holds_alternative<PlaneSystem>(adm)) {
        bool no_mults = true;
        for (size_t i = nf.lattice.z_offset(); i < nf.lattice.rank(); ++i)
            if (nf.P.c[i] != 0) no_mults = false;
        if (no_mults && (nf.P.c[0] == 1 || nf.P.c[0] == 2)) {
            plane_P = true;
            j = nf.P.c[0];
        }
    }
    if (plane_P) {
        res.c = PairCase::B1;
        if (res.alpha != (j == 1 ? 2 : 5))
            throw InternalError("big case: alpha does not match dim of L(j)");
        if (std::holds_alternative<PlaneSystem>(input)) {
            const auto& P = std::get<PlaneSystem>(input);
            if (P.degree != 3 * res.m + res.alpha / 2)
                throw InternalError("big plane case: degree is not 3m + [alpha/2]");
            res.model = P;
        } else {
            HirzebruchSystem cur = std::get<HirzebruchSystem>(input);
            if (cur.n != 1)
                throw InternalError("big plane case from a Hirzebruch input with n != 1");
            res.model = contract_E1(cur);
        }
        res.n = 0;
        return res;
    }

    res.c = PairCase::B2;
    FlatOutcome fo = flat_of_input(input, adm);
    if (fo.flat.k != 2 * res.m + 1)
        throw InternalError("big case: flat model class is not 2m+1");
    Int n = fo.flat.n;
    if ((res.alpha + n) % 2 != 1)
        throw InternalError("big case: alpha + n is even");
    if (fo.flat.h != (2 + n) * res.m + (res.alpha + n - 1) / 2)
        throw InternalError("big case: flat model fiber degree mismatch");
    if (n <= 1) {
        if (res.alpha < 3 + n) throw InternalError("big case: alpha below 3 + n");
    } else {
        if (res.alpha < 3 + (n - 2) * (2 * res.m + 1))
            throw InternalError("big case: alpha below 3 + (n-2)(2m+1)");
    }
    res.n = n;
    res.model = fo.flat;
    return res;
}

// ---------------------------------------------------------------------------
// Minimal models
// ---------------------------------------------------------------------------

namespace {

MinimalModel tagged(const std::string& tag, PlaneSystem sys, const std::string& caveat = "") {
    MinimalModel m;
    m.type_tag = tag;
    m.system = std::move(sys);
    m.caveat = caveat;
    return m;
}

// elm at a maximal-multiplicity point (or a general point when there is
// none), then contract. Used by cdp2/cdp3/cr0/cr1/cb3 constructions.
PlaneSystem elm_at_max_then_contract(const HirzebruchSystem& S, std::optional<Int> want_mult) {
    HirzebruchSystem cur = S;
    std::optional<PointId> p;
    Int best = -1;
    for (const auto& n : cur.cluster.nodes) {
        if (n.predecessor || n.flags.on_E) continue;
        Int m = cur.mult_of(n.id);
        if (want_mult && m != *want_mult) continue;
        if (m > best) {
            best = m;
            p = n.id;
        }
    }
    CenterSpec c = p ? CenterSpec::existing(*p)
                     : CenterSpec::fresh(S.kind == SystemKind::Curve ? 1 : 0);
    cur = elementary_transform(cur, c).image;
    if (cur.n != 1) throw InternalError("expected to land on F_1");
    return contract_E1(cur);
}

} // namespace

MinimizationResult minimal_models(const AnySystem& input) {
    MinimizationResult out;
    out.classification = classify(input);
    const ClassificationResult& cls = out.classification;
    switch (cls.c) {
        case PairCase::LINE: {
            out.models.push_back(tagged("line", line_model()));
            break;
        }
        case PairCase::DP1: {
            MinimalModel m = tagged("cdp1", std::get<PlaneSystem>(cls.model), cls.uniqueness_caveat);
            out.models.push_back(m);
            break;
        }
        case PairCase::DP2: {
            const auto& S = std::get<HirzebruchSystem>(cls.model);
            std::string tag = cls.n == 0 ? "cdp2" : "cdp3";
            Int m1 = max_mult(S);
            std::string caveat;
            {
                int at_m1 = 0;
                for (const auto& [_, v] : S.mult)
                    if (v == m1 && m1 > 0) ++at_m1;
                if (at_m1 >= 2)
                    caveat = "m1 = m2: Cremona-equivalent models of the other del Pezzo type may exist";
            }
            out.models.push_back(tagged(tag, elm_at_max_then_contract(S, std::nullopt), caveat));
            break;
        }
        case PairCase::R: {
            const auto& flat = std::get<HirzebruchSystem>(cls.model);
            if (cls.n == 0) {
                auto pm = first_point_with(flat, [&](const PointNode& n, Int m) {
                    return !n.predecessor.has_value() && m == cls.m;
                });
                if (pm) {
                    HirzebruchSystem f1 =
                        elementary_transform(flat, CenterSpec::existing(*pm)).image;
                    if (f1.n != 1) throw InternalError("expected to land on F_1");
                    out.models.push_back(tagged("cr1", contract_E1(f1)));
                } else {
                    out.models.push_back(tagged("cr0", elm_at_max_then_contract(flat, std::nullopt)));
                }
            } else if (cls.n == 1) {
                out.models.push_back(tagged("cr1", contract_E1(flat)));
            } else {
                auto [nat, st] = natural_model(flat);
                auto forest = build_forest(nat);
                auto clusters = good_clusters(forest, nat.n);
                auto models = good_plane_models(nat, clusters, "cr2");
                for (auto& m : models) {
                    if (clusters.size() > 1)
                        m.caveat = "distinct good sequences give distinct Cremona-minimal models";
                    out.models.push_back(m);
                }
            }
            break;
        }
        case PairCase::B1: {
            out.models.push_back(tagged("cb1", std::get<PlaneSystem>(cls.model)));
            break;
        }
        case PairCase::B2: {
            const auto& flat = std::get<HirzebruchSystem>(cls.model);
            if (cls.n == 1) {
                out.models.push_back(tagged("cb2", contract_E1(flat)));
            } else if (cls.n == 0) {
                out.models.push_back(tagged("cb3", elm_at_max_then_contract(flat, std::nullopt)));
            } else {
                auto [nat, st] = natural_model(flat);
                auto forest = build_forest(nat);
                auto clusters = good_clusters(forest, nat.n);
                auto models = good_plane_models(nat, clusters, "cb4");
                for (auto& m : models) {
                    if (clusters.size() > 1)
                        m.caveat = "distinct good sequences give distinct Cremona-minimal models";
                    out.models.push_back(m);
                }
            }
            break;
        }
    }
    // Noether-type sanity for the types the theorem marks as such.
    for (auto& m : out.models) {
        if (m.type_tag == "cr2" || m.type_tag == "cb4" || m.type_tag == "line") continue;
        if (!is_noether_type(m.system)) m.minimality = "unverified";
    }
    return out;
}

// ---------------------------------------------------------------------------
// de Jonquieres reduction
// ---------------------------------------------------------------------------

ReductionResult dejonquieres_reduction(const PlaneSystem& L) {
    require_valid(L, "dejonquieres_reduction");
    if (!is_admissible(L)) throw ValidationError("dejonquieres_reduction requires an admissible system");
    PointId p0 = *max_mult_point(L);

    std::vector<PointId> others;
    for (const auto& n : L.cluster.nodes)
        if (n.id != p0) others.push_back(n.id);
    size_t count = others.size();
    if (count > 16) throw ValidationError("dejonquieres_reduction: too many base points to search");

    ReductionResult best;
    best.best_degree = L.degree;
    {
        // identity witness (delta = 1)
        best.net = PlaneSystem{};
        best.net.degree = 1;
        best.image = L;
    }

    // For a curve, the remaining simple centers may be general points of the
    // member itself, each of multiplicity one; for a positive-dimensional
    // system general points carry multiplicity zero.
    const Int aux_mult = L.kind == SystemKind::Curve ? 1 : 0;

    Int max_delta = static_cast<Int>(count) + 1;
    for (Int delta = 2; delta <= std::max<Int>(2, max_delta); ++delta) {
        size_t slots = static_cast<size_t>(2 * delta - 2);
        for (size_t mask = 0; mask < (size_t{1} << count); ++mask) {
            if (static_cast<size_t>(__builtin_popcountll(mask)) > slots) continue;
            std::vector<PointId> chosen;
            for (size_t i = 0; i < count; ++i)
                if (mask & (size_t{1} << i)) chosen.push_back(others[i]);
            // induced subcluster must be predecessor-closed
            bool closed = true;
            std::set<PointId> in(chosen.begin(), chosen.end());
            in.insert(p0);
            for (const auto& id : chosen) {
                const PointNode& n = L.cluster.at(id);
                if (n.predecessor && !in.count(*n.predecessor)) closed = false;
                for (const auto& t : n.proximate_to)
                    if (!in.count(t)) closed = false;
            }
            if (!closed) continue;

            PlaneSystem net;
            net.degree = delta;
            net.kind = SystemKind::System;
            {
                PointNode n0;
                n0.id = "n_p0";
                net.cluster.nodes.push_back(n0);
                net.mult["n_p0"] = delta - 1;
            }
            std::map<PointId, PointId> to_net; // L id -> net id
            to_net[p0] = "n_p0";
            int idx = 0;
            for (const auto& n : L.cluster.nodes) {
                if (!in.count(n.id) || n.id == p0) continue;
                PointNode m;
                m.id = "n" + std::to_string(idx++);
                if (n.predecessor) m.predecessor = to_net.at(*n.predecessor);
                for (const auto& t : n.proximate_to) m.proximate_to.push_back(to_net.at(t));
                net.cluster.nodes.push_back(m);
                net.mult[m.id] = 1;
                to_net[n.id] = m.id;
            }
            std::vector<PointId> aux_net_ids;
            for (size_t i = chosen.size(); i < slots; ++i) {
                PointNode m;
                m.id = "aux" + std::to_string(i);
                m.flags.general = true;
                net.cluster.nodes.push_back(m);
                net.mult[m.id] = 1;
                aux_net_ids.push_back(m.id);
            }
            if (!is_homaloidal(net)) continue;

            // general points of the member materialized in a working copy
            PlaneSystem work = L;
            NetAnchoring anchor;
            for (const auto& [lid, nid] : to_net) anchor.map[nid] = lid;
            for (const auto& nid : aux_net_ids) {
                PointId aux = work.cluster.fresh_id("m");
                PointNode m;
                m.id = aux;
                m.flags.general = true;
                work.cluster.nodes.push_back(m);
                work.mult[aux] = aux_mult;
                anchor.map[nid] = aux;
            }
            Int vdeg = virtual_image_degree(work, net, anchor);
            if (vdeg >= best.best_degree) continue;
            try {
                auto applied = apply_net(work, net, anchor);
                best.best_degree = std::min(vdeg, applied.image.degree);
                best.net = net;
                best.image = applied.image;
            } catch (const ValidationError&) {
                continue;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Brute-force minimal-degree oracle
// ---------------------------------------------------------------------------

OracleResult brute_force_min_oracle(const PlaneSystem& L, int depth, int aux, bool aux_on_member,
                                    size_t budget) {
    require_valid(L, "brute_force_min_oracle");
    struct State {
        PlaneSystem sys;
        int depth_left;
        int aux_left;
    };
    Int aux_mult = aux_on_member ? 1 : 0;
    OracleResult res{L.degree, true};
    std::deque<State> queue;
    std::set<std::string> seen;
    queue.push_back({L, depth, aux});
    seen.insert(canonical_signature(L) + "#" + std::to_string(aux));
    size_t processed = 0;
    while (!queue.empty()) {
        if (++processed > budget) {
            res.complete = false;
            break;
        }
        State st = queue.front();
        queue.pop_front();
        res.degree = std::min(res.degree, st.sys.degree);
        if (st.depth_left == 0) continue;
        std::vector<PointId> pts;
        for (const auto& n : st.sys.cluster.nodes) pts.push_back(n.id);
        size_t np = pts.size();
        // choose e existing points and 3-e fresh points
        for (int e = 3; e >= 0; --e) {
            if (3 - e > st.aux_left) continue;
            std::vector<size_t> idx(e);
            std::function<void(int, size_t)> choose = [&](int pos, size_t from) {
                if (pos == e) {
                    std::array<CenterSpec, 3> centers;
                    for (int t = 0; t < e; ++t) centers[t] = CenterSpec::existing(pts[idx[t]]);
                    for (int t = e; t < 3; ++t) centers[t] = CenterSpec::fresh(aux_mult);
                    try {
                        auto q = apply_quadratic(st.sys, centers);
                        std::string key = canonical_signature(q.image) + "#" +
                                          std::to_string(st.aux_left - (3 - e));
                        if (seen.insert(key).second)
                            queue.push_back({q.image, st.depth_left - 1, st.aux_left - (3 - e)});
                    } catch (const ValidationError&) {
                    }
                    return;
                }
                for (size_t i = from; i < np; ++i) {
                    idx[pos] = i;
                    choose(pos + 1, i + 1);
                }
            };
            choose(0, 0);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Smooth plane model test
// ---------------------------------------------------------------------------

SmoothAnswer smooth_model_test(const PlaneSystem& L, Int d) {
    if (d < 1) throw ValidationError("smooth_model_test requires d >= 1");
    if (is_line_case(AnySystem{L})) return d == 1 ? SmoothAnswer::Yes : SmoothAnswer::No;
    if (arithmetic_genus(L) != (d - 1) * (d - 2) / 2) return SmoothAnswer::No;
    RobustChain chain = robust_adjoint_chain(AnySystem{L});
    if (chain.m != d / 3) return SmoothAnswer::No;
    Int rem = d % 3;
    if (rem == 0) return chain.alpha == 0 ? SmoothAnswer::Yes : SmoothAnswer::No;
    if (rem == 1) return chain.alpha == 2 ? SmoothAnswer::Yes : SmoothAnswer::No;
    if (chain.alpha != 5) return SmoothAnswer::No;
    if (d >= 29 || d < 9) return SmoothAnswer::Yes;
    ClassificationResult cls = classify(AnySystem{L});
    if (cls.c != PairCase::R) return SmoothAnswer::Yes;
    return SmoothAnswer::Indeterminate;
}

} // namespace cremona
