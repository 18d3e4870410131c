#include "cremona/factorize.hpp"

#include <algorithm>

namespace cremona {

namespace {

bool quadratic_exists(const PlaneSystem& net, const PointId& a, const PointId& b,
                      const PointId& c) {
    try {
        // Pattern detection performs all configuration checks; the image is
        // not needed here.
        std::array<CenterSpec, 3> centers{CenterSpec::existing(a), CenterSpec::existing(b),
                                          CenterSpec::existing(c)};
        apply_quadratic(net, centers);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

} // namespace

std::pair<std::array<CenterSpec, 3>, PlaneSystem> descent_step(const PlaneSystem& net) {
    if (!is_homaloidal(net)) throw ValidationError("descent_step requires a homaloidal net");
    if (net.cluster.nodes.empty())
        throw ValidationError("descent_step: base case (linear map)");
    Simplicity s = simplicity(net);
    if (s <= Simplicity{1, 2, 0}) throw ValidationError("descent_step: base case");

    PointId p0 = net_base_point(net);
    Int k = s.k;
    std::vector<PointId> high; // p_1..p_h in cluster order
    for (const auto& n : net.cluster.nodes)
        if (n.id != p0 && 2 * net.mult_of(n.id) > k) high.push_back(n.id);
    if (high.size() < 2) throw InternalError("descent_step: fewer than two high points");

    // Branch (a): the best pair admitting the quadratic at (p0, p_i, p_j).
    int bi = -1, bj = -1;
    Int best = -1;
    for (size_t i = 0; i < high.size(); ++i) {
        for (size_t j = i + 1; j < high.size(); ++j) {
            if (!quadratic_exists(net, p0, high[i], high[j])) continue;
            Int w = net.mult_of(high[i]) + net.mult_of(high[j]);
            if (w > best) {
                best = w;
                bi = static_cast<int>(i);
                bj = static_cast<int>(j);
            }
        }
    }
    if (bi >= 0) {
        std::array<CenterSpec, 3> centers{CenterSpec::existing(p0), CenterSpec::existing(high[bi]),
                                          CenterSpec::existing(high[bj])};
        auto res = apply_quadratic(net, centers);
        return {centers, res.image};
    }

    // Branch (b): resolve a satellite p_j > p_i > p0 with p_j satellite to p0,
    // using an auxiliary general point.
    auto find_satellite = [&](bool restrict_high) -> std::optional<std::pair<PointId, PointId>> {
        for (const auto& n : net.cluster.nodes) {
            if (restrict_high && 2 * net.mult_of(n.id) <= k) continue;
            if (!n.predecessor) continue;
            bool sat_p0 = std::find(n.proximate_to.begin(), n.proximate_to.end(), p0) !=
                              n.proximate_to.end() &&
                          *n.predecessor != p0;
            if (!sat_p0) continue;
            const PointId& pi = *n.predecessor;
            const PointNode& pin = net.cluster.at(pi);
            if (pin.predecessor && *pin.predecessor == p0) return std::make_pair(pi, n.id);
        }
        return std::nullopt;
    };
    auto sat = find_satellite(true);
    if (!sat) sat = find_satellite(false);
    if (!sat)
        throw ValidationError("net not realizable: no quadratic pair and no satellite to resolve");
    std::array<CenterSpec, 3> centers{CenterSpec::existing(p0), CenterSpec::existing(sat->first),
                                      CenterSpec::fresh(0)};
    auto res = apply_quadratic(net, centers);
    return {centers, res.image};
}

Factorization nc_factor(const PlaneSystem& net) {
    if (!is_homaloidal(net)) throw ValidationError("nc_factor requires a homaloidal net");
    Factorization out;
    PlaneSystem cur = net;
    if (cur.cluster.nodes.empty()) return out; // linear map
    Simplicity s = simplicity(cur);
    out.certificate.push_back(s);
    Int guard = checked_mul(std::max<Int>(s.k, 1),
                            checked_mul(s.h + 1, s.s + 1)) + s.h + 8;
    while (simplicity(cur) > Simplicity{1, 2, 0}) {
        if (static_cast<Int>(out.steps.size()) > guard)
            throw InternalError("Noether-Castelnuovo descent stalled");
        auto [centers, next] = descent_step(cur);
        DescentStep st;
        st.centers = centers;
        st.aux_general = std::any_of(centers.begin(), centers.end(), [](const CenterSpec& c) {
            return c.kind != CenterSpec::Kind::Existing;
        });
        st.before = simplicity(cur);
        st.after = simplicity(next);
        if (!(st.after < st.before)) throw InternalError("descent did not decrease simplicity");
        if (!is_homaloidal(next)) throw InternalError("descent image is not a homaloidal net");
        out.steps.push_back(st);
        out.certificate.push_back(st.after);
        cur = next;
    }
    return out;
}

namespace {

// Materializes the image of a net point inside the probe system, extending
// the anchoring. Predecessor chains are mirrored so that center patterns
// agree on both sides.
PointId ensure_anchor(PlaneSystem& L, const PlaneSystem& net, std::map<PointId, PointId>& anc,
                      const PointId& net_id) {
    auto it = anc.find(net_id);
    if (it != anc.end()) return it->second;
    const PointNode& nn = net.cluster.at(net_id);
    PointNode m;
    m.flags.general = true;
    if (nn.predecessor) {
        PointId lp = ensure_anchor(L, net, anc, *nn.predecessor);
        m.predecessor = lp;
        m.proximate_to = {lp};
    }
    m.id = L.cluster.fresh_id("a");
    L.cluster.nodes.push_back(m);
    L.mult[m.id] = 0;
    anc[net_id] = m.id;
    return m.id;
}

} // namespace

NetApplication apply_net(const PlaneSystem& L, const PlaneSystem& net, const NetAnchoring& anchor) {
    if (!is_homaloidal(net)) throw ValidationError("apply_net requires a homaloidal net");
    validate_anchoring(L, net, anchor);

    PlaneSystem work_net = net;
    PlaneSystem work_L = L;
    std::map<PointId, PointId> anc = anchor.map;

    if (work_net.cluster.nodes.empty()) return {work_L, NetAnchoring{anc}}; // linear

    Simplicity s0 = simplicity(work_net);
    Int guard = checked_mul(std::max<Int>(s0.k, 1), checked_mul(s0.h + 1, s0.s + 1)) + s0.h + 16;
    for (Int it = 0;; ++it) {
        if (it > guard) throw InternalError("apply_net: descent stalled");
        bool base = simplicity(work_net) <= Simplicity{1, 2, 0};
        std::array<PointId, 3> net_ids;
        if (base) {
            if (work_net.cluster.nodes.size() != 3)
                throw InternalError("quadratic net does not have three base points");
            for (int i = 0; i < 3; ++i) net_ids[i] = work_net.cluster.nodes[i].id;
        } else {
            auto [centers, _] = descent_step(work_net);
            for (int i = 0; i < 3; ++i) {
                if (centers[i].kind == CenterSpec::Kind::Existing) {
                    net_ids[i] = centers[i].id;
                } else {
                    // auxiliary general point, added to the net itself
                    PointId aux = work_net.cluster.fresh_id("x");
                    PointNode n;
                    n.id = aux;
                    n.flags.general = true;
                    work_net.cluster.nodes.push_back(n);
                    work_net.mult[aux] = 0;
                    net_ids[i] = aux;
                }
            }
        }
        std::array<CenterSpec, 3> net_centers, L_centers;
        for (int i = 0; i < 3; ++i) {
            net_centers[i] = CenterSpec::existing(net_ids[i]);
            L_centers[i] = CenterSpec::existing(ensure_anchor(work_L, work_net, anc, net_ids[i]));
        }
        auto qn = apply_quadratic(work_net, net_centers);
        auto ql = apply_quadratic(work_L, L_centers);
        std::map<PointId, PointId> next_anc;
        for (const auto& [nid, lid] : anc)
            if (qn.image.cluster.has(nid) && ql.image.cluster.has(lid)) next_anc[nid] = lid;
        for (int i = 0; i < 3; ++i)
            if (qn.image.cluster.has(qn.fundamental[i]) && ql.image.cluster.has(ql.fundamental[i]))
                next_anc[qn.fundamental[i]] = ql.fundamental[i];
        work_net = qn.image;
        work_L = ql.image;
        anc = next_anc;
        if (base) break;
    }
    return {work_L, NetAnchoring{anc}};
}

} // namespace cremona
