#include "cremona/cluster.hpp"

#include <algorithm>
#include <set>

namespace cremona {

bool Cluster::has(const PointId& id) const { return index_of(id) >= 0; }

int Cluster::index_of(const PointId& id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
}

const PointNode& Cluster::at(const PointId& id) const {
    int i = index_of(id);
    if (i < 0) throw ValidationError("unknown point id '" + id + "'");
    return nodes[i];
}

PointNode& Cluster::at(const PointId& id) {
    int i = index_of(id);
    if (i < 0) throw ValidationError("unknown point id '" + id + "'");
    return nodes[i];
}

bool Cluster::is_proper(const PointId& id) const { return !at(id).predecessor.has_value(); }

std::vector<PointId> Cluster::children_of(const PointId& id) const {
    std::vector<PointId> out;
    for (const auto& n : nodes)
        if (n.predecessor && *n.predecessor == id) out.push_back(n.id);
    return out;
}

std::vector<PointId> Cluster::ancestors_of(const PointId& id) const {
    std::vector<PointId> out;
    const PointNode* n = &at(id);
    size_t guard = nodes.size() + 1;
    while (n->predecessor && guard-- > 0) {
        out.push_back(*n->predecessor);
        n = &at(*n->predecessor);
    }
    if (n->predecessor) throw ValidationError("predecessor cycle at '" + id + "'");
    return out;
}

std::vector<PointId> Cluster::proximate_points_of(const PointId& id) const {
    std::vector<PointId> out;
    for (const auto& n : nodes)
        if (std::find(n.proximate_to.begin(), n.proximate_to.end(), id) != n.proximate_to.end())
            out.push_back(n.id);
    return out;
}

bool Cluster::in_group(const std::vector<PointId>& group, const PointId& id) const {
    return std::find(group.begin(), group.end(), id) != group.end();
}

PointId Cluster::fresh_id(const std::string& prefix) const {
    for (int k = 0;; ++k) {
        PointId cand = prefix + (k == 0 ? "" : "_" + std::to_string(k));
        if (!has(cand)) return cand;
    }
}

std::vector<Violation> validate_cluster(const Cluster& c) {
    std::vector<Violation> out;
    std::set<PointId> seen;
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const PointNode& n = c.nodes[i];
        if (!seen.insert(n.id).second) {
            out.push_back({n.id, "duplicate id"});
            continue;
        }
        auto known_before = [&](const PointId& q) { return seen.count(q) > 0 && q != n.id; };
        if (n.predecessor) {
            if (!known_before(*n.predecessor))
                out.push_back({n.id, "predecessor not defined earlier in the cluster"});
            if (std::find(n.proximate_to.begin(), n.proximate_to.end(), *n.predecessor) ==
                n.proximate_to.end())
                out.push_back({n.id, "predecessor not in proximate_to"});
        } else {
            if (!n.proximate_to.empty())
                out.push_back({n.id, "proper point has nonempty proximate_to"});
        }
        std::set<PointId> prox(n.proximate_to.begin(), n.proximate_to.end());
        if (prox.size() != n.proximate_to.size())
            out.push_back({n.id, "duplicate entries in proximate_to"});
        if (n.predecessor && n.proximate_to.size() > 2)
            out.push_back({n.id, "more than two proximities"});
        if (n.predecessor && n.proximate_to.size() == 2) {
            PointId other;
            for (const auto& q : n.proximate_to)
                if (q != *n.predecessor) other = q;
            if (other.empty()) {
                out.push_back({n.id, "degenerate satellite target"});
            } else if (!known_before(other)) {
                out.push_back({n.id, "satellite target not defined earlier in the cluster"});
            } else {
                // A satellite lies on the strict transform of the target's
                // exceptional curve, so the predecessor must be proximate to
                // the target as well.
                const PointNode& pred = c.nodes[c.index_of(*n.predecessor)];
                if (std::find(pred.proximate_to.begin(), pred.proximate_to.end(), other) ==
                    pred.proximate_to.end())
                    out.push_back({n.id, "satellite target not proximate to predecessor"});
            }
        }
        for (const auto& q : n.proximate_to)
            if (!known_before(q)) out.push_back({n.id, "proximate_to references unknown or later id"});
    }
    for (const auto& g : c.collinear) {
        for (const auto& id : g) {
            if (!seen.count(id)) {
                out.push_back({id, "collinear group references unknown id"});
                continue;
            }
            const PointNode& n = c.nodes[c.index_of(id)];
            if (n.predecessor &&
                std::find(g.begin(), g.end(), *n.predecessor) == g.end())
                out.push_back({id, "collinear group missing predecessor of infinitely near member"});
        }
    }
    return out;
}

void require_valid(const Cluster& c, const std::string& context) {
    auto v = validate_cluster(c);
    if (!v.empty())
        throw ValidationError(context + ": invalid cluster: " + v.front().id + ": " + v.front().rule);
}

std::map<PointId, Int> proximity_defects(const Cluster& c, const MultiplicityVector& m) {
    if (m.size() != c.nodes.size())
        throw ValidationError("multiplicity vector does not match cluster points");
    for (const auto& [id, _] : m)
        if (!c.has(id)) throw ValidationError("multiplicity for unknown id '" + id + "'");
    std::map<PointId, Int> out;
    for (const auto& n : c.nodes) out[n.id] = m.at(n.id);
    for (const auto& n : c.nodes)
        for (const auto& target : n.proximate_to) out[target] -= m.at(n.id);
    return out;
}

MultiplicityVector unload_with_order(const Cluster& c, const MultiplicityVector& m,
                                     const std::function<size_t(size_t)>& pick) {
    MultiplicityVector cur = m;
    auto defects = proximity_defects(c, cur);
    // The subtraction counts approach the least fixed point monotonically;
    // each count is bounded by the total mass pushed down the forest, which
    // can grow by a factor of at most two per depth level.
    Int mass = 2;
    for (const auto& [_, v] : m) mass = checked_add(mass, v >= 0 ? v : -v);
    Int depth_cap = std::min<Int>(static_cast<Int>(c.nodes.size()) + 2, 26);
    Int bound = std::min<Int>(checked_mul(mass, Int{1} << depth_cap), 20000000);
    for (Int it = 0; it <= bound; ++it) {
        std::vector<PointId> bad;
        for (const auto& n : c.nodes)
            if (defects.at(n.id) < 0) bad.push_back(n.id);
        if (bad.empty()) return cur;
        const PointId& i = bad[pick(bad.size()) % bad.size()];
        cur[i] += 1;
        defects[i] += 1;
        for (const auto& t : c.at(i).proximate_to) defects[t] -= 1;
        for (const auto& j : c.proximate_points_of(i)) {
            cur[j] -= 1;
            defects[j] -= 1;
            for (const auto& t : c.at(j).proximate_to) defects[t] += 1;
        }
    }
    throw InternalError("unloading did not terminate within its iteration bound");
}

MultiplicityVector unload(const Cluster& c, const MultiplicityVector& m) {
    return unload_with_order(c, m, [](size_t) { return 0; });
}

} // namespace cremona
