#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cremona/base.hpp"

namespace cremona {

using PointId = std::string;

// Geometric tags consumed by the Hirzebruch-surface machinery. For plane
// clusters only `general` is meaningful.
struct PointFlags {
    bool on_E = false;            // on the negative section, or on its strict transform
    bool on_fiber_strict = false; // infinitely near point lying on the strict transform of its fiber
    bool general = false;         // synthesized general point
    std::optional<std::string> fiber; // fiber id shared by points on one fiber

    bool operator==(const PointFlags&) const = default;
};

// One proper or infinitely near point. `predecessor` is the point this one is
// infinitely near to of order 1; `proximate_to` always contains the
// predecessor and, for satellite points, one more ancestor.
struct PointNode {
    PointId id;
    std::optional<PointId> predecessor;
    std::vector<PointId> proximate_to;
    PointFlags flags;
};

// A proximity forest in topological order (predecessors precede successors),
// plus declared collinearity groups. A collinear group lists points lying on
// one line; infinitely near members mean the line's strict transform passes
// through them, and their predecessor chain down to a proper point must be in
// the group as well.
struct Cluster {
    std::vector<PointNode> nodes;
    std::vector<std::vector<PointId>> collinear;

    bool has(const PointId& id) const;
    const PointNode& at(const PointId& id) const;
    PointNode& at(const PointId& id);
    int index_of(const PointId& id) const; // -1 if absent

    bool is_proper(const PointId& id) const;
    std::vector<PointId> children_of(const PointId& id) const;
    // Predecessor chain of `id`, nearest first.
    std::vector<PointId> ancestors_of(const PointId& id) const;
    // Points proximate to `id`, i.e. q with id in q.proximate_to.
    std::vector<PointId> proximate_points_of(const PointId& id) const;
    bool in_group(const std::vector<PointId>& group, const PointId& id) const;

    PointId fresh_id(const std::string& prefix) const;
};

struct Violation {
    PointId id;
    std::string rule;
};

// Structural validation. Empty result iff all invariants hold; violations are
// data, not failures.
std::vector<Violation> validate_cluster(const Cluster& c);

void require_valid(const Cluster& c, const std::string& context);

using MultiplicityVector = std::map<PointId, Int>;

// For each point i: m_i - sum of m_j over j proximate to i. The assignment is
// pure iff all defects are >= 0.
std::map<PointId, Int> proximity_defects(const Cluster& c, const MultiplicityVector& m);

// Enriques unloading: while some strict exceptional class has negative
// intersection with the divisor class, subtract it (m_i gains 1, every m_j
// with j proximate to i loses 1). The fixed point is order-independent and
// matches lattice::effective_multiplicities_oracle.
MultiplicityVector unload(const Cluster& c, const MultiplicityVector& m);

// Same fixed point, but the point with negative defect is chosen by `pick`
// among candidates. Used by the order-independence property test.
MultiplicityVector unload_with_order(const Cluster& c, const MultiplicityVector& m,
                                     const std::function<size_t(size_t)>& pick);

} // namespace cremona
