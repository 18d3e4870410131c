#pragma once

#include "cremona/transforms.hpp"

namespace cremona {

struct DescentStep {
    std::array<CenterSpec, 3> centers; // referring to the net as it was before the step
    bool aux_general = false;          // third center is the auxiliary general point
    Simplicity before;
    Simplicity after;
};

// A decomposition of a homaloidal net into quadratic transformations, with
// the strictly decreasing simplicity certificate ending at (1,2,0).
struct Factorization {
    std::vector<DescentStep> steps;
    std::vector<Simplicity> certificate; // simplicities of the nets along the descent
};

// One step of the descent: picks quadratic centers that strictly lower the
// simplicity of the net. Branch (a) uses two high points p_i, p_j admitting
// the quadratic at (p0, p_i, p_j); branch (b) resolves a satellite with an
// auxiliary general point. Error on the base case (net already quadratic).
std::pair<std::array<CenterSpec, 3>, PlaneSystem> descent_step(const PlaneSystem& net);

Factorization nc_factor(const PlaneSystem& net);

struct NetApplication {
    PlaneSystem image;
    NetAnchoring final_anchor; // net points of the final (quadratic) net -> image points
};

// Applies a homaloidal net to a system by replaying the net's quadratic
// factorization step by step, each step followed by unloading.
NetApplication apply_net(const PlaneSystem& L, const PlaneSystem& net, const NetAnchoring& anchor);

} // namespace cremona
