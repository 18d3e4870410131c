#pragma once

#include <array>
#include <compare>

#include "cremona/systems.hpp"

namespace cremona {

// Both homaloidal identities and the proximity inequalities hold:
// d^2 - 1 = sum a_i^2 and 3(d-1) = sum a_i.
bool is_homaloidal(const PlaneSystem& net);

// (k, h, s): k = d - a0; h counts points other than p0 with 2a > k; s counts
// those satellite to p0. Lexicographically ordered; (1,2,0) is the quadratic.
struct Simplicity {
    Int k = 0;
    Int h = 0;
    Int s = 0;

    auto operator<=>(const Simplicity&) const = default;
};

Simplicity simplicity(const PlaneSystem& net);

// First proper point of maximal multiplicity (ties by cluster order).
PointId net_base_point(const PlaneSystem& net);

// A quadratic (or elm) center: an existing cluster point, a fresh general
// proper point, or a fresh general point infinitely near an existing one.
struct CenterSpec {
    enum class Kind { Existing, FreshProper, FreshNear };
    Kind kind = Kind::Existing;
    PointId id;       // Existing
    PointId near_of;  // FreshNear
    Int fresh_mult = 0;

    static CenterSpec existing(PointId p) { return {Kind::Existing, std::move(p), {}, 0}; }
    static CenterSpec fresh(Int mult = 0) { return {Kind::FreshProper, {}, {}, mult}; }
    static CenterSpec fresh_near(PointId p, Int mult = 0) {
        return {Kind::FreshNear, {}, std::move(p), mult};
    }
};

struct QuadResult {
    PlaneSystem image;
    std::array<PointId, 3> fundamental; // the three new base points of the inverse
    bool normalized = false;            // unloading had to remove split-off parts
};

// The quadratic transformation based at three centers in one of the allowed
// patterns: three proper points; (c0, c1 >1 c0, c2 proper); or
// (c0, c1 >1 c0, c2 >1 c1 not satellite). Degree 2d - a0 - a1 - a2; the new
// point opposite center i gets multiplicity d - a_j - a_k; every other point
// is carried with its proximity and collinearity data transformed.
QuadResult apply_quadratic(const PlaneSystem& L, const std::array<CenterSpec, 3>& centers);

struct NetAnchoring {
    std::map<PointId, PointId> map; // net point -> system point (partial injection)
};

void validate_anchoring(const PlaneSystem& L, const PlaneSystem& net, const NetAnchoring& a);

// The virtual image degree d*delta - sum alpha_i * m_i over anchored points.
Int virtual_image_degree(const PlaneSystem& L, const PlaneSystem& net, const NetAnchoring& a);

// Blow up the maximal-multiplicity proper point (or the given one) and move
// to F1: L(d; m0, ...) -> L_1(d-m0, d; ...). Points infinitely near p0 land
// on E; collinear groups through p0 become fibers.
HirzebruchSystem blow_up_max_point(const PlaneSystem& L,
                                   const std::optional<PointId>& at = std::nullopt);

// Inverse move from F1: degree h, new point of multiplicity h-k, on-E points
// become infinitely near to it, fibers become lines through it.
PlaneSystem contract_E1(const HirzebruchSystem& S);

struct ElmResult {
    HirzebruchSystem image;
    PointId created;
};

// Elementary transformation at a proper point p: blow up p, blow down the
// strict transform of its fiber. Off E: F_n -> F_{n-1}, class (k, h-mu).
// On E (or anywhere on F_0): F_n -> F_{n+1}, class (k, h+k-mu). The image of
// the old fiber is a new point of multiplicity k-mu, on E iff p was off E.
ElmResult elementary_transform(const HirzebruchSystem& S, const CenterSpec& at);

} // namespace cremona
