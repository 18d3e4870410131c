#pragma once

#include "cremona/factorize.hpp"

namespace cremona {

struct NefifyResult {
    BlowupLattice lattice;
    DivisorClass P;
    std::vector<std::pair<DivisorClass, Int>> negative; // removed class, times
    Int p_square = 0;
};

// Zariski decomposition of the last adjoint: repeatedly removes
// configuration-derived classes with negative intersection (strict
// exceptionals, fixed lines, fibers, the negative section, and low-degree
// pure (-1)-classes), returning the nef part and the removed negative part.
NefifyResult nefify(const AnySystem& last_adjoint);

// nullopt when the removal drifts out of the effective cone: a certificate
// that the input class was not effective to begin with.
std::optional<NefifyResult> try_nefify(const AnySystem& sys);

// Effectivity with Zariski certificates: virtual dimension when non-negative,
// otherwise the nef part must carry sections after the fixed part is removed.
bool certified_effective(const AnySystem& sys);

// The adjoint chain with certified emptiness, and alpha read off the nef part
// (0, the pencil multiplicity, or P^2+1), which is the dimension of |C+mK|
// under the generic-position assumption.
struct RobustChain {
    Int m = 0;
    Int alpha = 0;
    AnySystem last; // ad_m
    NefifyResult nef; // of ad_m
};

RobustChain robust_adjoint_chain(const AnySystem& input);

enum class PairCase { LINE, DP1, DP2, R, B1, B2 };
std::string to_string(PairCase c);

struct ClassificationResult {
    PairCase c = PairCase::LINE;
    Int m = 0;
    Int alpha = 0;
    Int n = 0; // DP2 / R / B2
    AnySystem model;
    std::string uniqueness_caveat; // empty when the model is unique
    bool generic_assumed = true;
};

ClassificationResult classify(const AnySystem& input);

struct RationalClassification {
    std::string tag; // "(i)".."(v)"
    PlaneSystem model;
    Int dimension = 0;
};

// Classification of nef positive-dimensional genus-0 systems into the five
// Cremona-minimal plane types, with the minimal model constructed by the
// actual elementary-transformation moves.
RationalClassification classify_rational_system(const AnySystem& input);

struct SharpStatus {
    bool sharp = false;
    bool sharpsharp = false;
    bool natural = false;
    Int flat_index = -1; // filled by flat_model / natural_model
};

SharpStatus sharp_status(const HirzebruchSystem& S);
std::pair<HirzebruchSystem, SharpStatus> sharp_model(const HirzebruchSystem& S);
std::pair<HirzebruchSystem, SharpStatus> flat_model(const HirzebruchSystem& S);
std::pair<HirzebruchSystem, SharpStatus> natural_model(const HirzebruchSystem& S);

// F_0 carries two rulings; swapping re-labels which one is the fibration.
HirzebruchSystem swap_rulings(const HirzebruchSystem& S);

struct ForestVertex {
    Int weight = 0;
    std::optional<PointId> point; // empty for roots and synthesized general points
    bool general = false;
    std::vector<size_t> children;
};

struct ForestComponent {
    std::vector<ForestVertex> vertices; // vertex 0 is the weight-0 root
};

struct WeightedForest {
    std::vector<ForestComponent> components;
};

// The weighted oriented forest of a natural model with n >= 2, including the
// n-1 general-point components (weight 1 for curves, 0 for systems).
WeightedForest build_forest(const HirzebruchSystem& natural);

std::string forest_to_dot(const WeightedForest& f);

struct GoodChainStep {
    std::optional<PointId> point; // empty for general points
    Int weight = 0;
};

struct GoodCluster {
    std::vector<std::vector<GoodChainStep>> chains; // one chain per used component
    std::vector<Int> sequence;                      // weights, sorted descending
    Int weight = 0;
};

// All maximal-weight paths of length n-1, deduplicated by weight sequence.
std::vector<GoodCluster> good_clusters(const WeightedForest& f, Int n);

struct MinimalModel {
    std::string type_tag; // "line", "cdp1".."cdp3", "cr0".."cr2", "cb1".."cb4"
    PlaneSystem system;
    std::string minimality = "guaranteed"; // or "oracle-verified" / "unverified"
    std::string caveat;
};

// Elm along each good cluster, land on F_1, contract. One model per cluster.
std::vector<MinimalModel> good_plane_models(const HirzebruchSystem& natural,
                                            const std::vector<GoodCluster>& clusters,
                                            const std::string& type_tag);

struct MinimizationResult {
    ClassificationResult classification;
    std::vector<MinimalModel> models; // several entries = Cremona-equivalent minimal models
};

MinimizationResult minimal_models(const AnySystem& input);

struct ReductionResult {
    Int best_degree = 0;
    PlaneSystem net;   // the best de Jonquieres net (delta = 1 encodes identity)
    PlaneSystem image; // its image
};

// Searches de Jonquieres nets centered at the maximal point over
// subsets of base points; the minimum equals the global single-map minimum.
ReductionResult dejonquieres_reduction(const PlaneSystem& L);

struct OracleResult {
    Int degree = 0;
    bool complete = true; // false when the search budget was exhausted
};

// Breadth-first search over sequences of at most `depth` quadratics centered
// at base points plus at most `aux` fresh general points, memoized on
// canonical forms. aux_on_member: general points of the member (mult 1)
// versus of the plane (mult 0).
OracleResult brute_force_min_oracle(const PlaneSystem& L, int depth, int aux,
                                    bool aux_on_member = true, size_t budget = 200000);

enum class SmoothAnswer { No, Yes, Indeterminate };

// Cremona equivalence to a smooth plane curve of degree d: genus check plus
// m = [d/3] and alpha matching d mod 3; the alpha branch for d = 2 (mod 3)
// is indeterminate in the ruled case for 9 <= d < 29.
SmoothAnswer smooth_model_test(const PlaneSystem& L, Int d);

} // namespace cremona
