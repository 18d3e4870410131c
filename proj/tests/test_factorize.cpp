#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cremona/factorize.hpp"
#include "test_helpers.hpp"

using namespace cremona;
using namespace cremona::testing;

namespace {

PlaneSystem dejonquieres(Int delta) {
    std::vector<Int> m{delta - 1};
    for (Int i = 0; i < 2 * delta - 2; ++i) m.push_back(1);
    return plane_simple(delta, m, SystemKind::System);
}

// Degree-3 net whose simple points are all infinitely near p0, one of them
// satellite: forces descent branch (b).
PlaneSystem osculating_net() {
    return plane(3,
                 {p("p0"), near("p1", "p0"), sat("p2", "p1", "p0"), near("p3", "p2"),
                  near("p4", "p3")},
                 {2, 1, 1, 1, 1});
}

// Random homaloidal nets built by composing quadratics from the standard one.
PlaneSystem random_net(std::mt19937_64& rng, Int max_degree) {
    PlaneSystem net = plane_simple(2, {1, 1, 1});
    for (int step = 0; step < 12; ++step) {
        std::vector<PointId> ids;
        for (const auto& n : net.cluster.nodes) ids.push_back(n.id);
        std::array<CenterSpec, 3> centers;
        std::set<size_t> used;
        for (int i = 0; i < 3; ++i) {
            size_t pick = std::uniform_int_distribution<size_t>(0, ids.size())(rng);
            if (pick == ids.size() || used.count(pick)) {
                centers[i] = CenterSpec::fresh(0);
            } else {
                used.insert(pick);
                centers[i] = CenterSpec::existing(ids[pick]);
            }
        }
        try {
            auto q = apply_quadratic(net, centers);
            if (q.image.degree < 2 || q.image.degree > max_degree) continue;
            net = q.image;
        } catch (const ValidationError&) {
        }
    }
    return net;
}

} // namespace

TEST_CASE("descent base case errors") {
    CHECK_THROWS_AS(descent_step(plane_simple(2, {1, 1, 1})), ValidationError);
}

TEST_CASE("descent on the free de Jonquieres cubic: one step to the base") {
    PlaneSystem net = dejonquieres(3);
    auto [centers, next] = descent_step(net);
    CHECK(next.degree == 2);
    CHECK(simplicity(next) == Simplicity{1, 2, 0});
}

TEST_CASE("descent branch (b): satellite resolved, s drops by one") {
    PlaneSystem net = osculating_net();
    REQUIRE(is_homaloidal(net));
    REQUIRE(simplicity(net) == Simplicity{1, 4, 1});
    auto [centers, next] = descent_step(net);
    CHECK(centers[2].kind == CenterSpec::Kind::FreshProper);
    CHECK(next.degree == 3); // epsilon' = 2m - alpha_i = 0 here
    CHECK(simplicity(next) == Simplicity{1, 4, 0});
    CHECK(is_homaloidal(next));
}

TEST_CASE("nc_factor: base net has an empty factorization") {
    auto f = nc_factor(plane_simple(2, {1, 1, 1}));
    CHECK(f.steps.empty());
}

TEST_CASE("nc_factor on free de Jonquieres nets") {
    for (Int delta = 2; delta <= 6; ++delta) {
        auto f = nc_factor(dejonquieres(delta));
        CHECK(static_cast<Int>(f.steps.size()) == std::max<Int>(0, delta - 2));
        for (size_t i = 1; i < f.certificate.size(); ++i)
            CHECK(f.certificate[i] < f.certificate[i - 1]);
        if (!f.certificate.empty()) CHECK(f.certificate.back() == Simplicity{1, 2, 0});
    }
}

TEST_CASE("nc_factor on the satellite net") {
    auto f = nc_factor(osculating_net());
    CHECK(f.certificate.back() == Simplicity{1, 2, 0});
    for (size_t i = 1; i < f.certificate.size(); ++i) CHECK(f.certificate[i] < f.certificate[i - 1]);
}

TEST_CASE("nc_factor on random composed nets") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        PlaneSystem net = random_net(rng, 8);
        REQUIRE(is_homaloidal(net));
        auto f = nc_factor(net);
        for (size_t i = 1; i < f.certificate.size(); ++i)
            CHECK(f.certificate[i] < f.certificate[i - 1]);
        if (!f.certificate.empty()) CHECK(f.certificate.back() == Simplicity{1, 2, 0});
    }
}

TEST_CASE("apply_net: a single quadratic equals apply_quadratic") {
    PlaneSystem probe = plane_simple(7, {3, 2, 2});
    PlaneSystem net = plane_simple(2, {1, 1, 1});
    NetAnchoring anchor;
    anchor.map["p0"] = "p0";
    anchor.map["p1"] = "p1";
    anchor.map["p2"] = "p2";
    auto via_net = apply_net(probe, net, anchor);
    auto direct = apply_quadratic(probe, {CenterSpec::existing("p0"), CenterSpec::existing("p1"),
                                          CenterSpec::existing("p2")});
    CHECK(via_net.image.degree == direct.image.degree);
    CHECK(canonical_signature(via_net.image) == canonical_signature(direct.image));
}

TEST_CASE("apply_net: de Jonquieres cubic on an unanchored line gives a cubic") {
    PlaneSystem probe = plane_simple(1, {});
    auto r = apply_net(probe, dejonquieres(3), NetAnchoring{});
    CHECK(r.image.degree == 3);
    CHECK(arithmetic_genus(r.image) == 0);
}

TEST_CASE("apply_net degree equals the virtual degree on clean anchorings") {
    std::mt19937_64 rng(808);
    int done = 0;
    for (int trial = 0; trial < 120 && done < 40; ++trial) {
        PlaneSystem net = random_net(rng, 6);
        PlaneSystem probe = random_pure_system(rng, 4, 3);
        probe.degree += 4;
        // anchor a few proper net points to proper probe points
        NetAnchoring anchor;
        std::vector<PointId> nps, lps;
        for (const auto& n : net.cluster.nodes)
            if (!n.predecessor) nps.push_back(n.id);
        for (const auto& n : probe.cluster.nodes)
            if (!n.predecessor && probe.cluster.children_of(n.id).empty()) lps.push_back(n.id);
        size_t pairs = std::min(nps.size(), lps.size());
        for (size_t i = 0; i < pairs && i < 2; ++i) anchor.map[nps[i]] = lps[i];
        Int vdeg = virtual_image_degree(probe, net, anchor);
        if (vdeg < 1) continue;
        // avoid configurations where a line between two anchored centers splits
        bool risky = false;
        for (const auto& [n1, l1] : anchor.map)
            for (const auto& [n2, l2] : anchor.map)
                if (n1 < n2 && probe.mult_of(l1) + probe.mult_of(l2) > probe.degree) risky = true;
        if (risky) continue;
        NetApplication r;
        try {
            r = apply_net(probe, net, anchor);
        } catch (const ValidationError&) {
            continue;
        }
        if (r.image.degenerate) continue;
        CHECK(r.image.degree == vdeg);
        CHECK(arithmetic_genus(r.image) == arithmetic_genus(probe));
        ++done;
    }
    CHECK(done >= 20);
}

TEST_CASE("replaying recorded steps turns the net into a quadratic") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        PlaneSystem net = trial < 5 ? dejonquieres(trial + 2) : random_net(rng, 7);
        auto f = nc_factor(net);
        PlaneSystem work = net;
        for (const auto& step : f.steps) {
            work = apply_quadratic(work, step.centers).image;
            CHECK(is_homaloidal(work));
        }
        if (work.cluster.nodes.empty()) continue; // degenerated to a linear map
        CHECK(simplicity(work) == Simplicity{1, 2, 0});
        CHECK(work.degree == 2);
    }
}
