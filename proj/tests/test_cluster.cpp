#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cremona/cluster.hpp"
#include "cremona/lattice.hpp"
#include "test_helpers.hpp"

using namespace cremona;
using namespace cremona::testing;

namespace {

Cluster satellite_chain() {
    // p0 <- p1 <- p2 with p2 satellite to p0
    Cluster c;
    c.nodes = {p("p0"), near("p1", "p0"), sat("p2", "p1", "p0")};
    return c;
}

} // namespace

TEST_CASE("validate: single proper point") {
    Cluster c;
    c.nodes = {p("p0")};
    CHECK(validate_cluster(c).empty());
}

TEST_CASE("validate: predecessor must be in proximate_to") {
    Cluster c;
    c.nodes = {p("p0")};
    PointNode bad;
    bad.id = "p1";
    bad.predecessor = "p0";
    c.nodes.push_back(bad);
    auto v = validate_cluster(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].id == "p1");
    CHECK(v[0].rule == "predecessor not in proximate_to");
}

TEST_CASE("validate: satellite chain is valid") {
    CHECK(validate_cluster(satellite_chain()).empty());
}

TEST_CASE("validate: proper point with proximities is invalid") {
    Cluster c;
    c.nodes = {p("p0")};
    c.nodes[0].proximate_to = {"p0"};
    CHECK(!validate_cluster(c).empty());
}

TEST_CASE("validate: satellite target must be proximate to the predecessor") {
    // p0 <- p1 <- p2 <- p3 with p3 claiming to be satellite to p0 while p2 is
    // not proximate to p0
    Cluster c;
    c.nodes = {p("p0"), near("p1", "p0"), near("p2", "p1"), sat("p3", "p2", "p0")};
    auto v = validate_cluster(c);
    REQUIRE(!v.empty());
    CHECK(v[0].id == "p3");
}

TEST_CASE("proximity defects") {
    Cluster single;
    single.nodes = {p("p0")};
    auto d0 = proximity_defects(single, {{"p0", 3}});
    CHECK(d0.at("p0") == 3);

    Cluster c = satellite_chain();
    auto d = proximity_defects(c, {{"p0", 1}, {"p1", 1}, {"p2", 1}});
    CHECK(d.at("p0") == -1);
    CHECK(d.at("p1") == 0);
    CHECK(d.at("p2") == 1);

    auto d2 = proximity_defects(c, {{"p0", 2}, {"p1", 0}, {"p2", 0}});
    CHECK(d2.at("p0") == 2);
    CHECK(d2.at("p1") == 0);
    CHECK(d2.at("p2") == 0);

    CHECK_THROWS_AS(proximity_defects(c, {{"p0", 1}, {"p1", 1}, {"zz", 1}}), ValidationError);
}

TEST_CASE("unload: pure input is a fixed point") {
    Cluster c = satellite_chain();
    MultiplicityVector m{{"p0", 2}, {"p1", 0}, {"p2", 0}};
    CHECK(unload(c, m) == m);
}

TEST_CASE("unload: satellite chain (1,1,1) -> (2,0,0)") {
    Cluster c = satellite_chain();
    auto r = unload(c, {{"p0", 1}, {"p1", 1}, {"p2", 1}});
    CHECK(r.at("p0") == 2);
    CHECK(r.at("p1") == 0);
    CHECK(r.at("p2") == 0);
}

TEST_CASE("unload: (0,1) over p1>p0 -> (1,0)") {
    Cluster c;
    c.nodes = {p("p0"), near("p1", "p0")};
    auto r = unload(c, {{"p0", 0}, {"p1", 1}});
    CHECK(r.at("p0") == 1);
    CHECK(r.at("p1") == 0);
}

TEST_CASE("unload is idempotent and satisfies proximity") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 300; ++trial) {
        Cluster c = random_cluster(rng, 8);
        auto m = random_mults(rng, c, -2, 10);
        auto u = unload(c, m);
        CHECK(unload(c, u) == u);
        for (const auto& [_, d] : proximity_defects(c, u)) CHECK(d >= 0);
        for (const auto& [_, v] : u) CHECK(v >= 0);
    }
}

TEST_CASE("unload is order-independent") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        Cluster c = random_cluster(rng, 7);
        auto m = random_mults(rng, c, 0, 8);
        auto first = unload(c, m);
        std::mt19937_64 pick_rng(trial);
        auto shuffled = unload_with_order(c, m, [&](size_t n) {
            return std::uniform_int_distribution<size_t>(0, n - 1)(pick_rng);
        });
        CHECK(first == shuffled);
        auto last = unload_with_order(c, m, [](size_t n) { return n - 1; });
        CHECK(first == last);
    }
}

TEST_CASE("unload agrees with the lattice oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        Cluster c = random_cluster(rng, 8);
        auto m = random_mults(rng, c, 0, 10);
        BlowupLattice L{SurfaceBase::P2, 0, c};
        DivisorClass D = plane_class(L, 40, m);
        DivisorClass oracle = effective_multiplicities_oracle(L, D);
        auto u = unload(c, m);
        DivisorClass expect = plane_class(L, 40, u);
        CHECK(oracle == expect);
    }
}
