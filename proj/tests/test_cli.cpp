#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cremona/json_io.hpp"

using namespace cremona;

namespace {

const char* kCubic = R"({
  "format": 1,
  "surface": {"type": "P2"},
  "degree": 3,
  "points": []
})";

const char* kTacnodal = R"({
  "format": 1,
  "kind": "curve",
  "surface": {"type": "Fn", "n": 3},
  "class": {"k": 6, "h": 18},
  "points": [
    {"id": "p", "mult": 3, "flags": {"fiber": "f0"}},
    {"id": "q", "mult": 2, "flags": {"fiber": "f0"}},
    {"id": "r", "mult": 2, "predecessor": "q", "proximate": ["q"]}
  ]
})";

const char* kQuadraticNet = R"({
  "format": 1,
  "kind": "system",
  "role": "net",
  "surface": {"type": "P2"},
  "degree": 2,
  "points": [
    {"id": "a", "mult": 1}, {"id": "b", "mult": 1}, {"id": "c", "mult": 1}
  ]
})";

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/") + name;
    std::ofstream f(path);
    f << content;
    return path;
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    int rc = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    return rc;
}

} // namespace

TEST_CASE("round trip: parse(serialize(x)) == x") {
    AnySystem s = parse_system_text(kTacnodal);
    Json j = system_to_json(s);
    AnySystem s2 = parse_system(j);
    CHECK(system_to_json(s2) == j);
}

TEST_CASE("strict parsing rejects unknown fields and bad format") {
    CHECK_THROWS_AS(parse_system_text(R"({"format":2,"surface":{"type":"P2"},"degree":1})"),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_system_text(
            R"({"format":1,"surface":{"type":"P2"},"degree":1,"pointz":[]})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_system_text(
            R"({"format":1,"surface":{"type":"P2"},"degree":1,"points":[{"id":"a","multt":1}]})"),
        ValidationError);
}

TEST_CASE("render notation") {
    AnySystem b1 = parse_system_text(R"({
      "format": 1, "surface": {"type": "P2"}, "degree": 14,
      "points": [
        {"id": "p0", "mult": 8},
        {"id": "b", "mult": 4, "predecessor": "p0", "proximate": ["p0"]},
        {"id": "a", "mult": 4, "predecessor": "b", "proximate": ["b", "p0"]},
        {"id": "t", "mult": 3, "predecessor": "a", "proximate": ["a"]}
      ]})");
    CHECK(render_system(b1) == "L(14;(8,[4^2]),3)");
    AnySystem f3 = parse_system_text(kTacnodal);
    CHECK(render_system(f3) == "L_3(6,18;3,(2,[2]))");
}

TEST_CASE("cli classify on the cubic") {
    std::string path = write_temp("cubic.json", kCubic);
    std::string out;
    CHECK(run({"classify", path}, &out) == 0);
    Json j = Json::parse(out);
    CHECK(j["case"] == "DP1");
    CHECK(j["m"] == 1);
    CHECK(j["alpha"] == 0);
}

TEST_CASE("cli minimize on the tacnodal example emits the two degree-14 models") {
    std::string path = write_temp("tacnodal.json", kTacnodal);
    std::string out;
    CHECK(run({"minimize", path}, &out) == 0);
    Json j = Json::parse(out);
    REQUIRE(j["models"].size() == 2);
    std::set<std::string> notations;
    for (const auto& m : j["models"]) {
        CHECK(m["system"]["degree"] == 14);
        notations.insert(m["notation"].get<std::string>());
    }
    CHECK(notations.count("L(14;(8,[4^2]),3)") == 1);
    CHECK(notations.count("L(14;(8,[5,3]),2^2)") == 1);
}

TEST_CASE("cli factor on the standard quadratic net") {
    std::string path = write_temp("qnet.json", kQuadraticNet);
    std::string out;
    CHECK(run({"factor", path}, &out) == 0);
    Json j = Json::parse(out);
    CHECK(j["steps"].empty());
}

TEST_CASE("cli reports are byte-deterministic") {
    std::string path = write_temp("tacnodal2.json", kTacnodal);
    std::string a, b;
    CHECK(run({"minimize", path}, &a) == 0);
    CHECK(run({"minimize", path}, &b) == 0);
    CHECK(a == b);
}

TEST_CASE("cli exit codes") {
    std::string bad = write_temp("bad.json", "{nope");
    CHECK(run({"classify", bad}) == 2);
    std::string badfield = write_temp("badfield.json",
                                      R"({"format":1,"surface":{"type":"P2"},"degree":3,"zz":1})");
    CHECK(run({"classify", badfield}) == 2);
    CHECK(run({"wat", bad}) == 2);
    std::string missing = "/tmp/definitely_missing_file.json";
    CHECK(run({"classify", missing}) == 2);
}

TEST_CASE("cli validate reports violations as data") {
    std::string path = write_temp("badcluster.json", R"({
      "format": 1, "surface": {"type": "P2"}, "degree": 3,
      "points": [
        {"id": "a", "mult": 1, "proximate": ["a"]},
        {"id": "b", "mult": 1}
      ]})");
    std::string out;
    CHECK(run({"validate", path}, &out) == 2);
    Json j = Json::parse(out);
    CHECK(j["valid"] == false);
    CHECK(!j["violations"].empty());
}

TEST_CASE("cli forest emits DOT") {
    std::string path = write_temp("tacnodal3.json", kTacnodal);
    std::string out;
    CHECK(run({"forest", "--format", "dot", path}, &out) == 0);
    CHECK(out.find("digraph forest") != std::string::npos);
}

TEST_CASE("cli oracle and sharp commands") {
    std::string path = write_temp("nodal.json", R"({
      "format": 1, "surface": {"type": "P2"}, "degree": 3,
      "points": [{"id": "a", "mult": 2}]})");
    std::string out;
    CHECK(run({"oracle", "--depth", "2", "--aux", "4", path}, &out) == 0);
    Json j = Json::parse(out);
    CHECK(j["min_degree"] == 1);

    std::string f3 = write_temp("tacnodal4.json", kTacnodal);
    CHECK(run({"sharp", f3}, &out) == 0);
    Json js = Json::parse(out);
    CHECK(js["status"]["sharp"] == true);
}
