#include <doctest.h>

#include <string>

#include "nilhodge/defo.hpp"
#include "nilhodge/manifest.hpp"

using namespace nilhodge;

namespace {

// Expects parse_manifest(text) to fail at `line`; returns the error.
ManifestError failure(const std::string& text) {
    try {
        parse_manifest(text, "case.json");
    } catch (const ManifestError& e) {
        return e;
    }
    FAIL("manifest was accepted");
    return ManifestError("", 0, "", "");
}

const char* kHeisenberg = R"({
  "name": "h",
  "kind": "lie-algebra",
  "dimension": 3,
  "structure": [
    {"k": 3, "form": "f1^f2", "coeff": "-1"}
  ]
})";

}  // namespace

TEST_CASE("builtin manifests load and round-trip") {
    for (const char* name : {"iwasawa", "torus3", "lab-t", "lab-t2"}) {
        CAPTURE(name);
        const Manifest m = load_manifest(name, default_data_dir());
        CHECK(m.name == name);
        const std::string text = serialize_manifest(m);
        const Manifest again = parse_manifest(text, "roundtrip");
        CHECK(serialize_manifest(again) == text);
        if (m.kind == Manifest::Kind::LieAlgebra) {
            CHECK(again.spec() == m.spec());
            CHECK(again.psi1() == m.psi1());
            CHECK(again.points.size() == m.points.size());
        } else {
            CHECK(again.ranks == m.ranks);
            CHECK(again.differentials == m.differentials);
        }
    }
    // With and without the extension, and as a path.
    CHECK(resolve_manifest("iwasawa.json", default_data_dir()) == resolve_manifest("iwasawa", default_data_dir()));
    const auto path = (default_data_dir() / "torus3.json").string();
    CHECK(load_manifest(path, "/nonexistent").name == "torus3");
}

TEST_CASE("iwasawa manifest contents") {
    const Manifest m = load_manifest("iwasawa", default_data_dir());
    CHECK(m.dimension == 3);
    CHECK(m.parameters.size() == 6);
    CHECK(m.order == 2);
    const auto spec = m.spec();
    CHECK(spec.dphi(2).str() == "-f1^f2");
    CHECK(m.psi1().str() == "t11*th1.c1+t12*th1.c2+t21*th2.c1+t22*th2.c2+t31*th3.c1+t32*th3.c2");
    REQUIRE(m.find_point("iii") != nullptr);
    const Point p = complete_point(m.ring, m.find_point("iii")->values);
    CHECK(p.at("t11") == GaussianRational(1));
    CHECK(p.at("t22") == GaussianRational(1));
    CHECK(p.at("t12").is_zero());
    CHECK(m.find_point("iv") == nullptr);
}

TEST_CASE("written monomial order folds into the sign") {
    std::string text = kHeisenberg;
    text.replace(text.find("f1^f2"), 5, "f2^f1");
    text.replace(text.find("\"-1\""), 4, "\"1\"");
    const auto spec = parse_manifest(text).spec();
    CHECK(spec.dphi(2).str() == "-f1^f2");
}

TEST_CASE("structure with nonzero d-squared is rejected at the offending entry") {
    const std::string text = R"({
  "name": "bad",
  "kind": "lie-algebra",
  "dimension": 3,
  "structure": [
    {"k": 2, "form": "f3^c1", "coeff": "1"},
    {"k": 3, "form": "f1^f2", "coeff": "1"}
  ]
})";
    const ManifestError e = failure(text);
    CHECK(e.line() == 6);
    CHECK(e.pointer() == "/structure/0");
    CHECK(std::string(e.what()).find("d^2(f2)") != std::string::npos);
    CHECK(std::string(e.what()).rfind("case.json:6:", 0) == 0);
}

TEST_CASE("schema violations carry lines") {
    SUBCASE("unknown field") {
        std::string text = kHeisenberg;
        text.replace(text.find("\"dimension\""), 0, "\"dimesnion\": 3,\n  ");
        const ManifestError e = failure(text);
        CHECK(e.line() == 4);
        CHECK(e.detail().find("unknown field 'dimesnion'") != std::string::npos);
    }
    SUBCASE("malformed JSON") {
        std::string text = kHeisenberg;
        text.replace(text.find("\"-1\""), 4, "-1,");
        const ManifestError e = failure(text);
        CHECK(e.line() == 6);
        CHECK(e.detail().find("malformed JSON") != std::string::npos);
    }
    SUBCASE("missing field") {
        std::string text = kHeisenberg;
        text.replace(text.find("\"dimension\": 3,"), 15, "");
        CHECK(failure(text).detail().find("missing required field 'dimension'") != std::string::npos);
    }
    SUBCASE("(0,2) structure term") {
        std::string text = kHeisenberg;
        text.replace(text.find("f1^f2"), 5, "c1^c2");
        const ManifestError e = failure(text);
        CHECK(e.line() == 6);
        CHECK(e.pointer() == "/structure/0/form");
    }
    SUBCASE("bad coefficient") {
        std::string text = kHeisenberg;
        text.replace(text.find("\"-1\""), 4, "\"1/0\"");
        CHECK(failure(text).line() == 6);
    }
    SUBCASE("index out of range") {
        std::string text = kHeisenberg;
        text.replace(text.find("\"k\": 3"), 6, "\"k\": 4");
        CHECK(failure(text).pointer() == "/structure/0/k");
    }
    SUBCASE("wrong kind") {
        std::string text = kHeisenberg;
        text.replace(text.find("lie-algebra"), 11, "lie");
        CHECK(failure(text).line() == 3);
    }
}

TEST_CASE("first-order deformations must be dbar-closed") {
    std::string text = kHeisenberg;
    text.replace(text.rfind('}'), 1,
                 ",\n  \"parameters\": [\"t\"],\n  \"deformation\": [{\"i\": 1, \"lambda\": 3, \"coeff\": \"t\"}]\n}");
    const ManifestError e = failure(text);
    CHECK(e.pointer() == "/deformation");
    CHECK(e.line() == 10);

    SUBCASE("unknown parameter in a coefficient") {
        std::string t2 = kHeisenberg;
        t2.replace(t2.rfind('}'), 1,
                   ",\n  \"parameters\": [\"t\"],\n  \"deformation\": [{\"i\": 1, \"lambda\": 1, \"coeff\": \"u\"}]\n}");
        CHECK(failure(t2).pointer() == "/deformation/0/coeff");
    }
}

TEST_CASE("free complexes") {
    const Manifest m = load_manifest("lab-t2", default_data_dir());
    CHECK(m.kind == Manifest::Kind::FreeComplex);
    CHECK(m.complex().order_bound() == 5);

    const std::string bad = R"({
  "name": "bad",
  "kind": "free-complex",
  "ranks": [1, 1, 1],
  "differentials": [
    [["t"]],
    [["1"]]
  ]
})";
    const ManifestError e = failure(bad);
    CHECK(e.pointer() == "/differentials/0");
    CHECK(e.line() == 6);

    std::string shape = bad;
    shape.replace(shape.find("[[\"1\"]]"), 7, "[[\"1\", \"t\"]]");
    CHECK(failure(shape).pointer() == "/differentials/1/0");
}
