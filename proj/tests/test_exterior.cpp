#include <doctest.h>

#include <random>

#include "nilhodge/exterior.hpp"

using namespace nilhodge;

namespace {

using GR = GaussianRational;
using F = Form<GR>;

constexpr int n3 = 3;

ComplexStructureSpec iwasawa() {
    F d3(n3);
    d3.add(0b011, GR(-1));  // d f3 = -f1^f2
    return ComplexStructureSpec(n3, {F(n3), F(n3), d3});
}

// Two-step structures: d f1 = d f2 = 0 and d f3 an arbitrary combination of
// f1^f2, fi^cj (i, j <= 2); these always satisfy d^2 = 0.
ComplexStructureSpec random_two_step(std::mt19937& rng) {
    F d3(n3);
    const Mask gens[] = {0b011, 0b001 | 0b001000, 0b001 | 0b010000, 0b010 | 0b001000, 0b010 | 0b010000};
    for (Mask m : gens) {
        d3.add(m, GR(Rational(static_cast<long>(rng() % 5) - 2), Rational(static_cast<long>(rng() % 3) - 1)));
    }
    return ComplexStructureSpec(n3, {F(n3), F(n3), d3});
}

F random_form(std::mt19937& rng, int n, int terms = 3) {
    F f(n);
    const Mask all = (Mask{1} << (2 * n)) - 1;
    for (int k = 0; k < terms; ++k) {
        f.add(static_cast<Mask>(rng()) & all, GR(static_cast<long>(rng() % 5) - 2));
    }
    return f;
}

F homogeneous(const F& f, int degree) {
    F out(f.dim());
    for (const auto& [m, c] : f.terms()) {
        if (std::popcount(m) == degree) {
            out.add(m, c);
        }
    }
    return out;
}

F parse_form(std::string_view text, int n) {
    auto [m, s] = parse_monomial(text, n);
    return F::monomial(n, m, GR(s));
}

VectorForm<GR> theta(int i, int lambda, int n = n3) {
    VectorForm<GR> v(n, 1);
    v.add(i - 1, Mask{1} << (n + lambda - 1), GR(1));
    return v;
}

}  // namespace

TEST_CASE("monomial text") {
    CHECK(monomial_str(0b011, 3) == "f1^f2");
    CHECK(monomial_str(0b001 | 0b001000, 3) == "f1^c1");
    CHECK(monomial_str(0, 3) == "1");
    auto [m, s] = parse_monomial("f2^f1", 3);
    CHECK(m == 0b011);
    CHECK(s == -1);
    auto [m2, s2] = parse_monomial("c1^f3", 3);
    CHECK(m2 == (0b100 | 0b001000));
    CHECK(s2 == -1);
    CHECK(parse_monomial("f1^f1", 3).second == 0);
    CHECK_THROWS(parse_monomial("f4", 3));
    CHECK(bidegree_basis(3, 2, 1).size() == 9);
    CHECK(bidegree_basis(3, 4, 0).empty());
}

TEST_CASE("wedge is associative and graded anticommutative") {
    std::mt19937 rng(17);
    for (int k = 0; k < 200; ++k) {
        F a = random_form(rng, n3), b = random_form(rng, n3), c = random_form(rng, n3);
        CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
        for (int da = 0; da <= 6; ++da) {
            for (int db = 0; db <= 6; ++db) {
                F ha = homogeneous(a, da), hb = homogeneous(b, db);
                F ba = wedge(hb, ha);
                CHECK(wedge(ha, hb) == ((da * db) % 2 ? -ba : ba));
            }
        }
    }
    CHECK(wedge(phi(3, 1), phi(3, 1)).is_zero());
}

TEST_CASE("Leibniz rule on random pairs") {
    std::mt19937 rng(19);
    auto spec = iwasawa();
    for (int k = 0; k < 100; ++k) {
        const auto other = random_two_step(rng);
        const auto& frame = k % 2 ? spec.frame() : other.frame();
        F a = random_form(rng, n3), b = random_form(rng, n3);
        for (int da = 0; da <= 6; ++da) {
            F ha = homogeneous(a, da);
            F rhs = wedge(frame.d(ha), b);
            F second = wedge(ha, frame.d(b));
            rhs += da % 2 ? -second : second;
            CHECK(frame.d(wedge(ha, b)) == rhs);
        }
    }
}

TEST_CASE("d-squared identities on every basis form") {
    std::mt19937 rng(23);
    std::vector<ComplexStructureSpec> specs{iwasawa(), ComplexStructureSpec::torus(3)};
    for (int k = 0; k < 10; ++k) {
        specs.push_back(random_two_step(rng));
    }
    for (const auto& spec : specs) {
        REQUIRE(validate_spec(spec).empty());
        const auto& fr = spec.frame();
        for (int p = 0; p <= n3; ++p) {
            for (int q = 0; q <= n3; ++q) {
                for (Mask m : bidegree_basis(n3, p, q)) {
                    F a = F::monomial(n3, m);
                    CHECK(fr.split(a).defect.is_zero());
                    CHECK(fr.d(fr.d(a)).is_zero());
                    CHECK(fr.del(fr.del(a)).is_zero());
                    CHECK(fr.delbar(fr.delbar(a)).is_zero());
                    CHECK((fr.del(fr.delbar(a)) + fr.delbar(fr.del(a))).is_zero());
                }
            }
        }
    }
}

TEST_CASE("Iwasawa differentials") {
    auto spec = iwasawa();
    const auto& fr = spec.frame();
    CHECK(fr.d(phi(3, 3)) == -wedge(phi(3, 1), phi(3, 2)));
    CHECK(fr.d(phibar(3, 3)) == -wedge(phibar(3, 1), phibar(3, 2)));
    CHECK(fr.delbar(phibar(3, 3)) == -wedge(phibar(3, 1), phibar(3, 2)));
    CHECK(fr.delbar(phi(3, 3)).is_zero());
    CHECK(spec.is_parallelisable());
    CHECK(spec.holo_constant(2, 0, 1) == GR(-1));
}

TEST_CASE("validate_spec names the failing generator") {
    // d f2 = f3^c1 and d f3 = f1^f2: d^2 f2 = f1^f2^c1.
    F d2 = wedge(phi(3, 3), phibar(3, 1));
    F d3 = wedge(phi(3, 1), phi(3, 2));
    ComplexStructureSpec bad(3, {F(3), d2, d3});
    auto diags = validate_spec(bad);
    REQUIRE(has_errors(diags));
    bool named = false;
    for (const auto& d : diags) {
        if (d.code == "d-squared" && d.message.find("d^2(f2)") != std::string::npos) {
            named = true;
        }
    }
    CHECK(named);

    // Non-nilpotent shape gives only a warning.
    F d1 = wedge(phi(2, 1), phi(2, 2));
    auto w = validate_spec(ComplexStructureSpec(2, {d1, F(2)}));
    CHECK_FALSE(has_errors(w));
    REQUIRE(w.size() == 1);
    CHECK(w[0].code == "non-nilpotent");

    CHECK_THROWS_AS(ComplexStructureSpec(3, {F(3), F(3), wedge(phibar(3, 1), phibar(3, 2))}), std::invalid_argument);
}

TEST_CASE("contraction") {
    CHECK(contract(theta(2, 1), wedge(phi(3, 2), phi(3, 3))) == wedge(phi(3, 3), phibar(3, 1)));
    CHECK(contract(theta(3, 1), wedge(phi(3, 1), phi(3, 3))) == -wedge(phi(3, 1), phibar(3, 1)));
    CHECK(contract(theta(1, 2), phibar(3, 1)).is_zero());
    CHECK(contract(theta(1, 1), -wedge(phi(3, 1), phi(3, 2))) == -wedge(phi(3, 2), phibar(3, 1)));
    CHECK(contract(theta(1, 1), parse_form("f2^f3", 3)).is_zero());
    auto s = interior(1, 0b111);
    REQUIRE(s);
    CHECK(s->first == -1);
    CHECK(s->second == 0b101);
    CHECK_FALSE(interior(1, 0b101));
}

TEST_CASE("vector form text") {
    auto r = make_ring({"t11", "t22"});
    VectorForm<Poly> v(3, 1);
    v.add(0, Mask{1} << 3, Poly::variable(r, "t11"));
    v.add(2, Mask{1} << 5, parse_poly("-t11*t22", r));
    CHECK(v.str() == "t11*th1.c1-t11*t22*th3.c3");
    CHECK(theta(1, 1).str() == "th1.c1");
}

TEST_CASE("coordinates round trip") {
    std::mt19937 rng(29);
    for (int k = 0; k < 20; ++k) {
        QVec v(9);
        for (auto& x : v) x = GR(static_cast<long>(rng() % 5) - 2);
        F f = form_from_coordinates(3, 2, 1, v);
        CHECK(coordinates(f, 2, 1) == v);
    }
    CHECK_THROWS(coordinates(phi(3, 1), 2, 1));
}

TEST_CASE("deformed coframe") {
    auto spec = iwasawa();
    auto ring = make_ring({"t11", "t12", "t21", "t22", "t31", "t32"});
    const char* names[3][2] = {{"t11", "t12"}, {"t21", "t22"}, {"t31", "t32"}};
    VectorForm<Poly> psi1(3, 1);
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 2; ++l) psi1.add(i, Mask{1} << (3 + l), Poly::variable(ring, names[i][l]));

    SUBCASE("zero deformation") {
        auto mf = deformed_coframe(spec, VectorForm<Poly>(3, 1));
        CHECK(mf.integrable());
        for (int g = 0; g < 6; ++g) {
            CHECK(mf.frame.d_generator(g) == lift(spec.frame().d_generator(g)));
        }
        auto ds = deformed_structure_at(spec, VectorForm<GR>(3, 1));
        REQUIRE(ds.structure);
        CHECK(*ds.structure == spec);
    }
    SUBCASE("psi(t) is integrable") {
        VectorForm<Poly> psi = psi1;
        psi.add(2, Mask{1} << 5, parse_poly("-t11*t22+t21*t12", ring));
        CHECK(deformed_coframe(spec, psi).integrable());
        // At t11 = 1 itself the coframe f1 + c1 is degenerate; use the ray point 1/2.
        auto at_ii = psi.map_coefficients([](const Poly& c) {
            return c.eval(Point{{"t11", GR(Rational(1, 2))}, {"t12", GR(0)}, {"t21", GR(0)}, {"t22", GR(0)}, {"t31", GR(0)}, {"t32", GR(0)}});
        });
        auto ds = deformed_structure_at(spec, at_ii);
        CHECK(ds.structure);
    }
    SUBCASE("first order alone is not integrable where det != 0") {
        auto mf = deformed_coframe(spec, psi1);
        CHECK_FALSE(mf.integrable());
        const GR half(Rational(1, 2));
        const Point iii{{"t11", half}, {"t12", GR(0)}, {"t21", GR(0)}, {"t22", half}, {"t31", GR(0)}, {"t32", GR(0)}};
        bool nonzero = false;
        for (const auto& d : mf.defect) {
            for (const auto& [m, c] : d.terms()) {
                nonzero = nonzero || !c.eval(iii).is_zero();
            }
        }
        CHECK(nonzero);
        auto ds = deformed_structure_at(spec, psi1.map_coefficients([&](const Poly& c) { return c.eval(iii); }));
        CHECK_FALSE(ds.structure);
        bool any = false;
        for (const auto& d : ds.defect) any = any || !d.is_zero();
        CHECK(any);
    }
}
