#include <doctest.h>

#include <random>

#include "nilhodge/lab.hpp"
#include "random_complex.hpp"

using namespace nilhodge;

namespace {

RingPtr tring() {
    static RingPtr r = make_ring({"t"});
    return r;
}

Poly P(const char* s) { return parse_poly(s, tring()); }

PMatrix pm(std::size_t rows, std::size_t cols, std::initializer_list<const char*> entries) {
    PMatrix m(rows, cols);
    auto it = entries.begin();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = P(*it++);
        }
    }
    return m;
}

PVec pv(std::initializer_list<const char*> entries) {
    PVec v;
    for (auto e : entries) {
        v.push_back(P(e));
    }
    return v;
}

FreeComplex two_term(const char* entry) { return FreeComplex("t", {1, 1}, {pm(1, 1, {entry})}); }

}  // namespace

TEST_CASE("validate_complex") {
    CHECK(validate_complex(two_term("t")).empty());
    FreeComplex bad("t", {1, 1, 1}, {pm(1, 1, {"t"}), pm(1, 1, {"1"})});
    auto diags = validate_complex(bad);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("q=0, row=0, col=0") != std::string::npos);
    FreeComplex ok("t", {1, 2, 1}, {pm(2, 1, {"t", "0"}), pm(1, 2, {"0", "1"})});
    CHECK(validate_complex(ok).empty());
}

TEST_CASE("h_dims at zero and generically") {
    auto h = h_dims(two_term("t"));
    CHECK(h[0].at_zero == 1);
    CHECK(h[0].generic == 0);
    CHECK(h[1].at_zero == 1);
    CHECK(h[1].generic == 0);
    auto h2 = h_dims(two_term("t^2"));
    CHECK(h2[0].at_zero == 1);
    CHECK(h2[1].generic == 0);
    auto z = h_dims(FreeComplex("t", {2, 3}, {pm(3, 2, {"0", "0", "0", "0", "0", "0"})}));
    CHECK(z[0].at_zero == 2);
    CHECK(z[0].generic == 2);
    CHECK(z[1].at_zero == 3);
    CHECK(z[1].generic == 3);
}

TEST_CASE("o_n on t and t^2") {
    auto ob = o_n_q(two_term("t"), 0, pv({"1"}), 1);
    CHECK_FALSE(ob.is_zero());
    CHECK(ob.representative == QVec{GaussianRational(1)});

    auto c2 = two_term("t^2");
    CHECK(o_n_q(c2, 0, pv({"1"}), 1).is_zero());
    CHECK_FALSE(o_n_q(c2, 0, pv({"1"}), 2).is_zero());

    // Not an extension of order 1: d(1) = t has a t^1 term.
    CHECK_THROWS_AS(o_n_q(two_term("t"), 0, pv({"1"}), 2), ExtensionOrderError);
}

TEST_CASE("o_n vanishes on images and ignores terms of degree >= n") {
    // E^0 -> E^1 -> E^2 with d^0 = (1, t)^T, d^1 = (-t, 1).
    FreeComplex c("t", {1, 2, 1}, {pm(2, 1, {"1", "t"}), pm(1, 2, {"-t", "1"})});
    REQUIRE(validate_complex(c).empty());
    PVec image = c.differential(0).apply(pv({"1+3*t"}));
    for (unsigned n = 1; n <= 3; ++n) {
        CHECK(o_n_q(c, 1, image, n).is_zero());
    }
    auto c2 = two_term("t^2");
    auto base = o_n_q(c2, 0, pv({"1"}), 2);
    auto moved = o_n_q(c2, 0, pv({"1+5*t^2-t^3"}), 2);
    CHECK(base.coordinates == moved.coordinates);
}

TEST_CASE("rho compatibility: o_{n,i} = rho_i o_n") {
    auto c = two_term("t^2");
    // o_2(1) = [1]; rho_0 injective, rho_1 [1] = [t]: t is not in t^2 * O mod t^2.
    CHECK_FALSE(o_n_i_vanishes(c, 0, pv({"1"}), 2, 0));
    CHECK_FALSE(o_n_i_vanishes(c, 0, pv({"1"}), 2, 1));
    // d^0 = [[0,0],[t,t^2]]: o_2((0,1)) = [(0,1)], killed by rho_1 via (1,0).
    FreeComplex m("t", {2, 2}, {pm(2, 2, {"0", "0", "t", "t^2"})});
    CHECK_FALSE(o_n_q(m, 0, pv({"0", "1"}), 2).is_zero());
    CHECK(o_n_i_vanishes(m, 0, pv({"0", "1"}), 2, 1));
    auto gamma = rho_preimage(m, 0, QVec{GaussianRational(0), GaussianRational(1)}, 1);
    REQUIRE(gamma);
    PVec image = m.differential(0).apply(*gamma);
    CHECK(coefficient(image, 0) == QVec(2));
    CHECK(coefficient(image, 1) == QVec{GaussianRational(0), GaussianRational(1)});
}

TEST_CASE("extend_step") {
    auto r = extend_step(two_term("t"), 0, pv({"1"}), 1);
    CHECK_FALSE(r.extension);
    REQUIRE(r.obstruction);
    CHECK_FALSE(r.obstruction->is_zero());

    FreeComplex zero("t", {2, 1}, {pm(1, 2, {"0", "0"})});
    auto z = extend_step(zero, 0, pv({"1", "2"}), 1);
    REQUIRE(z.extension);
    CHECK(*z.extension == pv({"1", "2"}));

    // d^0 = [[t, 1]]: alpha = (1, 0) has defect t, absorbed by (0, -t).
    FreeComplex unit("t", {2, 1}, {pm(1, 2, {"t", "1"})});
    auto u = extend_step(unit, 0, pv({"1", "0"}), 1);
    REQUIRE(u.extension);
    CHECK(*u.extension == pv({"1", "-t"}));
    CHECK(unit.differential(0).apply(*u.extension) == pv({"0"}));
}

TEST_CASE("first class") {
    auto split = classify_first_class(two_term("t"), 0, 3);
    CHECK(split.subspace.size() == 1);
    CHECK(split.complement.empty());

    FreeComplex zero("t", {2, 1}, {pm(1, 2, {"0", "0"})});
    CHECK(classify_first_class(zero, 0, 3).subspace.empty());

    auto c2 = two_term("t^2");
    CHECK(classify_first_class(c2, 0, 1).subspace.empty());  // extends to order 1
    CHECK(classify_first_class(c2, 0, 2).subspace.size() == 1);
}

TEST_CASE("second class") {
    auto s = classify_second_class(two_term("t"), 1);
    CHECK(s.basis.size() == 1);
    CHECK(s.saturation.size() == s.jet_search.size());

    FreeComplex zero("t", {2, 1}, {pm(1, 2, {"0", "0"})});
    CHECK(classify_second_class(zero, 1).basis.empty());

    auto one = two_term("1");
    CHECK(central_cohomology(one, 1).dim() == 0);
    CHECK(classify_second_class(one, 1).basis.empty());

    CHECK(classify_second_class(two_term("t^2"), 1).basis.size() == 1);
}

TEST_CASE("reduce_to_primitive") {
    auto p = reduce_to_primitive(two_term("t"), 0, pv({"1"}), 1);
    CHECK(p.n == 1);
    CHECK(p.steps == 0);

    auto p2 = reduce_to_primitive(two_term("t^2"), 0, pv({"1"}), 2);
    CHECK(p2.n == 2);
    CHECK(p2.alpha == pv({"1"}));
    CHECK_FALSE(o_n_i_vanishes(two_term("t^2"), 0, p2.alpha, 2, 1));

    FreeComplex m("t", {2, 2}, {pm(2, 2, {"0", "0", "t", "t^2"})});
    auto p3 = reduce_to_primitive(m, 0, pv({"0", "1"}), 2);
    CHECK(p3.n == 1);
    CHECK(p3.steps == 1);
    CHECK(p3.alpha == pv({"1", "0"}));
    CHECK_FALSE(p3.leading.is_zero());
}

TEST_CASE("jump accounting on small complexes") {
    auto a0 = jump_accounting(two_term("t"), 0);
    CHECK(a0.consistent);
    CHECK(a0.kernel_drop == 1);
    CHECK(a0.first_class == 1);
    auto a1 = jump_accounting(two_term("t"), 1);
    CHECK(a1.consistent);
    CHECK(a1.image_rise == 1);
    CHECK(a1.second_class == 1);

    FreeComplex zero("t", {2, 1}, {pm(1, 2, {"0", "0"})});
    for (int q = 0; q < 2; ++q) {
        auto a = jump_accounting(zero, q);
        CHECK(a.consistent);
        CHECK(a.kernel_drop == 0);
        CHECK(a.image_rise == 0);
    }
}

TEST_CASE("random complexes against the construction") {
    std::mt19937 rng(20261019);
    for (int trial = 0; trial < 120; ++trial) {
        auto k = testing::random_complex(rng);
        const auto& c = k.complex;
        REQUIRE(validate_complex(c).empty());
        auto h = h_dims(c);
        for (int q = 0; q < c.length(); ++q) {
            const auto uq = static_cast<std::size_t>(q);
            CHECK(h[uq].at_zero >= h[uq].generic);
            CHECK(h[uq].at_zero == k.h_zero[uq]);
            CHECK(h[uq].generic == k.h_generic[uq]);
            auto a = jump_accounting(c, q);
            CHECK_MESSAGE(a.consistent, a.note);
            CHECK(a.kernel_drop == k.kernel_drop[uq]);
            CHECK(a.image_rise == k.image_rise[uq]);
        }
    }
}

TEST_CASE("o_n well defined under perturbation on random complexes") {
    std::mt19937 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto k = testing::random_complex(rng);
        const auto& c = k.complex;
        for (int q = 0; q + 1 < c.length(); ++q) {
            auto split = classify_first_class(c, q, 1);
            const auto h = central_cohomology(c, q);
            for (std::size_t r = 0; r < h.dim(); ++r) {
                // Constant extension of a closed representative, then first failing order.
                PVec alpha;
                for (const auto& x : h.representatives()[r]) {
                    alpha.push_back(Poly(c.ring(), x));
                }
                unsigned n = 1;
                for (; n <= 4; ++n) {
                    auto step = extend_step(c, q, alpha, n);
                    if (!step.extension) {
                        break;
                    }
                    alpha = *step.extension;
                }
                if (n > 4) {
                    continue;
                }
                auto base = o_n_q(c, q, alpha, n);
                // Add d^{q-1}(random jet) and a t^n multiple.
                PVec beta(c.rank(q - 1));
                for (auto& b : beta) {
                    b = Poly::monomial(c.ring(), Exponents{static_cast<unsigned>(rng() % 3)},
                                       GaussianRational(static_cast<long>(rng() % 5) - 2));
                }
                PVec moved = alpha;
                const PVec image = c.differential(q - 1).apply(beta);
                for (std::size_t i = 0; i < moved.size(); ++i) {
                    moved[i] += image[i] + Poly::monomial(c.ring(), Exponents{n}, GaussianRational(3));
                }
                auto again = o_n_q(c, q, moved, n);
                CHECK(again.coordinates == base.coordinates);
                if (!base.is_zero()) {
                    auto prim = reduce_to_primitive(c, q, alpha, n);
                    CHECK(prim.n <= n);
                    CHECK_FALSE(prim.leading.is_zero());
                }
                ++checked;
            }
        }
    }
    CHECK(checked > 20);
}
