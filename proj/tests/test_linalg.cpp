#include <doctest.h>

#include <random>

#include "nilhodge/linalg.hpp"

using namespace nilhodge;

namespace {

using GR = GaussianRational;

QMatrix qm(std::size_t rows, std::size_t cols, std::initializer_list<long> entries) {
    QMatrix m(rows, cols);
    auto it = entries.begin();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = GR(*it++);
        }
    }
    return m;
}

QMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, std::size_t rank_cap) {
    // Product of rows x k and k x cols, so rank <= k.
    QMatrix a(rows, rank_cap), b(rank_cap, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < rank_cap; ++j) a(i, j) = GR(static_cast<long>(rng() % 7) - 3);
    for (std::size_t i = 0; i < rank_cap; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            b(i, j) = GR(Rational(static_cast<long>(rng() % 7) - 3), Rational(static_cast<long>(rng() % 3) - 1));
    return a * b;
}

}  // namespace

TEST_CASE("rref, rank and kernel") {
    QMatrix m = qm(2, 3, {1, 2, 3, 2, 4, 6});
    CHECK(rank(m) == 1);
    auto e = rref(m);
    CHECK(e.pivots == std::vector<std::size_t>{0});
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 2);
    for (const auto& v : k) {
        CHECK(is_zero_vec(m.apply(v)));
    }
    CHECK(rank(QMatrix::identity(4)) == 4);
    CHECK(kernel_basis(QMatrix(0, 3)).size() == 3);
}

TEST_CASE("solve and inverse") {
    QMatrix m = qm(2, 2, {2, 1, 1, 1});
    auto x = solve(m, QVec{GR(3), GR(2)});
    REQUIRE(x);
    CHECK(*x == QVec{GR(1), GR(1)});
    CHECK(inverse(m) * m == QMatrix::identity(2));
    CHECK_THROWS_AS(inverse(qm(2, 2, {1, 1, 1, 1})), std::domain_error);
    CHECK_FALSE(solve(qm(2, 1, {1, 1}), QVec{GR(1), GR(2)}));
}

TEST_CASE("SpanBuilder") {
    SpanBuilder s(3);
    CHECK(s.add(QVec{GR(1), GR(1), GR(0)}));
    CHECK_FALSE(s.add(QVec{GR(2), GR(2), GR(0)}));
    CHECK(s.add(QVec{GR(0), GR(1), GR(0)}));
    CHECK(s.contains(QVec{GR(5), GR(-1), GR(0)}));
    CHECK_FALSE(s.contains(QVec{GR(0), GR(0), GR(1)}));
    CHECK(s.dim() == 2);
}

TEST_CASE("cohomology of a small complex") {
    // C^0 = K -> C^1 = K^2 -> C^2 = K, d0 = (1,0)^T, d1 = (0,0).
    QMatrix d0 = qm(2, 1, {1, 0});
    QMatrix d1 = qm(1, 2, {0, 0});
    auto h = CohomologyBasis::compute(d0, d1);
    CHECK(h.dim() == 1);
    CHECK(h.kernel_dim() == 2);
    CHECK(h.image_rank() == 1);
    CHECK(h.is_exact(QVec{GR(7), GR(0)}));
    CHECK_FALSE(h.is_exact(QVec{GR(0), GR(1)}));
    CHECK(h.project(QVec{GR(3), GR(2)}) == QVec{GR(2)});

    auto closed_only = CohomologyBasis::compute(QMatrix(2, 0), qm(1, 2, {1, 1}));
    CHECK(closed_only.dim() == 1);
    CHECK_THROWS_AS(closed_only.project(QVec{GR(1), GR(0)}), NotClosedError);
    CHECK_THROWS_AS(CohomologyBasis::compute(d0, qm(1, 2, {1, 0})), CompositionError);
}

TEST_CASE("projection is well defined on random complexes") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n0 = 1 + rng() % 3, n1 = 2 + rng() % 4, n2 = 1 + rng() % 3;
        QMatrix d0 = random_matrix(rng, n1, n0, 1 + rng() % 2);
        // d1 kills the image of d0: rows from the left kernel of d0.
        QMatrix t(n0, n1);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n0; ++j) t(j, i) = d0(i, j);
        auto left = kernel_basis(t);
        QMatrix d1(n2, n1);
        for (std::size_t r = 0; r < n2; ++r) {
            for (const auto& v : left) {
                GR c(static_cast<long>(rng() % 5) - 2);
                for (std::size_t i = 0; i < n1; ++i) d1(r, i) += c * v[i];
            }
        }
        REQUIRE((d1 * d0).is_zero_matrix());
        auto h = CohomologyBasis::compute(d0, d1);
        CHECK(h.kernel_dim() == n1 - rank(d1));
        CHECK(h.dim() == n1 - rank(d1) - rank(d0));
        for (std::size_t r = 0; r < h.dim(); ++r) {
            QVec v = h.representatives()[r];
            QVec x(n0);
            for (auto& e : x) e = GR(static_cast<long>(rng() % 9) - 4);
            QVec w = d0.apply(x);
            for (std::size_t i = 0; i < n1; ++i) w[i] += v[i];
            QVec expected(h.dim());
            expected[r] = GR(1);
            CHECK(h.project(w) == expected);
        }
    }
}

TEST_CASE("polynomial matrices") {
    auto r = make_ring({"t11", "t22"});
    PMatrix m(2, 2);
    m(0, 0) = parse_poly("t11", r);
    m(0, 1) = parse_poly("t22", r);
    m(1, 0) = parse_poly("t11^2", r);
    m(1, 1) = parse_poly("t11*t22", r);
    CHECK(generic_rank(m) == 1);
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 1);
    for (const auto& e : m.apply(k[0])) CHECK(e.is_zero());
    CHECK(independent_columns(m) == std::vector<std::size_t>{0});
    m(1, 1) = parse_poly("1", r);
    CHECK(generic_rank(m) == 2);
    CHECK(specialized_rank(m, Point{{"t11", GR(0)}, {"t22", GR(5)}}) == 1);
    CHECK(specialized_rank(m, Point{{"t11", GR(1)}, {"t22", GR(0)}}) == 2);
}

TEST_CASE("semicontinuity of rank under specialization") {
    std::mt19937 rng(5);
    auto r = make_ring({"a", "b"});
    for (int trial = 0; trial < 40; ++trial) {
        PMatrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                Exponents e{static_cast<unsigned>(rng() % 2), static_cast<unsigned>(rng() % 2)};
                m(i, j) = rng() % 3 == 0 ? Poly(r, GR()) : Poly::monomial(r, e, GR(static_cast<long>(rng() % 5) - 2));
            }
        const auto g = generic_rank(m);
        for (int s = 0; s < 5; ++s) {
            Point pt{{"a", GR(static_cast<long>(rng() % 3) - 1)}, {"b", GR(static_cast<long>(rng() % 3) - 1)}};
            CHECK(specialized_rank(m, pt) <= g);
        }
    }
}
