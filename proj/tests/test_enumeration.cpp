#include <catch_amalgamated.hpp>

#include <luzin/enumeration.hpp>

using namespace luzin;
using Catch::Approx;

TEST_CASE("index arithmetic") {
    for (std::uint64_t p = 1; p < 50; ++p)
        for (int r = 0; r < 6; ++r) {
            const auto k = RationalEnumeration::index_of(p, r);
            CHECK(RationalEnumeration::polynomial_of(k) == p);
            CHECK(RationalEnumeration::repetition_of(k) == r);
        }
    CHECK(RationalEnumeration::next_index(3, 0) == 5);
    CHECK(RationalEnumeration::next_index(3, 5) == 10);
    CHECK(RationalEnumeration::next_index(3, 39) == 40);
    CHECK(RationalEnumeration::digit_value(0) == 0);
    CHECK(RationalEnumeration::digit_value(1) == 1);
    CHECK(RationalEnumeration::digit_value(2) == -1);
    CHECK(RationalEnumeration::digit_value(3) == 2);
    for (std::int64_t a = -9; a <= 9; ++a) CHECK(RationalEnumeration::digit_value(RationalEnumeration::value_digit(a)) == a);
}

TEST_CASE("first members and nonzero") {
    RationalEnumeration en(1 << 20, 4, 3);
    auto r1 = en.at(1);
    REQUIRE(r1.terms().size() == 1);
    CHECK(r1.terms()[0].first == 1);
    CHECK(r1.terms()[0].second == cplx(1.0));
    CHECK(en.at(2).terms() == r1.terms());
    CHECK(en.at(1024).terms() == r1.terms());
    CHECK(en.at(3).terms()[0].second == cplx(-1.0));
    for (std::uint64_t k = 1; k <= 3000; ++k) {
        auto q = en.at(k);
        REQUIRE_FALSE(q.empty());
        CHECK(q.coefficient(q.max_index()) != cplx(0.0));
    }
}

TEST_CASE("encode and decode agree") {
    RationalEnumeration en(1 << 20, 3, 2);
    for (std::uint64_t p = 1; p <= en.polynomial_count(); p += 7) {
        auto d = en.decode(p);
        std::size_t ci = 0;
        while (ci + 1 < en.classes().size() && en.classes()[ci + 1].offset < p) ++ci;
        CHECK(en.encode(ci, d.numerators) == p);
        CHECK(en.classes()[ci].m == d.m);
        CHECK(d.numerators.back() != 0);
    }
    CHECK_THROWS_AS(en.decode(en.polynomial_count() + 1), Error);
}

TEST_CASE("deterministic") {
    RationalEnumeration a(1 << 16, 5, 4), b(1 << 16, 5, 4);
    for (std::uint64_t k = 1; k < 500; k += 3) CHECK(a.at(k).terms() == b.at(k).terms());
}

TEST_CASE("dyadic target found exactly") {
    auto s = CylinderSpace::uniform(1 << 10);
    auto sys = make_trigonometric(s, 16);
    RationalEnumeration en(1 << 20, 4, 3);
    FourierPolynomial p(1, 2);
    p.push(2, 0.5);
    auto T = evaluate(p, *sys);
    auto hit = en.find(T, *sys, 0, 1e-12, false);
    REQUIRE(hit.found);
    CHECK(en.at(hit.k).terms() == p.terms());
    CHECK(hit.distance <= 1e-12);
    // Later occurrences exist beyond any index.
    auto again = en.find(T, *sys, hit.k, 1e-12, false);
    REQUIRE(again.found);
    CHECK(again.k > hit.k);
    CHECK(RationalEnumeration::polynomial_of(again.k) == RationalEnumeration::polynomial_of(hit.k));
}

TEST_CASE("search returns the smallest admissible index") {
    auto s = CylinderSpace::uniform(1 << 8);
    auto sys = make_trigonometric(s, 8);
    RationalEnumeration en(4096, 2, 1);
    auto T = GridFunction::from(s, [](double t, std::size_t) { return cplx(0.7 + 0.2 * std::cos(2 * std::numbers::pi * t)); });
    const double tol = 0.3;
    auto hit = en.find(T, *sys, 0, tol, true);
    REQUIRE(hit.found);
    for (std::uint64_t k = 1; k < hit.k; ++k) CHECK(l1_distance(en.at(k).terms(), T, *sys) >= tol);
    CHECK(l1_distance(en.at(hit.k).terms(), T, *sys) < tol);
}

TEST_CASE("list sequence") {
    auto s = CylinderSpace::uniform(64);
    auto sys = make_trigonometric(s, 8);
    FourierPolynomial a(1, 1), b(1, 3);
    a.push(1, 1.0);
    b.push(3, 0.25);
    ListSequence seq({a, b, a});
    auto T = evaluate(a, *sys);
    CHECK(seq.find(T, *sys, 0, 1e-9, true).k == 1);
    CHECK(seq.find(T, *sys, 1, 1e-9, true).k == 3);
    CHECK_FALSE(seq.find(T, *sys, 3, 1e-9, true).found);
    CHECK_THROWS_AS(ListSequence({FourierPolynomial(1, 2)}), Error);
}
