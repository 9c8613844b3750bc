#include <catch_amalgamated.hpp>

#include <luzin/fourier.hpp>
#include <luzin/systems.hpp>

#include <bit>
#include <numbers>

using namespace luzin;
using Catch::Approx;

TEST_CASE("trigonometric system") {
    auto s = CylinderSpace::uniform(1 << 14);
    auto sys = make_trigonometric(s, 64);
    auto phi1 = sys->evaluate(1);
    CHECK(lp_norm(phi1, 2) == Approx(1.0).margin(1e-14));
    for (auto z : phi1.values()) CHECK(z == cplx(1.0));
    CHECK(std::abs(inner_product(sys->evaluate(2), sys->evaluate(3))) < 1e-10);
    CHECK(gram_matrix(*sys, 64).max_deviation < 1e-8);
    // phi_2 = sqrt2 cos(2 pi t), phi_5 = sqrt2 sin(4 pi t)
    auto p2 = sys->evaluate(2), p5 = sys->evaluate(5);
    for (std::size_t j = 0; j < s->n_t(); j += 977) {
        CHECK(p2[j].real() == Approx(std::numbers::sqrt2 * std::cos(2 * std::numbers::pi * s->t(j))).margin(1e-12));
        CHECK(p5[j].real() == Approx(std::numbers::sqrt2 * std::sin(4 * std::numbers::pi * s->t(j))).margin(1e-12));
    }
    CHECK_THROWS_AS(make_trigonometric(CylinderSpace::uniform(16, BaseSpace::uniform(2)), 4), Error);
    CHECK_THROWS_AS(make_trigonometric(CylinderSpace::uniform(16), 16), Error);
    CHECK_NOTHROW(make_trigonometric(CylinderSpace::uniform(17), 17));
}

TEST_CASE("walsh system") {
    auto s = CylinderSpace::uniform(1 << 10);
    auto sys = make_walsh(s, 32);
    auto phi2 = sys->evaluate(2);
    for (std::size_t j = 0; j < s->n_t(); ++j) CHECK(phi2[j].real() == (s->t(j) < 0.5 ? 1.0 : -1.0));
    CHECK(lp_norm(phi2, 1) == 1.0);
    auto g = gram_matrix(*sys, 32);
    CHECK(g.max_deviation == 0.0);
    CHECK(gram_matrix(*sys, 8).max_deviation == 0.0);
    for (std::size_t m = 0; m < 32; ++m)
        for (std::size_t n = 0; n < 32; ++n) {
            auto a = sys->evaluate(m + 1), b = sys->evaluate(n + 1), c = sys->evaluate((m ^ n) + 1);
            for (std::size_t k = 0; k < s->size(); k += 13) REQUIRE(a[k] * b[k] == c[k]);
        }
    CHECK_THROWS_AS(make_walsh(CylinderSpace::uniform(24), 8), Error);
    CHECK_THROWS_AS(make_walsh(CylinderSpace::uniform(16), 32), Error);
}

TEST_CASE("product system") {
    auto s = CylinderSpace::uniform(9, BaseSpace({{0, 0.2}, {1, 0.3}, {2, 0.5}}));
    auto sys = make_product_trigonometric(s);
    CHECK(sys->n_max() == 27);
    CHECK(gram_matrix(*sys, 27).max_deviation < 1e-12);
    for (std::size_t n = 1; n <= 27; ++n) {
        auto phi = sys->evaluate(n);
        for (auto z : phi.values()) CHECK(std::abs(z) <= sys->sup_bound(n) + 1e-12);
    }
}

TEST_CASE("norms and sup bounds of every provided system") {
    std::vector<SystemHandle> systems{make_trigonometric(CylinderSpace::uniform(256), 101), make_walsh(CylinderSpace::uniform(128), 128),
                                      make_product_trigonometric(CylinderSpace::uniform(15, BaseSpace::uniform(4)))};
    for (const auto& sys : systems)
        for (std::size_t n = 1; n <= sys->n_max(); ++n) {
            auto phi = sys->evaluate(n);
            CHECK(lp_norm(phi, 2) == Approx(1.0).margin(1e-6));
            double mx = 0.0;
            for (auto z : phi.values()) mx = std::max(mx, std::abs(z));
            CHECK(mx <= sys->sup_bound(n) + 1e-12);
        }
}

TEST_CASE("fast projections agree with direct quadrature") {
    std::vector<SystemHandle> systems{make_trigonometric(CylinderSpace::uniform(210), 209), make_walsh(CylinderSpace::uniform(256), 256),
                                      make_product_trigonometric(CylinderSpace::uniform(21, BaseSpace::uniform(5)))};
    for (const auto& sys : systems) {
        const auto& s = *sys->space();
        std::vector<cplx> v(s.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = cplx(std::sin(0.37 * k * k), std::cos(1.3 * k));
        NodeWindow w{s.size() / 5, s.size() - s.size() / 7};
        std::span<const cplx> vals(v.data() + w.begin, w.size());
        const std::size_t m = sys->n_max();
        std::vector<cplx> fast(m), slow(m);
        sys->project(vals, w, 1, m, fast.data());
        sys->project_generic(vals, w, 1, m, slow.data());
        double err = 0.0;
        for (std::size_t n = 0; n < m; ++n) err = std::max(err, std::abs(fast[n] - slow[n]));
        CHECK(err < 1e-12);

        std::vector<Term> terms;
        for (std::size_t n = 1; n <= m; n += 2) terms.emplace_back(n, cplx(1.0 / n, 0.5));
        std::vector<cplx> a(w.size()), b(w.size());
        sys->synthesize(terms, w, a.data());
        sys->synthesize_generic(terms, w, b.data());
        err = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) err = std::max(err, std::abs(a[k] - b[k]));
        CHECK(err < 1e-11);
    }
}

TEST_CASE("atom example") {
    auto n1 = atom_example_check(1);
    CHECK(n1.lhs == Rational(8, 25));
    CHECK(n1.rhs == Rational(1, 5));
    CHECK(n1.holds);
    CHECK(atom_example_check(2).holds);
    for (long long N = 1; N <= 100; ++N) {
        AtomExample ex(N);
        CHECK(ex.p1 + ex.p2 == Rational(1));
        CHECK(ex.phi1_norm2_squared() == Rational(1));
        auto r = atom_example_check(N);
        CHECK(r.holds);
        // direct two-point value 12N(4N^2+3N-1)/(16N^2-1)^2
        CHECK(r.lhs == Rational(12 * N * (4 * N * N + 3 * N - 1), (16 * N * N - 1) * (16 * N * N - 1)));
        const double p1 = boost::rational_cast<double>(ex.p1), p2 = 1.0 - p1;
        CHECK(p1 * ex.phi2_at1 * ex.phi2_at1 + p2 * ex.phi2_at2 * ex.phi2_at2 == Approx(1.0).margin(1e-12));
        CHECK(p1 * ex.phi2_at1 * 2.0 * N + p2 * ex.phi2_at2 * 0.5 == Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(AtomExample(0), Error);
}
