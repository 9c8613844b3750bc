#include <catch_amalgamated.hpp>

#include <luzin/bump.hpp>

using namespace luzin;
using Catch::Approx;

TEST_CASE("delta star") {
    CHECK(delta_star(0.5) == Approx(1.0 / 3.0));
    CHECK(delta_star(1e-6) == Approx(1e-6).epsilon(1e-5));
    CHECK(delta_star(1.0 - 1e-9) < 0.5);
    CHECK_THROWS_AS(delta_star(0.0), Error);
    CHECK_THROWS_AS(delta_star(1.0), Error);
}

TEST_CASE("periodic step") {
    CHECK(periodic_step(1.0 / 3.0, 1, 0.5) == 1.0);
    CHECK(periodic_step(1.0 / 3.0, 1, 0.1) == Approx(-2.0));
    // P = 12 nodes per period, 4 of them below ds = 1/3: exact cancellation.
    auto s = CylinderSpace::uniform(96);
    double sum = 0.0;
    for (std::size_t j = 0; j < 96; ++j) sum += periodic_step(0.25, 8, s->t(j));
    CHECK(sum == 0.0);
}

TEST_CASE("scale selection") {
    auto s = CylinderSpace::uniform(1 << 12);
    auto trig = make_trigonometric(s, 64);
    BumpParams p{{0.0, 0.5, {0}}, 1.0, 0.5, 0.5, 1};
    CHECK(scale_lower_bound(delta_star(0.5), 0.5) == Approx(8.0));
    CHECK(select_scale(p, *trig) >= 9);

    // Cell on the second base row; product-system indices 1..N live on row 0 only.
    auto two = CylinderSpace::uniform(45, BaseSpace::uniform(2));
    auto prod = make_product_trigonometric(two);
    BumpParams q{{0.0, 1.0, {1}}, 2.0, 0.1, 0.5, 3};
    // Lower bound 4; the divisor 5 gives 9 nodes per period of which 3 fall below ds.
    auto choice = select_scale_shape(q, *prod);
    CHECK(choice.s0 == 5);
    CHECK(choice.shape.kept_measure == Approx(choice.shape.cell_measure * 2.0 / 3.0));

    auto w = make_walsh(CylinderSpace::uniform(1 << 10), 64);
    BumpParams d{{0.0, 0.5, {0}}, 1.0, 0.01, 1.0 / 3.0, 4};
    auto s0 = select_scale(d, *w);
    auto shape = bump_shape(*w->space(), d.cell, 1.0, 0.25, s0);
    std::vector<cplx> vals(shape.g.begin(), shape.g.end());
    std::vector<cplx> c(4);
    w->project_generic(vals, shape.window, 1, 4, c.data());
    for (auto z : c) CHECK(z == cplx(0.0));

    BumpParams tiny{{0.0, 1e-3, {0}}, 1.0, 0.5, 0.1, 1};
    CHECK_THROWS_MATCHES(select_scale(tiny, *trig), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::scale_search_exhausted;
                         }));
}

TEST_CASE("bump on the whole interval") {
    auto s = CylinderSpace::uniform(1 << 12);
    auto sys = make_trigonometric(s, 4095);
    BumpParams p{{0.0, 1.0, {0}}, 1.0, 0.5, 0.5, 1};
    auto r = build_bump(p, *sys, 4095);
    CHECK(r.all_hold());
    const double E = r.shape.kept_measure, D = r.shape.cell_measure;
    CHECK(r.g1 > 1.0);
    CHECK(r.g1 < 2.0);
    CHECK(r.g1 == Approx(E + (D - E) / p.delta).margin(1e-12));
    CHECK(r.g2 * r.g2 < (1.0 + 1.0 / p.delta) * D);
    CHECK(r.shape.kept == kept_by_arithmetic(*s, p.cell, r.delta_star, r.s0));
    CHECK(r.block.n_lo() == 1);
    CHECK(r.block.max_index() <= r.m_end);
}

TEST_CASE("bump statements on off-centre cells") {
    auto s = CylinderSpace::uniform(1 << 14);
    auto sys = make_trigonometric(s, 4096);
    for (auto [a, b, gamma, delta, N] : std::vector<std::tuple<double, double, double, double, std::size_t>>{
             {0.1, 0.7, -1.5, 0.6, 3}, {0.25, 0.75, 0.8, 0.8, 5}, {0.0, 0.5, 1.0, 0.9, 2}}) {
        BumpParams p{{a, b, {0}}, gamma, 0.6, delta, N};
        auto r = build_bump(p, *sys, 4096);
        INFO("cell [" << a << ", " << b << "] s0 = " << r.s0 << " M = " << r.m_end);
        CHECK(r.all_hold());
        auto g = r.g_full(s);
        for (std::size_t j = 0; j < s->n_t(); ++j)
            if (s->t(j) < a || s->t(j) >= b) REQUIRE(g[j] == cplx(0.0));
        CHECK(r.shape.kept == kept_by_arithmetic(*s, p.cell, r.delta_star, r.s0));
        CHECK(r.envelope <= r.envelope_bound * (1 + 1e-6));
    }
}

TEST_CASE("bandwidth exhaustion") {
    auto s = CylinderSpace::uniform(1 << 12);
    auto sys = make_trigonometric(s, 64);
    BumpParams p{{0.2, 0.7, {0}}, 1.0, 0.01, 0.5, 1};
    try {
        build_bump(p, *sys, 64);
        FAIL("expected bandwidth exhaustion");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::bandwidth_exhausted);
        CHECK(e.achieved() >= 0.005);
    }
}

TEST_CASE("product-system bump is exact within one row") {
    auto s = CylinderSpace::uniform(99, BaseSpace::uniform(3));
    auto sys = std::make_shared<ProductTrigSystem>(s);
    BumpParams p{{0.0, 1.0, {1}}, 0.7, 1e-9, 0.3, 50};
    auto r = build_bump(p, *sys, sys->n_max());
    CHECK(r.all_hold());
    CHECK(r.q_minus_g1 < 1e-12);
    for (const auto& [n, c] : r.block.terms()) CHECK(sys->row_of(n) == 1);
}

TEST_CASE("fejer integral") {
    auto f = [](double t) { return t; };
    for (int j = 4; j <= 12; ++j) {
        const double lam = std::ldexp(1.0, j);
        CHECK(fejer_integral(f, 1.0 / 3.0, lam) == Approx(1.0 / (3.0 * lam)).margin(1e-15));
    }
    // mean-zero step integrates a constant to zero on whole periods
    CHECK(fejer_integral([](double) { return 1.0; }, 0.3, 5.0) == Approx(0.0).margin(1e-14));
}
