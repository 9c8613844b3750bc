#include <catch_amalgamated.hpp>

#include <luzin/fourier.hpp>

#include <numbers>

using namespace luzin;
using Catch::Approx;

TEST_CASE("coefficients") {
    auto s = CylinderSpace::uniform(1 << 12);
    auto sys = make_trigonometric(s, 16);
    auto c = coefficients(sys->evaluate(3), *sys, 16);
    CHECK(std::abs(c(3) - 1.0) < 1e-8);
    for (std::size_t n = 1; n <= 16; ++n)
        if (n != 3) CHECK(std::abs(c(n)) < 1e-8);

    auto z = coefficients(GridFunction(s), *sys, 16);
    CHECK(z.max_abs() == 0.0);

    auto f = cplx(2.0) * sys->evaluate(1) + cplx(0.0, 1.0) * sys->evaluate(2);
    auto cf = coefficients(f, *sys, 4);
    CHECK(std::abs(cf(1) - 2.0) < 1e-8);
    CHECK(std::abs(cf(2) - cplx(0.0, 1.0)) < 1e-8);
    CHECK(std::abs(cf(3)) < 1e-8);
    CHECK_THROWS_AS(coefficients(f, *sys, 17), Error);
}

TEST_CASE("partial sums") {
    auto s = CylinderSpace::uniform(512);
    auto sys = make_trigonometric(s, 64);
    CoefficientVector c{std::vector<cplx>(64)};
    CHECK(lp_norm(partial_sum(c, *sys, 0), 1) == 0.0);
    c.c[6] = 1.0;
    auto p = partial_sum(c, *sys, 10) - sys->evaluate(7);
    CHECK(lp_norm(p, 2) < 1e-12);

    GridFunction f(s);
    for (std::size_t n = 1; n <= 64; ++n) f += cplx(1.0 / n, 0.1 * n) * sys->evaluate(n);
    auto cf = coefficients(f, *sys, 64);
    CHECK(lp_norm(partial_sum(cf, *sys, 64) - f, 2) < 1e-8);
    for (std::size_t n = 1; n <= 64; ++n) CHECK(std::abs(cf(n) - cplx(1.0 / n, 0.1 * n)) < 1e-8);
}

TEST_CASE("bessel and orthogonal additivity") {
    auto s = CylinderSpace::uniform(1024);
    auto sys = make_trigonometric(s, 200);
    auto f = GridFunction::from(s, [](double t, std::size_t) { return cplx(t < 0.3 ? 1.0 : -0.5 * t); });
    auto c = coefficients(f, *sys, 200);
    const double f2 = std::pow(lp_norm(f, 2), 2);
    double acc = 0.0;
    for (std::size_t m = 1; m <= 200; ++m) {
        acc += std::norm(c(m));
        CHECK(acc <= f2 + 1e-8);
    }
    CoefficientVector block{std::vector<cplx>(200)};
    double expect = 0.0;
    for (std::size_t n = 20; n <= 60; ++n) {
        block.c[n - 1] = c(n);
        expect += std::norm(c(n));
    }
    CHECK(std::pow(lp_norm(partial_sum(block, *sys, 200), 2), 2) == Approx(expect).margin(1e-8));
}

TEST_CASE("spectrum thresholds") {
    CHECK(spectrum(CoefficientVector{{0.0, 0.0}}, 1e-12).empty());
    CHECK(spectrum(CoefficientVector{{0.0, 0.5, 0.0}}, 1e-12) == std::set<std::size_t>{2});
    CHECK(spectrum(CoefficientVector{{1e-13, 1.0, 1e-13}}, 1e-12) == std::set<std::size_t>{2});
    CHECK_THROWS_AS(spectrum(CoefficientVector{{1.0}}, -1.0), Error);
}

TEST_CASE("partial sum envelopes") {
    auto s = CylinderSpace::uniform(1 << 14);
    auto sys = make_trigonometric(s, 32);
    CoefficientVector c{std::vector<cplx>(32)};
    auto e0 = partial_sum_envelope(c, *sys, 3, 20);
    CHECK(e0.max == 0.0);
    CHECK(e0.argmax == 3);

    c.c[1] = 1.0;
    auto e1 = partial_sum_envelope(c, *sys, 1, 20);
    CHECK(e1.max == Approx(2.0 * std::numbers::sqrt2 / std::numbers::pi).margin(1e-6));
    CHECK(e1.argmax == 2);

    // Incremental value agrees with recomputation at every m.
    for (std::size_t n = 1; n <= 32; ++n) c.c[n - 1] = cplx(std::cos(n * 1.7) / n, 0.0);
    auto e = partial_sum_envelope(c, *sys, 4, 32, true);
    double direct = 0.0;
    for (const auto& [m, v] : e.trace) {
        CoefficientVector part{std::vector<cplx>(32)};
        for (std::size_t n = 4; n <= m; ++n) part.c[n - 1] = c(n);
        const double norm = lp_norm(partial_sum(part, *sys, 32), 1);
        CHECK(v == Approx(norm).margin(1e-10));
        direct = std::max(direct, norm);
    }
    CHECK(e.max == Approx(direct).margin(1e-10));

    auto with_zero = c;
    with_zero.c[9] = 0.0;
    with_zero.c[10] = 0.0;
    auto a = partial_sum_envelope(with_zero, *sys, 4, 32), b = partial_sum_envelope(with_zero, *sys, 4, 9);
    CHECK(a.max >= b.max);
}
