#include <catch_amalgamated.hpp>

#include <luzin/measure.hpp>

using namespace luzin;
using Catch::Approx;

namespace {

SpaceHandle split_space(std::size_t n_t) {
    return CylinderSpace::uniform(n_t, BaseSpace({{7, 0.5}, {9, 0.5}}));
}

}  // namespace

TEST_CASE("base and cylinder validation") {
    CHECK_THROWS_AS(BaseSpace(std::vector<BaseCell>{}), Error);
    CHECK_THROWS_AS(BaseSpace({{0, -0.1}, {1, 1.1}}), Error);
    CHECK_THROWS_AS(CylinderSpace::make({0.2, 0.1}, {0.5, 0.5}, BaseSpace::trivial()), Error);
    CHECK_THROWS_AS(CylinderSpace::make({0.1, 0.2}, {0.5, 0.6}, BaseSpace::trivial()), Error);
    auto s = CylinderSpace::uniform(8);
    CHECK(s->size() == 8);
    CHECK(s->t(0) == 0.0625);
}

TEST_CASE("lp norms") {
    auto s = split_space(64);
    auto one = GridFunction::from(s, [](double, std::size_t) { return cplx(1.0); });
    CHECK(lp_norm(one, 1) == Approx(1.0).margin(1e-15));
    auto c = GridFunction::from(s, [](double, std::size_t) { return cplx(-3.0, 4.0); });
    CHECK(lp_norm(c, 2) == Approx(5.0).margin(1e-14));

    // Indicator of [0, 0.5) x {first base cell}: measure 0.25.
    auto ind = GridFunction::from(s, [](double t, std::size_t i) { return cplx(t < 0.5 && i == 0 ? 1.0 : 0.0); });
    CHECK(lp_norm(ind, 1) == Approx(0.25).margin(1e-15));
    CHECK(lp_norm(ind, 1) <= lp_norm(ind, 2));

    auto bad = one;
    bad[3] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(lp_norm(bad, 1), Error);
    CHECK_THROWS_AS(lp_norm(one, 3), Error);
}

TEST_CASE("inner products") {
    auto s = split_space(32);
    auto half = GridFunction::from(s, [](double t, std::size_t) { return cplx(t < 0.5 ? 1.0 : 0.0); });
    CHECK(inner_product(half, half).real() == Approx(0.5).margin(1e-15));
    auto one = GridFunction::from(s, [](double, std::size_t) { return cplx(1.0); });
    auto i = GridFunction::from(s, [](double, std::size_t) { return cplx(0.0, 1.0); });
    CHECK(std::abs(inner_product(one, i) - cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(inner_product(i, one) - std::conj(inner_product(one, i))) < 1e-15);
    auto other = GridFunction(CylinderSpace::uniform(32));
    CHECK_THROWS_AS(inner_product(one, other), Error);
}

TEST_CASE("product partitions") {
    auto s = split_space(16);
    auto p1 = build_product_partition(*s, {0.0, 1.0}, {{0, 1}});
    REQUIRE(p1.cells.size() == 1);
    CHECK(cell_measure(*s, p1.cells[0]) == Approx(1.0).margin(1e-15));

    auto trivial = CylinderSpace::uniform(16);
    auto p2 = build_product_partition(*trivial, {0.0, 0.5, 1.0}, {{0}});
    CHECK(cell_measure(*trivial, p2.cells[0]) == 0.5);
    CHECK(cell_measure(*trivial, p2.cells[1]) == 0.5);

    auto p3 = build_product_partition(*s, {0.0, 0.25, 1.0}, {{0}, {1}});
    REQUIRE(p3.cells.size() == 4);
    std::vector<double> m;
    for (const auto& c : p3.cells) m.push_back(cell_measure(*s, c));
    CHECK(m == std::vector<double>{0.125, 0.375, 0.125, 0.375});
    CHECK(total_measure(*s, p3) == Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(build_product_partition(*s, {0.0, 1.0}, {{0}}), Error);
    CHECK_THROWS_AS(build_product_partition(*s, {0.0, 1.0}, {{0, 1}, {1}}), Error);
    CHECK_THROWS_AS(build_product_partition(*s, {0.1, 1.0}, {{0, 1}}), Error);
}

TEST_CASE("partition measure equals product of factors on small grids") {
    for (std::size_t n_t : {1u, 2u, 3u, 4u}) {
        auto s = CylinderSpace::uniform(n_t, BaseSpace({{0, 0.1}, {1, 0.2}, {2, 0.3}, {3, 0.4}}));
        auto p = build_product_partition(*s, {0.0, 0.5, 1.0}, {{0, 2}, {1}, {3}});
        for (const auto& c : p.cells) {
            double brute = 0.0;
            for_each_node(*s, c, [&](std::size_t k, std::size_t, std::size_t) { brute += s->weight(k); });
            CHECK(cell_measure(*s, c) == Approx(brute).margin(1e-15));
            CHECK(cell_measure(*s, c) <= s->t_mass(t_range(*s, c).first, t_range(*s, c).second) + 1e-15);
        }
        CHECK(total_measure(*s, p) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("refinement for correction") {
    auto s = CylinderSpace::uniform(1 << 14);
    auto p = build_product_partition(*s, {0.0, 1.0}, {{0}});

    auto same = refine_for_correction(*s, p, {0.0}, 1.0, 0.5);
    CHECK(same.partition.cells.size() == 1);

    auto r = refine_for_correction(*s, p, {1.0}, 1.0, 0.5);
    CHECK(r.gammas.size() == r.partition.cells.size());
    for (std::size_t k = 0; k < r.partition.cells.size(); ++k) {
        CHECK(cell_measure(*s, r.partition.cells[k]) < 0.5 / 216.0);
        CHECK(r.gammas[k] == 1.0);
        CHECK(fine_enough(1.0, cell_measure(*s, r.partition.cells[k]), 1.0, 0.5));
    }
    CHECK(total_measure(*s, r.partition) == Approx(1.0).margin(1e-12));
    for (std::size_t k = 1; k < r.partition.cells.size(); ++k) CHECK(r.partition.cells[k].a == r.partition.cells[k - 1].b);

    auto again = refine_for_correction(*s, r.partition, r.gammas, 1.0, 0.5);
    CHECK(again.partition.cells.size() == r.partition.cells.size());
}

TEST_CASE("node masks") {
    auto s = split_space(8);
    NodeMask a(s, false), b(s, true);
    for (std::size_t k = 0; k < 8; ++k) a.set(k);
    CHECK(a.measure() == Approx(0.5));
    b &= a;
    CHECK(b == a);
    CHECK(b.count() == 8);
}
