#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include <luzin/experiment.hpp>

using namespace luzin;
using Catch::Approx;

namespace {

json small_step() {
    return {{"pipeline", "step"},
            {"system", {{"kind", "product_trig"}, {"rows", 2048}, {"resolution", 65}}},
            {"target", {{"preset", "indicator"}, {"a", 0.5}, {"b", 1.0}}},
            {"eps", 0.5},
            {"delta", 0.5}};
}

}  // namespace

TEST_CASE("run-length masks") {
    auto s = CylinderSpace::uniform(37, BaseSpace::uniform(5));
    std::mt19937_64 rng(3);
    NodeMask m(s, false);
    for (std::size_t k = 0; k < m.size(); ++k) m.set(k, rng() % 3 == 0);
    auto j = rle_encode(m);
    std::size_t total = 0;
    for (const auto& r : j["runs"]) total += r.get<std::size_t>();
    CHECK(total == m.size());
    CHECK(j["count"] == m.count());
    CHECK(rle_decode(j, s) == m);
    CHECK(rle_decode(json::parse(j.dump()), s) == m);

    NodeMask full(s, true);
    CHECK(rle_encode(full)["runs"].size() == 1);
    CHECK(rle_encode(full)["first"] == 1);
    CHECK(rle_decode(rle_encode(full), s) == full);

    CHECK_THROWS_AS(rle_decode(j, CylinderSpace::uniform(37, BaseSpace::uniform(4))), Error);
    auto bad = j;
    bad["runs"].push_back(1);
    CHECK_THROWS_AS(rle_decode(bad, s), Error);
}

TEST_CASE("csv writers") {
    std::ostringstream t, e;
    write_tails_csv(t, {{1, 10, 0.5, 1.0, true}});
    write_envelope_csv(e, {});
    CHECK(t.str() == "r,m,norm,bound,holds\n1,10,0.5,1,1\n");
    CHECK(e.str() == "m,norm\n");
}

TEST_CASE("config parsing") {
    auto c = parse_config(json::object());
    CHECK(c.pipeline == "theorem");
    CHECK(c.tol.norm == 1e-6);
    CHECK(c.tol.gram == 1e-8);
    CHECK(c.tol.spectrum == 1e-12);
    auto d = parse_config(small_step());
    CHECK(d.system.rows == 2048);
    CHECK(d.target.a == 0.5);
    CHECK(to_json(parse_config(to_json(d))) == to_json(d));
    CHECK_THROWS_AS(parse_config(json{{"K", 0}}), Error);
    CHECK_THROWS_AS(parse_config(json::array()), Error);
}

TEST_CASE("targets") {
    auto s = build_setup(parse_config(small_step()).system);
    auto f = build_target({"indicator", 0.5, 1.0}, s, nullptr, 0);
    CHECK(lp_norm(f, 1.0) == Approx(0.5).margin(1e-12));
    CHECK(f[0] == cplx(0.0));
    CHECK(f[s.space->node(1024, 0)] == cplx(1.0));
    auto phi = build_target({"basis", 0, 0, 0, 7}, s, nullptr, 0);
    CHECK(lp_norm(phi, 2.0) == Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(build_target({"identity-bandlimited"}, s, nullptr, 0), Error);
    CHECK_THROWS_AS(build_target({"no-such"}, s, nullptr, 0), Error);
    auto r1 = build_target({"random"}, s, nullptr, 9), r2 = build_target({"random"}, s, nullptr, 9);
    CHECK(r1.values() == r2.values());

    SystemSpec sph;
    sph.kind = "sphere";
    sph.n_theta = 12;
    sph.n_phi = 25;
    auto ss = build_setup(sph);
    auto z = build_target({"zonal"}, ss, nullptr, 0);
    CHECK(z.space()->same_as(*ss.space));
    CHECK(lp_norm(z, 1.0) == Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(build_target({"ramp"}, ss, nullptr, 0), Error);
}

TEST_CASE("step runs are deterministic and clamp parameters") {
    auto j = small_step();
    j["eps"] = 1.5;
    auto a = run_experiment(parse_config(j));
    auto b = run_experiment(parse_config(j));
    REQUIRE(a.report["error"].is_null());
    CHECK(a.pass);
    CHECK(a.report.dump() == b.report.dump());
    CHECK(a.E->bits() == b.E->bits());
    const auto& w = a.report["result"]["warnings"];
    REQUIRE(w.size() == 1);
    CHECK(w[0].get<std::string>().find("eps") != std::string::npos);
    CHECK(a.report["result"]["eps"].get<double>() < 1.0);
    CHECK(a.report["result"]["E_measure"].get<double>() > 0.5);
    REQUIRE(!a.envelope.empty());
    CHECK(a.envelope.back().second == Approx(a.report["result"]["envelope"].get<double>()).epsilon(1e-9));
}

TEST_CASE("errors are reported, not thrown") {
    auto j = small_step();
    j["delta"] = 0.1;
    auto r = run_experiment(parse_config(j));
    CHECK_FALSE(r.pass);
    CHECK(r.report["error"]["code"] == "scale-search-exhausted");
    CHECK(r.report["pass"] == false);

    j["system"]["kind"] = "hexagonal";
    CHECK(run_experiment(parse_config(j)).report["error"]["code"] == "invalid-input");
    j = small_step();
    j["pipeline"] = "nothing";
    CHECK(run_experiment(parse_config(j)).report["error"]["code"] == "invalid-input");
}

TEST_CASE("bump trial pipeline") {
    json j = {{"pipeline", "bump_trials"},
              {"system", {{"kind", "trig"}, {"resolution", 1 << 14}, {"n_max", 4096}}},
              {"m_cap", 4096},
              {"trials", 10},
              {"seed", 20240601}};
    auto r = run_experiment(parse_config(j));
    CHECK(r.pass);
    CHECK(r.report["result"]["passed"] == 10);
    auto p = random_bump_params(10, 20240601);
    CHECK(r.report["result"]["rows"][3]["gamma"].get<double>() == p[3].gamma);
    CHECK(random_bump_params(5, 1)[4].eps == random_bump_params(5, 1)[4].eps);
}

TEST_CASE("system verification") {
    auto checks = verify_systems({});
    REQUIRE(checks.size() == 4);
    for (const auto& c : checks) CHECK(c.holds);
    CHECK(checks[1].gram_deviation == 0.0);
}

TEST_CASE("fejer curve") {
    auto c = fejer_curve(1.0 / 3.0, 4, 12);
    REQUIRE(c.size() == 9);
    CHECK(fejer_decays(c, 1e-3));
    // int_0^1 t I(lambda t) dt = (1 - ds) / (2 lambda) for integer lambda
    for (const auto& p : c) CHECK(p.value == Approx(1.0 / (3.0 * p.lambda)).margin(1e-12));
    CHECK_FALSE(fejer_decays(c, 1e-6));
    CHECK_FALSE(fejer_decays({}, 1.0));
}
