#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "homogeneous.hpp"
#include "io.hpp"

namespace luzin {

struct Tolerances {
    double norm = 1e-6;
    double gram = 1e-8;
    double spectrum = 1e-12;
};

struct SystemSpec {
    std::string kind = "trig";  // trig | walsh | product_trig | sphere
    std::size_t resolution = 1 << 14;
    std::size_t n_max = 0;  // 0: everything the grid supports
    std::size_t rows = 1;
    std::size_t n_theta = 6000;
    std::size_t n_phi = 169;
};

struct TargetSpec {
    std::string preset = "indicator";
    double a = 0.0, b = 0.4;
    double value = 1.0;
    std::size_t n = 1;
    std::uint64_t k = 1;
    std::size_t terms = 4;
    double z0 = 0.5;
    int rho = 1, i = 1;
};

struct EnumerationSpec {
    std::uint64_t budget = 1ull << 40;
    std::size_t degree_cap = 3;
    int coeff_grid = 12;
    std::int64_t coeff_bound = 2;
};

struct ExperimentConfig {
    std::string pipeline = "theorem";  // step | theorem | sequence | bump_trials
    SystemSpec system;
    TargetSpec target;
    double eps = 0.1, delta = 0.1;
    std::size_t K = 8, s_max = 5, m_cap = 0, s0_max = 0, m_max = 5;
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    EnumerationSpec enumeration;
    Tolerances tol;
};

inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    require(j.is_object(), Errc::invalid_input, "config must be a JSON object");
    c.pipeline = j.value("pipeline", c.pipeline);
    if (j.contains("system")) {
        const auto& s = j["system"];
        c.system.kind = s.value("kind", c.system.kind);
        c.system.resolution = s.value("resolution", c.system.resolution);
        c.system.n_max = s.value("n_max", c.system.n_max);
        c.system.rows = s.value("rows", c.system.rows);
        c.system.n_theta = s.value("n_theta", c.system.n_theta);
        c.system.n_phi = s.value("n_phi", c.system.n_phi);
    }
    if (j.contains("target")) {
        const auto& t = j["target"];
        c.target.preset = t.value("preset", c.target.preset);
        c.target.a = t.value("a", c.target.a);
        c.target.b = t.value("b", c.target.b);
        c.target.value = t.value("value", c.target.value);
        c.target.n = t.value("n", c.target.n);
        c.target.k = t.value("k", c.target.k);
        c.target.terms = t.value("terms", c.target.terms);
        c.target.z0 = t.value("z0", c.target.z0);
        c.target.rho = t.value("rho", c.target.rho);
        c.target.i = t.value("i", c.target.i);
    }
    if (j.contains("enumeration")) {
        const auto& e = j["enumeration"];
        c.enumeration.budget = e.value("budget", c.enumeration.budget);
        c.enumeration.degree_cap = e.value("degree_cap", c.enumeration.degree_cap);
        c.enumeration.coeff_grid = e.value("coeff_grid", c.enumeration.coeff_grid);
        c.enumeration.coeff_bound = e.value("coeff_bound", c.enumeration.coeff_bound);
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        c.tol.norm = t.value("norm", c.tol.norm);
        c.tol.gram = t.value("gram", c.tol.gram);
        c.tol.spectrum = t.value("spectrum", c.tol.spectrum);
    }
    c.eps = j.value("eps", c.eps);
    c.delta = j.value("delta", c.delta);
    c.K = j.value("K", c.K);
    c.s_max = j.value("s_max", c.s_max);
    c.m_cap = j.value("m_cap", c.m_cap);
    c.s0_max = j.value("s0_max", c.s0_max);
    c.m_max = j.value("m_max", c.m_max);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    require(c.K >= 1 && c.s_max >= 1 && c.m_max >= 1, Errc::invalid_input, "depths K, s_max, m_max must be positive");
    require(c.tol.norm >= 0 && c.tol.gram >= 0 && c.tol.spectrum >= 0, Errc::invalid_input, "tolerances must be >= 0");
    return c;
}

inline json to_json(const ExperimentConfig& c) {
    return {{"pipeline", c.pipeline},
            {"system",
             {{"kind", c.system.kind},
              {"resolution", c.system.resolution},
              {"n_max", c.system.n_max},
              {"rows", c.system.rows},
              {"n_theta", c.system.n_theta},
              {"n_phi", c.system.n_phi}}},
            {"target",
             {{"preset", c.target.preset},
              {"a", c.target.a},
              {"b", c.target.b},
              {"value", c.target.value},
              {"n", c.target.n},
              {"k", c.target.k},
              {"terms", c.target.terms},
              {"z0", c.target.z0},
              {"rho", c.target.rho},
              {"i", c.target.i}}},
            {"eps", c.eps},
            {"delta", c.delta},
            {"K", c.K},
            {"s_max", c.s_max},
            {"m_cap", c.m_cap},
            {"s0_max", c.s0_max},
            {"m_max", c.m_max},
            {"trials", c.trials},
            {"seed", c.seed},
            {"enumeration",
             {{"budget", c.enumeration.budget},
              {"degree_cap", c.enumeration.degree_cap},
              {"coeff_grid", c.enumeration.coeff_grid},
              {"coeff_bound", c.enumeration.coeff_bound}}},
            {"tolerances", {{"norm", c.tol.norm}, {"gram", c.tol.gram}, {"spectrum", c.tol.spectrum}}}};
}

struct Setup {
    SpaceHandle space;
    SystemHandle system;
    std::optional<SphereGrid> sphere;
    std::optional<CylinderChart> chart;

    json describe() const {
        json d = {{"kind", system->kind()}, {"n_max", system->n_max()}, {"n_t", space->n_t()}, {"n_base", space->n_base()}};
        if (sphere) d["sphere"] = {{"n_theta", sphere->n_theta()}, {"n_phi", sphere->n_phi()}, {"chart", "t = phi / 2pi, rows = colatitude bands"}};
        return d;
    }
};

inline Setup build_setup(const SystemSpec& s) {
    Setup out;
    if (s.kind == "trig") {
        out.space = CylinderSpace::uniform(s.resolution);
        const std::size_t cap = TrigKernel(s.resolution).count();
        out.system = make_trigonometric(out.space, s.n_max ? s.n_max : cap);
    } else if (s.kind == "walsh") {
        out.space = CylinderSpace::uniform(s.resolution);
        out.system = make_walsh(out.space, s.n_max ? s.n_max : s.resolution);
    } else if (s.kind == "product_trig") {
        out.space = CylinderSpace::uniform(s.resolution, BaseSpace::uniform(s.rows));
        out.system = make_product_trigonometric(out.space, s.n_max);
    } else if (s.kind == "sphere") {
        out.sphere = SphereGrid::uniform(s.n_theta, s.n_phi);
        auto [cyl, chart] = cylinder_chart(*out.sphere);
        out.space = cyl;
        out.chart = chart;
        out.system = make_product_trigonometric(cyl, s.n_max);
    } else {
        throw Error(Errc::invalid_input, "unknown system kind '" + s.kind + "'");
    }
    return out;
}

inline RationalEnumeration make_enumeration(const EnumerationSpec& e) {
    return RationalEnumeration(e.budget, e.degree_cap, e.coeff_grid, e.coeff_bound);
}

// x = (row + t) / rows on flat spaces.
inline GridFunction build_target(const TargetSpec& t, const Setup& s, const PolynomialSequence* seq, std::uint64_t seed) {
    const auto& p = t.preset;
    if (s.sphere) {
        const auto& grid = *s.sphere;
        GridFunction f;
        if (p == "constant")
            f = grid.sample([&](double, double) { return t.value; });
        else if (p == "zonal")
            f = grid.sample([](double z, double) { return 1.0 + z; });
        else if (p == "cap")
            f = grid.sample([&](double z, double) { return z > t.z0 ? 1.0 : 0.0; });
        else if (p == "harmonic")
            f = make_sphere_system(grid, t.rho)->evaluate(flat_index({t.rho, t.i}));
        else
            throw Error(Errc::invalid_input, "unknown sphere preset '" + p + "'");
        return s.chart->to_cylinder(f);
    }
    const double rows = static_cast<double>(s.space->n_base());
    auto flat = [&](auto fn) {
        return GridFunction::from(s.space, [&](double tt, std::size_t i) { return cplx(fn((static_cast<double>(i) + tt) / rows)); });
    };
    if (p == "constant") return flat([&](double) { return t.value; });
    if (p == "ramp") return flat([](double x) { return x; });
    if (p == "indicator") return flat([&](double x) { return x >= t.a && x < t.b ? 1.0 : 0.0; });
    if (p == "basis") return s.system->evaluate(t.n);
    if (p == "identity-bandlimited") {
        require(seq != nullptr, Errc::invalid_input, "preset needs an enumeration");
        return synthesize(seq->at(t.k).terms(), *s.system);
    }
    if (p == "random") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<Term> terms;
        for (std::size_t n = 1; n <= std::min(t.terms, s.system->n_max()); ++n) terms.emplace_back(n, U(rng));
        return synthesize(terms, *s.system);
    }
    throw Error(Errc::invalid_input, "unknown target preset '" + p + "'");
}

struct RunReport {
    json report;
    std::vector<TailCheck> tails;
    std::vector<std::pair<std::size_t, double>> envelope;
    std::optional<NodeMask> E;
    bool pass = false;
};

struct BumpTrial {
    BumpParams params;
    bool holds = false;
    std::string error;
};

// Parameter ranges chosen so the bandwidth the trials need stays below 4096 trig functions.
inline std::vector<BumpParams> random_bump_params(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<BumpParams> out;
    for (std::size_t q = 0; q < count; ++q) {
        const double len = 0.25 + 0.75 * U(rng);
        const double a = (1.0 - len) * U(rng);
        const double mag = 0.2 + 0.8 * U(rng);
        const double sign = U(rng) < 0.5 ? -1.0 : 1.0;
        const double eps = 0.3 + 0.65 * U(rng);
        const double delta = 0.4 + 0.55 * U(rng);
        const std::size_t N = 1 + static_cast<std::size_t>(rng() % 16);
        out.push_back({{a, a + len, {0}}, sign * mag, eps, delta, N});
    }
    return out;
}

inline RunReport run_experiment(const ExperimentConfig& cfg) {
    RunReport out;
    auto& rep = out.report;
    rep["config"] = to_json(cfg);
    rep["error"] = nullptr;
    StepOptions step;
    step.slack = cfg.tol.norm;
    step.bump.slack = cfg.tol.norm;
    step.bump.spectrum_factor = cfg.tol.spectrum;
    step.bump.s_max = cfg.s0_max;
    step.throw_on_violation = false;
    try {
        const Setup s = build_setup(cfg.system);
        rep["system"] = s.describe();
        std::optional<RationalEnumeration> en;
        if (cfg.pipeline == "theorem" || cfg.pipeline == "sequence" || cfg.target.preset == "identity-bandlimited")
            en.emplace(make_enumeration(cfg.enumeration));
        const PolynomialSequence* seq = en ? &*en : nullptr;
        const std::size_t m_cap = cfg.m_cap ? cfg.m_cap : s.system->n_max();

        if (cfg.pipeline == "bump_trials") {
            json rows = json::array();
            std::size_t ok = 0;
            for (const auto& p : random_bump_params(cfg.trials, cfg.seed)) {
                json row = {{"a", p.cell.a}, {"b", p.cell.b}, {"gamma", p.gamma}, {"eps", p.eps}, {"delta", p.delta}, {"N", p.n_start}};
                try {
                    auto b = build_bump(p, *s.system, m_cap, step.bump);
                    row["s0"] = b.s0;
                    row["statements"] = statements_json(b.statements);
                    row["holds"] = b.all_hold();
                    ok += b.all_hold();
                } catch (const Error& e) {
                    row["holds"] = false;
                    row["error"] = to_json(e);
                }
                rows.push_back(row);
            }
            rep["result"] = {{"trials", cfg.trials}, {"passed", ok}, {"rows", rows}};
            out.pass = ok == cfg.trials;
        } else {
            const GridFunction f = build_target(cfg.target, s, seq, cfg.seed);
            if (cfg.pipeline == "step") {
                auto r = correct_step(f, cfg.eps, cfg.delta, 1, *s.system, m_cap, step);
                rep["result"] = to_json(r);
                out.envelope = envelope_of_terms(r.Q.terms(), *s.system, r.n_start, r.n_end, true).trace;
                out.E = r.E;
                out.pass = r.all_hold();
            } else if (cfg.pipeline == "theorem") {
                const double floor = std::min(std::clamp(cfg.eps, budget::param_floor, 1.0 - budget::param_floor), lp_norm(f, 1.0));
                auto bundle = build_universal_set(floor, cfg.delta, cfg.K, s.system, *seq, m_cap, step);
                rep["bundle"] = to_json(bundle);
                auto c = correct(f, cfg.eps, cfg.delta, bundle, *seq, cfg.s_max, {cfg.tol.norm});
                rep["result"] = to_json(c.cert);
                out.tails = c.cert.tails;
                out.envelope = c.envelope.trace;
                out.E = bundle.E;
                out.pass = c.cert.all_hold();
            } else if (cfg.pipeline == "sequence") {
                SequenceOptions so;
                so.K = cfg.K;
                so.s_max = cfg.s_max;
                so.m_cap = m_cap;
                so.m_min = 2;
                so.step = step;
                so.correct.slack = cfg.tol.norm;
                auto r = correction_sequence(f, cfg.m_max, s.system, *seq, so);
                json entries = json::array();
                out.pass = true;
                for (const auto& e : r.entries) {
                    const auto& c = e.correction.cert;
                    const bool ok = c.f_minus_g_1 < 1.0 / static_cast<double>(e.m) && e.E.measure() > 1.0 - 1.0 / static_cast<double>(e.m);
                    entries.push_back({{"m", e.m}, {"meets_schedule", ok}, {"certificate", to_json(c)}});
                    out.pass = out.pass && ok && c.all_hold();
                    for (auto t : c.tails) out.tails.push_back(t);
                }
                rep["result"] = {{"nested", r.nested}, {"entries", entries}};
                if (!r.entries.empty()) {
                    out.envelope = r.entries.back().correction.envelope.trace;
                    out.E = r.entries.back().E;
                }
            } else {
                throw Error(Errc::invalid_input, "unknown pipeline '" + cfg.pipeline + "'");
            }
        }
    } catch (const Error& e) {
        rep["error"] = to_json(e);
        out.pass = false;
    }
    rep["pass"] = out.pass;
    return out;
}

struct SystemCheck {
    std::string name;
    double gram_deviation = 0.0;
    double norm_deviation = 0.0;
    double sup_excess = 0.0;  // max over n of (max |phi_n| - sup_bound(n))
    bool exact = false;
    bool holds = false;
};

inline SystemCheck check_system(const std::string& name, const OrthonormalSystem& sys, std::size_t m, double gram_tol, double norm_tol,
                                bool exact) {
    SystemCheck c{name};
    c.exact = exact;
    c.gram_deviation = gram_matrix(sys, m).max_deviation;
    c.sup_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= m; ++n) {
        auto phi = sys.evaluate(n);
        double mx = 0.0;
        for (std::size_t k = 0; k < phi.size(); ++k) mx = std::max(mx, std::abs(phi[k]));
        c.sup_excess = std::max(c.sup_excess, mx - sys.sup_bound(n));
        c.norm_deviation = std::max(c.norm_deviation, std::fabs(lp_norm(phi, 2.0) - 1.0));
    }
    c.holds = (exact ? c.gram_deviation == 0.0 : c.gram_deviation < gram_tol) && c.norm_deviation <= norm_tol && c.sup_excess <= 1e-12;
    return c;
}

inline std::vector<SystemCheck> verify_systems(const Tolerances& tol) {
    std::vector<SystemCheck> out;
    out.push_back(check_system("trig", *make_trigonometric(CylinderSpace::uniform(1 << 14), 64), 64, tol.gram, tol.norm, false));
    out.push_back(check_system("walsh", *make_walsh(CylinderSpace::uniform(1 << 10), 32), 32, tol.gram, tol.norm, true));
    out.push_back(check_system("sphere", *make_sphere_system(8), 81, tol.gram, tol.norm, false));
    auto prod = make_product_trigonometric(CylinderSpace::uniform(65, BaseSpace::uniform(4)));
    out.push_back(check_system("product_trig", *prod, prod->n_max(), tol.gram, tol.norm, false));
    return out;
}

inline json to_json(const SystemCheck& c) {
    return {{"system", c.name},
            {"gram_deviation", c.gram_deviation},
            {"norm_deviation", c.norm_deviation},
            {"sup_excess", c.sup_excess},
            {"exact_required", c.exact},
            {"holds", c.holds}};
}

struct FejerPoint {
    int j = 0;
    double lambda = 0.0;
    double value = 0.0;
};

// |int_0^1 t I(2^j t) dt| for j = j_min..j_max.
inline std::vector<FejerPoint> fejer_curve(double ds, int j_min, int j_max) {
    std::vector<FejerPoint> out;
    for (int j = j_min; j <= j_max; ++j) {
        const double lam = std::ldexp(1.0, j);
        out.push_back({j, lam, std::fabs(fejer_integral([](double t) { return t; }, ds, lam))});
    }
    return out;
}

inline bool fejer_decays(const std::vector<FejerPoint>& c, double final_bound) {
    for (std::size_t q = 1; q < c.size(); ++q)
        if (c[q].value > c[q - 1].value) return false;
    return !c.empty() && c.back().value < final_bound;
}

}  // namespace luzin
