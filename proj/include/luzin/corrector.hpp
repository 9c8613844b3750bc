#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bump.hpp"
#include "enumeration.hpp"
#include "fourier.hpp"
#include "measure.hpp"
#include "systems.hpp"

namespace luzin {

// Budget constants of the correction pipeline.
namespace budget {

inline double step_bound(double eps, double f1) { return std::min(0.5 * eps, f1 / 3.0); }
// Per-cell bump tolerance. The sum over nu0 cells stays at min{eps, |f|_1} / 4.
inline double cell_eps(double eps, double f1, std::size_t nu0) { return std::min(eps, f1) / (4.0 * static_cast<double>(nu0)); }
inline double bundle_eps(double eps0, std::size_t k) { return std::ldexp(eps0, -static_cast<int>(k) - 7); }
inline double bundle_delta(double delta, std::size_t k) { return std::ldexp(delta, -static_cast<int>(k)); }
inline double greedy_b(double eps0, std::size_t s) { return std::ldexp(eps0, -static_cast<int>(s) - 6); }
inline double nu_tol(double eps0, std::size_t s) { return std::ldexp(eps0, -static_cast<int>(s) - 7); }
inline double tail_bound(double eps0, std::size_t r) { return 23.0 * std::ldexp(eps0, -static_cast<int>(r) - 4); }
inline double f_minus_g_bound(double eps0) { return 7.0 * eps0 / 32.0; }
inline constexpr double param_floor = 1e-6;

}  // namespace budget

inline double clamp_param(double x, const std::string& name, std::vector<std::string>& warnings) {
    require(std::isfinite(x), Errc::invalid_input, name + " must be finite");
    const double lo = budget::param_floor, hi = 1.0 - budget::param_floor;
    if (x < lo || x > hi) {
        const double c = std::clamp(x, lo, hi);
        warnings.push_back(name + " = " + std::to_string(x) + " clamped to " + std::to_string(c));
        return c;
    }
    return x;
}

inline bool is_essentially_real(const GridFunction& f, double rel = 1e-12) {
    const auto& s = *f.space();
    Accumulator re, im;
    detail::for_window(s, full_window(s), [&](std::size_t k, double w) {
        re.add(w * std::fabs(f[k].real()));
        im.add(w * std::fabs(f[k].imag()));
    });
    return im.value() <= rel * std::max(re.value(), 1e-300);
}

inline GridFunction real_part(const GridFunction& f) {
    GridFunction r(f.space());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k].real();
    return r;
}

inline GridFunction imag_part(const GridFunction& f) {
    GridFunction r(f.space());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k].imag();
    return r;
}

struct StepFunction {
    ProductPartition partition;
    std::vector<double> gammas;
    double error = 0.0;  // ||Lambda - f||_1
    std::size_t t_pieces = 1;

    GridFunction evaluate(const SpaceHandle& s) const {
        GridFunction g(s);
        for (std::size_t k = 0; k < partition.cells.size(); ++k)
            for_each_node(*s, partition.cells[k], [&](std::size_t node, std::size_t, std::size_t) { g[node] = gammas[k]; });
        return g;
    }
};

// Cell averages of Re f on (base row) x (uniform t-pieces), doubling the t-pieces until ||Lambda - f||_1 < bound.
inline StepFunction step_approximate(const GridFunction& f, double bound) {
    require(bound > 0.0, Errc::invalid_input, "approximation bound must be positive");
    check_finite(f);
    if (!is_essentially_real(f))
        throw Error(Errc::unsupported_input, "step approximation needs a real function; split real and imaginary parts first");
    const auto& s = *f.space();
    std::vector<std::vector<std::size_t>> rows(s.n_base());
    for (std::size_t i = 0; i < s.n_base(); ++i) rows[i] = {i};

    double achieved = 0.0;
    for (std::size_t L = 1; L <= 2 * s.n_t(); L *= 2) {
        std::vector<double> breaks(L + 1);
        for (std::size_t l = 0; l <= L; ++l) breaks[l] = static_cast<double>(l) / static_cast<double>(L);
        StepFunction st{build_product_partition(s, breaks, rows), {}, 0.0, L};
        st.gammas.resize(st.partition.cells.size());
        Accumulator err;
        for (std::size_t k = 0; k < st.partition.cells.size(); ++k) {
            const auto& cell = st.partition.cells[k];
            Accumulator num, den;
            for_each_node(s, cell, [&](std::size_t node, std::size_t j, std::size_t i) {
                const double w = s.t_weight(j) * s.base().weight(i);
                num.add(w * f[node].real());
                den.add(w);
            });
            const double gamma = den.value() > 0.0 ? num.value() / den.value() : 0.0;
            st.gammas[k] = gamma;
            for_each_node(s, cell, [&](std::size_t node, std::size_t j, std::size_t i) {
                err.add(s.t_weight(j) * s.base().weight(i) * fast_abs(f[node] - gamma));
            });
        }
        st.error = err.value();
        achieved = st.error;
        if (st.error < bound) return st;
    }
    throw Error(Errc::resolution_exhausted,
                "step approximation error " + std::to_string(achieved) + " not below " + std::to_string(bound) + " at grid resolution",
                achieved);
}

struct StepOptions {
    BumpOptions bump;
    double slack = 1e-6;
    bool throw_on_violation = true;
};

struct StepCorrection {
    NodeMask E;
    GridFunction g;
    FourierPolynomial Q;
    std::size_t n_start = 1;
    std::size_t n_end = 0;  // last index of Q's range; the next block starts at n_end + 1
    double eps = 0.0, delta = 0.0;
    std::vector<std::string> warnings;

    std::size_t nu0 = 0;
    std::size_t bumps = 0;
    std::size_t max_s0 = 0;
    double cell_eps = 0.0;
    double f1 = 0.0, g1 = 0.0;
    double lambda_error = 0.0;
    double E_measure = 0.0;
    double g_minus_q1 = 0.0;
    double envelope = 0.0;
    bool envelope_from_blocks = false;
    bool bumps_hold = true;
    std::array<bool, 5> statements{};

    bool all_hold() const { return bumps_hold && std::all_of(statements.begin(), statements.end(), [](bool b) { return b; }); }
};

namespace detail {

inline void check_statements(StepCorrection& r, const GridFunction& f, const OrthonormalSystem& sys, const StepOptions& opt) {
    const auto& s = *f.space();
    r.f1 = lp_norm(f, 1.0);
    r.g1 = lp_norm(r.g, 1.0);
    r.E_measure = r.E.measure();
    bool same = true;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (r.E[k] && r.g[k] != f[k]) same = false;
    GridFunction q = synthesize(r.Q.terms(), sys);
    q -= r.g;
    r.g_minus_q1 = lp_norm(q, 1.0);
    if (!r.envelope_from_blocks) r.envelope = r.Q.empty() ? 0.0 : envelope_of_terms(r.Q.terms(), sys, r.n_start, r.n_end).max;
    const double sl = opt.slack;
    r.statements[0] = r.E_measure > 1.0 - r.delta - sl;
    r.statements[1] = same;
    r.statements[2] = r.f1 / 3.0 < r.g1 + sl * r.f1 && r.g1 < 3.0 * r.f1 + sl * r.f1;
    r.statements[3] = r.g_minus_q1 < r.eps + sl * r.eps;
    r.statements[4] = r.envelope < 3.0 * r.f1 + sl * r.f1;
}

inline void raise_if_violated(const StepCorrection& r, const StepOptions& opt) {
    if (!opt.throw_on_violation || r.all_hold()) return;
    std::string which;
    for (std::size_t i = 0; i < 5; ++i)
        if (!r.statements[i]) which += " " + std::to_string(i + 1);
    if (!r.bumps_hold) which += " (bump)";
    throw Error(Errc::internal_invariant,
                "step correction statements failed:" + which + "; |E|=" + std::to_string(r.E_measure) + " |f|=" + std::to_string(r.f1) +
                    " |g|=" + std::to_string(r.g1) + " |g-Q|=" + std::to_string(r.g_minus_q1) + " env=" + std::to_string(r.envelope));
}

inline StepCorrection correct_step_real(const GridFunction& f, double eps, double delta, std::size_t n_start, const OrthonormalSystem& sys,
                                        std::size_t m_cap, const StepOptions& opt) {
    const auto& sp = f.space();
    const auto& s = *sp;
    StepCorrection r;
    r.eps = eps;
    r.delta = delta;
    r.n_start = n_start;
    r.f1 = lp_norm(f, 1.0);

    StepFunction lambda = step_approximate(f, budget::step_bound(eps, r.f1));
    r.lambda_error = lambda.error;
    auto fine = refine_for_correction(s, lambda.partition, lambda.gammas, r.f1, delta);
    r.nu0 = fine.partition.cells.size();
    r.cell_eps = budget::cell_eps(eps, r.f1, r.nu0);

    r.E = NodeMask(sp, false);
    r.g = f;
    std::vector<Term> q;
    std::size_t N = n_start;
    // While each block's support starts past all earlier ones, partial-sum norms add up exactly.
    bool disjoint = true;
    std::size_t hull_end = 0;
    double prefix = 0.0, env = 0.0;
    for (std::size_t k = 0; k < r.nu0; ++k) {
        const auto& cell = fine.partition.cells[k];
        const double gamma = fine.gammas[k];
        if (!(cell_measure(s, cell) > 0.0)) continue;
        if (gamma == 0.0) {
            for_each_node(s, cell, [&](std::size_t node, std::size_t, std::size_t) { r.E.set(node); });
            continue;
        }
        BumpResult b = build_bump({cell, gamma, r.cell_eps, delta, N}, sys, m_cap, opt.bump);
        ++r.bumps;
        r.max_s0 = std::max(r.max_s0, b.s0);
        r.bumps_hold = r.bumps_hold && b.all_hold();
        const auto& sh = b.shape;
        for_each_node(s, cell, [&](std::size_t node, std::size_t, std::size_t) {
            const std::size_t i = node - sh.window.begin;
            if (sh.kept[i])
                r.E.set(node);
            else
                r.g[node] = f[node] - gamma + sh.g[i];
        });
        q.insert(q.end(), b.block.terms().begin(), b.block.terms().end());
        N = b.m_end + 1;
        if (!b.block.empty()) {
            disjoint = disjoint && b.block_hull.begin >= hull_end;
            hull_end = std::max(hull_end, b.block_hull.end);
            env = std::max(env, prefix + b.envelope);
            prefix += b.q1;
        }
    }
    r.n_end = N - 1;
    if (disjoint) {
        r.envelope = env;
        r.envelope_from_blocks = true;
    }
    r.Q = FourierPolynomial(n_start, std::max(n_start, r.n_end));
    for (const auto& [n, c] : q) r.Q.push(n, c);
    return r;
}

}  // namespace detail

// Step-function correction: E, g = f on E, and a Fourier block Q over [n_start, n_end] close to g.
inline StepCorrection correct_step(const GridFunction& f, double eps, double delta, std::size_t n_start, const OrthonormalSystem& sys,
                                   std::size_t m_cap, const StepOptions& opt = {}) {
    require(f.space()->same_as(*sys.space()), Errc::invalid_input, "function and system live on different spaces");
    require(n_start >= 1, Errc::invalid_input, "n_start must be >= 1");
    check_finite(f);
    std::vector<std::string> warnings;
    eps = clamp_param(eps, "eps", warnings);
    delta = clamp_param(delta, "delta", warnings);
    const double f1 = lp_norm(f, 1.0);
    require(f1 > 0.0, Errc::invalid_input, "f must have positive L1 norm");

    StepCorrection r;
    if (is_essentially_real(f)) {
        r = detail::correct_step_real(real_part(f), eps, delta, n_start, sys, m_cap, opt);
    } else {
        // Real and imaginary parts with halved budgets; kept sets intersect.
        GridFunction re = real_part(f), im = imag_part(f);
        const double re1 = lp_norm(re, 1.0), im1 = lp_norm(im, 1.0);
        std::optional<StepCorrection> a, b;
        std::size_t N = n_start;
        if (re1 > 0.0) {
            a = detail::correct_step_real(re, 0.5 * eps, 0.5 * delta, N, sys, m_cap, opt);
            N = a->n_end + 1;
        }
        if (im1 > 0.0) b = detail::correct_step_real(im, 0.5 * eps, 0.5 * delta, N, sys, m_cap, opt);
        r.E = NodeMask(f.space(), true);
        r.g = GridFunction(f.space());
        std::vector<Term> q;
        for (std::size_t k = 0; k < f.size(); ++k) r.g[k] = cplx(a ? a->g[k].real() : 0.0, b ? b->g[k].real() : 0.0);
        if (a) {
            r.E &= a->E;
            for (const auto& t : a->Q.terms()) q.push_back(t);
        }
        if (b) {
            r.E &= b->E;
            for (const auto& [n, c] : b->Q.terms()) q.emplace_back(n, cplx(0.0, 1.0) * c);
        }
        r.n_end = b ? b->n_end : a->n_end;
        r.Q = FourierPolynomial(n_start, std::max(n_start, r.n_end));
        for (const auto& [n, c] : q) r.Q.push(n, c);
        for (auto* p : {&a, &b})
            if (*p) {
                r.nu0 += (*p)->nu0;
                r.bumps += (*p)->bumps;
                r.max_s0 = std::max(r.max_s0, (*p)->max_s0);
                r.bumps_hold = r.bumps_hold && (*p)->bumps_hold;
                r.lambda_error += (*p)->lambda_error;
            }
        r.cell_eps = std::min(a ? a->cell_eps : 1.0, b ? b->cell_eps : 1.0);
    }
    r.eps = eps;
    r.delta = delta;
    r.n_start = n_start;
    r.warnings = std::move(warnings);
    detail::check_statements(r, f, sys, opt);
    detail::raise_if_violated(r, opt);
    return r;
}

struct GreedyStep {
    std::uint64_t k = 0;
    double r_norm = 0.0;     // ||R_{k_s}||_1
    double residual = 0.0;   // ||f - sum_{r<=s} R_{k_r}||_1
    double target = 0.0;     // residual bound used in the search
    bool holds = true;
};

struct GreedyResult {
    std::vector<GreedyStep> steps;  // steps[s], s = 0..s_max
    double f1 = 0.0;
    bool all_hold() const {
        return std::all_of(steps.begin(), steps.end(), [](const GreedyStep& s) { return s.holds; });
    }
    std::vector<std::uint64_t> indices() const {
        std::vector<std::uint64_t> k;
        for (const auto& s : steps) k.push_back(s.k);
        return k;
    }
};

// b(s) for s >= 1.
inline GreedyResult greedy_series(const GridFunction& f, const std::function<double(std::size_t)>& b, const PolynomialSequence& seq,
                                  const OrthonormalSystem& sys, std::size_t s_max, double slack = 1e-6) {
    GreedyResult out;
    out.f1 = lp_norm(f, 1.0);
    require(out.f1 > 0.0, Errc::invalid_input, "f must have positive L1 norm");
    for (std::size_t s = 1; s <= s_max + 1; ++s) require(b(s) > 0.0, Errc::invalid_input, "b_s must be positive");

    GridFunction resid = f;
    std::uint64_t after = 0;
    for (std::size_t s = 0; s <= s_max; ++s) {
        const double tol = s == 0 ? 0.5 * std::min(out.f1, b(1)) : 0.5 * std::min({b(s), b(s + 1), 1.0 / static_cast<double>(s)});
        Admissible a = seq.find(resid, sys, after, tol, s != 0);
        if (!a.found)
            throw Error(Errc::enumeration_exhausted,
                        "no polynomial within " + std::to_string(tol) + " of the greedy residual at step " + std::to_string(s) +
                            "; best distance " + std::to_string(a.best_distance),
                        a.best_distance);
        GridFunction R = synthesize(seq.at(a.k).terms(), sys);
        resid -= R;
        GreedyStep st{a.k, lp_norm(R, 1.0), lp_norm(resid, 1.0), tol, true};
        st.holds = s == 0 ? st.residual <= tol + slack : (st.residual < tol + slack && st.r_norm < b(s) + slack);
        out.steps.push_back(st);
        after = a.k;
    }
    return out;
}

struct BundleRecord {
    std::uint64_t k = 0;
    FourierPolynomial R;
    GridFunction R_grid;
    NodeMask E;
    GridFunction g;
    FourierPolynomial Q;
    std::size_t n_prev = 1;  // N_{k-1}
    std::size_t n_next = 1;  // N_k; Q lives in [N_{k-1}, N_k - 1]
    double r1 = 0.0;
    double eps = 0.0, delta = 0.0;
    std::array<bool, 5> statements{};
};

struct UniversalSetBundle {
    SystemHandle system;
    NodeMask E;
    std::vector<BundleRecord> records;  // records[k-1]
    double eps0_floor = 0.0;
    double delta = 0.0;
    std::size_t n0 = 1;
    std::vector<std::string> warnings;

    std::size_t depth() const { return records.size(); }
    std::size_t N(std::size_t k) const { return k == 0 ? n0 : records[k - 1].n_next; }
    const BundleRecord& at(std::size_t k) const { return records[k - 1]; }

    bool all_hold() const {
        for (const auto& r : records)
            for (bool b : r.statements)
                if (!b) return false;
        return true;
    }
};

// Intersects step corrections of R_1..R_K run with eps0/2^{k+7} and delta/2^k; blocks are chained N_k -> N_{k+1}.
inline UniversalSetBundle build_universal_set(double eps0_floor, double delta, std::size_t K, const SystemHandle& system,
                                              const PolynomialSequence& seq, std::size_t m_cap, const StepOptions& opt = {}) {
    require(K >= 1, Errc::invalid_input, "bundle depth K must be >= 1");
    require(eps0_floor > 0.0, Errc::invalid_input, "eps0 floor must be positive");
    UniversalSetBundle u;
    u.system = system;
    u.delta = clamp_param(delta, "delta", u.warnings);
    u.eps0_floor = eps0_floor;
    u.E = NodeMask(system->space(), true);
    std::size_t N = u.n0;
    for (std::size_t k = 1; k <= K; ++k) {
        BundleRecord rec;
        rec.k = k;
        rec.R = seq.at(k);
        rec.R_grid = evaluate(rec.R, *system);
        rec.r1 = lp_norm(rec.R_grid, 1.0);
        rec.eps = budget::bundle_eps(eps0_floor, k);
        rec.delta = budget::bundle_delta(u.delta, k);
        rec.n_prev = N;
        auto st = correct_step(rec.R_grid, rec.eps, rec.delta, N, *system, m_cap, opt);
        rec.E = std::move(st.E);
        rec.g = std::move(st.g);
        rec.Q = std::move(st.Q);
        rec.statements = st.statements;
        rec.n_next = st.n_end + 1;
        N = rec.n_next;
        u.E &= rec.E;
        u.records.push_back(std::move(rec));
    }
    return u;
}

struct TailCheck {
    std::size_t r = 0;
    std::size_t m = 0;
    double norm = 0.0;
    double bound = 0.0;
    bool holds = false;
};

struct CorrectionCertificate {
    double eps = 0.0, delta = 0.0, eps0 = 0.0;
    double f1 = 0.0, g1 = 0.0;
    double f_minus_g_1 = 0.0;
    double f_minus_g_bound = 0.0;
    double E_measure = 0.0;
    double sup_partial_1 = 0.0;
    std::size_t sup_argmax = 0;
    double min_f1_g1 = 0.0;
    double ratio = 0.0;  // sup_partial_1 / min_f1_g1
    std::vector<TailCheck> tails;
    std::array<bool, 4> statements{};
    bool within_seven_32 = false;
    bool norm_relation = false;  // 25 |f| < 32 |g|
    bool nu_exceeds_s = false;
    bool greedy_holds = false;
    std::vector<std::uint64_t> k;
    std::vector<std::uint64_t> nu;
    std::size_t s_max = 0;
    std::size_t n_end = 0;
    std::vector<std::string> warnings;

    bool all_hold() const { return std::all_of(statements.begin(), statements.end(), [](bool b) { return b; }); }
};

struct Correction {
    GridFunction g;
    FourierPolynomial series;
    Envelope envelope;
    GreedyResult greedy;
    CorrectionCertificate cert;
};

struct CorrectOptions {
    double slack = 1e-6;
};

// Corrects f against a prebuilt bundle; g differs from f only off the bundle sets used.
inline Correction correct(const GridFunction& f, double eps, double delta, const UniversalSetBundle& bundle, const PolynomialSequence& seq,
                          std::size_t s_max, const CorrectOptions& opt = {}) {
    const auto& sys = *bundle.system;
    const auto& sp = f.space();
    require(sp->same_as(*sys.space()), Errc::invalid_input, "function and bundle live on different spaces");
    require(s_max >= 1, Errc::invalid_input, "s_max must be >= 1");
    Correction out;
    auto& c = out.cert;
    c.eps = clamp_param(eps, "eps", c.warnings);
    c.delta = clamp_param(delta, "delta", c.warnings);
    c.f1 = lp_norm(f, 1.0);
    require(c.f1 > 0.0, Errc::invalid_input, "f must have positive L1 norm");
    c.eps0 = std::min(c.eps, c.f1);
    c.s_max = s_max;
    require(c.eps0 >= bundle.eps0_floor * (1.0 - 1e-12), Errc::invalid_input,
            "min{eps, |f|_1} = " + std::to_string(c.eps0) + " is below the bundle floor " + std::to_string(bundle.eps0_floor));
    require(c.delta >= bundle.delta, Errc::invalid_input, "delta is below the bundle's delta");
    const double eps0 = c.eps0;

    out.greedy = greedy_series(f, [&](std::size_t s) { return budget::greedy_b(eps0, s); }, seq, sys, s_max, opt.slack);
    c.k = out.greedy.indices();
    c.greedy_holds = out.greedy.all_hold();
    const FourierPolynomial R0 = seq.at(c.k[0]);

    // nu_s selection: T_s = R_{k_s} - sum_{j<s} (Q_{nu_j} - g_j).
    GridFunction defect(sp);  // sum_{j<s} (Q_{nu_j} - g_j)
    GridFunction correction(sp);
    std::vector<std::uint8_t> touched(sp->size(), 0);
    const std::size_t K = bundle.depth();
    std::size_t nu_prev = 1;
    const std::size_t sigma0 = R0.max_index();
    for (std::size_t s = 1; s <= s_max; ++s) {
        GridFunction Rks = synthesize(seq.at(c.k[s]).terms(), sys);
        GridFunction T = Rks;
        T -= defect;
        const double tol = budget::nu_tol(eps0, s);
        std::size_t chosen = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t nu = nu_prev + 1; nu <= K && !chosen; ++nu) {
            if (s == 1 && !(bundle.N(nu - 1) > sigma0)) continue;
            GridFunction d = bundle.at(nu).R_grid;
            d -= T;
            const double dist = lp_norm(d, 1.0);
            best = std::min(best, dist);
            if (dist < tol) chosen = nu;
        }
        if (!chosen) {
            std::uint64_t after = nu_prev;
            if (s == 1)
                while (after < K && !(bundle.N(after) > sigma0)) ++after;
            std::string need = "beyond the sequence budget";
            try {
                Admissible a = seq.find(T, sys, std::max<std::uint64_t>(after, K), tol, true);
                if (a.found) need = "K >= " + std::to_string(a.k);
            } catch (const Error&) {
            }
            throw Error(Errc::universal_set_too_shallow,
                        "no bundle index nu in (" + std::to_string(nu_prev) + ", " + std::to_string(K) + "] within " +
                            std::to_string(tol) + " of the step-" + std::to_string(s) + " target; requires " + need,
                        best);
        }
        const auto& rec = bundle.at(chosen);
        // g_s = R_{k_s} + g~_nu - R_nu
        GridFunction gs = Rks;
        gs += rec.g;
        gs -= rec.R_grid;
        GridFunction qn = synthesize(rec.Q.terms(), sys);
        qn -= gs;
        defect += qn;
        for (std::size_t k = 0; k < sp->size(); ++k)
            if (!rec.E[k]) {
                correction[k] += rec.g[k] - rec.R_grid[k];
                touched[k] = 1;
            }
        c.nu.push_back(chosen);
        nu_prev = chosen;
    }

    // Truncated g: f plus the bundle defects g~_nu - R_nu, which vanish on each E~_nu.
    out.g = f;
    for (std::size_t k = 0; k < sp->size(); ++k)
        if (touched[k]) out.g[k] += correction[k];

    // Series: R_{k_0}, then the blocks Q~_{nu_s}.
    std::vector<const FourierPolynomial*> parts{&R0};
    for (auto nu : c.nu) parts.push_back(&bundle.at(nu).Q);
    out.series = FourierPolynomial::sum(parts);
    c.n_end = bundle.N(c.nu.back()) - 1;

    c.g1 = lp_norm(out.g, 1.0);
    GridFunction diff = f;
    diff -= out.g;
    c.f_minus_g_1 = lp_norm(diff, 1.0);
    c.f_minus_g_bound = budget::f_minus_g_bound(eps0);
    c.E_measure = bundle.E.measure();

    bool same = true;
    for (std::size_t k = 0; k < sp->size(); ++k)
        if (bundle.E[k] && out.g[k] != f[k]) same = false;

    // Tails at checkpoints m = N_{nu_r} - 1.
    std::vector<Term> acc(R0.terms());
    bool tails_ok = true;
    for (std::size_t r = 1; r <= c.nu.size(); ++r) {
        const auto& rec = bundle.at(c.nu[r - 1]);
        acc.insert(acc.end(), rec.Q.terms().begin(), rec.Q.terms().end());
        GridFunction t = synthesize(acc, sys);
        t -= out.g;
        TailCheck tc{r, rec.n_next - 1, lp_norm(t, 1.0), budget::tail_bound(eps0, r), false};
        tc.holds = tc.norm < tc.bound + opt.slack;
        tails_ok = tails_ok && tc.holds;
        c.tails.push_back(tc);
    }

    out.envelope = envelope_of_terms(out.series.terms(), sys, 1, std::max<std::size_t>(1, c.n_end), true);
    c.sup_partial_1 = out.envelope.max;
    c.sup_argmax = out.envelope.argmax;
    c.min_f1_g1 = std::min(c.f1, c.g1);
    c.ratio = c.min_f1_g1 > 0.0 ? c.sup_partial_1 / c.min_f1_g1 : std::numeric_limits<double>::infinity();

    c.within_seven_32 = c.f_minus_g_1 <= c.f_minus_g_bound + opt.slack;
    c.norm_relation = 25.0 * c.f1 < 32.0 * c.g1 + opt.slack;
    c.nu_exceeds_s = true;
    for (std::size_t s = 1; s <= c.nu.size(); ++s) c.nu_exceeds_s = c.nu_exceeds_s && c.nu[s - 1] > s;
    c.statements[0] = c.f_minus_g_1 < c.eps + opt.slack;
    c.statements[1] = same;
    c.statements[2] = tails_ok;
    c.statements[3] = c.sup_partial_1 < 2.0 * c.min_f1_g1 + opt.slack;
    return out;
}

struct SequenceEntry {
    std::size_t m = 0;
    double eps = 0.0, delta = 0.0;
    NodeMask E;
    Correction correction;
};

struct SequenceResult {
    std::vector<SequenceEntry> entries;
    bool nested = true;  // E_m subset of E_{m+1} for all consecutive entries
};

struct SequenceOptions {
    std::size_t K = 8;
    std::size_t s_max = 5;
    std::size_t m_cap = 0;  // 0: n_max
    std::size_t m_min = 1;
    StepOptions step;
    CorrectOptions correct;
};

// eps_m = delta_m = 1/m for m = m_min..m_max, each with its own bundle.
inline SequenceResult correction_sequence(const GridFunction& f, std::size_t m_max, const SystemHandle& system, const PolynomialSequence& seq,
                                          const SequenceOptions& opt = {}) {
    require(m_max >= 1 && opt.m_min >= 1 && opt.m_min <= m_max, Errc::invalid_input, "need 1 <= m_min <= m_max");
    const double f1 = lp_norm(f, 1.0);
    require(f1 > 0.0, Errc::invalid_input, "f must have positive L1 norm");
    const std::size_t m_cap = opt.m_cap ? opt.m_cap : system->n_max();
    SequenceResult out;
    for (std::size_t m = opt.m_min; m <= m_max; ++m) {
        const double p = std::min(1.0 / static_cast<double>(m), 1.0 - budget::param_floor);
        auto bundle = build_universal_set(std::min(p, f1), p, opt.K, system, seq, m_cap, opt.step);
        SequenceEntry e{m, p, p, bundle.E, correct(f, p, p, bundle, seq, opt.s_max, opt.correct)};
        if (!out.entries.empty()) {
            const auto& prev = out.entries.back().E;
            for (std::size_t k = 0; k < prev.size() && out.nested; ++k)
                if (prev[k] && !e.E[k]) out.nested = false;
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

}  // namespace luzin
