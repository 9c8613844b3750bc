#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fourier.hpp"
#include "measure.hpp"
#include "systems.hpp"

namespace luzin {

inline double delta_star(double delta) {
    require(delta > 0.0 && delta < 1.0, Errc::invalid_input, "delta must lie in (0,1)");
    return delta / (1.0 + delta);
}

// I(s t), with I(u) = 1 - chi_[0, ds)(u mod 1) / ds.
inline double periodic_step(double ds, double s, double t) {
    const double u = s * t - std::floor(s * t);
    return u < ds ? 1.0 - 1.0 / ds : 1.0;
}

inline double scale_lower_bound(double ds, double length) { return (1.0 - ds) * (1.0 - ds) / (ds * ds * length); }

struct BumpParams {
    ProductCell cell;
    double gamma = 1.0;
    double eps = 0.5;
    double delta = 0.5;
    std::size_t n_start = 1;
};

struct BumpOptions {
    std::size_t s_max = 0;  // 0: resolution of the t-grid
    double spectrum_factor = 1e-12;
    double slack = 1e-6;
};

// Bump values and kept set over the node window spanned by the cell.
struct BumpShape {
    NodeWindow window;
    std::vector<double> g;
    std::vector<std::uint8_t> kept;
    double cell_measure = 0.0;
    double kept_measure = 0.0;
};

struct BumpResult {
    std::size_t s0 = 0;
    double delta_star = 0.0;
    std::size_t m_end = 0;
    BumpShape shape;
    FourierPolynomial block;
    double gamma = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double l2_residual = 0.0;
    double q_minus_g1 = 0.0;
    double envelope = 0.0;
    double envelope_bound = 0.0;
    double q1 = 0.0;
    NodeWindow block_hull;
    std::array<bool, 5> statements{};

    bool all_hold() const { return std::all_of(statements.begin(), statements.end(), [](bool b) { return b; }); }

    GridFunction g_full(const SpaceHandle& s) const {
        GridFunction f(s);
        for (std::size_t k = 0; k < shape.window.size(); ++k) f[shape.window.begin + k] = shape.g[k];
        return f;
    }
    NodeMask kept_mask(const SpaceHandle& s) const {
        NodeMask m(s, false);
        for (std::size_t k = 0; k < shape.window.size(); ++k)
            if (shape.kept[k]) m.set(shape.window.begin + k);
        return m;
    }
};

inline NodeWindow cell_window(const CylinderSpace& s, const ProductCell& c) {
    auto [j0, j1] = t_range(s, c);
    auto [lo, hi] = std::minmax_element(c.base_ids.begin(), c.base_ids.end());
    if (j0 == j1) return {s.node(*lo, j0), s.node(*lo, j0)};
    return {s.node(*lo, j0), s.node(*hi, j1 - 1) + 1};
}

inline BumpShape bump_shape(const CylinderSpace& s, const ProductCell& cell, double gamma, double ds, std::size_t scale) {
    BumpShape b;
    b.window = cell_window(s, cell);
    b.g.assign(b.window.size(), 0.0);
    b.kept.assign(b.window.size(), 0);
    const double sc = static_cast<double>(scale);
    Accumulator dm, km;
    for (auto i : cell.base_ids) {
        auto [j0, j1] = t_range(s, cell);
        Accumulator row, row_kept;
        for (std::size_t j = j0; j < j1; ++j) {
            const std::size_t k = s.node(i, j) - b.window.begin;
            const double v = periodic_step(ds, sc, s.t(j));
            b.g[k] = gamma * v;
            row.add(s.t_weight(j));
            if (v == 1.0) {
                b.kept[k] = 1;
                row_kept.add(s.t_weight(j));
            }
        }
        dm.add(row.value() * s.base().weight(i));
        km.add(row_kept.value() * s.base().weight(i));
    }
    b.cell_measure = dm.value();
    b.kept_measure = km.value();
    return b;
}

// Kept set from exact residue arithmetic on the midpoint grid: frac(s (2j+1) / 2R) >= ds.
inline std::vector<std::uint8_t> kept_by_arithmetic(const CylinderSpace& s, const ProductCell& cell, double ds, std::size_t scale) {
    require(s.is_midpoint(), Errc::invalid_input, "residue form needs the midpoint grid");
    auto w = cell_window(s, cell);
    std::vector<std::uint8_t> kept(w.size(), 0);
    const std::uint64_t R2 = 2 * s.n_t();
    auto [j0, j1] = t_range(s, cell);
    for (auto i : cell.base_ids)
        for (std::size_t j = j0; j < j1; ++j) {
            const std::uint64_t r = (static_cast<std::uint64_t>(scale) * (2 * j + 1)) % R2;
            kept[s.node(i, j) - w.begin] = static_cast<double>(r) >= ds * static_cast<double>(R2) ? 1 : 0;
        }
    return kept;
}

namespace detail {

inline void validate(const BumpParams& p, const CylinderSpace& s) {
    luzin::validate(s, p.cell);
    require(p.gamma != 0.0 && std::isfinite(p.gamma), Errc::invalid_input, "gamma must be a nonzero real");
    require(p.eps > 0.0 && p.eps < 1.0, Errc::invalid_input, "eps must lie in (0,1)");
    require(p.delta > 0.0 && p.delta < 1.0, Errc::invalid_input, "delta must lie in (0,1)");
    require(p.n_start >= 1, Errc::invalid_input, "N must be >= 1");
}

// Coefficients of the window function over the system indices meeting it, in [lo, hi].
inline std::vector<Term> window_coefficients(const OrthonormalSystem& sys, const std::vector<double>& g, NodeWindow w, std::size_t lo,
                                             std::size_t hi) {
    std::vector<cplx> vals(g.begin(), g.end());
    std::vector<Term> out;
    std::vector<cplx> buf;
    for (auto r : sys.indices_meeting(w, lo, hi)) {
        buf.resize(r.hi - r.lo + 1);
        sys.project(vals, w, r.lo, r.hi, buf.data());
        // Real input against a real system: imaginary parts are transform round-off.
        for (std::size_t n = r.lo; n <= r.hi; ++n) out.emplace_back(n, buf[n - r.lo].real());
    }
    return out;
}

}  // namespace detail

struct ScaleChoice {
    std::size_t s0 = 0;
    BumpShape shape;
};

inline ScaleChoice select_scale_shape(const BumpParams& p, const OrthonormalSystem& sys, const BumpOptions& opt = {}) {
    const auto& s = *sys.space();
    detail::validate(p, s);
    const double ds = delta_star(p.delta);
    const double lb = scale_lower_bound(ds, p.cell.b - p.cell.a);
    const std::size_t s_max = opt.s_max ? opt.s_max : s.n_t();
    const double limit = p.eps / (2.0 * static_cast<double>(p.n_start));
    const std::size_t first = static_cast<std::size_t>(std::floor(lb)) + 1;
    if (!(lb < static_cast<double>(s_max)))
        throw Error(Errc::scale_search_exhausted,
                    "lower scale bound " + std::to_string(lb) + " exceeds s_max " + std::to_string(s_max));

    std::vector<std::size_t> order;
    if (s.is_midpoint())
        for (std::size_t d = first; d <= std::min(s_max, s.n_t()); ++d)
            if (s.n_t() % d == 0) order.push_back(d);
    for (std::size_t d = first; d <= s_max; ++d)
        if (!(s.is_midpoint() && s.n_t() % d == 0)) order.push_back(d);

    std::size_t worst_n = 0;
    double worst = 0.0;
    for (auto sc : order) {
        BumpShape shape = bump_shape(s, p.cell, p.gamma, ds, sc);
        if (!(shape.kept_measure > shape.cell_measure * (1.0 - p.delta))) continue;
        auto coeffs = detail::window_coefficients(sys, shape.g, shape.window, 1, p.n_start);
        bool ok = true;
        for (const auto& [n, c] : coeffs)
            if (!(std::abs(c) < limit)) {
                ok = false;
                worst_n = std::max(worst_n, n);
                worst = std::max(worst, std::abs(c));
            }
        if (ok) return {sc, std::move(shape)};
    }
    throw Error(Errc::scale_search_exhausted,
                "no scale in (" + std::to_string(lb) + ", " + std::to_string(s_max) + "] meets the oscillation bound; largest violated n = " +
                    std::to_string(worst_n),
                worst);
}

inline std::size_t select_scale(const BumpParams& p, const OrthonormalSystem& sys, const BumpOptions& opt = {}) {
    return select_scale_shape(p, sys, opt).s0;
}

inline BumpResult build_bump(const BumpParams& p, const OrthonormalSystem& sys, std::size_t m_cap, const BumpOptions& opt = {}) {
    const auto& s = *sys.space();
    require(m_cap <= sys.n_max(), Errc::capacity, "m_cap exceeds n_max");
    require(p.n_start <= m_cap, Errc::capacity, "N exceeds m_cap");
    auto choice = select_scale_shape(p, sys, opt);

    BumpResult r;
    r.s0 = choice.s0;
    r.delta_star = delta_star(p.delta);
    r.gamma = p.gamma;
    r.shape = std::move(choice.shape);
    const auto& sh = r.shape;

    Accumulator g1, g2;
    detail::for_window(s, sh.window, [&](std::size_t k, double w) {
        const double v = sh.g[k - sh.window.begin];
        g1.add(w * std::fabs(v));
        g2.add(w * v * v);
    });
    r.g1 = g1.value();
    r.g2 = std::sqrt(g2.value());

    // Smallest M >= N with ||S_M g - g||_2 < eps/2, via Bessel sums.
    auto coeffs = detail::window_coefficients(sys, sh.g, sh.window, 1, m_cap);
    const double target = 0.25 * p.eps * p.eps;
    Accumulator bessel;
    std::size_t idx = 0;
    for (; idx < coeffs.size() && coeffs[idx].first <= p.n_start; ++idx) bessel.add(std::norm(coeffs[idx].second));
    auto resid = [&] { return std::max(0.0, g2.value() - bessel.value()); };
    std::size_t M = 0;
    if (resid() < target) M = p.n_start;
    for (; !M && idx < coeffs.size(); ++idx) {
        bessel.add(std::norm(coeffs[idx].second));
        if (resid() < target) M = coeffs[idx].first;
    }
    if (!M)
        throw Error(Errc::bandwidth_exhausted,
                    "partial sums up to m_cap = " + std::to_string(m_cap) + " leave L2 residual " + std::to_string(std::sqrt(resid())) +
                        " >= eps/2 = " + std::to_string(0.5 * p.eps),
                    std::sqrt(resid()));
    r.m_end = M;
    r.l2_residual = std::sqrt(resid());

    double cmax = 0.0;
    for (const auto& t : coeffs) cmax = std::max(cmax, std::abs(t.second));
    const double tol = opt.spectrum_factor * cmax;
    r.block = FourierPolynomial(p.n_start, M);
    for (const auto& [n, c] : coeffs)
        if (n >= p.n_start && n <= M && std::abs(c) > tol) r.block.push(n, c);

    // ||Q - g||_1 over the hull of both supports.
    NodeWindow hull = support_hull(r.block.terms(), sys);
    if (!hull.size()) hull = sh.window;
    hull = {std::min(hull.begin, sh.window.begin), std::max(hull.end, sh.window.end)};
    std::vector<cplx> q(hull.size());
    sys.synthesize(r.block.terms(), hull, q.data());
    for (std::size_t k = sh.window.begin; k < sh.window.end; ++k) q[k - hull.begin] -= sh.g[k - sh.window.begin];
    Accumulator qg;
    detail::for_window(s, hull, [&](std::size_t k, double w) { qg.add(w * fast_abs(q[k - hull.begin])); });
    r.q_minus_g1 = qg.value();

    const Envelope env = envelope_of_terms(r.block.terms(), sys, p.n_start, M);
    r.envelope = env.max;
    r.q1 = env.last;
    r.block_hull = support_hull(r.block.terms(), sys);
    const double dm = sh.cell_measure, ag = std::fabs(p.gamma);
    r.envelope_bound = ag * std::sqrt(dm * (1.0 + p.delta) / p.delta);

    bool shape_ok = true;
    std::vector<std::uint8_t> inside(sh.window.size(), 0);
    for_each_node(s, p.cell, [&](std::size_t k, std::size_t, std::size_t) { inside[k - sh.window.begin] = 1; });
    for (std::size_t k = 0; k < sh.window.size(); ++k) {
        if (sh.kept[k] && sh.g[k] != p.gamma) shape_ok = false;
        if (!inside[k] && sh.g[k] != 0.0) shape_ok = false;
    }
    const double sl = opt.slack;
    r.statements[0] = sh.kept_measure > dm * (1.0 - p.delta) - sl * dm;
    r.statements[1] = shape_ok;
    r.statements[2] = ag * dm < r.g1 + sl * ag * dm && r.g1 < 2.0 * ag * dm + sl * ag * dm;
    r.statements[3] = r.q_minus_g1 < p.eps + sl * p.eps;
    r.statements[4] = r.envelope <= r.envelope_bound + sl * r.envelope_bound;
    return r;
}

// Exact integral of f(t) I(lambda t) over [a, b], Gauss-Legendre on each piece where I is constant.
inline double fejer_integral(const std::function<double(double)>& f, double ds, double lambda, double a = 0.0, double b = 1.0,
                             std::size_t order = 8) {
    require(lambda > 0.0 && a < b, Errc::invalid_input, "need lambda > 0 and a < b");
    auto [x, w] = gauss_legendre(order);
    std::vector<double> breaks{a, b};
    for (double p = std::floor(lambda * a); p <= std::ceil(lambda * b); p += 1.0)
        for (double u : {p, p + ds}) {
            const double t = u / lambda;
            if (t > a && t < b) breaks.push_back(t);
        }
    std::sort(breaks.begin(), breaks.end());
    Accumulator acc;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double lo = breaks[i - 1], hi = breaks[i];
        if (!(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        const double iv = periodic_step(ds, lambda, mid);
        Accumulator piece;
        for (std::size_t q = 0; q < order; ++q) piece.add(w[q] * f(mid + half * x[q]));
        acc.add(iv * half * piece.value());
    }
    return acc.value();
}

}  // namespace luzin
