#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <vector>

#include "measure.hpp"
#include "systems.hpp"

namespace luzin {

// c[n-1] holds c_n.
struct CoefficientVector {
    std::vector<cplx> c;

    std::size_t size() const { return c.size(); }
    cplx operator()(std::size_t n) const { return c[n - 1]; }
    double max_abs() const {
        double m = 0.0;
        for (auto z : c) m = std::max(m, std::abs(z));
        return m;
    }
};

class FourierPolynomial {
public:
    FourierPolynomial() = default;
    FourierPolynomial(std::size_t n_lo, std::size_t n_hi) : lo_(n_lo), hi_(n_hi) {}

    // Terms must arrive in increasing index order.
    void push(std::size_t n, cplx c) {
        require(n >= lo_ && n <= hi_, Errc::invalid_input, "term outside polynomial support range");
        require(terms_.empty() || n > terms_.back().first, Errc::invalid_input, "terms must be added in increasing order");
        if (c != cplx(0.0)) terms_.emplace_back(n, c);
    }

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t n_lo() const { return lo_; }
    std::size_t n_hi() const { return hi_; }
    bool empty() const { return terms_.empty(); }
    std::size_t max_index() const { return terms_.empty() ? 0 : terms_.back().first; }

    cplx coefficient(std::size_t n) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), n, [](const Term& t, std::size_t k) { return t.first < k; });
        return it != terms_.end() && it->first == n ? it->second : cplx(0.0);
    }

    // Merges disjointly supported polynomials (or sums overlapping ones).
    static FourierPolynomial sum(const std::vector<const FourierPolynomial*>& parts) {
        std::map<std::size_t, cplx> acc;
        std::size_t lo = SIZE_MAX, hi = 0;
        for (auto* p : parts) {
            lo = std::min(lo, p->lo_);
            hi = std::max(hi, p->hi_);
            for (const auto& [n, c] : p->terms_) acc[n] += c;
        }
        if (parts.empty()) lo = 1;
        FourierPolynomial out(lo, hi);
        for (const auto& [n, c] : acc) out.push(n, c);
        return out;
    }

private:
    std::size_t lo_ = 1;
    std::size_t hi_ = 0;
    std::vector<Term> terms_;
};

inline NodeWindow full_window(const CylinderSpace& s) { return {0, s.size()}; }

inline CoefficientVector coefficients(const GridFunction& f, const OrthonormalSystem& sys, std::size_t m) {
    require(m <= sys.n_max(), Errc::capacity, "requested coefficients beyond n_max");
    require(f.space()->same_as(*sys.space()), Errc::invalid_input, "function and system live on different spaces");
    CoefficientVector c{std::vector<cplx>(m)};
    if (m) sys.project(f.values(), full_window(*f.space()), 1, m, c.c.data());
    return c;
}

inline GridFunction synthesize(const std::vector<Term>& terms, const OrthonormalSystem& sys) {
    GridFunction g(sys.space());
    if (!terms.empty()) sys.synthesize(terms, full_window(*sys.space()), g.values().data());
    return g;
}

inline GridFunction partial_sum(const CoefficientVector& c, const OrthonormalSystem& sys, std::size_t m) {
    require(m <= c.size(), Errc::invalid_input, "partial sum order exceeds coefficient count");
    std::vector<Term> terms;
    for (std::size_t n = 1; n <= m; ++n)
        if (c(n) != cplx(0.0)) terms.emplace_back(n, c(n));
    return synthesize(terms, sys);
}

inline GridFunction evaluate(const FourierPolynomial& q, const OrthonormalSystem& sys) { return synthesize(q.terms(), sys); }

inline double default_spectrum_tol(const CoefficientVector& c, double factor = 1e-12) { return factor * c.max_abs(); }

inline std::set<std::size_t> spectrum(const CoefficientVector& c, double tol) {
    require(tol >= 0.0, Errc::invalid_input, "tolerance must be >= 0");
    std::set<std::size_t> s;
    for (std::size_t n = 1; n <= c.size(); ++n)
        if (std::abs(c(n)) > tol) s.insert(n);
    return s;
}

struct Envelope {
    double max = 0.0;
    std::size_t argmax = 0;
    double last = 0.0;  // norm of the full sum
    // (m, norm) after each nonzero term; the norm is constant between them.
    std::vector<std::pair<std::size_t, double>> trace;
};

namespace detail {

// Calls fn(node, weight) for nodes of w in order.
template <class F>
void for_window(const CylinderSpace& s, NodeWindow w, F&& fn) {
    const std::size_t R = s.n_t();
    std::size_t k = w.begin;
    while (k < w.end) {
        const std::size_t i = k / R;
        const std::size_t row_end = std::min(w.end, (i + 1) * R);
        const double bw = s.base().weight(i);
        for (std::size_t j = k - i * R; k < row_end; ++k, ++j) fn(k, bw * s.t_weight(j));
    }
}

// Supports of all terms must lie inside w.
template <class Scalar>
Envelope envelope_scan(const std::vector<Term>& terms, const OrthonormalSystem& sys, std::size_t n1, bool keep_trace, NodeWindow w) {
    const auto& s = *sys.space();
    std::vector<Scalar> S(w.size());
    std::vector<double> buf;
    Accumulator total;
    Envelope env{0.0, n1, 0.0, {}};
    auto mag = [](const Scalar& z) {
        if constexpr (std::is_same_v<Scalar, double>)
            return std::fabs(z);
        else
            return fast_abs(z);
    };
    for (const auto& [n, c] : terms) {
        auto sup = sys.support(n);
        buf.resize(sup.size());
        sys.eval(n, buf.data());
        Scalar coef;
        if constexpr (std::is_same_v<Scalar, double>)
            coef = c.real();
        else
            coef = c;
        // Row-wise so the inner loop runs over contiguous t-weights.
        const auto x = intersect(sup, w);
        const std::size_t R = s.n_t();
        const double* tw = s.t_weights().data();
        double delta = 0.0;
        for (std::size_t k = x.begin; k < x.end;) {
            const std::size_t i = k / R, j0 = k - i * R;
            const std::size_t j1 = std::min(R, j0 + (x.end - k));
            Scalar* out = S.data() + (k - w.begin);
            const double* ph = buf.data() + (k - sup.begin);
            double row = 0.0;
            for (std::size_t j = j0; j < j1; ++j) {
                Scalar& v = out[j - j0];
                const double old = mag(v);
                v += coef * ph[j - j0];
                row += tw[j] * (mag(v) - old);
            }
            delta += s.base().weight(i) * row;
            k += j1 - j0;
        }
        total.add(delta);
        const double v = total.value();
        if (v > env.max) {
            env.max = v;
            env.argmax = n;
        }
        if (keep_trace) env.trace.emplace_back(n, v);
    }
    env.last = total.value();
    return env;
}

}  // namespace detail

inline NodeWindow support_hull(const std::vector<Term>& terms, const OrthonormalSystem& sys) {
    NodeWindow h{SIZE_MAX, 0};
    for (const auto& t : terms) {
        auto s = sys.support(t.first);
        h.begin = std::min(h.begin, s.begin);
        h.end = std::max(h.end, s.end);
    }
    if (h.end < h.begin) h = {0, 0};
    return h;
}

// max over m in [n1, n2] of || sum_{n=n1}^m c_n phi_n ||_1, by incremental accumulation.
inline Envelope envelope_of_terms(const std::vector<Term>& terms, const OrthonormalSystem& sys, std::size_t n1, std::size_t n2,
                                  bool keep_trace = false) {
    std::vector<Term> in;
    bool real = true;
    for (const auto& t : terms)
        if (t.first >= n1 && t.first <= n2 && t.second != cplx(0.0)) {
            in.push_back(t);
            real = real && t.second.imag() == 0.0;
        }
    const NodeWindow w = support_hull(in, sys);
    return real ? detail::envelope_scan<double>(in, sys, n1, keep_trace, w)
                : detail::envelope_scan<cplx>(in, sys, n1, keep_trace, w);
}

inline Envelope partial_sum_envelope(const CoefficientVector& c, const OrthonormalSystem& sys, std::size_t n1, std::size_t n2,
                                     bool keep_trace = false) {
    require(n1 >= 1 && n1 <= n2 && n2 <= c.size(), Errc::invalid_input, "envelope range must satisfy 1 <= n1 <= n2 <= m");
    std::vector<Term> terms;
    for (std::size_t n = n1; n <= n2; ++n) terms.emplace_back(n, c(n));
    return envelope_of_terms(terms, sys, n1, n2, keep_trace);
}

inline void write_csv(std::ostream& os, const CoefficientVector& c) {
    os << "n,re,im\n";
    os.precision(17);
    for (std::size_t n = 1; n <= c.size(); ++n) os << n << ',' << c(n).real() << ',' << c(n).imag() << '\n';
}

}  // namespace luzin
