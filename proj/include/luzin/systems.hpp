#pragma once

#include <boost/rational.hpp>

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "measure.hpp"

namespace luzin {

// Inclusive, 1-based.
struct IndexRange {
    std::size_t lo = 1;
    std::size_t hi = 0;
    bool empty() const { return hi < lo; }
};

// Half-open node range in the base-major layout.
struct NodeWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

inline NodeWindow intersect(NodeWindow a, NodeWindow b) {
    NodeWindow w{std::max(a.begin, b.begin), std::min(a.end, b.end)};
    if (w.end < w.begin) w.end = w.begin;
    return w;
}

using Term = std::pair<std::size_t, cplx>;

// All provided systems are real-valued; coefficients may be complex.
class OrthonormalSystem {
public:
    OrthonormalSystem(SpaceHandle space, std::size_t n_max) : space_(std::move(space)), n_max_(n_max) {}
    virtual ~OrthonormalSystem() = default;

    const SpaceHandle& space() const { return space_; }
    std::size_t n_max() const { return n_max_; }

    virtual std::string kind() const = 0;
    virtual double sup_bound(std::size_t n) const = 0;
    virtual NodeWindow support(std::size_t) const { return {0, space_->size()}; }
    // Writes phi_n over support(n).
    virtual void eval(std::size_t n, double* out) const = 0;

    virtual std::vector<IndexRange> indices_meeting(NodeWindow, std::size_t lo, std::size_t hi) const {
        hi = std::min(hi, n_max_);
        if (lo > hi) return {};
        return {{lo, hi}};
    }

    // out[n - lo] = (f, phi_n) for n in [lo, hi], f = vals on w and zero elsewhere.
    virtual void project(std::span<const cplx> vals, NodeWindow w, std::size_t lo, std::size_t hi, cplx* out) const {
        project_generic(vals, w, lo, hi, out);
    }

    // out (laid over w) += sum c_n phi_n.
    virtual void synthesize(const std::vector<Term>& terms, NodeWindow w, cplx* out) const {
        synthesize_generic(terms, w, out);
    }

    GridFunction evaluate(std::size_t n) const {
        check_index(n);
        GridFunction g(space_);
        auto s = support(n);
        std::vector<double> buf(s.size());
        eval(n, buf.data());
        for (std::size_t i = 0; i < s.size(); ++i) g[s.begin + i] = buf[i];
        return g;
    }

    void check_index(std::size_t n) const {
        require(n >= 1 && n <= n_max_, Errc::capacity, "basis index " + std::to_string(n) + " outside 1.." + std::to_string(n_max_));
    }

    void project_generic(std::span<const cplx> vals, NodeWindow w, std::size_t lo, std::size_t hi, cplx* out) const {
        const auto& sp = *space_;
        std::vector<double> buf;
        for (std::size_t n = lo; n <= hi; ++n) {
            check_index(n);
            auto s = support(n);
            auto x = intersect(s, w);
            ComplexAccumulator acc;
            if (x.size()) {
                buf.resize(s.size());
                eval(n, buf.data());
                for (std::size_t k = x.begin; k < x.end; ++k) acc.add(sp.weight(k) * vals[k - w.begin] * buf[k - s.begin]);
            }
            out[n - lo] = acc.value();
        }
    }

    void synthesize_generic(const std::vector<Term>& terms, NodeWindow w, cplx* out) const {
        std::vector<double> buf;
        for (const auto& [n, c] : terms) {
            check_index(n);
            auto s = support(n);
            auto x = intersect(s, w);
            if (!x.size()) continue;
            buf.resize(s.size());
            eval(n, buf.data());
            for (std::size_t k = x.begin; k < x.end; ++k) out[k - w.begin] += c * buf[k - s.begin];
        }
    }

private:
    SpaceHandle space_;
    std::size_t n_max_;
};

using SystemHandle = std::shared_ptr<const OrthonormalSystem>;

class TrigSystem final : public OrthonormalSystem {
public:
    TrigSystem(SpaceHandle space, std::size_t n_max) : OrthonormalSystem(space, n_max), kernel_(space->n_t()) {
        require(space->base().is_trivial(), Errc::invalid_input, "trigonometric system needs a trivial base");
        require(space->is_midpoint(), Errc::invalid_input, "trigonometric system needs the uniform midpoint grid");
        require(n_max >= 1 && n_max <= kernel_.count(), Errc::invalid_input,
                "n_max must be in 1.." + std::to_string(kernel_.count()) + " at this resolution");
    }

    std::string kind() const override { return "trig"; }
    double sup_bound(std::size_t n) const override { return n == 1 ? 1.0 : std::numbers::sqrt2; }
    void eval(std::size_t n, double* out) const override { kernel_.eval(n, out); }

    void project(std::span<const cplx> vals, NodeWindow w, std::size_t lo, std::size_t hi, cplx* out) const override {
        if (lo > hi) return;
        check_index(hi);
        std::vector<cplx> x(kernel_.resolution());
        std::copy(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(w.size()), x.begin() + static_cast<std::ptrdiff_t>(w.begin));
        kernel_.project(x.data(), lo, hi, out);
        const double h = 1.0 / static_cast<double>(kernel_.resolution());
        for (std::size_t n = lo; n <= hi; ++n) out[n - lo] *= h;
    }

    void synthesize(const std::vector<Term>& terms, NodeWindow w, cplx* out) const override {
        for (const auto& t : terms) check_index(t.first);
        std::vector<cplx> full(kernel_.resolution());
        kernel_.synthesize(terms, full.data());
        for (std::size_t k = w.begin; k < w.end; ++k) out[k - w.begin] += full[k];
    }

private:
    TrigKernel kernel_;
};

// Walsh-Paley: phi_{n+1}(t) = (-1)^{sum_i n_i beta_{i+1}(t)}, beta_i the binary digits of t.
class WalshSystem final : public OrthonormalSystem {
public:
    WalshSystem(SpaceHandle space, std::size_t n_max) : OrthonormalSystem(space, n_max) {
        const std::size_t R = space->n_t();
        require(space->base().is_trivial(), Errc::invalid_input, "Walsh system needs a trivial base");
        require(space->is_midpoint() && is_power_of_two(R) && R >= n_max && n_max >= 1, Errc::invalid_input,
                "Walsh system needs a power-of-two midpoint grid with resolution >= n_max");
        bits_ = std::countr_zero(R);
        rev_.resize(R);
        for (std::size_t j = 0; j < R; ++j) rev_[j] = reverse(j);
    }

    std::string kind() const override { return "walsh"; }
    double sup_bound(std::size_t) const override { return 1.0; }

    void eval(std::size_t n, double* out) const override {
        const std::size_t m = n - 1;
        for (std::size_t j = 0; j < rev_.size(); ++j) out[j] = (std::popcount(m & rev_[j]) & 1) ? -1.0 : 1.0;
    }

    void project(std::span<const cplx> vals, NodeWindow w, std::size_t lo, std::size_t hi, cplx* out) const override {
        if (lo > hi) return;
        check_index(hi);
        const std::size_t R = rev_.size();
        if (hi - lo + 1 < static_cast<std::size_t>(bits_ + 1)) {
            project_generic(vals, w, lo, hi, out);
            return;
        }
        std::vector<cplx> x(R);
        for (std::size_t k = w.begin; k < w.end; ++k) x[rev_[k]] = vals[k - w.begin];
        for (std::size_t h = 1; h < R; h <<= 1)
            for (std::size_t i = 0; i < R; i += 2 * h)
                for (std::size_t j = i; j < i + h; ++j) {
                    const cplx a = x[j], b = x[j + h];
                    x[j] = a + b;
                    x[j + h] = a - b;
                }
        const double scale = 1.0 / static_cast<double>(R);
        for (std::size_t n = lo; n <= hi; ++n) out[n - lo] = x[n - 1] * scale;
    }

private:
    std::size_t reverse(std::size_t j) const {
        std::size_t r = 0;
        for (int b = 0; b < bits_; ++b) r |= ((j >> b) & 1u) << (bits_ - 1 - b);
        return r;
    }

    int bits_ = 0;
    std::vector<std::size_t> rev_;
};

// Row-local trigonometric system on a cylinder with arbitrary base:
// phi_{(i,l)} = chi_{row i} / sqrt(w_i) * e_l(t), ordered row-major.
class ProductTrigSystem final : public OrthonormalSystem {
public:
    ProductTrigSystem(SpaceHandle space, std::size_t n_max = 0)
        : OrthonormalSystem(space, n_max ? n_max : space->n_base() * TrigKernel(space->n_t()).count()),
          kernel_(space->n_t()) {
        require(space->is_midpoint(), Errc::invalid_input, "product system needs the uniform midpoint grid");
        per_row_ = kernel_.count();
        require(this->n_max() <= space->n_base() * per_row_, Errc::invalid_input, "n_max exceeds rows x per-row count");
        for (std::size_t i = 0; i < space->n_base(); ++i)
            require(space->base().weight(i) > 0.0, Errc::invalid_input, "product system needs positive row weights");
    }

    std::string kind() const override { return "product_trig"; }
    std::size_t per_row() const { return per_row_; }
    std::size_t row_of(std::size_t n) const { return (n - 1) / per_row_; }
    std::size_t local_of(std::size_t n) const { return (n - 1) % per_row_ + 1; }

    double sup_bound(std::size_t n) const override {
        const double s = 1.0 / std::sqrt(space()->base().weight(row_of(n)));
        return local_of(n) == 1 ? s : std::numbers::sqrt2 * s;
    }

    NodeWindow support(std::size_t n) const override {
        const std::size_t R = space()->n_t(), r = row_of(n);
        return {r * R, (r + 1) * R};
    }

    void eval(std::size_t n, double* out) const override {
        kernel_.eval(local_of(n), out);
        const double s = 1.0 / std::sqrt(space()->base().weight(row_of(n)));
        for (std::size_t j = 0; j < space()->n_t(); ++j) out[j] *= s;
    }

    std::vector<IndexRange> indices_meeting(NodeWindow w, std::size_t lo, std::size_t hi) const override {
        if (!w.size()) return {};
        const std::size_t R = space()->n_t();
        IndexRange r{std::max(lo, (w.begin / R) * per_row_ + 1), std::min({hi, ((w.end - 1) / R + 1) * per_row_, n_max()})};
        if (r.empty()) return {};
        return {r};
    }

    void project(std::span<const cplx> vals, NodeWindow w, std::size_t lo, std::size_t hi, cplx* out) const override {
        if (lo > hi) return;
        check_index(hi);
        const std::size_t R = space()->n_t();
        std::fill(out, out + (hi - lo + 1), cplx(0.0));
        const std::size_t r0 = row_of(lo), r1 = row_of(hi);
        std::vector<cplx> x(R);
        for (std::size_t r = r0; r <= r1; ++r) {
            NodeWindow row{r * R, (r + 1) * R};
            auto in = intersect(row, w);
            if (!in.size()) continue;
            std::fill(x.begin(), x.end(), cplx(0.0));
            for (std::size_t k = in.begin; k < in.end; ++k) x[k - row.begin] = vals[k - w.begin];
            const std::size_t n0 = std::max(lo, r * per_row_ + 1), n1 = std::min(hi, (r + 1) * per_row_);
            kernel_.project(x.data(), local_of(n0), local_of(n1), out + (n0 - lo));
            const double scale = std::sqrt(space()->base().weight(r)) / static_cast<double>(R);
            for (std::size_t n = n0; n <= n1; ++n) out[n - lo] *= scale;
        }
    }

    void synthesize(const std::vector<Term>& terms, NodeWindow w, cplx* out) const override {
        const std::size_t R = space()->n_t();
        std::vector<cplx> row_vals(R);
        std::vector<Term> local;
        std::size_t k = 0;
        while (k < terms.size()) {
            const std::size_t r = row_of(terms[k].first);
            local.clear();
            for (; k < terms.size() && row_of(terms[k].first) == r; ++k) {
                check_index(terms[k].first);
                local.emplace_back(local_of(terms[k].first), terms[k].second);
            }
            NodeWindow row{r * R, (r + 1) * R};
            auto in = intersect(row, w);
            if (!in.size()) continue;
            std::fill(row_vals.begin(), row_vals.end(), cplx(0.0));
            kernel_.synthesize(local, row_vals.data());
            const double s = 1.0 / std::sqrt(space()->base().weight(r));
            for (std::size_t q = in.begin; q < in.end; ++q) out[q - w.begin] += s * row_vals[q - row.begin];
        }
    }

private:
    TrigKernel kernel_;
    std::size_t per_row_ = 0;
};

inline SystemHandle make_trigonometric(SpaceHandle space, std::size_t n_max) {
    return std::make_shared<TrigSystem>(std::move(space), n_max);
}

inline SystemHandle make_walsh(SpaceHandle space, std::size_t n_max) {
    return std::make_shared<WalshSystem>(std::move(space), n_max);
}

inline SystemHandle make_product_trigonometric(SpaceHandle space, std::size_t n_max = 0) {
    return std::make_shared<ProductTrigSystem>(std::move(space), n_max);
}

struct GramReport {
    std::vector<std::vector<cplx>> entries;
    double max_deviation = 0.0;
};

// Direct quadrature, independent of the systems' fast projection paths.
inline GramReport gram_matrix(const OrthonormalSystem& sys, std::size_t m) {
    require(m >= 1 && m <= sys.n_max(), Errc::capacity, "gram size exceeds n_max");
    std::vector<GridFunction> phi;
    phi.reserve(m);
    for (std::size_t n = 1; n <= m; ++n) phi.push_back(sys.evaluate(n));
    GramReport r;
    r.entries.assign(m, std::vector<cplx>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const cplx v = inner_product(phi[i], phi[j]);
            r.entries[i][j] = v;
            r.entries[j][i] = std::conj(v);
            r.max_deviation = std::max(r.max_deviation, std::abs(v - (i == j ? 1.0 : 0.0)));
        }
    return r;
}

using Rational = boost::rational<long long>;

// Two-point space {1, 2} with an atom at 1.
struct AtomExample {
    long long N = 1;
    Rational p1;
    Rational p2;
    Rational phi1_at1;
    Rational phi1_at2;
    double phi2_at1 = 0.0;
    double phi2_at2 = 0.0;

    explicit AtomExample(long long n) : N(n) {
        require(n >= 1, Errc::invalid_input, "N must be >= 1");
        p1 = Rational(3, 16 * n * n - 1);
        p2 = Rational(1) - p1;
        phi1_at1 = Rational(2 * n);
        phi1_at2 = Rational(1, 2);
        // phi2 orthogonal to phi1, unit norm: p1*x*phi1(1) + p2*y*phi1(2) = 0.
        const double a = boost::rational_cast<double>(p1 * phi1_at1);
        const double b = boost::rational_cast<double>(p2 * phi1_at2);
        const double x = b, y = -a;
        const double nrm = std::sqrt(boost::rational_cast<double>(p1) * x * x + boost::rational_cast<double>(p2) * y * y);
        phi2_at1 = x / nrm;
        phi2_at2 = y / nrm;
    }

    Rational phi1_norm2_squared() const { return p1 * phi1_at1 * phi1_at1 + p2 * phi1_at2 * phi1_at2; }
};

struct AtomCheck {
    Rational lhs;
    Rational rhs;
    bool holds = false;
};

// f = indicator of the atom; compares ||Y_1(f)||_1 with N ||f||_1.
inline AtomCheck atom_example_check(long long N) {
    AtomExample ex(N);
    const Rational c1 = ex.p1 * ex.phi1_at1;
    const Rational phi1_l1 = ex.p1 * abs(ex.phi1_at1) + ex.p2 * abs(ex.phi1_at2);
    const Rational lhs = abs(c1) * phi1_l1;
    const Rational rhs = Rational(N) * ex.p1;
    return {lhs, rhs, lhs > rhs};
}

}  // namespace luzin
