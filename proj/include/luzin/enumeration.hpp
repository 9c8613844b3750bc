#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fourier.hpp"

namespace luzin {

struct Admissible {
    bool found = false;
    std::uint64_t k = 0;
    double distance = std::numeric_limits<double>::infinity();
    double best_distance = std::numeric_limits<double>::infinity();
};

// A fixed ordering k -> R_k of nonzero Fourier polynomials.
class PolynomialSequence {
public:
    virtual ~PolynomialSequence() = default;
    virtual FourierPolynomial at(std::uint64_t k) const = 0;
    virtual std::uint64_t budget() const = 0;
    // Smallest k in (after, budget] with ||R_k - T||_1 < tol (<= tol when !strict).
    virtual Admissible find(const GridFunction& T, const OrthonormalSystem& sys, std::uint64_t after, double tol, bool strict) const = 0;
};

inline double l1_distance(const std::vector<Term>& terms, const GridFunction& T, const OrthonormalSystem& sys) {
    const auto& s = *sys.space();
    std::vector<cplx> v(s.size());
    sys.synthesize(terms, {0, s.size()}, v.data());
    Accumulator acc;
    detail::for_window(s, {0, s.size()}, [&](std::size_t k, double w) { acc.add(w * fast_abs(v[k] - T[k])); });
    return acc.value();
}

// Enumerates real dyadic polynomials sum_{n<=m} (a_n / 2^j) phi_n with a_m != 0, |a_n| <= B 2^j,
// m <= degree_cap, j <= max_exponent. Classes (m, j) are ordered by m + j, then m; inside a class the
// numerators run through a mixed-radix odometer (a_1 fastest) in the order 0, 1, -1, 2, -2, ...
// Index k = (2p - 1) 2^r visits polynomial p for every repetition r.
class RationalEnumeration final : public PolynomialSequence {
public:
    struct Class {
        std::size_t m = 1;
        int j = 0;
        std::int64_t bound = 1;  // numerator bound A = B 2^j
        std::uint64_t size = 0;
        std::uint64_t offset = 0;  // ids of this class are offset+1 .. offset+size
    };

    RationalEnumeration(std::uint64_t budget, std::size_t degree_cap, int max_exponent, std::int64_t coeff_bound = 2)
        : budget_(budget), degree_cap_(degree_cap), max_exp_(max_exponent), coeff_bound_(coeff_bound) {
        require(budget >= 1 && degree_cap >= 1, Errc::invalid_input, "budget and degree cap must be >= 1");
        require(max_exponent >= 0 && max_exponent <= 30 && coeff_bound >= 1, Errc::invalid_input, "bad coefficient grid");
        std::uint64_t off = 0;
        for (std::size_t level = 1; level <= degree_cap + static_cast<std::size_t>(max_exponent); ++level)
            for (std::size_t m = 1; m <= std::min(level, degree_cap); ++m) {
                const int j = static_cast<int>(level - m);
                if (j > max_exponent) continue;
                Class c{m, j, coeff_bound << j, 0, off};
                const double radix = static_cast<double>(2 * c.bound + 1);
                const double sz = std::pow(radix, static_cast<double>(m - 1)) * static_cast<double>(2 * c.bound);
                require(sz + static_cast<double>(off) < std::ldexp(1.0, 52), Errc::invalid_input, "enumeration grid too large");
                c.size = static_cast<std::uint64_t>(sz);
                off += c.size;
                classes_.push_back(c);
            }
        ids_ = off;
    }

    std::uint64_t budget() const override { return budget_; }
    std::size_t degree_cap() const { return degree_cap_; }
    int max_exponent() const { return max_exp_; }
    std::int64_t coeff_bound() const { return coeff_bound_; }
    std::uint64_t polynomial_count() const { return ids_; }
    const std::vector<Class>& classes() const { return classes_; }

    static std::uint64_t index_of(std::uint64_t p, int r) { return (2 * p - 1) << r; }
    static std::uint64_t polynomial_of(std::uint64_t k) { return ((k >> std::countr_zero(k)) + 1) / 2; }
    static int repetition_of(std::uint64_t k) { return std::countr_zero(k); }

    // Smallest index of polynomial p exceeding `after`.
    static std::uint64_t next_index(std::uint64_t p, std::uint64_t after) {
        std::uint64_t k = 2 * p - 1;
        while (k <= after) {
            require(k <= std::numeric_limits<std::uint64_t>::max() / 2, Errc::capacity, "enumeration index overflow");
            k <<= 1;
        }
        return k;
    }

    static std::int64_t digit_value(std::uint64_t d) {
        const auto h = static_cast<std::int64_t>((d + 1) / 2);
        return (d & 1) ? h : -h;
    }
    static std::uint64_t value_digit(std::int64_t a) { return a > 0 ? static_cast<std::uint64_t>(2 * a - 1) : static_cast<std::uint64_t>(-2 * a); }

    struct Decoded {
        std::size_t m = 0;
        int j = 0;
        std::vector<std::int64_t> numerators;
    };

    Decoded decode(std::uint64_t p) const {
        require(p >= 1 && p <= ids_, Errc::capacity, "polynomial id " + std::to_string(p) + " outside the enumeration grid");
        std::size_t lo = 0, hi = classes_.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (classes_[mid].offset < p ? lo : hi) = mid;
        }
        const Class& c = classes_[lo];
        std::uint64_t rank = p - c.offset - 1;
        const std::uint64_t radix = static_cast<std::uint64_t>(2 * c.bound + 1);
        Decoded d{c.m, c.j, std::vector<std::int64_t>(c.m)};
        for (std::size_t i = 0; i + 1 < c.m; ++i) {
            d.numerators[i] = digit_value(rank % radix);
            rank /= radix;
        }
        d.numerators[c.m - 1] = digit_value(rank + 1);
        return d;
    }

    std::uint64_t encode(std::size_t class_index, const std::vector<std::int64_t>& a) const {
        const Class& c = classes_[class_index];
        const std::uint64_t radix = static_cast<std::uint64_t>(2 * c.bound + 1);
        std::uint64_t rank = value_digit(a[c.m - 1]) - 1;
        for (std::size_t i = c.m - 1; i-- > 0;) rank = rank * radix + value_digit(a[i]);
        return c.offset + rank + 1;
    }

    FourierPolynomial polynomial(std::uint64_t p) const {
        auto d = decode(p);
        FourierPolynomial q(1, d.m);
        for (std::size_t i = 0; i < d.m; ++i) q.push(i + 1, std::ldexp(static_cast<double>(d.numerators[i]), -d.j));
        return q;
    }

    FourierPolynomial at(std::uint64_t k) const override {
        require(k >= 1, Errc::invalid_input, "enumeration indices start at 1");
        return polynomial(polynomial_of(k));
    }

    Admissible find(const GridFunction& T, const OrthonormalSystem& sys, std::uint64_t after, double tol, bool strict) const override;

    std::uint64_t max_candidates = 20'000'000;

private:
    std::uint64_t budget_;
    std::size_t degree_cap_;
    int max_exp_;
    std::int64_t coeff_bound_;
    std::vector<Class> classes_;
    std::uint64_t ids_ = 0;
};

// Explicit finite sequence; search is exhaustive.
class ListSequence final : public PolynomialSequence {
public:
    explicit ListSequence(std::vector<FourierPolynomial> items) : items_(std::move(items)) {
        for (const auto& p : items_) require(!p.empty(), Errc::invalid_input, "sequence members must be nonzero");
    }
    FourierPolynomial at(std::uint64_t k) const override {
        require(k >= 1 && k <= items_.size(), Errc::capacity, "sequence index " + std::to_string(k) + " out of range");
        return items_[k - 1];
    }
    std::uint64_t budget() const override { return items_.size(); }
    Admissible find(const GridFunction& T, const OrthonormalSystem& sys, std::uint64_t after, double tol, bool strict) const override {
        Admissible a;
        for (std::uint64_t k = after + 1; k <= items_.size(); ++k) {
            const double d = l1_distance(items_[k - 1].terms(), T, sys);
            a.best_distance = std::min(a.best_distance, d);
            if (strict ? d < tol : d <= tol) return {true, k, d, a.best_distance};
        }
        return a;
    }

private:
    std::vector<FourierPolynomial> items_;
};

inline RationalEnumeration enumerate_rational(std::uint64_t budget, std::size_t degree_cap, int coeff_grid, std::int64_t coeff_bound = 2) {
    return RationalEnumeration(budget, degree_cap, coeff_grid, coeff_bound);
}

// Candidates are pruned with |c_n(R_k - T)| <= ||R_k - T||_1 sup|phi_n|.
inline Admissible RationalEnumeration::find(const GridFunction& T, const OrthonormalSystem& sys, std::uint64_t after, double tol,
                                            bool strict) const {
    const RationalEnumeration& en = *this;
    const std::size_t D = en.degree_cap();
    require(D <= sys.n_max(), Errc::capacity, "enumeration degree cap exceeds n_max");
    auto c = coefficients(T, sys, D);
    std::vector<double> sup(D);
    for (std::size_t n = 1; n <= D; ++n) sup[n - 1] = sys.sup_bound(n);
    auto within = [&](double d) { return strict ? d < tol : d <= tol; };

    Admissible best;
    std::vector<Term> terms;
    std::uint64_t evaluated = 0;
    for (std::size_t ci = 0; ci < en.classes().size(); ++ci) {
        const auto& cl = en.classes()[ci];
        const std::uint64_t cap = best.found ? best.k : budget_;
        if (2 * (cl.offset + 1) - 1 > cap) break;

        // Per-coordinate numerator windows.
        bool possible = true;
        for (std::size_t n = cl.m + 1; n <= D && possible; ++n)
            if (!within(std::abs(c(n)) / sup[n - 1])) possible = false;
        std::vector<std::int64_t> lo(cl.m), hi(cl.m);
        const double scale = std::ldexp(1.0, cl.j);
        for (std::size_t n = 1; n <= cl.m && possible; ++n) {
            const double im = std::fabs(c(n).imag());
            const double r = tol * sup[n - 1];
            if (im > r) {
                possible = false;
                break;
            }
            const double x = c(n).real();
            lo[n - 1] = std::max<std::int64_t>(-cl.bound, static_cast<std::int64_t>(std::floor((x - r) * scale)));
            hi[n - 1] = std::min<std::int64_t>(cl.bound, static_cast<std::int64_t>(std::ceil((x + r) * scale)));
            if (lo[n - 1] > hi[n - 1]) possible = false;
        }
        if (!possible) continue;
        double box = 1.0;
        for (std::size_t n = 0; n < cl.m; ++n) box *= static_cast<double>(hi[n] - lo[n] + 1);
        if (box + static_cast<double>(evaluated) > static_cast<double>(max_candidates))
            throw Error(Errc::enumeration_exhausted,
                        "candidate box of class (m=" + std::to_string(cl.m) + ", j=" + std::to_string(cl.j) + ") too large to scan",
                        best.best_distance);

        std::vector<std::int64_t> a(lo);
        while (true) {
            if (a[cl.m - 1] != 0) {
                const std::uint64_t p = en.encode(ci, a);
                const std::uint64_t k = RationalEnumeration::next_index(p, after);
                if (k <= cap && (!best.found || k < best.k)) {
                    terms.clear();
                    for (std::size_t n = 0; n < cl.m; ++n)
                        if (a[n]) terms.emplace_back(n + 1, static_cast<double>(a[n]) / scale);
                    ++evaluated;
                    const double d = l1_distance(terms, T, sys);
                    best.best_distance = std::min(best.best_distance, d);
                    if (within(d)) {
                        best.found = true;
                        best.k = k;
                        best.distance = d;
                    }
                }
            }
            std::size_t i = 0;
            while (i < cl.m && a[i] == hi[i]) {
                a[i] = lo[i];
                ++i;
            }
            if (i == cl.m) break;
            ++a[i];
        }
    }
    return best;
}

}  // namespace luzin
