#pragma once

#include <fftw3.h>

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "numeric.hpp"

namespace luzin {

namespace detail {

// The FFTW planner is not thread-safe; execution on new arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> buf(n);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

}  // namespace detail

// Unnormalized in-place DFT: sign -1 computes sum_j x_j e^{-2 pi i k j / n}.
inline void dft_inplace(std::vector<cplx>& x, int sign) {
    auto plan = detail::PlanCache::instance().get(x.size(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan, p, p);
}

// Trigonometric basis on the midpoint grid t_j = (j + 1/2)/R, unnormalized by weights:
// local index 1 is the constant, 2k is sqrt2 cos(2 pi k t), 2k+1 is sqrt2 sin(2 pi k t).
class TrigKernel {
public:
    explicit TrigKernel(std::size_t R) : R_(R), cos_(2 * R), sin_(2 * R) {
        for (std::size_t m = 0; m < 2 * R; ++m) {
            const double a = std::numbers::pi * static_cast<double>(m) / static_cast<double>(R);
            cos_[m] = std::cos(a);
            sin_[m] = std::sin(a);
        }
    }

    std::size_t resolution() const { return R_; }
    // Functions that stay orthonormal on the grid: frequencies k < R/2.
    std::size_t count() const { return 2 * ((R_ - 1) / 2) + 1; }

    static std::size_t freq(std::size_t local) { return local / 2; }
    static bool is_sin(std::size_t local) { return local > 1 && (local & 1); }

    void eval(std::size_t local, double* out) const {
        const std::size_t k = freq(local);
        if (k == 0) {
            for (std::size_t j = 0; j < R_; ++j) out[j] = 1.0;
            return;
        }
        const auto& tab = is_sin(local) ? sin_ : cos_;
        const std::size_t step = (2 * k) % (2 * R_);
        std::size_t m = k % (2 * R_);
        for (std::size_t j = 0; j < R_; ++j) {
            out[j] = std::numbers::sqrt2 * tab[m];
            m += step;
            if (m >= 2 * R_) m -= 2 * R_;
        }
    }

    // out[l - l0] = sum_j x_j e_l(t_j) for l in [l0, l1].
    void project(const cplx* x, std::size_t l0, std::size_t l1, cplx* out) const {
        const std::size_t cnt = l1 - l0 + 1;
        if (cnt <= 3 * static_cast<std::size_t>(std::log2(static_cast<double>(R_)) + 1)) {
            std::vector<double> e(R_);
            for (std::size_t l = l0; l <= l1; ++l) {
                eval(l, e.data());
                ComplexAccumulator acc;
                for (std::size_t j = 0; j < R_; ++j) acc.add(x[j] * e[j]);
                out[l - l0] = acc.value();
            }
            return;
        }
        std::vector<cplx> X(x, x + R_);
        dft_inplace(X, -1);
        for (std::size_t l = l0; l <= l1; ++l) {
            const std::size_t k = freq(l);
            if (k == 0) {
                out[l - l0] = X[0];
                continue;
            }
            const cplx gp = cplx(cos_[k], -sin_[k]) * X[k];
            const cplx gm = cplx(cos_[k], sin_[k]) * X[(R_ - k) % R_];
            const cplx s = is_sin(l) ? (gm - gp) / cplx(0.0, 2.0) : 0.5 * (gp + gm);
            out[l - l0] = std::numbers::sqrt2 * s;
        }
    }

    // out_j += sum over terms of c_l e_l(t_j).
    void synthesize(const std::vector<std::pair<std::size_t, cplx>>& terms, cplx* out) const {
        if (terms.size() <= 3 * static_cast<std::size_t>(std::log2(static_cast<double>(R_)) + 1)) {
            std::vector<double> e(R_);
            for (const auto& [l, c] : terms) {
                eval(l, e.data());
                for (std::size_t j = 0; j < R_; ++j) out[j] += c * e[j];
            }
            return;
        }
        std::vector<cplx> Z(R_);
        for (const auto& [l, c] : terms) {
            const std::size_t k = freq(l);
            if (k == 0) {
                Z[0] += c;
                continue;
            }
            const cplx a = is_sin(l) ? cplx(0.0) : std::numbers::sqrt2 * c;
            const cplx b = is_sin(l) ? std::numbers::sqrt2 * c : cplx(0.0);
            const cplx half_b_over_i = b / cplx(0.0, 2.0);
            Z[k] += (0.5 * a + half_b_over_i) * cplx(cos_[k], sin_[k]);
            Z[(R_ - k) % R_] += (0.5 * a - half_b_over_i) * cplx(cos_[k], -sin_[k]);
        }
        dft_inplace(Z, +1);
        for (std::size_t j = 0; j < R_; ++j) out[j] += Z[j];
    }

private:
    std::size_t R_;
    std::vector<double> cos_, sin_;
};

}  // namespace luzin
