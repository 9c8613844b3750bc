#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fourier.hpp"

namespace luzin {

inline std::uint64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < k) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        // r = C(n-k+i-1, i-1) here, so r * (n-k+i) is divisible by i.
        std::uint64_t next;
        require(!__builtin_mul_overflow(r, static_cast<std::uint64_t>(n - k + i), &next), Errc::capacity, "binomial overflows 64 bits");
        r = next / static_cast<std::uint64_t>(i);
    }
    return r;
}

// Dimension of the degree-rho harmonics on S^d.
inline std::uint64_t sphere_dimension(int d, int rho) {
    require(d >= 2 && rho >= 0, Errc::invalid_input, "need d >= 2 and rho >= 0");
    return binomial(d + rho, d) - binomial(d + rho - 2, d);
}

struct BlockIndex {
    int rho = 0;
    int i = 1;  // 1..2 rho + 1; 1 is zonal, 2m and 2m+1 are the cos/sin pair of order m
};

inline BlockIndex block_index(std::size_t n) {
    require(n >= 1, Errc::invalid_input, "basis indices start at 1");
    auto l = static_cast<std::size_t>(std::sqrt(static_cast<double>(n - 1)));
    while (l * l > n - 1) --l;
    while ((l + 1) * (l + 1) <= n - 1) ++l;
    return {static_cast<int>(l), static_cast<int>(n - l * l)};
}

inline std::size_t flat_index(BlockIndex b) {
    require(b.rho >= 0 && b.i >= 1 && b.i <= 2 * b.rho + 1, Errc::invalid_input, "inner index outside 1..2rho+1");
    return static_cast<std::size_t>(b.rho) * static_cast<std::size_t>(b.rho) + static_cast<std::size_t>(b.i);
}

// Gauss-Legendre in z = cos(theta), uniform longitudes. Nodes are phi-major: node = phi_index * n_theta + z_index,
// stored as a CylinderSpace whose t-axis is (z + 1) / 2 and whose base cells are the longitudes.
class SphereGrid {
public:
    SphereGrid(std::size_t n_theta, std::vector<double> phi) : phi_(std::move(phi)) {
        require(n_theta >= 1 && !phi_.empty(), Errc::invalid_input, "sphere grid needs at least one node per axis");
        const double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t j = 0; j < phi_.size(); ++j)
            require(phi_[j] >= 0.0 && phi_[j] < two_pi && (j == 0 || phi_[j] > phi_[j - 1]), Errc::invalid_input,
                    "longitudes must be strictly increasing in [0, 2pi)");
        auto [x, w] = gauss_legendre(n_theta);
        z_ = x;
        zw_ = w;
        std::vector<double> t(n_theta), tw(n_theta);
        for (std::size_t i = 0; i < n_theta; ++i) {
            t[i] = (z_[i] + 1.0) / 2.0;
            tw[i] = zw_[i] / 2.0;
        }
        // Each longitude carries the arc to the next one (cyclically).
        std::vector<BaseCell> cells(phi_.size());
        for (std::size_t j = 0; j < phi_.size(); ++j) {
            const double next = j + 1 < phi_.size() ? phi_[j + 1] : phi_[0] + two_pi;
            cells[j] = {static_cast<int>(j), phi_.size() == 1 ? 1.0 : (next - phi_[j]) / two_pi};
        }
        space_ = CylinderSpace::make(std::move(t), std::move(tw), BaseSpace(std::move(cells)));
    }

    static SphereGrid uniform(std::size_t n_theta, std::size_t n_phi) {
        require(n_phi >= 1, Errc::invalid_input, "need at least one longitude");
        std::vector<double> phi(n_phi);
        for (std::size_t j = 0; j < n_phi; ++j) phi[j] = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n_phi);
        return SphereGrid(n_theta, std::move(phi));
    }

    std::size_t n_theta() const { return z_.size(); }
    std::size_t n_phi() const { return phi_.size(); }
    std::size_t size() const { return z_.size() * phi_.size(); }
    std::size_t node(std::size_t z_index, std::size_t phi_index) const { return phi_index * z_.size() + z_index; }

    double z(std::size_t i) const { return z_[i]; }
    double theta(std::size_t i) const { return std::acos(z_[i]); }
    double z_weight(std::size_t i) const { return zw_[i]; }  // on [-1, 1], sums to 2
    double phi(std::size_t j) const { return phi_[j]; }
    const std::vector<double>& z_nodes() const { return z_; }
    const std::vector<double>& phi_nodes() const { return phi_; }
    const SpaceHandle& space() const { return space_; }

    bool uniform_longitudes(double tol = 1e-12) const {
        const double h = 2.0 * std::numbers::pi / static_cast<double>(phi_.size());
        for (std::size_t j = 0; j < phi_.size(); ++j)
            if (std::fabs(phi_[j] - (static_cast<double>(j) + 0.5) * h) > tol) return false;
        return true;
    }

    template <class F>
    GridFunction sample(F&& fn) const {
        GridFunction g(space_);
        for (std::size_t j = 0; j < n_phi(); ++j)
            for (std::size_t i = 0; i < n_theta(); ++i) g[node(i, j)] = fn(z_[i], phi_[j]);
        return g;
    }

private:
    std::vector<double> z_, zw_, phi_;
    SpaceHandle space_;
};

// Real spherical harmonics with mean square 1 on the probability sphere.
class SphereHarmonicSystem final : public OrthonormalSystem {
public:
    SphereHarmonicSystem(const SphereGrid& grid, int L_max)
        : OrthonormalSystem(grid.space(), static_cast<std::size_t>(L_max + 1) * static_cast<std::size_t>(L_max + 1)),
          grid_(grid), L_(L_max) {
        require(L_max >= 0, Errc::invalid_input, "L_max must be >= 0");
        require(grid.n_theta() >= static_cast<std::size_t>(L_max) + 1 && grid.n_phi() >= 2 * static_cast<std::size_t>(L_max) + 1 &&
                    grid.uniform_longitudes(),
                Errc::invalid_input,
                "degree-" + std::to_string(L_max) + " quadrature needs n_theta >= " + std::to_string(L_max + 1) +
                    " and at least " + std::to_string(2 * L_max + 1) + " uniform longitudes");
        const std::size_t nz = grid.n_theta();
        legendre_.assign(static_cast<std::size_t>((L_ + 1) * (L_ + 2) / 2) * nz, 0.0);
        for (std::size_t i = 0; i < nz; ++i) {
            const double x = grid.z(i), sx = std::sqrt(std::max(0.0, 1.0 - x * x));
            double pmm = 1.0;
            for (int m = 0; m <= L_; ++m) {
                if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx;
                double p2 = 0.0, p1 = pmm;
                p(m, m)[i] = pmm;
                for (int l = m + 1; l <= L_; ++l) {
                    const double ll = l, mm = m;
                    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
                    const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
                    const double p0 = a * (x * p1 - b * p2);
                    p(l, m)[i] = p0;
                    p2 = p1;
                    p1 = p0;
                }
            }
        }
    }

    std::string kind() const override { return "sphere"; }
    int L_max() const { return L_; }
    const SphereGrid& grid() const { return grid_; }
    double sup_bound(std::size_t n) const override { return std::sqrt(2.0 * block_index(n).rho + 1.0); }

    void eval(std::size_t n, double* out) const override {
        check_index(n);
        const auto b = block_index(n);
        const int m = b.i / 2;
        const double* pl = p(b.rho, m);
        for (std::size_t j = 0; j < grid_.n_phi(); ++j) {
            double ang = 1.0;
            if (m > 0) ang = std::numbers::sqrt2 * (b.i % 2 == 0 ? std::cos(m * grid_.phi(j)) : std::sin(m * grid_.phi(j)));
            for (std::size_t i = 0; i < grid_.n_theta(); ++i) out[grid_.node(i, j)] = ang * pl[i];
        }
    }

private:
    const double* p(int l, int m) const { return legendre_.data() + tri(l, m) * grid_.n_theta(); }
    double* p(int l, int m) { return legendre_.data() + tri(l, m) * grid_.n_theta(); }
    static std::size_t tri(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }

    SphereGrid grid_;
    int L_;
    std::vector<double> legendre_;  // normalized P_l^m at the z nodes
};

inline std::shared_ptr<const SphereHarmonicSystem> make_sphere_system(const SphereGrid& grid, int L_max) {
    return std::make_shared<SphereHarmonicSystem>(grid, L_max);
}

// Smallest exact grid for degree L_max.
inline std::shared_ptr<const SphereHarmonicSystem> make_sphere_system(int L_max) {
    require(L_max >= 0, Errc::invalid_input, "L_max must be >= 0");
    return make_sphere_system(SphereGrid::uniform(static_cast<std::size_t>(L_max) + 1, 2 * static_cast<std::size_t>(L_max) + 1), L_max);
}

inline GridFunction block_partial_sum(const CoefficientVector& c, const SphereHarmonicSystem& sys, int rho_max) {
    require(rho_max >= 0 && rho_max <= sys.L_max(), Errc::invalid_input, "rho_max must lie in 0..L_max");
    const auto m = static_cast<std::size_t>(rho_max + 1) * static_cast<std::size_t>(rho_max + 1);
    require(c.size() >= m, Errc::invalid_input, "not enough coefficients for the requested degree");
    return partial_sum(c, sys, m);
}

struct BlockEnvelope {
    std::vector<double> norms;  // ||sum over degrees <= rho||_1
    double max = 0.0;
    int argmax = 0;
};

inline BlockEnvelope block_envelope(const CoefficientVector& c, const SphereHarmonicSystem& sys, int rho_max) {
    require(rho_max >= 0 && rho_max <= sys.L_max(), Errc::invalid_input, "rho_max must lie in 0..L_max");
    require(c.size() >= static_cast<std::size_t>(rho_max + 1) * static_cast<std::size_t>(rho_max + 1), Errc::invalid_input,
            "not enough coefficients for the requested degree");
    GridFunction S(sys.space());
    BlockEnvelope env;
    for (int rho = 0; rho <= rho_max; ++rho) {
        std::vector<Term> block;
        for (int i = 1; i <= 2 * rho + 1; ++i) {
            const std::size_t n = flat_index({rho, i});
            if (c(n) != cplx(0.0)) block.emplace_back(n, c(n));
        }
        sys.synthesize(block, full_window(*sys.space()), S.values().data());
        const double v = lp_norm(S, 1.0);
        env.norms.push_back(v);
        if (v > env.max || rho == 0) {
            env.max = v;
            env.argmax = rho;
        }
    }
    return env;
}

// Sphere minus the poles as [0,1) x bands: t = phi / 2pi, band i carries weight w_i / 2.
// No quadrature node sits on a pole, so the node map is a bijection (a transpose of the layouts).
class CylinderChart {
public:
    CylinderChart(SpaceHandle sphere, SpaceHandle cylinder, std::size_t n_theta, std::size_t n_phi)
        : sphere_(std::move(sphere)), cylinder_(std::move(cylinder)), nz_(n_theta), np_(n_phi) {}

    const SpaceHandle& sphere_space() const { return sphere_; }
    const SpaceHandle& cylinder_space() const { return cylinder_; }
    std::size_t excluded_nodes() const { return 0; }

    std::size_t to_cylinder_node(std::size_t sphere_node) const {
        const std::size_t j = sphere_node / nz_, i = sphere_node % nz_;
        return i * np_ + j;
    }
    std::size_t to_sphere_node(std::size_t cyl_node) const {
        const std::size_t i = cyl_node / np_, j = cyl_node % np_;
        return j * nz_ + i;
    }

    GridFunction to_cylinder(const GridFunction& f) const {
        require(f.space()->same_as(*sphere_), Errc::invalid_input, "function does not live on the chart's sphere grid");
        GridFunction g(cylinder_);
        for (std::size_t k = 0; k < f.size(); ++k) g[to_cylinder_node(k)] = f[k];
        return g;
    }
    GridFunction to_sphere(const GridFunction& g) const {
        require(g.space()->same_as(*cylinder_), Errc::invalid_input, "function does not live on the chart's cylinder");
        GridFunction f(sphere_);
        for (std::size_t k = 0; k < g.size(); ++k) f[to_sphere_node(k)] = g[k];
        return f;
    }

private:
    SpaceHandle sphere_, cylinder_;
    std::size_t nz_, np_;
};

inline std::pair<SpaceHandle, CylinderChart> cylinder_chart(const SphereGrid& grid) {
    require(grid.uniform_longitudes(), Errc::invalid_input, "cylinder chart needs uniform longitudes");
    std::vector<BaseCell> bands(grid.n_theta());
    for (std::size_t i = 0; i < grid.n_theta(); ++i) bands[i] = {static_cast<int>(i), grid.z_weight(i) / 2.0};
    auto cyl = CylinderSpace::uniform(grid.n_phi(), BaseSpace(std::move(bands)));
    return {cyl, CylinderChart(grid.space(), cyl, grid.n_theta(), grid.n_phi())};
}

// Rotation by `steps` longitude spacings.
inline GridFunction rotate_sphere(const GridFunction& f, const SphereGrid& grid, std::ptrdiff_t steps) {
    require(f.space()->same_as(*grid.space()), Errc::invalid_input, "function does not live on this sphere grid");
    const auto np = static_cast<std::ptrdiff_t>(grid.n_phi());
    GridFunction g(f.space());
    for (std::ptrdiff_t j = 0; j < np; ++j) {
        const auto jj = static_cast<std::size_t>(((j + steps) % np + np) % np);
        for (std::size_t i = 0; i < grid.n_theta(); ++i) g[grid.node(i, jj)] = f[grid.node(i, static_cast<std::size_t>(j))];
    }
    return g;
}

// Translation t -> t + steps / n_t modulo 1.
inline GridFunction translate_t(const GridFunction& f, std::ptrdiff_t steps) {
    const auto& s = *f.space();
    const auto R = static_cast<std::ptrdiff_t>(s.n_t());
    GridFunction g(f.space());
    for (std::size_t i = 0; i < s.n_base(); ++i)
        for (std::ptrdiff_t j = 0; j < R; ++j)
            g[s.node(i, static_cast<std::size_t>(((j + steps) % R + R) % R))] = f[s.node(i, static_cast<std::size_t>(j))];
    return g;
}

}  // namespace luzin
