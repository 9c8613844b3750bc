#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace luzin {

struct BaseCell {
    int id = 0;
    double weight = 0.0;
};

class BaseSpace {
public:
    BaseSpace() : BaseSpace(std::vector<BaseCell>{{0, 1.0}}) {}

    explicit BaseSpace(std::vector<BaseCell> cells) : cells_(std::move(cells)) {
        require(!cells_.empty(), Errc::invalid_input, "base space needs at least one cell");
        Accumulator acc;
        for (const auto& c : cells_) {
            require(std::isfinite(c.weight) && c.weight >= 0.0, Errc::invalid_input, "base weights must be finite and >= 0");
            acc.add(c.weight);
        }
        total_ = acc.value();
    }

    static BaseSpace trivial() { return BaseSpace(); }

    static BaseSpace uniform(std::size_t n) {
        require(n > 0, Errc::invalid_input, "base space needs at least one cell");
        std::vector<BaseCell> cells(n);
        for (std::size_t i = 0; i < n; ++i) cells[i] = {static_cast<int>(i), 1.0 / static_cast<double>(n)};
        return BaseSpace(std::move(cells));
    }

    std::size_t size() const { return cells_.size(); }
    double weight(std::size_t i) const { return cells_[i].weight; }
    int id(std::size_t i) const { return cells_[i].id; }
    double total_weight() const { return total_; }
    const std::vector<BaseCell>& cells() const { return cells_; }
    bool is_trivial() const { return cells_.size() == 1 && cells_[0].weight == 1.0; }

    bool operator==(const BaseSpace& o) const {
        if (cells_.size() != o.cells_.size()) return false;
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (cells_[i].id != o.cells_[i].id || cells_[i].weight != o.cells_[i].weight) return false;
        return true;
    }

private:
    std::vector<BaseCell> cells_;
    double total_ = 0.0;
};

class CylinderSpace;
using SpaceHandle = std::shared_ptr<const CylinderSpace>;

// Nodes are laid out base-major: node = base_index * n_t + t_index.
class CylinderSpace {
public:
    CylinderSpace(std::vector<double> t_nodes, std::vector<double> t_weights, BaseSpace base, bool midpoint = false)
        : t_(std::move(t_nodes)), tw_(std::move(t_weights)), base_(std::move(base)), midpoint_(midpoint) {
        require(!t_.empty() && t_.size() == tw_.size(), Errc::invalid_input, "t nodes and weights must match and be nonempty");
        Accumulator acc;
        for (std::size_t j = 0; j < t_.size(); ++j) {
            require(t_[j] >= 0.0 && t_[j] <= 1.0, Errc::invalid_input, "t nodes must lie in [0,1]");
            require(j == 0 || t_[j] > t_[j - 1], Errc::invalid_input, "t nodes must be strictly increasing");
            require(std::isfinite(tw_[j]) && tw_[j] >= 0.0, Errc::invalid_input, "t weights must be >= 0");
            acc.add(tw_[j]);
        }
        t_total_ = acc.value();
        double total = t_total_ * base_.total_weight();
        require(std::fabs(total - 1.0) <= 1e-12, Errc::invalid_input, "total measure must be 1");
    }

    // Composite midpoint rule with n_t nodes.
    static SpaceHandle uniform(std::size_t n_t, BaseSpace base = BaseSpace::trivial()) {
        require(n_t > 0, Errc::invalid_input, "t resolution must be positive");
        std::vector<double> t(n_t), w(n_t, 1.0 / static_cast<double>(n_t));
        for (std::size_t j = 0; j < n_t; ++j) t[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n_t);
        return std::make_shared<const CylinderSpace>(std::move(t), std::move(w), std::move(base), true);
    }

    static SpaceHandle make(std::vector<double> t_nodes, std::vector<double> t_weights, BaseSpace base) {
        return std::make_shared<const CylinderSpace>(std::move(t_nodes), std::move(t_weights), std::move(base), false);
    }

    std::size_t n_t() const { return t_.size(); }
    std::size_t n_base() const { return base_.size(); }
    std::size_t size() const { return t_.size() * base_.size(); }
    bool is_midpoint() const { return midpoint_; }

    double t(std::size_t j) const { return t_[j]; }
    double t_weight(std::size_t j) const { return tw_[j]; }
    const std::vector<double>& t_nodes() const { return t_; }
    const std::vector<double>& t_weights() const { return tw_; }
    const BaseSpace& base() const { return base_; }

    std::size_t node(std::size_t base_index, std::size_t t_index) const { return base_index * t_.size() + t_index; }
    std::size_t base_of(std::size_t node) const { return node / t_.size(); }
    std::size_t t_of(std::size_t node) const { return node % t_.size(); }
    double weight(std::size_t node) const { return tw_[node % t_.size()] * base_.weight(node / t_.size()); }

    // Indices j with a <= t_j < b; b >= 1 closes the interval on the right.
    std::pair<std::size_t, std::size_t> t_range(double a, double b) const {
        auto lo = std::lower_bound(t_.begin(), t_.end(), a);
        auto hi = b >= 1.0 ? t_.end() : std::lower_bound(t_.begin(), t_.end(), b);
        if (hi < lo) hi = lo;
        return {static_cast<std::size_t>(lo - t_.begin()), static_cast<std::size_t>(hi - t_.begin())};
    }

    double t_mass(std::size_t j0, std::size_t j1) const {
        Accumulator acc;
        for (std::size_t j = j0; j < j1; ++j) acc.add(tw_[j]);
        return acc.value();
    }

    bool same_as(const CylinderSpace& o) const {
        return this == &o || (t_ == o.t_ && tw_ == o.tw_ && base_ == o.base_);
    }

private:
    std::vector<double> t_;
    std::vector<double> tw_;
    BaseSpace base_;
    bool midpoint_;
    double t_total_ = 0.0;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(SpaceHandle space) : space_(std::move(space)), v_(space_->size()) {}
    GridFunction(SpaceHandle space, std::vector<cplx> values) : space_(std::move(space)), v_(std::move(values)) {
        require(v_.size() == space_->size(), Errc::invalid_input, "value count must match grid size");
    }

    template <class F>
    static GridFunction from(SpaceHandle space, F&& fn) {
        GridFunction g(space);
        for (std::size_t i = 0; i < space->n_base(); ++i)
            for (std::size_t j = 0; j < space->n_t(); ++j) g.v_[space->node(i, j)] = fn(space->t(j), i);
        return g;
    }

    const SpaceHandle& space() const { return space_; }
    std::size_t size() const { return v_.size(); }
    cplx& operator[](std::size_t i) { return v_[i]; }
    const cplx& operator[](std::size_t i) const { return v_[i]; }
    std::vector<cplx>& values() { return v_; }
    const std::vector<cplx>& values() const { return v_; }

    GridFunction& operator+=(const GridFunction& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    GridFunction& operator*=(cplx s) {
        for (auto& x : v_) x *= s;
        return *this;
    }
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

    void check_same(const GridFunction& o) const {
        require(space_ && o.space_ && space_->same_as(*o.space_), Errc::invalid_input, "functions live on different spaces");
    }

private:
    SpaceHandle space_;
    std::vector<cplx> v_;
};

class NodeMask {
public:
    NodeMask() = default;
    NodeMask(SpaceHandle space, bool fill) : space_(std::move(space)), bits_(space_->size(), fill ? 1 : 0) {}

    const SpaceHandle& space() const { return space_; }
    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    double measure() const {
        Accumulator acc;
        for (std::size_t i = 0; i < space_->n_base(); ++i) {
            Accumulator row;
            for (std::size_t j = 0; j < space_->n_t(); ++j)
                if (bits_[space_->node(i, j)]) row.add(space_->t_weight(j));
            acc.add(row.value() * space_->base().weight(i));
        }
        return acc.value();
    }

    std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1})); }

    NodeMask& operator&=(const NodeMask& o) {
        require(bits_.size() == o.bits_.size(), Errc::invalid_input, "mask sizes differ");
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
        return *this;
    }
    NodeMask& operator|=(const NodeMask& o) {
        require(bits_.size() == o.bits_.size(), Errc::invalid_input, "mask sizes differ");
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
        return *this;
    }
    bool operator==(const NodeMask& o) const { return bits_ == o.bits_; }

private:
    SpaceHandle space_;
    std::vector<std::uint8_t> bits_;
};

inline void check_finite(const GridFunction& f) {
    for (const auto& z : f.values())
        require(std::isfinite(z.real()) && std::isfinite(z.imag()), Errc::invalid_input, "non-finite value in grid function");
}

inline double lp_norm(const GridFunction& f, double p) {
    require(p == 1.0 || p == 2.0, Errc::invalid_input, "only p = 1 and p = 2 are supported");
    check_finite(f);
    const auto& s = *f.space();
    Accumulator acc;
    for (std::size_t i = 0; i < s.n_base(); ++i) {
        Accumulator row;
        for (std::size_t j = 0; j < s.n_t(); ++j) {
            const cplx z = f[s.node(i, j)];
            const double a = p == 1.0 ? fast_abs(z) : std::norm(z);
            row.add(s.t_weight(j) * a);
        }
        acc.add(row.value() * s.base().weight(i));
    }
    return p == 1.0 ? acc.value() : std::sqrt(acc.value());
}

inline cplx inner_product(const GridFunction& f, const GridFunction& g) {
    f.check_same(g);
    const auto& s = *f.space();
    ComplexAccumulator acc;
    for (std::size_t i = 0; i < s.n_base(); ++i) {
        ComplexAccumulator row;
        for (std::size_t j = 0; j < s.n_t(); ++j) {
            const std::size_t k = s.node(i, j);
            row.add(s.t_weight(j) * f[k] * std::conj(g[k]));
        }
        acc.add(row.value() * s.base().weight(i));
    }
    return acc.value();
}

// base_ids are positions in the base cell list.
struct ProductCell {
    double a = 0.0;
    double b = 1.0;
    std::vector<std::size_t> base_ids;
};

inline void validate(const CylinderSpace& s, const ProductCell& c) {
    require(c.a >= 0.0 && c.b <= 1.0 && c.a < c.b, Errc::invalid_input, "cell t-interval must satisfy 0 <= a < b <= 1");
    require(!c.base_ids.empty(), Errc::invalid_input, "cell needs at least one base cell");
    for (auto i : c.base_ids) require(i < s.n_base(), Errc::invalid_input, "cell refers to unknown base cell");
}

inline std::pair<std::size_t, std::size_t> t_range(const CylinderSpace& s, const ProductCell& c) { return s.t_range(c.a, c.b); }

inline double base_mass(const CylinderSpace& s, const ProductCell& c) {
    Accumulator acc;
    for (auto i : c.base_ids) acc.add(s.base().weight(i));
    return acc.value();
}

// Quadrature measure of the cell: (t-weights of nodes inside [a,b)) x (base weights).
inline double cell_measure(const CylinderSpace& s, const ProductCell& c) {
    auto [j0, j1] = t_range(s, c);
    return s.t_mass(j0, j1) * base_mass(s, c);
}

template <class F>
void for_each_node(const CylinderSpace& s, const ProductCell& c, F&& fn) {
    auto [j0, j1] = t_range(s, c);
    for (auto i : c.base_ids)
        for (std::size_t j = j0; j < j1; ++j) fn(s.node(i, j), j, i);
}

struct ProductPartition {
    std::vector<ProductCell> cells;
};

inline double total_measure(const CylinderSpace& s, const ProductPartition& p) {
    Accumulator acc;
    for (const auto& c : p.cells) acc.add(cell_measure(s, c));
    return acc.value();
}

inline ProductPartition build_product_partition(const CylinderSpace& s, const std::vector<double>& t_breaks,
                                                const std::vector<std::vector<std::size_t>>& base_grouping) {
    require(t_breaks.size() >= 2 && t_breaks.front() == 0.0 && t_breaks.back() == 1.0, Errc::invalid_input,
            "t breaks must start at 0 and end at 1");
    for (std::size_t l = 1; l < t_breaks.size(); ++l)
        require(t_breaks[l] > t_breaks[l - 1], Errc::invalid_input, "t breaks must be strictly increasing");
    std::vector<int> seen(s.n_base(), 0);
    for (const auto& grp : base_grouping) {
        require(!grp.empty(), Errc::invalid_input, "empty base group");
        for (auto i : grp) {
            require(i < s.n_base(), Errc::invalid_input, "base grouping refers to unknown cell");
            ++seen[i];
        }
    }
    for (int c : seen) require(c == 1, Errc::invalid_input, "base grouping is not a partition of the base cells");

    ProductPartition p;
    p.cells.reserve(base_grouping.size() * (t_breaks.size() - 1));
    for (const auto& grp : base_grouping)
        for (std::size_t l = 1; l < t_breaks.size(); ++l) p.cells.push_back({t_breaks[l - 1], t_breaks[l], grp});
    return p;
}

struct RefinedPartition {
    ProductPartition partition;
    std::vector<double> gammas;
};

inline bool fine_enough(double gamma, double measure, double f_norm1, double delta) {
    return 144.0 * gamma * gamma * measure * (1.0 + delta) < delta * f_norm1 * f_norm1;
}

// Bisects t-intervals until every cell satisfies the fineness inequality; cell order is preserved.
inline RefinedPartition refine_for_correction(const CylinderSpace& s, const ProductPartition& part,
                                              const std::vector<double>& gammas, double f_norm1, double delta) {
    require(gammas.size() == part.cells.size(), Errc::invalid_input, "one gamma per cell required");
    require(f_norm1 > 0.0, Errc::invalid_input, "f must have positive L1 norm");
    require(delta > 0.0 && delta < 1.0, Errc::invalid_input, "delta must lie in (0,1)");
    RefinedPartition out;
    std::vector<ProductCell> stack;
    for (std::size_t k = 0; k < part.cells.size(); ++k) {
        stack.push_back(part.cells[k]);
        while (!stack.empty()) {
            ProductCell c = std::move(stack.back());
            stack.pop_back();
            if (fine_enough(gammas[k], cell_measure(s, c), f_norm1, delta)) {
                out.partition.cells.push_back(std::move(c));
                out.gammas.push_back(gammas[k]);
                continue;
            }
            auto [j0, j1] = t_range(s, c);
            if (j1 - j0 <= 1)
                throw Error(Errc::resolution_exhausted,
                            "cell of a single t-node still violates the fineness bound; refine the grid", cell_measure(s, c));
            const double m = 0.5 * (c.a + c.b);
            stack.push_back({m, c.b, c.base_ids});
            stack.push_back({c.a, m, std::move(c.base_ids)});
        }
    }
    return out;
}

}  // namespace luzin
