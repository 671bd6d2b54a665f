#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bflow/error.hpp"
#include "bflow/grid.hpp"

namespace bflow {

template <class Grid>
void require_same_grid(const Grid& a, const Grid& b) {
    require(a == b, ErrorKind::GridMismatch, "fields live on different grids");
}

/// Real values per node of a grid.
template <class Grid>
class ScalarField {
public:
    explicit ScalarField(Grid grid, double value = 0.0)
        : grid_(grid), values_(grid.size(), value) {}

    ScalarField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        require(values_.size() == grid_.size(), ErrorKind::GridMismatch,
                "value array length does not match grid");
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<double>& data() const noexcept { return values_; }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }
    double min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
    double max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    template <class F>
    ScalarField map(F&& fn) const {
        ScalarField out(grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i]);
        return out;
    }

    ScalarField& operator+=(const ScalarField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(const ScalarField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double a) noexcept {
        for (double& v : values_) v *= a;
        return *this;
    }
    ScalarField& operator+=(double a) noexcept {
        for (double& v : values_) v += a;
        return *this;
    }

    /// this += a * x
    ScalarField& axpy(double a, const ScalarField& x) {
        require_same_grid(grid_, x.grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
        return *this;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

template <class G> ScalarField<G> operator+(ScalarField<G> a, const ScalarField<G>& b) { return a += b; }
template <class G> ScalarField<G> operator-(ScalarField<G> a, const ScalarField<G>& b) { return a -= b; }
template <class G> ScalarField<G> operator*(ScalarField<G> a, const ScalarField<G>& b) { return a *= b; }
template <class G> ScalarField<G> operator*(double s, ScalarField<G> a) { return a *= s; }
template <class G> ScalarField<G> operator*(ScalarField<G> a, double s) { return a *= s; }
template <class G> ScalarField<G> operator+(ScalarField<G> a, double s) { return a += s; }
template <class G> ScalarField<G> operator-(ScalarField<G> a) { return a *= -1.0; }

template <class G>
ScalarField<G> operator/(const ScalarField<G>& a, const ScalarField<G>& b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField<G> out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
    return out;
}

/// Vector field stored by components. Circle and torus use Cartesian
/// components; the disc uses physical (orthonormal) polar components (r, theta).
template <class Grid>
class VectorField {
public:
    static constexpr int dim = Grid::dim;

    explicit VectorField(Grid grid) : comps_(make_components(grid)) {}

    VectorField(std::array<ScalarField<Grid>, dim> comps) : comps_(std::move(comps)) {
        for (int c = 1; c < dim; ++c) require_same_grid(comps_[0].grid(), comps_[c].grid());
    }

    const Grid& grid() const noexcept { return comps_[0].grid(); }
    std::size_t size() const noexcept { return comps_[0].size(); }

    const ScalarField<Grid>& operator[](int c) const noexcept { return comps_[c]; }
    ScalarField<Grid>& operator[](int c) noexcept { return comps_[c]; }

    /// Pointwise Euclidean norm maximized over nodes.
    double max_norm() const noexcept {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double s = 0.0;
            for (int c = 0; c < dim; ++c) s += comps_[c][i] * comps_[c][i];
            m = std::max(m, std::sqrt(s));
        }
        return m;
    }

    VectorField& operator+=(const VectorField& o) {
        for (int c = 0; c < dim; ++c) comps_[c] += o.comps_[c];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int c = 0; c < dim; ++c) comps_[c] -= o.comps_[c];
        return *this;
    }
    VectorField& operator*=(double a) noexcept {
        for (auto& comp : comps_) comp *= a;
        return *this;
    }
    VectorField& axpy(double a, const VectorField& x) {
        for (int c = 0; c < dim; ++c) comps_[c].axpy(a, x.comps_[c]);
        return *this;
    }

private:
    static std::array<ScalarField<Grid>, dim> make_components(const Grid& g) {
        if constexpr (dim == 1) {
            return {ScalarField<Grid>(g)};
        } else {
            return {ScalarField<Grid>(g), ScalarField<Grid>(g)};
        }
    }

    std::array<ScalarField<Grid>, dim> comps_;
};

template <class G> VectorField<G> operator+(VectorField<G> a, const VectorField<G>& b) { return a += b; }
template <class G> VectorField<G> operator-(VectorField<G> a, const VectorField<G>& b) { return a -= b; }
template <class G> VectorField<G> operator*(double s, VectorField<G> a) { return a *= s; }

/// Pointwise scalar * vector.
template <class G>
VectorField<G> operator*(const ScalarField<G>& s, VectorField<G> v) {
    for (int c = 0; c < G::dim; ++c) v[c] *= s;
    return v;
}

template <class G>
ScalarField<G> dot(const VectorField<G>& a, const VectorField<G>& b) {
    ScalarField<G> out = a[0] * b[0];
    for (int c = 1; c < G::dim; ++c) out += a[c] * b[c];
    return out;
}

// Sampling helpers -----------------------------------------------------------

template <class F>
ScalarField<CircleGrid> sample(const CircleGrid& g, F&& fn) {
    ScalarField<CircleGrid> out(g);
    for (int i = 0; i < g.n(); ++i) out[i] = fn(g.x(i));
    return out;
}

template <class F>
ScalarField<TorusGrid> sample(const TorusGrid& g, F&& fn) {
    ScalarField<TorusGrid> out(g);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) out[g.index(i, j)] = fn(g.x(i), g.y(j));
    return out;
}

/// fn(r, theta)
template <class F>
ScalarField<DiscGrid> sample(const DiscGrid& g, F&& fn) {
    ScalarField<DiscGrid> out(g);
    for (int i = 0; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) out[g.index(i, j)] = fn(g.r(i), g.theta(j));
    return out;
}

inline VectorField<CircleGrid> as_vector(ScalarField<CircleGrid> f) {
    return VectorField<CircleGrid>({std::move(f)});
}

}  // namespace bflow
