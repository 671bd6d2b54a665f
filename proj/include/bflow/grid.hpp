#pragma once

#include <cstddef>
#include <numbers>

namespace bflow {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on the circle: x_i = 2*pi*i/n.
class CircleGrid {
public:
    static constexpr int dim = 1;

    /// n must be even and at least 8.
    explicit CircleGrid(int n);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_); }
    double spacing() const noexcept { return two_pi / n_; }
    double x(int i) const noexcept { return two_pi * i / n_; }

    bool operator==(const CircleGrid&) const = default;

private:
    int n_;
};

/// Uniform periodic grid on the flat torus [0, 2*pi)^2. Node (i, j) is stored
/// at index i * ny + j (y fastest).
class TorusGrid {
public:
    static constexpr int dim = 2;

    TorusGrid(int nx, int ny);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    double hx() const noexcept { return two_pi / nx_; }
    double hy() const noexcept { return two_pi / ny_; }
    double x(int i) const noexcept { return two_pi * i / nx_; }
    double y(int j) const noexcept { return two_pi * j / ny_; }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * ny_ + j;
    }

    bool operator==(const TorusGrid&) const = default;

private:
    int nx_;
    int ny_;
};

/// Polar grid on the unit disc. Radial nodes r_i = (i + 1) / nr for
/// i = 0..nr-1, so the origin is excluded and the last node sits on r = 1.
/// Azimuthal nodes are uniform; node (i, j) lives at index i * ntheta + j.
class DiscGrid {
public:
    static constexpr int dim = 2;

    /// nr >= 4, ntheta even and >= 8.
    DiscGrid(int nr, int ntheta);

    int nr() const noexcept { return nr_; }
    int ntheta() const noexcept { return ntheta_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nr_) * ntheta_; }
    double dr() const noexcept { return 1.0 / nr_; }
    double dtheta() const noexcept { return two_pi / ntheta_; }
    double r(int i) const noexcept { return static_cast<double>(i + 1) / nr_; }
    double theta(int j) const noexcept { return two_pi * j / ntheta_; }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * ntheta_ + j;
    }

    bool operator==(const DiscGrid&) const = default;

private:
    int nr_;
    int ntheta_;
};

}  // namespace bflow
