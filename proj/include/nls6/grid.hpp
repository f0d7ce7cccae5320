#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nls6 {

inline constexpr double pi = std::numbers::pi;

// Surface area of the unit sphere S^{d-1} embedded in R^d.
inline double sphere_area(int d) {
    if (d < 1) throw std::invalid_argument("sphere_area: dimension must be positive");
    return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Volume of the unit ball in R^d, so |B_R| = ball_volume_coeff(d) * R^d.
inline double ball_volume_coeff(int d) { return sphere_area(d) / d; }

inline bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

// Cell-centered radial grid on [0, r_max]: nodes r_j = (j + 1/2) h, h = r_max / n.
// Quadrature weight w_j = |S^{d-1}| r_j^{d-1} h; cell faces at j h carry the
// discrete flux area r^{d-1}, with the r = 0 face area identically zero.
struct RadialGrid {
    int d;
    std::size_t n;
    double r_max;
    double h;
    std::vector<double> r;     // nodes, size n
    std::vector<double> w;     // quadrature weights, size n
    std::vector<double> face;  // face[j] = ((j+1) h)^{d-1}, right face of cell j, size n

    RadialGrid(int d_, std::size_t n_, double r_max_)
        : d(d_), n(n_), r_max(r_max_), h(r_max_ / static_cast<double>(n_)) {
        if (d < 1 || d > 6) throw std::invalid_argument("RadialGrid: d must be in [1,6]");
        if (n < 16) throw std::invalid_argument("RadialGrid: need at least 16 cells");
        if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
        r.resize(n);
        w.resize(n);
        face.resize(n);
        const double area = sphere_area(d);
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = (static_cast<double>(j) + 0.5) * h;
            w[j] = area * std::pow(r[j], d - 1) * h;
            face[j] = std::pow(static_cast<double>(j + 1) * h, d - 1);
        }
    }

    std::size_t size() const { return n; }
};

// Periodic tensor-product grid on [-L/2, L/2)^d, m points per axis (power of two).
// Frequency lattice in FFT order: xi_k = 2 pi k / L for k = 0..m/2, then negative.
struct TensorGrid {
    int d;
    std::size_t m;
    double L;
    double dx;
    std::vector<double> x1;   // per-axis coordinates, size m
    std::vector<double> xi1;  // per-axis frequencies in FFT order, size m

    TensorGrid(int d_, std::size_t m_, double L_)
        : d(d_), m(m_), L(L_), dx(L_ / static_cast<double>(m_)) {
        if (d < 1 || d > 3) throw std::invalid_argument("TensorGrid: d must be in [1,3]");
        if (!is_power_of_two(m) || m < 16)
            throw std::invalid_argument("TensorGrid: m must be a power of two, at least 16");
        if (!(L > 0.0)) throw std::invalid_argument("TensorGrid: L must be positive");
        x1.resize(m);
        xi1.resize(m);
        const double dxi = 2.0 * pi / L;
        for (std::size_t i = 0; i < m; ++i) {
            x1[i] = -0.5 * L + static_cast<double>(i) * dx;
            const auto k = static_cast<std::ptrdiff_t>(i);
            const auto half = static_cast<std::ptrdiff_t>(m / 2);
            xi1[i] = dxi * static_cast<double>(k <= half ? k : k - static_cast<std::ptrdiff_t>(m));
        }
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < d; ++a) s *= m;
        return s;
    }

    // Decompose a flat row-major index into per-axis indices.
    void unflatten(std::size_t flat, std::size_t (&idx)[3]) const {
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = flat % m;
            flat /= m;
        }
    }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= dx;
        return v;
    }

    // Largest axis frequency magnitude (Nyquist).
    double xi_max() const { return pi * static_cast<double>(m) / L; }
};

}  // namespace nls6
