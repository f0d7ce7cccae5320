#pragma once

#include <cmath>
#include <stdexcept>

#include "nls6/fft.hpp"
#include "nls6/field.hpp"
#include "nls6/grid.hpp"

namespace nls6 {
namespace detail {

// Compensated summation; reductions stay accurate to a few ulps at n = 2^17.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

inline void check_size(std::size_t got, std::size_t want, const char* who) {
    if (got != want) throw std::invalid_argument(std::string(who) + ": field/grid size mismatch");
}

}  // namespace detail

// ---- quadrature ----

inline double integrate(const RField& density, const RadialGrid& g) {
    detail::check_size(density.size(), g.size(), "integrate");
    detail::KahanSum acc;
    for (std::size_t j = 0; j < g.n; ++j) acc.add(density[j] * g.w[j]);
    return acc.value();
}

inline double integrate(const RField& density, const TensorGrid& g) {
    detail::check_size(density.size(), g.size(), "integrate");
    detail::KahanSum acc;
    for (double x : density) acc.add(x);
    return acc.value() * g.cell_volume();
}

// <f, g> = integral of conj(f) g with the grid quadrature weights.
template <class GridT>
Complex inner_product(const CField& f, const CField& g, const GridT& grid) {
    detail::check_size(f.size(), grid.size(), "inner_product");
    detail::check_size(g.size(), grid.size(), "inner_product");
    detail::KahanSum re, im;
    if constexpr (std::is_same_v<GridT, RadialGrid>) {
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Complex z = std::conj(f[j]) * g[j];
            re.add(z.real() * grid.w[j]);
            im.add(z.imag() * grid.w[j]);
        }
        return {re.value(), im.value()};
    } else {
        for (std::size_t j = 0; j < f.size(); ++j) {
            const Complex z = std::conj(f[j]) * g[j];
            re.add(z.real());
            im.add(z.imag());
        }
        return Complex{re.value(), im.value()} * grid.cell_volume();
    }
}

template <class GridT>
double norm2_sq(const CField& f, const GridT& grid) {
    return inner_product(f, f, grid).real();
}

// ---- radial operators ----

// Face-flux Laplacian: Delta f_j = [A_{j+1/2} D_{j+1/2} - A_{j-1/2} D_{j-1/2}] / (r_j^{d-1} h)
// with A the face area r^{d-1} and D the face difference quotient. The r = 0 face has zero
// area (even symmetry needs no ghost); the outer boundary is Dirichlet via ghost
// f_n = -f_{n-1}. Exactly self-adjoint and negative w.r.t. integrate()'s weights.
inline CField laplacian(const CField& f, const RadialGrid& g) {
    detail::check_size(f.size(), g.size(), "laplacian");
    const std::size_t n = g.n;
    const double area = sphere_area(g.d);
    CField out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Complex fj = f[j];
        const Complex fr = (j + 1 < n) ? f[j + 1] : -f[n - 1];
        Complex flux = g.face[j] * (fr - fj);
        if (j > 0) flux -= g.face[j - 1] * (fj - f[j - 1]);
        out[j] = flux * (area / (g.h * g.w[j]));
    }
    return out;
}

// Fourth-order radial derivative. Even reflection across r = 0 is exact for
// cell-centered nodes (ghost -1 is node 0, ghost -2 is node 1). The outermost two
// cells use one-sided stencils: an extrapolated ghost would inject an O(f(r_max)/h)
// spike that the r^{d-1} weight amplifies for slowly decaying profiles.
inline CField radial_derivative(const CField& f, const RadialGrid& g) {
    detail::check_size(f.size(), g.size(), "radial_derivative");
    const auto n = static_cast<std::ptrdiff_t>(g.n);
    const double inv12h = 1.0 / (12.0 * g.h);
    auto at = [&](std::ptrdiff_t j) -> Complex {
        if (j < 0) return f[static_cast<std::size_t>(-1 - j)];
        return f[static_cast<std::size_t>(j)];
    };
    CField out(g.n);
    for (std::ptrdiff_t j = 0; j < n - 2; ++j)
        out[static_cast<std::size_t>(j)] =
            (8.0 * (at(j + 1) - at(j - 1)) - (at(j + 2) - at(j - 2))) * inv12h;
    const std::ptrdiff_t b = n - 2;  // one interior neighbor available
    out[static_cast<std::size_t>(b)] =
        (3.0 * at(b + 1) + 10.0 * at(b) - 18.0 * at(b - 1) + 6.0 * at(b - 2) - at(b - 3)) *
        inv12h;
    const std::ptrdiff_t e = n - 1;  // fully one-sided
    out[static_cast<std::size_t>(e)] =
        (25.0 * at(e) - 48.0 * at(e - 1) + 36.0 * at(e - 2) - 16.0 * at(e - 3) +
         3.0 * at(e - 4)) *
        inv12h;
    return out;
}

inline RField gradient_sq_density(const CField& f, const RadialGrid& g) {
    const CField df = radial_derivative(f, g);
    RField out(g.n);
    for (std::size_t j = 0; j < g.n; ++j) out[j] = std::norm(df[j]);
    return out;
}

// ---- tensor operators ----

// Spectral Laplacian, exact on the resolved lattice.
inline CField laplacian(const CField& f, const TensorGrid& g) {
    detail::check_size(f.size(), g.size(), "laplacian");
    CField out = f;
    fft_forward(out, g);
    std::size_t idx[3];
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.unflatten(i, idx);
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            const double xi = g.xi1[idx[a]];
            k2 += xi * xi;
        }
        out[i] *= -k2;
    }
    fft_inverse(out, g);
    return out;
}

// Spectral partial derivative along one axis; the Nyquist plane is zeroed so the
// derivative of real data stays real.
inline CField gradient_axis(const CField& f, const TensorGrid& g, int axis) {
    detail::check_size(f.size(), g.size(), "gradient_axis");
    if (axis < 0 || axis >= g.d) throw std::invalid_argument("gradient_axis: bad axis");
    CField out = f;
    fft_forward(out, g);
    std::size_t idx[3];
    const std::size_t nyq = g.m / 2;
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.unflatten(i, idx);
        if (idx[axis] == nyq) {
            out[i] = Complex{0.0, 0.0};
        } else {
            out[i] *= Complex{0.0, g.xi1[idx[axis]]};
        }
    }
    fft_inverse(out, g);
    return out;
}

inline RField gradient_sq_density(const CField& f, const TensorGrid& g) {
    RField out(g.size(), 0.0);
    for (int a = 0; a < g.d; ++a) {
        const CField da = gradient_axis(f, g, a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::norm(da[i]);
    }
    return out;
}

// Sharp annulus projector onto N/2 < |xi| <= N. Tensor grids only; N must sit inside
// the resolvable band (positive, at most the axis Nyquist frequency).
inline CField lp_project(const CField& f, const TensorGrid& g, double N) {
    detail::check_size(f.size(), g.size(), "lp_project");
    if (!(N > 0.0) || N > g.xi_max())
        throw std::domain_error("lp_project: N outside resolvable band");
    CField out = f;
    fft_forward(out, g);
    std::size_t idx[3];
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.unflatten(i, idx);
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            const double xi = g.xi1[idx[a]];
            k2 += xi * xi;
        }
        const double k = std::sqrt(k2);
        if (!(k > 0.5 * N && k <= N)) out[i] = Complex{0.0, 0.0};
    }
    fft_inverse(out, g);
    return out;
}

}  // namespace nls6
