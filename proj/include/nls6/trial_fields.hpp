#pragma once

#include <cmath>
#include <random>

#include "nls6/field.hpp"
#include "nls6/grid.hpp"

namespace nls6 {

// Random smooth decaying fields for property suites: sums of 3..6 Gaussian bumps
// with random centers, widths, amplitudes and phases. Radial bumps are mirrored
// across r = 0 so the field has an even extension; tensor bumps carry a lattice
// plane-wave factor so spectra stay resolved and reproducible.

inline CField random_radial_field(const RadialGrid& g, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nbump(3, 6);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    std::uniform_real_distribution<double> center(0.0, 0.25 * g.r_max);
    std::uniform_real_distribution<double> width(0.03 * g.r_max, 0.12 * g.r_max);
    CField f(g.n, Complex{0.0, 0.0});
    const int nb = nbump(rng);
    for (int b = 0; b < nb; ++b) {
        const double a = amp(rng), ph = phase(rng), c = center(rng), w = width(rng);
        const Complex coeff = a * std::exp(Complex(0.0, ph));
        for (std::size_t j = 0; j < g.n; ++j) {
            const double dm = (g.r[j] - c) / w, dp = (g.r[j] + c) / w;
            f[j] += coeff * (std::exp(-dm * dm) + std::exp(-dp * dp));
        }
    }
    return f;
}

inline CField random_tensor_field(const TensorGrid& g, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nbump(3, 6);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    std::uniform_real_distribution<double> center(-0.25 * g.L, 0.25 * g.L);
    std::uniform_real_distribution<double> width(0.05 * g.L, 0.15 * g.L);
    std::uniform_int_distribution<int> wave(-static_cast<int>(g.m) / 8,
                                            static_cast<int>(g.m) / 8);
    CField f(g.size(), Complex{0.0, 0.0});
    const int nb = nbump(rng);
    const double dxi = 2.0 * pi / g.L;
    for (int b = 0; b < nb; ++b) {
        const double a = amp(rng), ph = phase(rng), w = width(rng);
        double c[3] = {0, 0, 0};
        double k[3] = {0, 0, 0};
        for (int ax = 0; ax < g.d; ++ax) {
            c[ax] = center(rng);
            k[ax] = dxi * wave(rng);
        }
        const Complex coeff = a * std::exp(Complex(0.0, ph));
        std::size_t idx[3];
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.unflatten(i, idx);
            double q2 = 0.0, kx = 0.0;
            for (int ax = 0; ax < g.d; ++ax) {
                const double dxa = (g.x1[idx[ax]] - c[ax]) / w;
                q2 += dxa * dxa;
                kx += k[ax] * g.x1[idx[ax]];
            }
            f[i] += coeff * std::exp(-q2) * std::exp(Complex(0.0, kx));
        }
    }
    return f;
}

// Exactly band-limited random field: a finite sum of lattice plane waves with
// integer wave indices |k_a| <= kmax. Unlike the Gaussian bumps above, the
// discrete spectrum is *exactly* supported in the sub-zone, so Fourier-shift
// operations (Galilean boosts by lattice xi) stay inside the resolvable band
// and phase-space identities hold to roundoff rather than to tail accuracy.
inline CField band_limited_tensor_field(const TensorGrid& g, std::mt19937_64& rng,
                                        int kmax, int nwaves = 8) {
    if (kmax < 0 || static_cast<std::size_t>(2 * kmax) >= g.m)
        throw std::domain_error("band_limited_tensor_field: kmax exceeds the grid band");
    std::uniform_int_distribution<int> wave(-kmax, kmax);
    std::normal_distribution<double> amp(0.0, 1.0);
    const double dxi = 2.0 * pi / g.L;
    CField f(g.size(), Complex{0.0, 0.0});
    for (int w = 0; w < nwaves; ++w) {
        double k[3] = {0, 0, 0};
        for (int ax = 0; ax < g.d; ++ax) k[ax] = dxi * wave(rng);
        const Complex coeff{amp(rng), amp(rng)};
        std::size_t idx[3];
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.unflatten(i, idx);
            double kx = 0.0;
            for (int ax = 0; ax < g.d; ++ax) kx += k[ax] * g.x1[idx[ax]];
            f[i] += coeff * std::exp(Complex(0.0, kx));
        }
    }
    return f;
}

inline FieldPair<TensorGrid> band_limited_pair(std::shared_ptr<const TensorGrid> grid,
                                               double kappa, std::mt19937_64& rng,
                                               int kmax, int nwaves = 8) {
    CField u = band_limited_tensor_field(*grid, rng, kmax, nwaves);
    CField v = band_limited_tensor_field(*grid, rng, kmax, nwaves);
    return make_field_pair(std::move(grid), std::move(u), std::move(v), kappa);
}

template <class GridT>
FieldPair<GridT> random_pair(std::shared_ptr<const GridT> grid, double kappa,
                             std::mt19937_64& rng) {
    CField u, v;
    if constexpr (std::is_same_v<GridT, RadialGrid>) {
        u = random_radial_field(*grid, rng);
        v = random_radial_field(*grid, rng);
    } else {
        u = random_tensor_field(*grid, rng);
        v = random_tensor_field(*grid, rng);
    }
    return make_field_pair(std::move(grid), std::move(u), std::move(v), kappa);
}

}  // namespace nls6
