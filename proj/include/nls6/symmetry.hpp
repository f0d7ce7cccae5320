#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>

#include "nls6/field.hpp"
#include "nls6/functionals.hpp"
#include "nls6/grid.hpp"

namespace nls6 {

// lambda^2 g(lambda x) on the compatibly rescaled grid (same point count,
// domain shrunk by lambda). Cell centers of the new grid land exactly on the
// old sample arguments, so no interpolation enters: values just scale by
// lambda^2. At d = 6 this is the H-invariant critical rescaling.
inline FieldPair<RadialGrid> scale_transform(const FieldPair<RadialGrid>& fp, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("scale_transform: lambda must be positive");
    const RadialGrid& g = *fp.grid;
    auto tg = std::make_shared<const RadialGrid>(g.d, g.n, g.r_max / lambda);
    FieldPair<RadialGrid> out = make_field_pair(tg, fp.u, fp.v, fp.kappa);
    const double l2 = lambda * lambda;
    for (std::size_t j = 0; j < g.n; ++j) {
        out.u[j] *= l2;
        out.v[j] *= l2;
    }
    return out;
}

inline FieldPair<TensorGrid> scale_transform(const FieldPair<TensorGrid>& fp, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("scale_transform: lambda must be positive");
    const TensorGrid& g = *fp.grid;
    auto tg = std::make_shared<const TensorGrid>(g.d, g.m, g.L / lambda);
    FieldPair<TensorGrid> out = make_field_pair(tg, fp.u, fp.v, fp.kappa);
    const double l2 = lambda * lambda;
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.u[i] *= l2;
        out.v[i] *= l2;
    }
    return out;
}

struct BoostParams {
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    double t = 0.0;  // only the t = 0 phase formula is implemented
};

namespace detail {

// each boost component must sit on the grid's frequency lattice (multiples of
// 2 pi / L), otherwise the phase breaks periodicity
inline void check_lattice_xi(const TensorGrid& g, const std::array<double, 3>& xi) {
    const double base = 2.0 * pi / g.L;
    for (int a = 0; a < 3; ++a) {
        if (a >= g.d) {
            if (xi[static_cast<std::size_t>(a)] != 0.0)
                throw std::invalid_argument("galilean_boost: xi component beyond grid dimension");
            continue;
        }
        const double q = xi[static_cast<std::size_t>(a)] / base;
        if (std::abs(q - std::round(q)) > 1e-9 * (1.0 + std::abs(q)))
            throw std::invalid_argument("galilean_boost: xi off the frequency lattice");
    }
}

}  // namespace detail

// (e^{i x.xi} u, e^{2 i x.xi} v): the doubled phase on v is what makes the
// transformation a symmetry exactly at mass-resonance kappa = 1/2; the phases
// are applied for any kappa so the failure away from 1/2 can be observed.
inline FieldPair<TensorGrid> galilean_boost(const FieldPair<TensorGrid>& fp,
                                            const BoostParams& bp) {
    if (bp.t != 0.0)
        throw std::invalid_argument("galilean_boost: only the t = 0 formula is implemented");
    const TensorGrid& g = *fp.grid;
    detail::check_lattice_xi(g, bp.xi);
    FieldPair<TensorGrid> out = fp;
    std::size_t idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double phase = 0.0;
        for (int a = 0; a < g.d; ++a)
            phase += g.x1[idx[a]] * bp.xi[static_cast<std::size_t>(a)];
        out.u[i] *= std::polar(1.0, phase);
        out.v[i] *= std::polar(1.0, 2.0 * phase);
    }
    return out;
}

struct BoostIdentity {
    double lhs = 0.0;  // H(boosted) - H - |xi|^2 M
    double rhs = 0.0;  // 2 xi . P
    double dev = 0.0;  // |lhs - rhs| / (1 + |rhs|)
};

// Kinetic-energy expansion under the boost. Exact algebra on a periodic grid
// with lattice xi, but only at mass-resonance: the half-weighted momentum and
// the doubled v phase cancel precisely when kappa = 1/2.
inline BoostIdentity boost_energy_identity_check(const FieldPair<TensorGrid>& fp,
                                                 const BoostParams& bp) {
    if (fp.kappa != 0.5) throw std::domain_error("boost_energy_identity_check: mass-resonance required");
    const FieldPair<TensorGrid> boosted = galilean_boost(fp, bp);
    double xi2 = 0.0;
    for (double c : bp.xi) xi2 += c * c;
    const auto P = momentum(fp);
    BoostIdentity out;
    out.lhs = kinetic(boosted) - kinetic(fp) - xi2 * mass(fp);
    out.rhs = 0.0;
    for (std::size_t a = 0; a < 3; ++a) out.rhs += 2.0 * bp.xi[a] * P[a];
    out.dev = std::abs(out.lhs - out.rhs) / (1.0 + std::abs(out.rhs));
    return out;
}

// f(x) -> f(x - x0) for lattice-aligned x0 (index roll; every functional is
// exactly invariant because the sample multiset is unchanged).
inline FieldPair<TensorGrid> translate(const FieldPair<TensorGrid>& fp,
                                       const std::array<double, 3>& x0) {
    const TensorGrid& g = *fp.grid;
    long shift[3] = {0, 0, 0};
    for (int a = 0; a < 3; ++a) {
        const double q = x0[static_cast<std::size_t>(a)] / g.dx;
        if (a >= g.d) {
            if (x0[static_cast<std::size_t>(a)] != 0.0)
                throw std::invalid_argument("translate: x0 component beyond grid dimension");
            continue;
        }
        if (std::abs(q - std::round(q)) > 1e-9 * (1.0 + std::abs(q)))
            throw std::invalid_argument("translate: x0 must be lattice-aligned");
        const long m = static_cast<long>(g.m);
        shift[a] = static_cast<long>(std::llround(q)) % m;
        if (shift[a] < 0) shift[a] += m;
    }
    FieldPair<TensorGrid> out = fp;
    const long m = static_cast<long>(g.m);
    std::size_t idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        std::size_t target = 0;
        for (int a = 0; a < g.d; ++a) {
            const long moved = (static_cast<long>(idx[a]) + shift[a]) % m;
            target = target * g.m + static_cast<std::size_t>(moved);
        }
        out.u[target] = fp.u[i];
        out.v[target] = fp.v[i];
    }
    return out;
}

}  // namespace nls6
