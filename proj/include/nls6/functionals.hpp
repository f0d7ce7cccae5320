#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "nls6/operators.hpp"

namespace nls6 {

template <class GridT>
double mass(const FieldPair<GridT>& fp) {
    return norm2_sq(fp.u, *fp.grid) + norm2_sq(fp.v, *fp.grid);
}

// H = ||grad u||^2 + (kappa/2) ||grad v||^2
template <class GridT>
double kinetic(const FieldPair<GridT>& fp) {
    const RField eu = gradient_sq_density(fp.u, *fp.grid);
    const RField ev = gradient_sq_density(fp.v, *fp.grid);
    return integrate(eu, *fp.grid) + 0.5 * fp.kappa * integrate(ev, *fp.grid);
}

// Pointwise kinetic-energy density |grad u|^2 + (kappa/2) |grad v|^2.
template <class GridT>
RField kinetic_density(const FieldPair<GridT>& fp) {
    RField e = gradient_sq_density(fp.u, *fp.grid);
    const RField ev = gradient_sq_density(fp.v, *fp.grid);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += 0.5 * fp.kappa * ev[i];
    return e;
}

// R = Re int conj(v) u^2
template <class GridT>
double potential(const FieldPair<GridT>& fp) {
    RField density(fp.size());
    for (std::size_t i = 0; i < fp.size(); ++i)
        density[i] = (std::conj(fp.v[i]) * fp.u[i] * fp.u[i]).real();
    return integrate(density, *fp.grid);
}

template <class GridT>
double energy(const FieldPair<GridT>& fp) {
    return kinetic(fp) - potential(fp);
}

// P = Im int (conj(u) grad u + 1/2 conj(v) grad v); the 1/2 weight on v is fixed
// by the structure of the system, independent of kappa. Radial pairs carry zero
// momentum by symmetry, so the radial overload returns exact zeros.
inline std::array<double, 6> momentum(const FieldPair<RadialGrid>& fp) {
    (void)fp;
    return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
}

inline std::array<double, 6> momentum(const FieldPair<TensorGrid>& fp) {
    std::array<double, 6> P{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const TensorGrid& g = *fp.grid;
    RField density(g.size());
    for (int a = 0; a < g.d; ++a) {
        const CField du = gradient_axis(fp.u, g, a);
        const CField dv = gradient_axis(fp.v, g, a);
        for (std::size_t i = 0; i < g.size(); ++i)
            density[i] = (std::conj(fp.u[i]) * du[i]).imag() +
                         0.5 * (std::conj(fp.v[i]) * dv[i]).imag();
        P[static_cast<std::size_t>(a)] = integrate(density, g);
    }
    return P;
}

// K = 2H - 3R, the virial driver I''/(8 kappa).
template <class GridT>
double coercivity_K(const FieldPair<GridT>& fp) {
    return 2.0 * kinetic(fp) - 3.0 * potential(fp);
}

// J = H^3 / R^2 on the domain R > 0; undefined (nullopt) outside it.
template <class GridT>
std::optional<double> action_J(const FieldPair<GridT>& fp) {
    const double R = potential(fp);
    if (!(R > 0.0)) return std::nullopt;
    const double H = kinetic(fp);
    return H * H * H / (R * R);
}

struct FunctionalReport {
    double kappa = 0.0;
    int d = 0;
    double M = 0.0;
    double H = 0.0;
    double R = 0.0;
    double E = 0.0;  // stored as H - R
    double K = 0.0;  // stored as 3E - H, the identity used by the virial argument
    std::array<double, 6> P{};
};

template <class GridT>
FunctionalReport compute_report(const FieldPair<GridT>& fp) {
    FunctionalReport rep;
    rep.kappa = fp.kappa;
    rep.d = fp.grid->d;
    rep.M = mass(fp);
    rep.H = kinetic(fp);
    rep.R = potential(fp);
    rep.E = rep.H - rep.R;
    rep.K = 3.0 * rep.E - rep.H;
    rep.P = momentum(fp);
    return rep;
}

// |R| <= sqrt(8/(27 kappa)) H^{3/2}; the non-sharp interaction estimate.
struct InteractionBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

template <class GridT>
InteractionBound interaction_bound_check(const FieldPair<GridT>& fp) {
    InteractionBound b;
    b.lhs = std::abs(potential(fp));
    const double H = kinetic(fp);
    b.rhs = std::sqrt(8.0 / (27.0 * fp.kappa)) * std::pow(H, 1.5);
    b.ok = b.lhs <= b.rhs * (1.0 + 1e-10);
    return b;
}

// Ground-state thresholds, all evaluated with one grid's quadrature so the
// algebra between them closes discretely.
struct Thresholds {
    double H_W = 0.0;
    double E_W = 0.0;
    double R_W = 0.0;
    double C_GN = 0.0;   // R_W / H_W^{3/2}
    double J_min = 0.0;  // 1 / C_GN^2
};

struct TrappingDeltas {
    double delta = 0.0;     // 1 - E0/E_W
    double delta_p = 0.0;   // H(u(t)) <= (1 - delta_p) H_W along the trapped flow
    double delta_pp = 0.0;  // coercivity constant: 2H - 3R >= delta_pp H
};

namespace detail {

// f(y) = y - C_GN y^{3/2}: increasing on [0, H_W], maximum f(H_W) = E_W,
// decreasing beyond, zero again at y = (9/4) H_W.
inline double variational_f(double y, double c_gn) { return y - c_gn * std::pow(y, 1.5); }

inline double bisect(double lo, double hi, double target, double c_gn, bool increasing) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool below = variational_f(mid, c_gn) < target;
        if (below == increasing)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Below-threshold trapping gaps. E0 must lie strictly below E_W.
inline TrappingDeltas trapping_deltas(double E0, const Thresholds& th) {
    if (!(E0 < th.E_W)) throw std::domain_error("trapping_deltas: thresholds inapplicable (E0 >= E(W))");
    TrappingDeltas d;
    d.delta = 1.0 - E0 / th.E_W;
    if (E0 <= 0.0) {
        // f >= 0 on [0, H_W]: no sub-threshold state attains E0, the gap saturates
        d.delta_p = 1.0;
    } else {
        const double y = detail::bisect(0.0, th.H_W, E0, th.C_GN, true);
        d.delta_p = 1.0 - y / th.H_W;
    }
    d.delta_pp = 2.0 * (1.0 - std::sqrt(1.0 - d.delta_p));
    return d;
}

struct TrappingDeltasAbove {
    double delta = 0.0;      // 1 - E0/E_W
    double delta_tp = 0.0;   // H(u(t)) >= (1 + delta_tp) H_W along the flow
    double delta_tpp = 0.0;  // repulsivity constant: 2H - 3R <= -delta_tpp H
};

// Above-threshold gaps for initial data with E0 < E_W and H0 > H_W. delta_tp is
// the root of f(y) = E0 on the decreasing branch y > H_W, found numerically;
// delta_tpp = 1 - (1 - delta)/(1 + delta_tp). On amplitude-scaled ground states cW
// this evaluates to delta_tp = c^2 - 1 and delta_tpp = 2(c - 1) exactly.
inline TrappingDeltasAbove trapping_deltas_above(double E0, const Thresholds& th) {
    if (!(E0 < th.E_W))
        throw std::domain_error("trapping_deltas_above: thresholds inapplicable (E0 >= E(W))");
    TrappingDeltasAbove d;
    d.delta = 1.0 - E0 / th.E_W;
    double hi = 2.0 * th.H_W;
    while (detail::variational_f(hi, th.C_GN) > E0) hi *= 2.0;
    const double y = detail::bisect(th.H_W, hi, E0, th.C_GN, false);
    d.delta_tp = y / th.H_W - 1.0;
    d.delta_tpp = 1.0 - (1.0 - d.delta) / (1.0 + d.delta_tp);
    return d;
}

// Integrand of the scattering size: ||u||_{L^4}^4 + ||v||_{L^4}^4 at a fixed time.
template <class GridT>
double l4_size(const FieldPair<GridT>& fp) {
    RField dens(fp.u.size());
    for (std::size_t i = 0; i < fp.u.size(); ++i) {
        const double a = std::norm(fp.u[i]), b = std::norm(fp.v[i]);
        dens[i] = a * a + b * b;
    }
    return integrate(dens, *fp.grid);
}

}  // namespace nls6
