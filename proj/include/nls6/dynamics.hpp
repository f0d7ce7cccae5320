#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "nls6/diagnostics.hpp"
#include "nls6/fft.hpp"
#include "nls6/field.hpp"
#include "nls6/functionals.hpp"
#include "nls6/ground_state.hpp"
#include "nls6/operators.hpp"
#include "nls6/run_types.hpp"

namespace nls6 {

struct IntegratorConfig {
    double dt0 = 1e-3;
    double dt_min = 1e-10;
    double t_end = 1.0;
    double cfl_c = 1.0;            // dt = min(dt0, cfl_c / max_j max(|u_j|, |v_j|, 1))
    double sponge_width = 0.0;     // outer fraction of r_max carrying the absorber; 0 disables
    double sponge_strength = 0.0;
    std::size_t record_every = 10;
    std::size_t snapshot_every = 0;  // 0 disables snapshots
    double blowup_H_factor = 5.0;    // indicator: H(t) > factor * H(0)

    void validate() const {
        auto fin = [](double x) { return std::isfinite(x); };
        if (!fin(dt0) || !fin(dt_min) || !fin(t_end) || !fin(cfl_c) || !fin(sponge_width) ||
            !fin(sponge_strength) || !fin(blowup_H_factor))
            throw std::invalid_argument("IntegratorConfig: non-finite parameter");
        if (!(dt_min > 0.0) || !(dt_min < dt0) || !(dt0 <= t_end))
            throw std::invalid_argument("IntegratorConfig: need 0 < dt_min < dt0 <= t_end");
        if (!(cfl_c > 0.0)) throw std::invalid_argument("IntegratorConfig: cfl_c must be positive");
        if (sponge_width < 0.0 || sponge_width > 1.0)
            throw std::invalid_argument("IntegratorConfig: sponge_width outside [0, 1]");
        if (sponge_strength < 0.0)
            throw std::invalid_argument("IntegratorConfig: sponge_strength must be >= 0");
        if (record_every == 0) throw std::invalid_argument("IntegratorConfig: record_every >= 1");
        if (!(blowup_H_factor > 1.0))
            throw std::invalid_argument("IntegratorConfig: blowup_H_factor must exceed 1");
    }

    bool sponge_enabled() const { return sponge_width > 0.0 && sponge_strength > 0.0; }
};

// ---------------------------------------------------------------------------
// Split-step pieces. The nonlinear flow u' = i v conj(u), v' = i u^2 is
// pointwise in space; one classical 4th-order step per call. Signed dt is
// accepted so the adjoint/reversibility checks can run the pieces backwards.
// ---------------------------------------------------------------------------

template <class GridT>
FieldPair<GridT> nonlinear_substep(FieldPair<GridT> fp, double dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("nonlinear_substep: dt must be finite");
    if (dt == 0.0) return fp;
    const std::size_t n = fp.u.size();
    const Complex iu{0.0, 1.0};
    for (std::size_t j = 0; j < n; ++j) {
        const Complex u0 = fp.u[j], v0 = fp.v[j];
        const Complex k1u = iu * v0 * std::conj(u0);
        const Complex k1v = iu * u0 * u0;
        const Complex u1 = u0 + 0.5 * dt * k1u, v1 = v0 + 0.5 * dt * k1v;
        const Complex k2u = iu * v1 * std::conj(u1);
        const Complex k2v = iu * u1 * u1;
        const Complex u2 = u0 + 0.5 * dt * k2u, v2 = v0 + 0.5 * dt * k2v;
        const Complex k3u = iu * v2 * std::conj(u2);
        const Complex k3v = iu * u2 * u2;
        const Complex u3 = u0 + dt * k3u, v3 = v0 + dt * k3v;
        const Complex k4u = iu * v3 * std::conj(u3);
        const Complex k4v = iu * u3 * u3;
        fp.u[j] = u0 + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        fp.v[j] = v0 + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return fp;
}

namespace detail {

// Tridiagonal coefficients of the flux-form radial Laplacian, bit-identical to
// the operator in operators.hpp (Dirichlet ghost folded into the last diagonal).
inline void radial_laplacian_tridiag(const RadialGrid& g, std::vector<double>& sub,
                                     std::vector<double>& diag, std::vector<double>& sup) {
    const std::size_t n = g.n;
    sub.assign(n, 0.0);
    diag.assign(n, 0.0);
    sup.assign(n, 0.0);
    const double area = sphere_area(g.d);
    for (std::size_t j = 0; j < n; ++j) {
        const double scale = area / (g.h * g.w[j]);
        const double f_lo = j == 0 ? 0.0 : g.face[j - 1];
        const double f_hi = g.face[j];
        if (j > 0) sub[j] = f_lo * scale;
        if (j + 1 < n) {
            sup[j] = f_hi * scale;
            diag[j] = -(f_lo + f_hi) * scale;
        } else {
            diag[j] = -(f_lo + 2.0 * f_hi) * scale;  // ghost f_n = -f_{n-1}
        }
    }
}

// One Crank-Nicolson solve (I - i theta L) f+ = (I + i theta L) f for the
// tridiagonal L above; Cayley form, exactly norm-preserving in the grid's
// weighted inner product.
inline void cn_solve(CField& f, const std::vector<double>& sub, const std::vector<double>& diag,
                     const std::vector<double>& sup, double theta) {
    const std::size_t n = f.size();
    const Complex it{0.0, theta};
    CField rhs(n), c_prime(n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex lf = diag[j] * f[j];
        if (j > 0) lf += sub[j] * f[j - 1];
        if (j + 1 < n) lf += sup[j] * f[j + 1];
        rhs[j] = f[j] + it * lf;
    }
    // Thomas elimination on (I - i theta L)
    Complex denom = 1.0 - it * diag[0];
    c_prime[0] = (-it * sup[0]) / denom;
    f[0] = rhs[0] / denom;
    for (std::size_t j = 1; j < n; ++j) {
        const Complex a = -it * sub[j];
        denom = (1.0 - it * diag[j]) - a * c_prime[j - 1];
        c_prime[j] = (-it * sup[j]) / denom;
        f[j] = (rhs[j] - a * f[j - 1]) / denom;
    }
    for (std::size_t j = n - 1; j-- > 0;) f[j] -= c_prime[j] * f[j + 1];
}

}  // namespace detail

inline FieldPair<RadialGrid> linear_substep(FieldPair<RadialGrid> fp, double dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("linear_substep: dt must be finite");
    if (dt == 0.0) return fp;
    const RadialGrid& g = *fp.grid;
    std::vector<double> sub, diag, sup;
    detail::radial_laplacian_tridiag(g, sub, diag, sup);
    detail::cn_solve(fp.u, sub, diag, sup, 0.5 * dt);
    detail::cn_solve(fp.v, sub, diag, sup, 0.5 * dt * fp.kappa);
    return fp;
}

inline FieldPair<TensorGrid> linear_substep(FieldPair<TensorGrid> fp, double dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("linear_substep: dt must be finite");
    if (dt == 0.0) return fp;
    const TensorGrid& g = *fp.grid;
    fft_forward(fp.u, g);
    fft_forward(fp.v, g);
    std::size_t idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double xi2 = 0.0;
        for (int a = 0; a < g.d; ++a) xi2 += g.xi1[idx[a]] * g.xi1[idx[a]];
        fp.u[i] *= std::polar(1.0, -xi2 * dt);
        fp.v[i] *= std::polar(1.0, -fp.kappa * xi2 * dt);
    }
    fft_inverse(fp.u, g);
    fft_inverse(fp.v, g);
    return fp;
}

// Symmetric second-order composition: half nonlinear, full linear, half nonlinear.
template <class GridT>
FieldPair<GridT> strang_step(FieldPair<GridT> fp, double dt) {
    fp = nonlinear_substep(std::move(fp), 0.5 * dt);
    fp = linear_substep(std::move(fp), dt);
    return nonlinear_substep(std::move(fp), 0.5 * dt);
}

// Absorbing layer on the outer sponge_width fraction of the radial domain:
// multiply by exp(-dt sigma(r)) with a C^2 smoothstep ramp, so mass decreases
// monotonically and the interior is untouched to machine precision.
inline FieldPair<RadialGrid> apply_sponge(FieldPair<RadialGrid> fp, double dt,
                                          const IntegratorConfig& cfg) {
    if (!(dt >= 0.0)) throw std::invalid_argument("apply_sponge: dt must be >= 0");
    if (!cfg.sponge_enabled()) return fp;
    const RadialGrid& g = *fp.grid;
    const double r0 = (1.0 - cfg.sponge_width) * g.r_max;
    const double span = g.r_max - r0;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (g.r[j] <= r0) continue;
        const double s = std::min((g.r[j] - r0) / span, 1.0);
        const double ramp = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
        const double factor = std::exp(-dt * cfg.sponge_strength * ramp);
        fp.u[j] *= factor;
        fp.v[j] *= factor;
    }
    return fp;
}

namespace detail {

template <class GridT>
double max_amplitude_sq(const FieldPair<GridT>& fp) {
    double m = 0.0;
    for (std::size_t j = 0; j < fp.u.size(); ++j)
        m = std::max(m, std::max(std::norm(fp.u[j]), std::norm(fp.v[j])));
    return m;
}

template <class GridT>
SeriesRow make_series_row(const FieldPair<GridT>& fp, double t, double dt_used, double s_accum) {
    SeriesRow row;
    row.t = t;
    const FunctionalReport rep = compute_report(fp);
    row.M = rep.M;
    row.E = rep.E;
    row.H = rep.H;
    row.R = rep.R;
    row.K = rep.K;
    for (std::size_t a = 0; a < 3; ++a) row.P[a] = rep.P[a];
    const VirialSample vs = virial_sample(fp, t);
    row.I = vs.I;
    row.Idot = vs.Idot;
    row.Iddot_formula = vs.Iddot_formula;
    row.S_accum = s_accum;
    row.lambda_scale = rep.H > 0.0 ? frequency_scale(fp, 0.1 * rep.H)
                                   : std::numeric_limits<double>::quiet_NaN();
    row.x_center = spatial_center(fp);
    row.dt = dt_used;
    return row;
}

}  // namespace detail

// Adaptive split-step driver. Records every record_every steps (plus the
// initial and final states), keeps a cumulative trapezoid of the scattering
// size, stores snapshots on their own cadence, and stops on the first blow-up
// indicator: non-finite values, kinetic energy above blowup_H_factor * H(0),
// or the step ladder hitting dt_min (the latter is reported as DtFloor unless
// the kinetic indicator also fires at that moment).
template <class GridT>
RunResult<GridT> evolve(const FieldPair<GridT>& fp0, const IntegratorConfig& cfg, double t0 = 0.0,
                        const std::function<void(double, const FieldPair<GridT>&)>& on_record = {}) {
    cfg.validate();
    if constexpr (!std::is_same_v<GridT, RadialGrid>) {
        if (cfg.sponge_enabled())
            throw std::invalid_argument("evolve: the absorbing layer needs a radial grid");
    }
    RunResult<GridT> result;
    FieldPair<GridT> state = fp0;
    double t = t0;
    const double t_end = t0 + cfg.t_end;
    std::size_t step = 0;
    double s_prev = l4_size(state);
    double s_accum = 0.0;
    const double H0 = kinetic(state);
    const double h_threshold = cfg.blowup_H_factor * H0;

    auto record = [&](double dt_used) {
        const SeriesRow row = detail::make_series_row(state, t, dt_used, s_accum);
        result.series.push_back(row);
        if (on_record) on_record(t, state);
        return row.H;
    };
    auto snapshot = [&]() { result.snapshots.emplace_back(t, state); };

    record(0.0);
    if (cfg.snapshot_every > 0) snapshot();

    while (t < t_end - 1e-14 * std::max(1.0, std::abs(t_end))) {
        const double amax2 = detail::max_amplitude_sq(state);
        if (!std::isfinite(amax2)) {
            result.outcome = Outcome::BlowUpDetected;
            result.t_stop = t;
            break;
        }
        const double dt_raw = std::min(cfg.dt0, cfg.cfl_c / std::max(std::sqrt(amax2), 1.0));
        if (dt_raw < cfg.dt_min) {
            result.outcome =
                kinetic(state) > h_threshold ? Outcome::BlowUpDetected : Outcome::DtFloor;
            result.t_stop = t;
            break;
        }
        const double dt = std::min(dt_raw, t_end - t);
        state = strang_step(std::move(state), dt);
        if constexpr (std::is_same_v<GridT, RadialGrid>) {
            if (cfg.sponge_enabled()) state = apply_sponge(std::move(state), dt, cfg);
        }
        t += dt;
        ++step;
        const double s_new = l4_size(state);
        s_accum += 0.5 * (s_prev + s_new) * dt;
        s_prev = s_new;
        if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) snapshot();
        const bool last = !(t < t_end - 1e-14 * std::max(1.0, std::abs(t_end)));
        if (step % cfg.record_every == 0 || last) {
            const double h_now = record(dt);
            if (!std::isfinite(h_now) || h_now > h_threshold) {
                result.outcome = Outcome::BlowUpDetected;
                result.t_stop = t;
                break;
            }
        }
    }
    if (cfg.snapshot_every > 0 &&
        (result.snapshots.empty() || result.snapshots.back().first != t))
        snapshot();
    fill_iddot_fd(result.series);
    result.final_state = std::move(state);
    return result;
}

// Drift of the closed-form stationary pair under the full integrator: the
// maximum over recorded samples of the relative L2 deviation per component.
inline double static_solution_check(const GroundState& gs, double t_end, double dt) {
    if (t_end == 0.0) return 0.0;
    IntegratorConfig cfg;
    cfg.dt0 = dt;
    cfg.dt_min = dt * 1e-8;
    cfg.t_end = t_end;
    cfg.cfl_c = 1e9;  // fixed-step run
    cfg.record_every = 25;
    const FieldPair<RadialGrid> W = gs.as_pair();
    const RadialGrid& g = *gs.grid;
    RField ref_u(g.n), ref_v(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        ref_u[j] = std::norm(W.u[j]);
        ref_v[j] = std::norm(W.v[j]);
    }
    const double nu = std::sqrt(integrate(ref_u, g));
    const double nv = std::sqrt(integrate(ref_v, g));
    double worst = 0.0;
    auto watch = [&](double, const FieldPair<RadialGrid>& fp) {
        RField du(g.n), dv(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            du[j] = std::norm(fp.u[j] - W.u[j]);
            dv[j] = std::norm(fp.v[j] - W.v[j]);
        }
        worst = std::max(worst, std::sqrt(integrate(du, g)) / nu);
        worst = std::max(worst, std::sqrt(integrate(dv, g)) / nv);
    };
    evolve(W, cfg, 0.0, std::function<void(double, const FieldPair<RadialGrid>&)>(watch));
    return worst;
}

}  // namespace nls6
