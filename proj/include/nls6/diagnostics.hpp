#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nls6/fft.hpp"
#include "nls6/field.hpp"
#include "nls6/functionals.hpp"
#include "nls6/operators.hpp"
#include "nls6/run_types.hpp"

namespace nls6 {

// ---------------------------------------------------------------------------
// Virial monitor: I(t) = integral |x|^2 (2 kappa |u|^2 + |v|^2),
// I' = 4 kappa Im integral (2 conj(u) grad u + conj(v) grad v) . x,
// I'' = 16 kappa H - 4 kappa d R  (the dilation commutator in dimension d; the
// cross terms Re int u^2 x.grad conj(v) cancel between the two components).
// At d = 6 this is exactly 8 kappa (2H - 3R) = 8 kappa K, the energy-critical
// form. The finite-difference I'' lives on recorded series rows (see
// fill_iddot_fd), not on a single sample.
// ---------------------------------------------------------------------------

namespace detail {

template <class GridT>
double iddot_formula(const FieldPair<GridT>& fp) {
    const int d = fp.grid->d;
    if (d == 6) return 8.0 * fp.kappa * coercivity_K(fp);  // keep the K identity bitwise
    return 16.0 * fp.kappa * kinetic(fp) - 4.0 * fp.kappa * static_cast<double>(d) * potential(fp);
}

}  // namespace detail

struct VirialSample {
    double t = 0.0;
    double I = 0.0;
    double Idot = 0.0;
    double Iddot_formula = 0.0;
    double Iddot_fd = std::numeric_limits<double>::quiet_NaN();
};

inline VirialSample virial_sample(const FieldPair<RadialGrid>& fp, double t) {
    const RadialGrid& g = *fp.grid;
    VirialSample s;
    s.t = t;
    const CField du = radial_derivative(fp.u, g);
    const CField dv = radial_derivative(fp.v, g);
    RField wdens(g.n), ddens(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double r = g.r[j];
        wdens[j] = r * r * (2.0 * fp.kappa * std::norm(fp.u[j]) + std::norm(fp.v[j]));
        // grad f . x = r f'(r) for radial f
        ddens[j] = r * (2.0 * std::imag(std::conj(fp.u[j]) * du[j]) +
                        std::imag(std::conj(fp.v[j]) * dv[j]));
    }
    s.I = integrate(wdens, g);
    s.Idot = 4.0 * fp.kappa * integrate(ddens, g);
    s.Iddot_formula = detail::iddot_formula(fp);
    return s;
}

inline VirialSample virial_sample(const FieldPair<TensorGrid>& fp, double t) {
    const TensorGrid& g = *fp.grid;
    VirialSample s;
    s.t = t;
    RField wdens(g.size(), 0.0), ddens(g.size(), 0.0);
    std::size_t idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double x2 = 0.0;
        for (int a = 0; a < g.d; ++a) x2 += g.x1[idx[a]] * g.x1[idx[a]];
        wdens[i] = x2 * (2.0 * fp.kappa * std::norm(fp.u[i]) + std::norm(fp.v[i]));
    }
    for (int a = 0; a < g.d; ++a) {
        const CField du = gradient_axis(fp.u, g, a);
        const CField dv = gradient_axis(fp.v, g, a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.unflatten(i, idx);
            ddens[i] += g.x1[idx[a]] * (2.0 * std::imag(std::conj(fp.u[i]) * du[i]) +
                                        std::imag(std::conj(fp.v[i]) * dv[i]));
        }
    }
    s.I = integrate(wdens, g);
    s.Idot = 4.0 * fp.kappa * integrate(ddens, g);
    s.Iddot_formula = detail::iddot_formula(fp);
    return s;
}

// Non-uniform centered second difference of the I column; endpoints stay NaN.
inline void fill_iddot_fd(std::vector<SeriesRow>& rows) {
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const double t0 = rows[i - 1].t, t1 = rows[i].t, t2 = rows[i + 1].t;
        const double h01 = t1 - t0, h12 = t2 - t1, h02 = t2 - t0;
        if (!(h01 > 0.0) || !(h12 > 0.0)) continue;
        rows[i].Iddot_fd = 2.0 * (rows[i - 1].I / (h01 * h02) - rows[i].I / (h12 * h01) +
                                  rows[i + 1].I / (h12 * h02));
    }
}

// ---------------------------------------------------------------------------
// Cut-off virial weight a(x) = R^2 Gamma(|x|^2 / R^2) with Gamma the concave
// C^2 blend: identity below 1, constant 2 above 3, and on [1,3] the polynomial
// p(s) = 1 + 2s - 2s^3 + s^4 in s = (rho-1)/2. This is the blend matching
// value, slope and curvature at both ends (the s^5 coefficient solves to zero).
// ---------------------------------------------------------------------------

struct CutoffWeight {
    double R_cut = 0.0;

    explicit CutoffWeight(double R) : R_cut(R) {
        if (!(R > 0.0) || !std::isfinite(R))
            throw std::invalid_argument("CutoffWeight: R_cut must be positive");
    }

    // derivatives are with respect to rho = |x|^2 / R_cut^2
    static double G0(double rho) {
        if (rho <= 1.0) return rho;
        if (rho >= 3.0) return 2.0;
        const double s = 0.5 * (rho - 1.0);
        return 1.0 + s * (2.0 + s * s * (-2.0 + s));
    }
    static double G1(double rho) {
        if (rho <= 1.0) return 1.0;
        if (rho >= 3.0) return 0.0;
        const double s = 0.5 * (rho - 1.0);
        return 0.5 * (2.0 + s * s * (-6.0 + 4.0 * s));
    }
    static double G2(double rho) {
        if (rho <= 1.0 || rho >= 3.0) return 0.0;
        const double s = 0.5 * (rho - 1.0);
        return 0.25 * (-12.0 * s + 12.0 * s * s);
    }
    static double G3(double rho) {
        if (rho <= 1.0 || rho >= 3.0) return 0.0;
        const double s = 0.5 * (rho - 1.0);
        return 0.125 * (-12.0 + 24.0 * s);
    }
    static double G4(double rho) {
        if (rho <= 1.0 || rho >= 3.0) return 0.0;
        return 0.0625 * 24.0;
    }
};

// Exact second-derivative expression of the localized virial with weight a:
//   8k int (|u'|^2 + (k/2)|v'|^2) a''(r)
// - 2k int (|u|^2 + (k/2)|v|^2) lap(lap a)
// - 2k Re int conj(v) u^2 lap a,
// with every derivative of a evaluated analytically from the blend. Reduces to
// 8k(2H - 3R) when the field's support sits inside {rho <= 1}, where a = |x|^2.
inline double cutoff_virial_driver(const FieldPair<RadialGrid>& fp, const CutoffWeight& w) {
    const RadialGrid& g = *fp.grid;
    if (g.d != 6)
        throw std::invalid_argument("cutoff_virial_driver: bilaplacian tables assume d = 6");
    const double k = fp.kappa;
    const double R2 = w.R_cut * w.R_cut;
    const CField du = radial_derivative(fp.u, g);
    const CField dv = radial_derivative(fp.v, g);
    RField dens(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double rho = g.r[j] * g.r[j] / R2;
        const double g1 = CutoffWeight::G1(rho), g2 = CutoffWeight::G2(rho);
        const double g3 = CutoffWeight::G3(rho), g4 = CutoffWeight::G4(rho);
        const double app = 2.0 * g1 + 4.0 * rho * g2;    // a''(r)
        const double lap = 12.0 * g1 + 4.0 * rho * g2;   // lap a, d = 6
        const double d1 = 16.0 * g2 + 4.0 * rho * g3;    // d(lap a)/drho
        const double d2 = 20.0 * g3 + 4.0 * rho * g4;
        const double bilap = (12.0 * d1 + 4.0 * rho * d2) / R2;
        const double grad_part = std::norm(du[j]) + 0.5 * k * std::norm(dv[j]);
        const double mass_part = std::norm(fp.u[j]) + 0.5 * k * std::norm(fp.v[j]);
        const double pot_part = std::real(std::conj(fp.v[j]) * fp.u[j] * fp.u[j]);
        dens[j] = 8.0 * k * grad_part * app - 2.0 * k * mass_part * bilap -
                  2.0 * k * pot_part * lap;
    }
    return integrate(dens, g);
}

// ---------------------------------------------------------------------------
// Frequency scale: smallest dyadic N = 2^k whose kinetic spectral tail above N
// is at most eta. The reporting convention keeps the raw N (modulus C == 1).
// ---------------------------------------------------------------------------

namespace detail {

// modes: (|xi|, kinetic weight at that mode). Returns the first rung of the
// dyadic ladder whose strict-above tail is <= eta; the ladder starts below the
// lowest positive mode ("eta >= total" then answers with the smallest rung)
// and a rung above xi_max always succeeds with an empty tail.
inline double smallest_dyadic(const std::vector<std::pair<double, double>>& modes,
                              double xi_min_pos, double xi_max, double eta) {
    const int k_lo = static_cast<int>(std::floor(std::log2(xi_min_pos))) - 1;
    const int k_hi = static_cast<int>(std::ceil(std::log2(xi_max))) + 1;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double N = std::ldexp(1.0, k);
        KahanSum tail;
        for (const auto& [xi, wt] : modes)
            if (xi > N) tail.add(wt);
        if (tail.value() <= eta) return N;
    }
    return std::ldexp(1.0, k_hi);
}

}  // namespace detail

inline double frequency_scale(const FieldPair<TensorGrid>& fp, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("frequency_scale: eta must be positive");
    const TensorGrid& g = *fp.grid;
    CField fu = fp.u, fv = fp.v;
    fft_forward(fu, g);
    fft_forward(fv, g);
    const double norm = g.cell_volume() / static_cast<double>(g.size());
    std::vector<std::pair<double, double>> modes(g.size());
    std::size_t idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double xi2 = 0.0;
        for (int a = 0; a < g.d; ++a) xi2 += g.xi1[idx[a]] * g.xi1[idx[a]];
        modes[i] = {std::sqrt(xi2),
                    norm * xi2 * (std::norm(fu[i]) + 0.5 * fp.kappa * std::norm(fv[i]))};
    }
    const double xi_min = 2.0 * pi / g.L;
    const double xi_max = g.xi_max() * std::sqrt(static_cast<double>(g.d));
    return detail::smallest_dyadic(modes, xi_min, xi_max, eta);
}

// Radial surrogate: expand sqrt(w_j) f_j in the sine basis sin(xi_k r_j),
// xi_k = pi (k+1)/r_max, which diagonalizes the Dirichlet flat Laplacian on the
// cell-centered grid. Orthogonality gives Parseval weights 1/(2n) per mode
// (1/(4n) for the alternating top mode). The surrogate is exactly covariant
// under the lab's rescaling (same n, r_max/lambda): mode weights are reused at
// xi' = lambda xi, so dyadic answers scale by exactly lambda.
inline double frequency_scale(const FieldPair<RadialGrid>& fp, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("frequency_scale: eta must be positive");
    const RadialGrid& g = *fp.grid;
    const std::size_t n = g.n;
    RField re(n), im(n), yre(n), yim(n);
    std::vector<std::pair<double, double>> modes(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = pi * static_cast<double>(k + 1) / g.r_max;
        modes[k] = {xi, 0.0};
    }
    auto accumulate = [&](const CField& f, double weight) {
        for (std::size_t j = 0; j < n; ++j) {
            const double sw = std::sqrt(g.w[j]);
            re[j] = f[j].real() * sw;
            im[j] = f[j].imag() * sw;
        }
        dst2(re, yre);
        dst2(im, yim);
        for (std::size_t k = 0; k < n; ++k) {
            const double parseval = (k + 1 == n) ? 1.0 / (4.0 * n) : 1.0 / (2.0 * n);
            const double xi = modes[k].first;
            modes[k].second += weight * parseval * xi * xi * (yre[k] * yre[k] + yim[k] * yim[k]);
        }
    };
    accumulate(fp.u, 1.0);
    accumulate(fp.v, 0.5 * fp.kappa);
    const double xi_min = pi / g.r_max;
    const double xi_max = pi * static_cast<double>(n) / g.r_max;
    return detail::smallest_dyadic(modes, xi_min, xi_max, eta);
}

// ---------------------------------------------------------------------------
// Spatial center (kinetic-density centroid) and the kinetic tail outside a
// radius about it. Radial pairs are centered at the origin by symmetry.
// ---------------------------------------------------------------------------

inline std::array<double, 3> spatial_center(const FieldPair<RadialGrid>&) {
    return {0.0, 0.0, 0.0};
}

inline std::array<double, 3> spatial_center(const FieldPair<TensorGrid>& fp) {
    const TensorGrid& g = *fp.grid;
    const RField dens = kinetic_density(fp);
    std::array<double, 3> c{0.0, 0.0, 0.0};
    const double total = integrate(dens, g);
    if (!(total > 0.0)) return c;
    std::size_t idx[3];
    for (int a = 0; a < g.d; ++a) {
        RField momd(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.unflatten(i, idx);
            momd[i] = g.x1[idx[a]] * dens[i];
        }
        c[static_cast<std::size_t>(a)] = integrate(momd, g) / total;
    }
    return c;
}

inline double tail_mass(const FieldPair<RadialGrid>& fp, double radius) {
    const RadialGrid& g = *fp.grid;
    RField dens = kinetic_density(fp);
    for (std::size_t j = 0; j < g.n; ++j)
        if (g.r[j] < radius) dens[j] = 0.0;
    return integrate(dens, g);
}

inline double tail_mass(const FieldPair<TensorGrid>& fp, double radius) {
    const TensorGrid& g = *fp.grid;
    const auto c = spatial_center(fp);
    RField dens = kinetic_density(fp);
    std::size_t idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double d2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            const double dx = g.x1[idx[a]] - c[static_cast<std::size_t>(a)];
            d2 += dx * dx;
        }
        if (d2 < radius * radius) dens[i] = 0.0;
    }
    return integrate(dens, g);
}

// ---------------------------------------------------------------------------
// Scattering-size accounting over a recorded series. S_accum is cumulative, so
// a window is a difference of (linearly interpolated) endpoint values, which
// makes adjacent windows add up exactly.
// ---------------------------------------------------------------------------

inline double scattering_size_window(const std::vector<SeriesRow>& series, double t_a,
                                     double t_b) {
    if (series.size() < 2) throw std::out_of_range("scattering_size_window: series too short");
    if (!(t_a < t_b)) throw std::out_of_range("scattering_size_window: need t_a < t_b");
    const double t0 = series.front().t, t1 = series.back().t;
    const double slack = 1e-12 * (1.0 + std::abs(t1));
    if (t_a < t0 - slack || t_b > t1 + slack)
        throw std::out_of_range("scattering_size_window: window outside series");
    auto S_at = [&](double t) {
        if (t <= series.front().t) return series.front().S_accum;
        if (t >= series.back().t) return series.back().S_accum;
        std::size_t lo = 0, hi = series.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (series[mid].t <= t ? lo : hi) = mid;
        }
        const double span = series[hi].t - series[lo].t;
        const double f = span > 0.0 ? (t - series[lo].t) / span : 0.0;
        return series[lo].S_accum + f * (series[hi].S_accum - series[lo].S_accum);
    };
    return S_at(t_b) - S_at(t_a);
}

// ---------------------------------------------------------------------------
// Dichotomy classifier and its empirical confirmation.
// ---------------------------------------------------------------------------

enum class Prediction { Scatter, BlowUp, Outside };
enum class Observed { ScatterSupported, BlowUpConfirmed, Inconclusive };

struct DichotomyVerdict {
    Prediction prediction = Prediction::Outside;
    std::string reason;  // populated for Outside
    double E0 = 0.0, H0 = 0.0;
    double E_W = 0.0, H_W = 0.0;
    Observed observed = Observed::Inconclusive;
};

// Sub-threshold dichotomy: Scatter iff E0 < E_W and H0 < H_W, BlowUp iff
// E0 < E_W and H0 > H_W. Data at the kinetic threshold itself is excluded
// (the trapped flow never touches H_W), as is energy at or above E_W.
template <class GridT>
DichotomyVerdict classify(const FieldPair<GridT>& fp, const Thresholds& th) {
    DichotomyVerdict v;
    v.E0 = energy(fp);
    v.H0 = kinetic(fp);
    v.E_W = th.E_W;
    v.H_W = th.H_W;
    if (std::abs(v.H0 - th.H_W) < 1e-6 * th.H_W) {
        v.prediction = Prediction::Outside;
        v.reason = "threshold-degenerate";
    } else if (v.E0 >= th.E_W) {
        v.prediction = Prediction::Outside;
        v.reason = "energy above threshold";
    } else if (v.H0 < th.H_W) {
        v.prediction = Prediction::Scatter;
    } else {
        v.prediction = Prediction::BlowUp;
    }
    return v;
}

// Empirical check of a prediction against a finished run. Scattering can only
// be "supported" on a finite horizon: the run must complete, stay below the
// kinetic threshold, and show decaying windowed scattering size over the final
// third. Anything else that is not a fired blow-up indicator is inconclusive.
template <class GridT>
DichotomyVerdict confirm(const RunResult<GridT>& run, DichotomyVerdict v, const Thresholds& th) {
    v.observed = Observed::Inconclusive;
    if (run.outcome == Outcome::BlowUpDetected) {
        v.observed = Observed::BlowUpConfirmed;
        return v;
    }
    if (run.outcome != Outcome::Completed || run.series.size() < 4) return v;
    for (const SeriesRow& row : run.series)
        if (!(row.H < th.H_W)) return v;
    const double t0 = run.series.front().t, t1 = run.series.back().t;
    const double span = t1 - t0;
    if (!(span > 0.0)) return v;
    const double a = t1 - span / 3.0;
    const double mid = 0.5 * (a + t1);
    const double w1 = scattering_size_window(run.series, a, mid);
    const double w2 = scattering_size_window(run.series, mid, t1);
    if (w2 <= w1 + 1e-12 * (1.0 + std::abs(w1))) v.observed = Observed::ScatterSupported;
    return v;
}

inline const char* to_string(Prediction p) {
    switch (p) {
        case Prediction::Scatter: return "Scatter";
        case Prediction::BlowUp: return "BlowUp";
        default: return "Outside";
    }
}

inline const char* to_string(Observed o) {
    switch (o) {
        case Observed::ScatterSupported: return "ScatterSupported";
        case Observed::BlowUpConfirmed: return "BlowUpConfirmed";
        default: return "Inconclusive";
    }
}

}  // namespace nls6
