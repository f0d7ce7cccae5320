#pragma once

// End-to-end single-run pipeline shared by the CLI and the acceptance suite:
// build the grid and initial data from a RunConfig, classify against the
// ground-state thresholds, integrate, confirm the prediction against the run,
// and persist series / snapshots / verdict under the configured directory.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nls6/diagnostics.hpp"
#include "nls6/dynamics.hpp"
#include "nls6/ground_state.hpp"
#include "nls6/io/config.hpp"
#include "nls6/io/series_io.hpp"
#include "nls6/io/snapshot.hpp"

namespace nls6 {

// Closed-form six-dimensional thresholds. Used whenever the run's own grid
// cannot host the ground state (tensor grids, radial d != 6); radial d = 6
// runs instead use the quadrature thresholds of their own grid so discrete
// identities close exactly.
inline Thresholds closed_form_thresholds(double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("thresholds: kappa must be positive");
    Thresholds th;
    th.H_W = 345.6 * kappa * pi * pi * pi;
    th.R_W = (2.0 / 3.0) * th.H_W;
    th.E_W = th.H_W / 3.0;
    th.C_GN = th.R_W / std::pow(th.H_W, 1.5);
    th.J_min = th.H_W * th.H_W * th.H_W / (th.R_W * th.R_W);
    return th;
}

// Threshold policy: a radial d = 6 run measures the ground state with its own
// quadrature; every other grid falls back to the closed-form constants.
inline Thresholds thresholds_for(const RunConfig& cfg, std::shared_ptr<const RadialGrid> grid) {
    if (grid->d == 6) return ground_state_closed_form(cfg.kappa, std::move(grid)).thresholds();
    return closed_form_thresholds(cfg.kappa);
}

struct SimulateReport {
    double kappa = 0.0;
    double t0 = 0.0;
    Outcome outcome = Outcome::Completed;
    double t_stop = std::numeric_limits<double>::quiet_NaN();
    DichotomyVerdict verdict;
    std::size_t rows = 0;
    double H_max = 0.0;
    std::string series_path;                  // empty when CSV output is off
    std::string verdict_path;
    std::vector<std::string> snapshot_paths;  // empty when snapshots are off
};

namespace detail {

inline std::string snapshot_basename(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.nls6snap", index);
    return buf;
}

template <class GridT>
SimulateReport simulate_on(const RunConfig& cfg, const FieldPair<GridT>& fp0, double t0,
                           const Thresholds& th) {
    SimulateReport rep;
    rep.kappa = cfg.kappa;
    rep.t0 = t0;
    rep.verdict = classify(fp0, th);

    IntegratorConfig icfg = cfg.integrator;
    if (!cfg.outputs.snapshots) icfg.snapshot_every = 0;
    RunResult<GridT> run = evolve(fp0, icfg, t0);
    rep.verdict = confirm(run, rep.verdict, th);
    rep.outcome = run.outcome;
    rep.t_stop = run.t_stop;
    rep.rows = run.series.size();
    for (const SeriesRow& row : run.series) rep.H_max = std::max(rep.H_max, row.H);

    namespace fs = std::filesystem;
    const fs::path dir(cfg.outputs.dir);
    fs::create_directories(dir);

    if (cfg.outputs.csv) {
        rep.series_path = (dir / "series.csv").string();
        write_series_csv(rep.series_path, run.series);
    }
    if (cfg.outputs.snapshots) {
        for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
            const std::string path = (dir / snapshot_basename(i)).string();
            write_snapshot(path, run.snapshots[i].second, run.snapshots[i].first);
            rep.snapshot_paths.push_back(path);
        }
    }

    nlohmann::json verdict;
    verdict["kappa"] = cfg.kappa;
    verdict["t0"] = rep.t0;
    verdict["prediction"] = to_string(rep.verdict.prediction);
    verdict["reason"] = rep.verdict.reason;
    verdict["observed"] = to_string(rep.verdict.observed);
    verdict["outcome"] = to_string(rep.outcome);
    if (std::isfinite(rep.t_stop)) verdict["t_stop"] = rep.t_stop;
    verdict["E0"] = rep.verdict.E0;
    verdict["H0"] = rep.verdict.H0;
    verdict["E_W"] = rep.verdict.E_W;
    verdict["H_W"] = rep.verdict.H_W;
    verdict["rows"] = rep.rows;
    verdict["H_max"] = rep.H_max;
    verdict["snapshots"] = rep.snapshot_paths;

    rep.verdict_path = (dir / "verdict.json").string();
    std::ofstream os(rep.verdict_path);
    if (!os) throw std::runtime_error("run: cannot open " + rep.verdict_path + " for writing");
    os << verdict.dump(2) << '\n';
    if (!os) throw std::runtime_error("run: write to " + rep.verdict_path + " failed");
    return rep;
}

inline FieldPair<RadialGrid> radial_initial_data(const RunConfig& cfg,
                                                 std::shared_ptr<const RadialGrid> grid) {
    const RadialGrid& g = *grid;
    if (cfg.init.kind == "cW") {
        const GroundState gs = ground_state_closed_form(cfg.kappa, grid);
        CField u(g.n), v(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            u[j] = Complex{cfg.init.c * gs.phi0[j], 0.0};
            v[j] = Complex{cfg.init.c * gs.psi0[j], 0.0};
        }
        return make_field_pair(grid, std::move(u), std::move(v), cfg.kappa);
    }
    if (cfg.init.kind == "gaussian") {
        for (double x : cfg.init.center)
            if (x != 0.0)
                throw std::invalid_argument("init: radial gaussian must be centered at the origin");
        for (double x : cfg.init.phase_xi)
            if (x != 0.0)
                throw std::invalid_argument("init: radial gaussian cannot carry a boost phase");
        CField u(g.n), v(g.n);
        const double inv2w2 = 1.0 / (2.0 * cfg.init.width * cfg.init.width);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double env = cfg.init.amp * std::exp(-g.r[j] * g.r[j] * inv2w2);
            u[j] = Complex{env, 0.0};
            v[j] = Complex{env, 0.0};
        }
        return make_field_pair(grid, std::move(u), std::move(v), cfg.kappa);
    }
    throw std::invalid_argument("init: unsupported kind for a radial grid: " + cfg.init.kind);
}

inline FieldPair<TensorGrid> tensor_initial_data(const RunConfig& cfg,
                                                 std::shared_ptr<const TensorGrid> grid) {
    if (cfg.init.kind != "gaussian")
        throw std::invalid_argument("init: unsupported kind for a tensor grid: " + cfg.init.kind);
    const TensorGrid& g = *grid;
    const std::size_t total = g.size();
    CField u(total), v(total);
    const double inv2w2 = 1.0 / (2.0 * cfg.init.width * cfg.init.width);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t idx[3];
        g.unflatten(flat, idx);
        double s = 0.0, phase = 0.0;
        for (int a = 0; a < g.d; ++a) {
            const double x = g.x1[idx[a]];
            const double dxc = x - cfg.init.center[static_cast<std::size_t>(a)];
            s += dxc * dxc;
            phase += cfg.init.phase_xi[static_cast<std::size_t>(a)] * x;
        }
        const double env = cfg.init.amp * std::exp(-s * inv2w2);
        u[flat] = env * std::exp(Complex{0.0, phase});
        v[flat] = env * std::exp(Complex{0.0, 2.0 * phase});
    }
    return make_field_pair(grid, std::move(u), std::move(v), cfg.kappa);
}

}  // namespace detail

// Runs one configured simulation end to end. Initial data of kind "snapshot"
// must agree with the config's grid section and kappa exactly; the run then
// resumes from the snapshot's own time.
inline SimulateReport simulate_run(const RunConfig& cfg) {
    if (cfg.init.kind == "snapshot") {
        const LoadedSnapshot snap = read_snapshot(cfg.init.path);
        if (snap.kappa != cfg.kappa)
            throw std::invalid_argument("init: snapshot kappa disagrees with the config");
        if (snap.d != cfg.grid.d || snap.n != cfg.grid.size || snap.extent != cfg.grid.extent)
            throw std::invalid_argument("init: snapshot grid disagrees with the config");
        if (cfg.grid.type == "radial") {
            if (snap.grid_type != 0)
                throw std::invalid_argument("init: snapshot grid type disagrees with the config");
            const FieldPair<RadialGrid> fp = snap.as_radial_pair();
            return detail::simulate_on(cfg, fp, snap.t, thresholds_for(cfg, fp.grid));
        }
        if (snap.grid_type != 1)
            throw std::invalid_argument("init: snapshot grid type disagrees with the config");
        const FieldPair<TensorGrid> fp = snap.as_tensor_pair();
        return detail::simulate_on(cfg, fp, snap.t, closed_form_thresholds(cfg.kappa));
    }

    if (cfg.grid.type == "radial") {
        auto grid = std::make_shared<const RadialGrid>(cfg.grid.d, cfg.grid.size, cfg.grid.extent);
        const FieldPair<RadialGrid> fp = detail::radial_initial_data(cfg, grid);
        return detail::simulate_on(cfg, fp, 0.0, thresholds_for(cfg, grid));
    }
    auto grid = std::make_shared<const TensorGrid>(cfg.grid.d, cfg.grid.size, cfg.grid.extent);
    const FieldPair<TensorGrid> fp = detail::tensor_initial_data(cfg, grid);
    return detail::simulate_on(cfg, fp, 0.0, closed_form_thresholds(cfg.kappa));
}

}  // namespace nls6
