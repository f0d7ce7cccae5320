#pragma once

// Batch sweeps over the rescaled-ground-state family cW on a radial grid.
// Rows are fully independent simulations, so they run on a small thread pool;
// the radial integrator touches no shared mutable state. Results are written
// back by sweep index and the summary is assembled single-threaded in index
// order, so the output bytes are identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nls6/diagnostics.hpp"
#include "nls6/dynamics.hpp"
#include "nls6/ground_state.hpp"
#include "nls6/io/series_io.hpp"

namespace nls6 {

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    // Inclusive endpoints with a half-step slack so "0.2:1.6:0.1" lands on 1.6
    // despite accumulated rounding.
    std::vector<double> values() const {
        if (!(step > 0.0) || !(stop >= start))
            throw std::invalid_argument("sweep: need start <= stop and step > 0");
        std::vector<double> cs;
        for (int i = 0;; ++i) {
            const double c = start + step * i;
            if (c > stop + 0.5 * step) break;
            cs.push_back(c);
        }
        return cs;
    }
};

// "c=0.2:1.6:0.1" -> SweepSpec{0.2, 1.6, 0.1}
inline SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || text.substr(0, eq) != "c")
        throw std::invalid_argument("sweep: expected c=start:stop:step, got '" + text + "'");
    const std::string body = text.substr(eq + 1);
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("sweep: expected c=start:stop:step, got '" + text + "'");
    SweepSpec s;
    std::size_t used = 0;
    try {
        s.start = std::stod(body.substr(0, c1), &used);
        if (used != c1) throw std::invalid_argument("trailing");
        s.stop = std::stod(body.substr(c1 + 1, c2 - c1 - 1), &used);
        if (used != c2 - c1 - 1) throw std::invalid_argument("trailing");
        s.step = std::stod(body.substr(c2 + 1), &used);
        if (used != body.size() - c2 - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::invalid_argument("sweep: expected c=start:stop:step, got '" + text + "'");
    }
    if (!std::isfinite(s.start) || !std::isfinite(s.stop) || !std::isfinite(s.step))
        throw std::invalid_argument("sweep: bounds must be finite");
    s.values();  // validate ordering and step sign now
    return s;
}

struct BatchConfig {
    double kappa = 0.5;
    SweepSpec sweep;
    std::size_t n = 8192;
    double r_max = 400.0;
    double dt0 = 1e-3;
    double dt_min = 1e-8;
    double t_end = 20.0;
    std::size_t record_every = 10;
    double blowup_H_factor = 5.0;
    double R_cut = 50.0;  // cut-off virial radius for the per-sample driver
    unsigned jobs = 1;
};

struct BatchRow {
    double c = 0.0;
    std::string prediction;
    std::string observed;
    std::string outcome;
    double t_stop = std::numeric_limits<double>::quiet_NaN();
    double E0 = 0.0;
    double H0 = 0.0;
    double H_max = 0.0;
    // max over resolved samples (H <= 4 H0) of K + (c^2 - 1) H_W; the trapped
    // bound predicts this stays <= 0 up to quadrature error on blow-up rows
    double K_margin = std::numeric_limits<double>::quiet_NaN();
    // max over recorded states of the cut-off virial driver at R_cut
    double driver_max = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // empty on success; failed rows still appear
};

// Resolution order: NLS6_THREADS env var, then the requested count, floor 1.
inline unsigned resolve_jobs(unsigned requested) {
    if (const char* env = std::getenv("NLS6_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return requested >= 1 ? requested : 1;
}

namespace detail {

inline BatchRow run_batch_row(const BatchConfig& bc, double c) {
    BatchRow row;
    row.c = c;
    try {
        auto grid = std::make_shared<const RadialGrid>(6, bc.n, bc.r_max);
        const GroundState gs = ground_state_closed_form(bc.kappa, grid);
        const Thresholds th = gs.thresholds();
        CField u(grid->n), v(grid->n);
        for (std::size_t j = 0; j < grid->n; ++j) {
            u[j] = Complex{c * gs.phi0[j], 0.0};
            v[j] = Complex{c * gs.psi0[j], 0.0};
        }
        const FieldPair<RadialGrid> fp =
            make_field_pair(grid, std::move(u), std::move(v), bc.kappa);

        DichotomyVerdict verdict = classify(fp, th);
        row.E0 = verdict.E0;
        row.H0 = verdict.H0;

        IntegratorConfig icfg;
        icfg.dt0 = bc.dt0;
        icfg.dt_min = bc.dt_min;
        icfg.t_end = bc.t_end;
        icfg.record_every = bc.record_every;
        icfg.blowup_H_factor = bc.blowup_H_factor;
        icfg.validate();

        const CutoffWeight weight(bc.R_cut);
        double driver_max = -std::numeric_limits<double>::infinity();
        const RunResult<RadialGrid> run = evolve<RadialGrid>(
            fp, icfg, 0.0, [&](double, const FieldPair<RadialGrid>& state) {
                driver_max = std::max(driver_max, cutoff_virial_driver(state, weight));
            });
        if (std::isfinite(driver_max)) row.driver_max = driver_max;

        verdict = confirm(run, verdict, th);
        row.prediction = to_string(verdict.prediction);
        row.observed = to_string(verdict.observed);
        row.outcome = to_string(run.outcome);
        row.t_stop = run.t_stop;

        const double delta_p = c * c - 1.0;  // exact trapping slope of the cW family
        double k_margin = -std::numeric_limits<double>::infinity();
        for (const SeriesRow& s : run.series) {
            row.H_max = std::max(row.H_max, s.H);
            if (s.H <= 4.0 * row.H0) k_margin = std::max(k_margin, s.K + delta_p * th.H_W);
        }
        if (std::isfinite(k_margin)) row.K_margin = k_margin;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace detail

inline std::vector<BatchRow> run_batch(const BatchConfig& bc) {
    const std::vector<double> cs = bc.sweep.values();
    std::vector<BatchRow> rows(cs.size());
    const unsigned jobs =
        std::min<unsigned>(resolve_jobs(bc.jobs), static_cast<unsigned>(std::max<std::size_t>(cs.size(), 1)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < cs.size(); ++i) rows[i] = detail::run_batch_row(bc, cs[i]);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cs.size()) return;
            rows[i] = detail::run_batch_row(bc, cs[i]);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return rows;
}

inline constexpr const char* batch_csv_header =
    "c,prediction,observed,outcome,t_stop,E0,H0,H_max,K_margin,driver_max,error";

inline std::string format_batch_row(const BatchRow& row) {
    std::string line;
    detail::append_g17(line, row.c);
    line += ',';
    line += row.prediction;
    line += ',';
    line += row.observed;
    line += ',';
    line += row.outcome;
    for (double x : {row.t_stop, row.E0, row.H0, row.H_max, row.K_margin, row.driver_max}) {
        line += ',';
        detail::append_g17(line, x);
    }
    line += ',';
    for (char ch : row.error)  // keep the error message inside its one cell
        line += (ch == ',' || ch == '\n' || ch == '\r') ? ';' : ch;
    return line;
}

inline void write_batch_csv(const std::string& path, const std::vector<BatchRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("batch: cannot open " + path + " for writing");
    os << batch_csv_header << '\n';
    for (const BatchRow& row : rows) os << format_batch_row(row) << '\n';
    if (!os) throw std::runtime_error("batch: write to " + path + " failed");
}

}  // namespace nls6
