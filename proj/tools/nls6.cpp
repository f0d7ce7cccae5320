// nls6 — command-line laboratory for the coupled quadratic Schrodinger system.
//
// Subcommands:
//   verify-ground-state   ground-state certificate (elliptic residuals, Pohozaev)
//   classify              dichotomy prediction for initial data, no simulation
//   simulate              run one configured simulation, write series/snapshots/verdict
//   batch                 sweep the cW family in parallel, write a summary CSV
//
// Exit codes: 0 success; 1 bad arguments/config; 2 certificate tolerance
// failure; 3 simulation hit the dt floor without a blow-up prediction.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nls6/diagnostics.hpp"
#include "nls6/ground_state.hpp"
#include "nls6/io/batch.hpp"
#include "nls6/io/config.hpp"
#include "nls6/io/run.hpp"

namespace {

constexpr double kPohozaevTol = 1e-6;
constexpr double kResidualTol = 1e-4;

int cmd_verify_ground_state(double kappa, std::size_t n, double r_max) {
    auto grid = std::make_shared<const nls6::RadialGrid>(6, n, r_max);
    const nls6::GroundState gs = nls6::ground_state_closed_form(kappa, grid);
    const nls6::EllipticResidual res = nls6::elliptic_residual(gs);
    const nls6::PohozaevCertificate poh = nls6::pohozaev_certificate(gs);

    nlohmann::json cert;
    cert["kappa"] = kappa;
    cert["n"] = n;
    cert["r_max"] = r_max;
    cert["H_W"] = gs.H_W;
    cert["E_W"] = gs.E_W;
    cert["R_W"] = gs.R_W;
    cert["C_GN"] = gs.C_GN;
    cert["res1"] = res.res1;
    cert["res2"] = res.res2;
    cert["pohozaev_dev"] = poh.dev;
    const bool ok = poh.dev < kPohozaevTol && res.res1 < kResidualTol && res.res2 < kResidualTol;
    cert["pass"] = ok;
    std::cout << cert.dump(2) << '\n';
    return ok ? 0 : 2;
}

// "cW:1.2" -> 1.2; anything else is malformed
double parse_cw_init(const std::string& text) {
    if (text.rfind("cW:", 0) != 0)
        throw CLI::ValidationError("--init", "expected cW:<amplitude>, got '" + text + "'");
    std::size_t used = 0;
    double c = 0.0;
    try {
        c = std::stod(text.substr(3), &used);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--init", "expected cW:<amplitude>, got '" + text + "'");
    }
    if (used != text.size() - 3 || !std::isfinite(c) || !(c > 0.0))
        throw CLI::ValidationError("--init", "expected cW:<positive amplitude>, got '" + text + "'");
    return c;
}

int cmd_classify(const std::string& config_path, const std::string& init_text, double kappa) {
    nls6::DichotomyVerdict verdict;
    double used_kappa = kappa;
    if (!config_path.empty()) {
        const nls6::RunConfig cfg = nls6::load_run_config(config_path);
        used_kappa = cfg.kappa;
        if (cfg.init.kind == "snapshot")
            throw std::invalid_argument("classify: snapshot initial data requires 'simulate'");
        if (cfg.grid.type == "radial") {
            auto grid =
                std::make_shared<const nls6::RadialGrid>(cfg.grid.d, cfg.grid.size, cfg.grid.extent);
            verdict = nls6::classify(nls6::detail::radial_initial_data(cfg, grid),
                                     nls6::thresholds_for(cfg, grid));
        } else {
            auto grid =
                std::make_shared<const nls6::TensorGrid>(cfg.grid.d, cfg.grid.size, cfg.grid.extent);
            verdict = nls6::classify(nls6::detail::tensor_initial_data(cfg, grid),
                                     nls6::closed_form_thresholds(cfg.kappa));
        }
    } else {
        const double c = parse_cw_init(init_text);
        auto grid = std::make_shared<const nls6::RadialGrid>(6, 4096, 400.0);
        const nls6::GroundState gs = nls6::ground_state_closed_form(kappa, grid);
        nls6::CField u(grid->n), v(grid->n);
        for (std::size_t j = 0; j < grid->n; ++j) {
            u[j] = nls6::Complex{c * gs.phi0[j], 0.0};
            v[j] = nls6::Complex{c * gs.psi0[j], 0.0};
        }
        verdict = nls6::classify(
            nls6::make_field_pair(grid, std::move(u), std::move(v), kappa), gs.thresholds());
    }

    nlohmann::json out;
    out["kappa"] = used_kappa;
    out["prediction"] = nls6::to_string(verdict.prediction);
    out["reason"] = verdict.reason;
    out["E0"] = verdict.E0;
    out["H0"] = verdict.H0;
    out["E_W"] = verdict.E_W;
    out["H_W"] = verdict.H_W;
    out["E0_below_E_W"] = verdict.E0 < verdict.E_W;
    out["H0_below_H_W"] = verdict.H0 < verdict.H_W;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const std::string& config_path) {
    const nls6::RunConfig cfg = nls6::load_run_config(config_path);
    const nls6::SimulateReport rep = nls6::simulate_run(cfg);
    std::cout << "outcome: " << nls6::to_string(rep.outcome)
              << "  prediction: " << nls6::to_string(rep.verdict.prediction)
              << "  observed: " << nls6::to_string(rep.verdict.observed) << '\n';
    if (!rep.series_path.empty()) std::cout << "series:  " << rep.series_path << '\n';
    std::cout << "verdict: " << rep.verdict_path << '\n';
    const bool numerical_failure = rep.outcome == nls6::Outcome::DtFloor &&
                                   rep.verdict.prediction != nls6::Prediction::BlowUp;
    return numerical_failure ? 3 : 0;
}

int cmd_batch(const std::string& sweep_text, double kappa, unsigned jobs, std::size_t n,
              double r_max, double dt0, double t_end, const std::string& out_path) {
    nls6::BatchConfig bc;
    bc.sweep = nls6::parse_sweep(sweep_text);
    bc.kappa = kappa;
    bc.jobs = jobs;
    bc.n = n;
    bc.r_max = r_max;
    bc.dt0 = dt0;
    bc.t_end = t_end;
    const std::vector<nls6::BatchRow> rows = nls6::run_batch(bc);
    nls6::write_batch_csv(out_path, rows);
    std::size_t failed = 0;
    for (const nls6::BatchRow& row : rows)
        if (!row.error.empty()) ++failed;
    std::cout << "wrote " << rows.size() << " rows to " << out_path;
    if (failed) std::cout << " (" << failed << " failed; see the error column)";
    std::cout << '\n';
    return 0;  // all rows were produced, failures are recorded per row
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the coupled quadratic Schrodinger system"};
    app.require_subcommand(1);

    // verify-ground-state
    double vg_kappa = 1.0;
    std::size_t vg_n = 16384;
    double vg_rmax = 400.0;
    CLI::App* verify = app.add_subcommand(
        "verify-ground-state", "emit the ground-state certificate as JSON");
    verify->add_option("--kappa", vg_kappa, "coupling constant (> 0)");
    verify->add_option("--n", vg_n, "radial cells");
    verify->add_option("--rmax", vg_rmax, "domain radius");

    // classify
    std::string cl_config, cl_init;
    double cl_kappa = 0.5;
    CLI::App* classify = app.add_subcommand(
        "classify", "predict scatter/blow-up for initial data without simulating");
    CLI::Option* cl_config_opt = classify->add_option("--config", cl_config, "run config JSON");
    CLI::Option* cl_init_opt =
        classify->add_option("--init", cl_init, "inline initial data, e.g. cW:1.2");
    classify->add_option("--kappa", cl_kappa, "coupling constant for --init");
    cl_config_opt->excludes(cl_init_opt);

    // simulate
    std::string sim_config;
    CLI::App* simulate = app.add_subcommand("simulate", "run one configured simulation");
    simulate->add_option("--config", sim_config, "run config JSON")->required();

    // batch
    std::string ba_sweep, ba_out = "batch_summary.csv";
    double ba_kappa = 0.5, ba_rmax = 400.0, ba_dt0 = 1e-3, ba_tend = 20.0;
    unsigned ba_jobs = 1;
    std::size_t ba_n = 8192;
    CLI::App* batch = app.add_subcommand("batch", "sweep the cW family, write a summary CSV");
    batch->add_option("--sweep", ba_sweep, "sweep spec c=start:stop:step")->required();
    batch->add_option("--kappa", ba_kappa, "coupling constant");
    batch->add_option("--jobs", ba_jobs, "worker threads (NLS6_THREADS overrides)");
    batch->add_option("--n", ba_n, "radial cells per run");
    batch->add_option("--rmax", ba_rmax, "domain radius per run");
    batch->add_option("--dt0", ba_dt0, "initial time step");
    batch->add_option("--t-end", ba_tend, "horizon per run");
    batch->add_option("--out", ba_out, "summary CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;  // --help exits 0, any parse failure exits 1
    }

    try {
        if (verify->parsed()) {
            if (!(vg_kappa > 0.0)) {
                std::cerr << "verify-ground-state: kappa must be positive\n";
                return 1;
            }
            return cmd_verify_ground_state(vg_kappa, vg_n, vg_rmax);
        }
        if (classify->parsed()) {
            if (cl_config.empty() && cl_init.empty()) {
                std::cerr << "classify: need --config or --init\n";
                return 1;
            }
            return cmd_classify(cl_config, cl_init, cl_kappa);
        }
        if (simulate->parsed()) return cmd_simulate(sim_config);
        if (batch->parsed())
            return cmd_batch(ba_sweep, ba_kappa, ba_jobs, ba_n, ba_rmax, ba_dt0, ba_tend, ba_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
