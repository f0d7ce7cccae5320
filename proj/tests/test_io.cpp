// Persistence and configuration layer: strict JSON configs, the fixed-schema
// series CSV, the binary snapshot format, the end-to-end run pipeline, batch
// sweeps, and the installed command-line surface (exercised as subprocesses).

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "nls6/ground_state.hpp"
#include "nls6/io/batch.hpp"
#include "nls6/io/config.hpp"
#include "nls6/io/run.hpp"
#include "nls6/io/series_io.hpp"
#include "nls6/io/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nls6;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct ScratchDir {
    fs::path path;
    ScratchDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("nls6_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    REQUIRE(os);
    os << bytes;
}

json base_config() {
    return json{{"kappa", 0.5},
                {"grid", {{"type", "radial"}, {"d", 6}, {"n", 512}, {"r_max", 50.0}}},
                {"init", {{"kind", "cW"}, {"c", 0.5}}}};
}

int run_cli(const std::string& args, const std::string& stdout_path) {
    const std::string cmd =
        std::string(NLS6_CLI_PATH) + " " + args + " > " + stdout_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

FieldPair<RadialGrid> random_radial_pair(std::size_t n, double r_max, unsigned seed) {
    auto grid = std::make_shared<const RadialGrid>(6, n, r_max);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CField u(n), v(n);
    for (std::size_t j = 0; j < n; ++j) {
        u[j] = Complex{dist(rng), dist(rng)};
        v[j] = Complex{dist(rng), dist(rng)};
    }
    return make_field_pair(grid, std::move(u), std::move(v), 0.5);
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig JSON
// ---------------------------------------------------------------------------

TEST_CASE("run config: full radial document parses with defaults") {
    json doc = base_config();
    doc["integrator"] = {{"dt0", 2e-3}, {"t_end", 0.5}, {"record_every", 5}};
    doc["outputs"] = {{"dir", "runs/a"}, {"snapshots", true}};
    const RunConfig cfg = parse_run_config(doc);
    CHECK(cfg.kappa == 0.5);
    CHECK(cfg.grid.type == "radial");
    CHECK(cfg.grid.d == 6);
    CHECK(cfg.grid.size == 512);
    CHECK(cfg.grid.extent == 50.0);
    CHECK(cfg.init.kind == "cW");
    CHECK(cfg.init.c == 0.5);
    CHECK(cfg.integrator.dt0 == 2e-3);
    CHECK(cfg.integrator.t_end == 0.5);
    CHECK(cfg.integrator.record_every == 5);
    CHECK(cfg.integrator.dt_min == IntegratorConfig{}.dt_min);  // untouched default
    CHECK(cfg.outputs.dir == "runs/a");
    CHECK(cfg.outputs.csv);        // default
    CHECK(cfg.outputs.snapshots);  // overridden
}

TEST_CASE("run config: tensor grid and gaussian init") {
    json doc{{"kappa", 0.5},
             {"grid", {{"type", "tensor"}, {"d", 2}, {"m", 64}, {"L", 16.0}}},
             {"init",
              {{"kind", "gaussian"},
               {"amp", 1.2},
               {"width", 0.8},
               {"center", {1.0, -0.5}},
               {"phase_xi", {0.5, 0.0}}}}};
    const RunConfig cfg = parse_run_config(doc);
    CHECK(cfg.grid.type == "tensor");
    CHECK(cfg.grid.size == 64);
    CHECK(cfg.init.amp == 1.2);
    CHECK(cfg.init.center[0] == 1.0);
    CHECK(cfg.init.center[1] == -0.5);
    CHECK(cfg.init.center[2] == 0.0);  // padded
    CHECK(cfg.init.phase_xi[0] == 0.5);
}

TEST_CASE("run config: unknown keys are rejected at every level") {
    auto reject = [](json doc) { CHECK_THROWS_AS(parse_run_config(doc), std::invalid_argument); };
    json doc = base_config();
    doc["extra"] = 1;
    reject(doc);
    doc = base_config();
    doc["grid"]["padding"] = 2;
    reject(doc);
    doc = base_config();
    doc["init"]["amp"] = 1.0;  // not a cW key
    reject(doc);
    doc = base_config();
    doc["integrator"] = {{"dt", 1e-3}};  // misspelled dt0
    reject(doc);
    doc = base_config();
    doc["outputs"] = {{"directory", "x"}};
    reject(doc);
}

TEST_CASE("run config: missing and malformed fields are rejected") {
    auto reject = [](json doc) { CHECK_THROWS_AS(parse_run_config(doc), std::invalid_argument); };
    json doc = base_config();
    doc.erase("kappa");
    reject(doc);
    doc = base_config();
    doc["kappa"] = "half";
    reject(doc);
    doc = base_config();
    doc["kappa"] = -0.5;
    reject(doc);
    doc = base_config();
    doc["grid"]["type"] = "spherical";
    reject(doc);
    doc = base_config();
    doc["grid"].erase("r_max");
    reject(doc);
    doc = base_config();
    doc["grid"]["L"] = 10.0;  // tensor extent on a radial grid
    reject(doc);
    doc = base_config();
    doc["grid"]["n"] = -4;
    reject(doc);
    doc = base_config();
    doc["init"]["kind"] = "plane-wave";
    reject(doc);
    doc = base_config();
    doc["init"] = {{"kind", "gaussian"}, {"amp", 1.0}};  // width missing
    reject(doc);
    doc = base_config();
    doc["init"] = {{"kind", "gaussian"}, {"amp", 1.0}, {"width", 1.0}, {"center", {1, 2, 3, 4}}};
    reject(doc);
    doc = base_config();
    doc["init"] = {{"kind", "snapshot"}, {"path", ""}};
    reject(doc);
    doc = base_config();
    doc["integrator"] = {{"record_every", 0}};
    reject(doc);
    doc = base_config();
    doc["integrator"] = {{"dt0", -1e-3}};  // IntegratorConfig::validate
    reject(doc);
    doc = base_config();
    doc["outputs"] = {{"csv", "yes"}};
    reject(doc);
}

TEST_CASE("run config: file loading reports open and parse failures") {
    ScratchDir dir;
    CHECK_THROWS_AS(load_run_config(dir.file("absent.json")), std::invalid_argument);
    spit(dir.file("broken.json"), "{ not json");
    CHECK_THROWS_AS(load_run_config(dir.file("broken.json")), std::invalid_argument);
    spit(dir.file("ok.json"), base_config().dump());
    CHECK(load_run_config(dir.file("ok.json")).grid.size == 512);
}

// ---------------------------------------------------------------------------
// Series CSV
// ---------------------------------------------------------------------------

TEST_CASE("series csv: header constant and bit-exact round-trip") {
    ScratchDir dir;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    std::vector<SeriesRow> rows(17);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        SeriesRow& r = rows[i];
        r.t = 0.05 * static_cast<double>(i);
        r.M = dist(rng);
        r.E = dist(rng);
        r.H = dist(rng);
        r.R = dist(rng);
        r.K = dist(rng);
        r.P = {dist(rng), dist(rng), dist(rng)};
        r.I = dist(rng);
        r.Idot = dist(rng);
        r.Iddot_formula = dist(rng);
        r.Iddot_fd = (i == 0 || i + 1 == rows.size()) ? std::numeric_limits<double>::quiet_NaN()
                                                      : dist(rng);
        r.S_accum = std::abs(dist(rng));
        r.lambda_scale = std::ldexp(1.0, static_cast<int>(i % 7) - 3);
        r.dt = 1e-3;
    }
    const std::string path = dir.file("series.csv");
    write_series_csv(path, rows);

    const std::string text = slurp(path);
    CHECK(text.rfind(std::string(series_csv_header) + "\n", 0) == 0);

    const std::vector<SeriesRow> back = read_series_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].t == rows[i].t);
        CHECK(back[i].M == rows[i].M);
        CHECK(back[i].E == rows[i].E);
        CHECK(back[i].H == rows[i].H);
        CHECK(back[i].R == rows[i].R);
        CHECK(back[i].K == rows[i].K);
        CHECK(back[i].P == rows[i].P);
        CHECK(back[i].I == rows[i].I);
        CHECK(back[i].Idot == rows[i].Idot);
        CHECK(back[i].Iddot_formula == rows[i].Iddot_formula);
        if (std::isnan(rows[i].Iddot_fd))
            CHECK(std::isnan(back[i].Iddot_fd));
        else
            CHECK(back[i].Iddot_fd == rows[i].Iddot_fd);
        CHECK(back[i].S_accum == rows[i].S_accum);
        CHECK(back[i].lambda_scale == rows[i].lambda_scale);
        CHECK(back[i].dt == rows[i].dt);
    }
}

TEST_CASE("series csv: malformed files are rejected") {
    ScratchDir dir;
    const std::string path = dir.file("bad.csv");
    CHECK_THROWS_AS(read_series_csv(dir.file("absent.csv")), std::runtime_error);

    spit(path, "");
    CHECK_THROWS_AS(read_series_csv(path), std::runtime_error);

    spit(path, "t,M,E\n0,1,2\n");  // wrong header
    CHECK_THROWS_AS(read_series_csv(path), std::runtime_error);

    spit(path, std::string(series_csv_header) + "\n1,2,3\n");  // short row
    CHECK_THROWS_AS(read_series_csv(path), std::runtime_error);

    std::string sixteen = "1";
    for (int i = 1; i < 16; ++i) sixteen += ",1";
    spit(path, std::string(series_csv_header) + "\n" + sixteen + ",9\n");  // long row
    CHECK_THROWS_AS(read_series_csv(path), std::runtime_error);

    spit(path, std::string(series_csv_header) + "\n" + sixteen + "\n");
    CHECK(read_series_csv(path).size() == 1);
}

// ---------------------------------------------------------------------------
// Binary snapshots
// ---------------------------------------------------------------------------

TEST_CASE("snapshot: radial round-trip is bit-exact") {
    ScratchDir dir;
    const FieldPair<RadialGrid> fp = random_radial_pair(128, 40.0, 11u);
    const std::string path = dir.file("state.nls6snap");
    write_snapshot(path, fp, 1.25);

    const LoadedSnapshot snap = read_snapshot(path);
    CHECK(snap.grid_type == 0);
    CHECK(snap.d == 6);
    CHECK(snap.n == 128);
    CHECK(snap.extent == 40.0);
    CHECK(snap.kappa == 0.5);
    CHECK(snap.t == 1.25);

    const FieldPair<RadialGrid> back = snap.as_radial_pair();
    CHECK(back.grid->n == fp.grid->n);
    CHECK(back.grid->r_max == fp.grid->r_max);
    REQUIRE(back.u.size() == fp.u.size());
    for (std::size_t j = 0; j < fp.u.size(); ++j) {
        CHECK(back.u[j] == fp.u[j]);
        CHECK(back.v[j] == fp.v[j]);
    }
    CHECK_THROWS_AS(snap.as_tensor_pair(), std::runtime_error);
}

TEST_CASE("snapshot: tensor round-trip is bit-exact") {
    ScratchDir dir;
    auto grid = std::make_shared<const TensorGrid>(2, 16, 8.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    CField u(grid->size()), v(grid->size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = Complex{dist(rng), dist(rng)};
        v[j] = Complex{dist(rng), dist(rng)};
    }
    const FieldPair<TensorGrid> fp = make_field_pair(grid, u, v, 0.75);
    const std::string path = dir.file("state.nls6snap");
    write_snapshot(path, fp, -0.5);

    const LoadedSnapshot snap = read_snapshot(path);
    CHECK(snap.grid_type == 1);
    CHECK(snap.d == 2);
    CHECK(snap.n == 16);
    CHECK(snap.extent == 8.0);
    CHECK(snap.kappa == 0.75);
    CHECK(snap.t == -0.5);
    const FieldPair<TensorGrid> back = snap.as_tensor_pair();
    for (std::size_t j = 0; j < u.size(); ++j) {
        CHECK(back.u[j] == u[j]);
        CHECK(back.v[j] == v[j]);
    }
    CHECK_THROWS_AS(snap.as_radial_pair(), std::runtime_error);
}

TEST_CASE("snapshot: the file layout starts with magic, version, grid header") {
    ScratchDir dir;
    const FieldPair<RadialGrid> fp = random_radial_pair(128, 40.0, 5u);
    const std::string path = dir.file("layout.nls6snap");
    write_snapshot(path, fp, 2.0);
    const std::string bytes = slurp(path);
    // 8 magic + 4 version + 1 type + 4 d + 8 n + 8 extent + 8 kappa + 8 t + payload
    REQUIRE(bytes.size() == 49 + 2 * 128 * 16);
    CHECK(bytes.compare(0, 8, "NLS6SNAP") == 0);
    CHECK(bytes[8] == 1);   // version u32 LE, low byte first
    CHECK(bytes[9] == 0);
    CHECK(bytes[12] == 0);  // grid type: radial
    CHECK(bytes[13] == 6);  // d u32 LE
}

TEST_CASE("snapshot: corrupted files are rejected") {
    ScratchDir dir;
    const FieldPair<RadialGrid> fp = random_radial_pair(64, 20.0, 9u);
    const std::string good_path = dir.file("good.nls6snap");
    write_snapshot(good_path, fp, 0.0);
    const std::string good = slurp(good_path);
    const std::string bad_path = dir.file("bad.nls6snap");

    CHECK_THROWS_AS(read_snapshot(dir.file("absent.nls6snap")), std::runtime_error);

    std::string bad = good;
    bad[0] = 'X';  // magic
    spit(bad_path, bad);
    CHECK_THROWS_WITH(read_snapshot(bad_path), Catch::Matchers::ContainsSubstring("magic"));

    bad = good;
    bad[8] = 2;  // version
    spit(bad_path, bad);
    CHECK_THROWS_WITH(read_snapshot(bad_path), Catch::Matchers::ContainsSubstring("version"));

    bad = good;
    bad[12] = 7;  // grid type
    spit(bad_path, bad);
    CHECK_THROWS_AS(read_snapshot(bad_path), std::runtime_error);

    spit(bad_path, good.substr(0, good.size() / 2));  // truncated payload
    CHECK_THROWS_WITH(read_snapshot(bad_path), Catch::Matchers::ContainsSubstring("truncated"));

    spit(bad_path, good + "zz");  // trailing bytes
    CHECK_THROWS_WITH(read_snapshot(bad_path), Catch::Matchers::ContainsSubstring("trailing"));
}

// ---------------------------------------------------------------------------
// simulate_run pipeline
// ---------------------------------------------------------------------------

TEST_CASE("simulate_run: writes series, snapshots and verdict for a radial run") {
    ScratchDir dir;
    json doc = base_config();
    doc["init"]["c"] = 1.2;
    doc["integrator"] = {{"dt0", 1e-3}, {"t_end", 0.2}, {"record_every", 20},
                         {"snapshot_every", 100}};
    doc["outputs"] = {{"dir", dir.file("out")}, {"csv", true}, {"snapshots", true}};
    const RunConfig cfg = parse_run_config(doc);
    const SimulateReport rep = simulate_run(cfg);

    CHECK(rep.kappa == 0.5);
    CHECK(rep.t0 == 0.0);
    CHECK(to_string(rep.verdict.prediction) == std::string("BlowUp"));
    CHECK(fs::exists(rep.series_path));
    CHECK(fs::exists(rep.verdict_path));
    REQUIRE(rep.snapshot_paths.size() == 3);  // t = 0, 0.1, 0.2
    for (const std::string& p : rep.snapshot_paths) CHECK(fs::exists(p));

    const std::vector<SeriesRow> series = read_series_csv(rep.series_path);
    REQUIRE(series.size() == rep.rows);
    CHECK(series.front().t == 0.0);
    CHECK_THAT(series.back().t, Catch::Matchers::WithinAbs(0.2, 1e-12));

    const json verdict = json::parse(slurp(rep.verdict_path));
    CHECK(verdict.at("prediction") == "BlowUp");
    CHECK(verdict.at("outcome") == "Completed");
    CHECK(verdict.at("rows").get<std::size_t>() == rep.rows);
    CHECK(verdict.at("H0").get<double>() > verdict.at("H_W").get<double>());
}

TEST_CASE("simulate_run: csv toggle off leaves only the verdict") {
    ScratchDir dir;
    json doc = base_config();
    doc["integrator"] = {{"t_end", 0.05}, {"record_every", 10}};
    doc["outputs"] = {{"dir", dir.file("out")}, {"csv", false}};
    const SimulateReport rep = simulate_run(parse_run_config(doc));
    CHECK(rep.series_path.empty());
    CHECK(rep.snapshot_paths.empty());
    CHECK(!fs::exists(dir.file("out") + "/series.csv"));
    CHECK(fs::exists(rep.verdict_path));
}

TEST_CASE("simulate_run: tensor gaussian with a boost phase") {
    ScratchDir dir;
    json doc{{"kappa", 0.5},
             {"grid", {{"type", "tensor"}, {"d", 1}, {"m", 64}, {"L", 16.0}}},
             {"init",
              {{"kind", "gaussian"}, {"amp", 0.4}, {"width", 1.0}, {"phase_xi", {0.785398}}}},
             {"integrator", {{"dt0", 1e-3}, {"t_end", 0.05}, {"record_every", 10}}},
             {"outputs", {{"dir", dir.file("out")}}}};
    const SimulateReport rep = simulate_run(parse_run_config(doc));
    CHECK(rep.outcome == Outcome::Completed);
    const std::vector<SeriesRow> series = read_series_csv(rep.series_path);
    REQUIRE(!series.empty());
    CHECK(series.front().M > 0.0);
    // the boost phase carries momentum: Px = xi * M for this covariant pair
    CHECK_THAT(series.front().P[0],
               Catch::Matchers::WithinRel(0.785398 * series.front().M, 1e-10));
    CHECK(std::isfinite(rep.H_max));
    // tensor thresholds fall back to the closed form
    CHECK_THAT(rep.verdict.H_W, Catch::Matchers::WithinRel(345.6 * 0.5 * pi * pi * pi, 1e-12));
}

TEST_CASE("simulate_run: radial gaussian must stay centered and unboosted") {
    ScratchDir dir;
    json doc = base_config();
    doc["init"] = {{"kind", "gaussian"}, {"amp", 0.5}, {"width", 2.0}, {"center", {1.0}}};
    doc["outputs"] = {{"dir", dir.file("out")}};
    CHECK_THROWS_AS(simulate_run(parse_run_config(doc)), std::invalid_argument);
    doc["init"] = {{"kind", "gaussian"}, {"amp", 0.5}, {"width", 2.0}, {"phase_xi", {0.5}}};
    CHECK_THROWS_AS(simulate_run(parse_run_config(doc)), std::invalid_argument);
}

TEST_CASE("simulate_run: snapshot init must match the config grid and kappa") {
    ScratchDir dir;
    json doc = base_config();
    doc["integrator"] = {{"t_end", 0.05}, {"record_every", 10}, {"snapshot_every", 25}};
    doc["outputs"] = {{"dir", dir.file("out")}, {"snapshots", true}};
    const SimulateReport rep = simulate_run(parse_run_config(doc));
    REQUIRE(!rep.snapshot_paths.empty());

    json resume = base_config();
    resume["init"] = {{"kind", "snapshot"}, {"path", rep.snapshot_paths.front()}};
    resume["outputs"] = {{"dir", dir.file("out2")}};
    resume["integrator"] = {{"t_end", 0.02}};

    json wrong = resume;
    wrong["kappa"] = 0.6;
    CHECK_THROWS_AS(simulate_run(parse_run_config(wrong)), std::invalid_argument);

    wrong = resume;
    wrong["grid"]["n"] = 256;
    CHECK_THROWS_AS(simulate_run(parse_run_config(wrong)), std::invalid_argument);

    wrong = resume;
    wrong["grid"] = {{"type", "tensor"}, {"d", 2}, {"m", 32}, {"L", 16.0}};
    wrong["kappa"] = 0.5;
    CHECK_THROWS_AS(simulate_run(parse_run_config(wrong)), std::invalid_argument);

    // and the matching config runs from the snapshot's own time
    const SimulateReport resumed = simulate_run(parse_run_config(resume));
    CHECK(resumed.t0 == 0.0);  // first snapshot sits at t = 0
    CHECK(resumed.outcome == Outcome::Completed);
}

TEST_CASE("simulate_run: resuming from a snapshot reproduces the series over the overlap") {
    ScratchDir dir;
    json doc = base_config();  // c = 0.5, scatter branch: both legs complete
    doc["integrator"] = {{"dt0", 1e-3}, {"t_end", 0.4}, {"record_every", 10},
                         {"snapshot_every", 100}};
    doc["outputs"] = {{"dir", dir.file("whole")}, {"snapshots", true}};
    const SimulateReport whole = simulate_run(parse_run_config(doc));
    REQUIRE(whole.outcome == Outcome::Completed);
    REQUIRE(whole.snapshot_paths.size() == 5);
    const std::vector<SeriesRow> full = read_series_csv(whole.series_path);

    // resume from the middle snapshot (t = 0.2) for the remaining duration
    const LoadedSnapshot snap = read_snapshot(whole.snapshot_paths[2]);
    REQUIRE_THAT(snap.t, Catch::Matchers::WithinAbs(0.2, 1e-12));
    json resume = base_config();
    resume["init"] = {{"kind", "snapshot"}, {"path", whole.snapshot_paths[2]}};
    resume["integrator"] = {{"dt0", 1e-3}, {"t_end", 0.2}, {"record_every", 10}};
    resume["outputs"] = {{"dir", dir.file("resumed")}};
    const SimulateReport rep2 = simulate_run(parse_run_config(resume));
    REQUIRE(rep2.outcome == Outcome::Completed);
    const std::vector<SeriesRow> tail = read_series_csv(rep2.series_path);

    // align the overlap: rows of the whole run starting at the snapshot time
    std::size_t offset = 0;
    while (offset < full.size() && full[offset].t < snap.t - 1e-12) ++offset;
    REQUIRE(full.size() - offset == tail.size());
    const double s_base = full[offset].S_accum;

    auto close = [](double a, double b, double scale) {
        if (std::isnan(a) && std::isnan(b)) return true;
        return std::abs(a - b) <= 1e-10 * (1.0 + scale);
    };
    for (std::size_t i = 0; i < tail.size(); ++i) {
        const SeriesRow& a = full[offset + i];
        const SeriesRow& b = tail[i];
        REQUIRE(close(a.t, b.t, 1.0));
        CHECK(close(a.M, b.M, std::abs(a.M)));
        CHECK(close(a.E, b.E, std::abs(a.E)));
        CHECK(close(a.H, b.H, std::abs(a.H)));
        CHECK(close(a.R, b.R, std::abs(a.R)));
        CHECK(close(a.K, b.K, std::abs(a.K)));
        for (int k = 0; k < 3; ++k) CHECK(close(a.P[k], b.P[k], std::abs(a.P[k])));
        CHECK(close(a.I, b.I, std::abs(a.I)));
        CHECK(close(a.Idot, b.Idot, std::abs(a.Idot)));
        CHECK(close(a.Iddot_formula, b.Iddot_formula, std::abs(a.Iddot_formula)));
        // fd column: only stencils interior to both legs. The penultimate row's
        // stencil spans the final step, which each leg shortens to land on its
        // own horizon; that last-ulp difference is amplified by the 1/h^2 of a
        // second difference, so it is excluded along with the NaN endpoints.
        if (i > 0 && i + 2 < tail.size())
            CHECK(close(a.Iddot_fd, b.Iddot_fd, std::abs(a.Iddot_fd)));
        CHECK(close(a.S_accum, b.S_accum + s_base, std::abs(a.S_accum)));
        CHECK(close(a.lambda_scale, b.lambda_scale, std::abs(a.lambda_scale)));
        if (i > 0)  // a leg's initial record carries dt = 0 by convention
            CHECK(close(a.dt, b.dt, 1.0));
    }
}

TEST_CASE("thresholds: closed form matches the fine-grid quadrature") {
    const Thresholds closed = closed_form_thresholds(0.5);
    CHECK(closed.E_W == closed.H_W / 3.0);
    auto grid = std::make_shared<const RadialGrid>(6, 16384, 400.0);
    const Thresholds quad = ground_state_closed_form(0.5, grid).thresholds();
    CHECK_THAT(closed.H_W, Catch::Matchers::WithinRel(quad.H_W, 1e-4));
    CHECK_THAT(closed.E_W, Catch::Matchers::WithinRel(quad.E_W, 1e-4));
    CHECK_THROWS_AS(closed_form_thresholds(-1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Batch sweeps
// ---------------------------------------------------------------------------

TEST_CASE("batch: sweep text parses to inclusive endpoints") {
    const SweepSpec spec = parse_sweep("c=0.2:1.6:0.1");
    const std::vector<double> cs = spec.values();
    REQUIRE(cs.size() == 15);
    CHECK_THAT(cs.front(), Catch::Matchers::WithinAbs(0.2, 1e-12));
    CHECK_THAT(cs.back(), Catch::Matchers::WithinAbs(1.6, 1e-9));

    CHECK(parse_sweep("c=1:1:1").values().size() == 1);
    CHECK_THROWS_AS(parse_sweep("c=1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep("x=1:2:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep("c=2:1:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep("c=1:2:junk"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep("c=1:2:-0.5"), std::invalid_argument);
}

TEST_CASE("batch: rows come back in sweep order with classification data") {
    BatchConfig bc;
    bc.sweep = parse_sweep("c=0.5:1.2:0.7");
    bc.n = 256;
    bc.r_max = 30.0;
    bc.dt0 = 2e-3;
    bc.t_end = 0.4;
    bc.record_every = 10;
    bc.jobs = 2;
    const std::vector<BatchRow> rows = run_batch(bc);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error.empty());
    CHECK(rows[1].error.empty());
    CHECK_THAT(rows[0].c, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(rows[1].c, Catch::Matchers::WithinAbs(1.2, 1e-12));
    CHECK(rows[0].prediction == "Scatter");
    CHECK(rows[1].prediction == "BlowUp");
    CHECK(rows[0].H0 < rows[1].H0);
    CHECK(std::isfinite(rows[0].driver_max));
    CHECK(std::isfinite(rows[0].K_margin));
}

TEST_CASE("batch: output is independent of the worker count") {
    BatchConfig bc;
    bc.sweep = parse_sweep("c=0.4:1.0:0.2");
    bc.n = 256;
    bc.r_max = 30.0;
    bc.dt0 = 2e-3;
    bc.t_end = 0.2;
    bc.record_every = 10;

    ScratchDir dir;
    bc.jobs = 1;
    write_batch_csv(dir.file("a.csv"), run_batch(bc));
    bc.jobs = 4;
    write_batch_csv(dir.file("b.csv"), run_batch(bc));
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
}

TEST_CASE("batch: NLS6_THREADS overrides the requested worker count") {
    CHECK(resolve_jobs(3) == 3);
    CHECK(resolve_jobs(0) == 1);
    ::setenv("NLS6_THREADS", "7", 1);
    CHECK(resolve_jobs(3) == 7);
    ::setenv("NLS6_THREADS", "junk", 1);
    CHECK(resolve_jobs(3) == 3);
    ::unsetenv("NLS6_THREADS");
    CHECK(resolve_jobs(3) == 3);
}

// ---------------------------------------------------------------------------
// Command-line surface (subprocess)
// ---------------------------------------------------------------------------

TEST_CASE("cli: verify-ground-state exit codes and certificate") {
    ScratchDir dir;
    const std::string out = dir.file("out.txt");
    // healthy certificate at a mid-size grid
    CHECK(run_cli("verify-ground-state --kappa 0.5 --n 16384 --rmax 400", out) == 0);
    const json cert = json::parse(slurp(out));
    CHECK(cert.at("pass").get<bool>());
    CHECK(cert.at("pohozaev_dev").get<double>() < 1e-6);
    CHECK(cert.at("res1").get<double>() < 1e-4);
    CHECK_THAT(cert.at("H_W").get<double>() / cert.at("R_W").get<double>(),
               Catch::Matchers::WithinAbs(1.5, 1e-6));

    // under-resolved grid fails the residual tolerance
    CHECK(run_cli("verify-ground-state --n 32", out) == 2);
    CHECK(json::parse(slurp(out)).at("res1").get<double>() > 1e-4);

    // invalid inputs
    CHECK(run_cli("verify-ground-state --kappa -1", out) == 1);
    CHECK(run_cli("verify-ground-state --kappa nonsense", out) == 1);
    CHECK(run_cli("frobnicate", out) == 1);
}

TEST_CASE("cli: classify predicts without simulating") {
    ScratchDir dir;
    const std::string out = dir.file("out.txt");
    CHECK(run_cli("classify --init cW:0.5 --kappa 0.5", out) == 0);
    CHECK(json::parse(slurp(out)).at("prediction") == "Scatter");

    CHECK(run_cli("classify --init cW:1.2 --kappa 0.5", out) == 0);
    CHECK(json::parse(slurp(out)).at("prediction") == "BlowUp");

    CHECK(run_cli("classify --init cW:1.0 --kappa 0.5", out) == 0);
    {
        const json v = json::parse(slurp(out));
        CHECK(v.at("prediction") == "Outside");
        CHECK(v.at("reason") == "threshold-degenerate");
    }

    CHECK(run_cli("classify --init cW:oops", out) == 1);
    CHECK(run_cli("classify --init wrong:1.0", out) == 1);
    CHECK(run_cli("classify", out) == 1);

    // config-driven classification, no output directory appears
    json doc = base_config();
    doc["outputs"] = {{"dir", dir.file("never")}};
    spit(dir.file("c.json"), doc.dump());
    CHECK(run_cli("classify --config " + dir.file("c.json"), out) == 0);
    CHECK(json::parse(slurp(out)).at("prediction") == "Scatter");
    CHECK(!fs::exists(dir.file("never")));
}

TEST_CASE("cli: simulate writes artifacts and maps outcomes to exit codes") {
    ScratchDir dir;
    const std::string out = dir.file("out.txt");

    json doc = base_config();
    doc["init"]["c"] = 1.2;
    doc["grid"]["n"] = 1024;
    doc["grid"]["r_max"] = 80.0;
    doc["integrator"] = {{"dt0", 1e-3}, {"t_end", 12.0}, {"record_every", 50}};
    doc["outputs"] = {{"dir", dir.file("run")}};
    spit(dir.file("blowup.json"), doc.dump());
    CHECK(run_cli("simulate --config " + dir.file("blowup.json"), out) == 0);
    const json verdict = json::parse(slurp(dir.file("run") + "/verdict.json"));
    CHECK(verdict.at("prediction") == "BlowUp");
    CHECK(verdict.at("outcome") == "BlowUpDetected");
    CHECK(verdict.at("observed") == "BlowUpConfirmed");

    // a DtFloor run without a blow-up prediction exits 3
    json stiff = base_config();
    stiff["integrator"] = {{"dt0", 1e-3}, {"dt_min", 1e-4}, {"t_end", 1.0}, {"cfl_c", 1e-12}};
    stiff["outputs"] = {{"dir", dir.file("stiff")}};
    spit(dir.file("stiff.json"), stiff.dump());
    CHECK(run_cli("simulate --config " + dir.file("stiff.json"), out) == 3);
    CHECK(json::parse(slurp(dir.file("stiff") + "/verdict.json")).at("outcome") == "DtFloor");

    CHECK(run_cli("simulate --config " + dir.file("absent.json"), out) == 1);
    CHECK(run_cli("simulate", out) == 1);

    // malformed config: unknown key
    json bad = base_config();
    bad["grdi"] = 1;
    spit(dir.file("bad.json"), bad.dump());
    CHECK(run_cli("simulate --config " + dir.file("bad.json"), out) == 1);
}

TEST_CASE("cli: batch summary is deterministic across job counts") {
    ScratchDir dir;
    const std::string out = dir.file("out.txt");
    const std::string common =
        "batch --sweep c=0.5:1.2:0.7 --kappa 0.5 --n 256 --rmax 30 --dt0 2e-3 --t-end 0.3";
    CHECK(run_cli(common + " --jobs 1 --out " + dir.file("j1.csv"), out) == 0);
    CHECK(run_cli(common + " --jobs 8 --out " + dir.file("j8.csv"), out) == 0);
    const std::string j1 = slurp(dir.file("j1.csv"));
    CHECK(j1 == slurp(dir.file("j8.csv")));
    CHECK(j1.rfind(std::string(batch_csv_header) + "\n", 0) == 0);
    REQUIRE(std::count(j1.begin(), j1.end(), '\n') == 3);  // header + 2 rows

    // NLS6_THREADS override keeps the bytes identical too
    const std::string env_cmd = "NLS6_THREADS=5 " + std::string(NLS6_CLI_PATH) + " " + common +
                                " --jobs 1 --out " + dir.file("env.csv") + " > " + out + " 2>&1";
    const int status = std::system(env_cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(j1 == slurp(dir.file("env.csv")));

    CHECK(run_cli("batch --sweep c=bad --out " + dir.file("x.csv"), out) == 1);
    CHECK(run_cli("batch", out) == 1);
}
