#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include "nls6/diagnostics.hpp"
#include "nls6/functionals.hpp"
#include "nls6/ground_state.hpp"
#include "nls6/symmetry.hpp"
#include "nls6/trial_fields.hpp"

using namespace nls6;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::shared_ptr<const RadialGrid> radial(int d, std::size_t n, double rmax) {
    return std::make_shared<const RadialGrid>(d, n, rmax);
}

std::shared_ptr<const TensorGrid> tensor(int d, std::size_t m, double L) {
    return std::make_shared<const TensorGrid>(d, m, L);
}

// superpose f and its conjugate so that occupied wavenumbers come in +/- pairs:
// the field is real and stays inside the original spectral band.
FieldPair<TensorGrid> realified(const FieldPair<TensorGrid>& fp) {
    FieldPair<TensorGrid> out = fp;
    for (auto& z : out.u) z = Complex{2.0 * z.real(), 0.0};
    for (auto& z : out.v) z = Complex{2.0 * z.real(), 0.0};
    return out;
}

}  // namespace

TEST_CASE("scale transform at lambda = 1 is the identity") {
    std::mt19937_64 rng(7);
    auto fp = random_pair(radial(6, 128, 20.0), 0.5, rng);
    const auto out = scale_transform(fp, 1.0);
    CHECK(out.grid->r_max == fp.grid->r_max);
    CHECK(out.grid->n == fp.grid->n);
    for (std::size_t j = 0; j < fp.size(); ++j) {
        CHECK(out.u[j] == fp.u[j]);
        CHECK(out.v[j] == fp.v[j]);
    }
    CHECK_THROWS_AS(scale_transform(fp, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(scale_transform(fp, -2.0), std::invalid_argument);
}

TEST_CASE("critical rescaling invariances on the radial d = 6 grid") {
    std::mt19937_64 rng(11);
    auto fp = random_pair(radial(6, 512, 30.0), 0.5, rng);
    const double H = kinetic(fp), M = mass(fp), R = potential(fp);
    const auto J = action_J(fp);

    for (double lambda : {0.5, 2.0, 4.0}) {
        const auto out = scale_transform(fp, lambda);
        // dyadic lambda rescales every intermediate by an exact power of two
        CHECK_THAT(kinetic(out), WithinRel(H, 1e-14));
        CHECK_THAT(potential(out), WithinRel(R, 1e-14));
        CHECK_THAT(mass(out), WithinRel(M / (lambda * lambda), 1e-14));
        if (J) CHECK_THAT(*action_J(out), WithinRel(*J, 1e-13));
    }
    // non-dyadic factor: same invariance, ordinary roundoff
    const auto out3 = scale_transform(fp, 3.0);
    CHECK_THAT(kinetic(out3), WithinRel(H, 1e-12));
    CHECK_THAT(mass(out3), WithinRel(M / 9.0, 1e-12));
}

TEST_CASE("rescaled ground state keeps its variational signature") {
    auto gs = ground_state_closed_form(0.5, radial(6, 2048, 200.0));
    const auto W = gs.as_pair();
    const auto half = scale_transform(W, 2.0);
    // H and the 3:2 kinetic-to-potential ratio survive the rescaling; the ratio
    // tolerance is the base grid's quadrature error, not the transform's
    CHECK_THAT(kinetic(half), WithinRel(gs.H_W, 1e-6));
    CHECK_THAT(potential(half), WithinRel(gs.R_W, 1e-6));
    CHECK_THAT(kinetic(half) / potential(half), WithinRel(1.5, 2e-5));
}

TEST_CASE("subcritical scaling exponent on a tensor grid") {
    std::mt19937_64 rng(13);
    auto fp = random_pair(tensor(2, 32, 16.0), 0.5, rng);
    const double H = kinetic(fp);
    for (double lambda : {0.5, 2.0}) {
        // H(lambda^2 f(lambda x)) = lambda^{6-d} H at d = 2
        const auto out = scale_transform(fp, lambda);
        const double expected = std::pow(lambda, 4) * H;
        CHECK_THAT(kinetic(out), WithinRel(expected, 1e-13));
    }
}

TEST_CASE("boost with xi = 0 is a bitwise identity") {
    std::mt19937_64 rng(17);
    auto fp = random_pair(tensor(2, 32, 16.0), 0.5, rng);
    const auto out = galilean_boost(fp, BoostParams{});
    for (std::size_t i = 0; i < fp.size(); ++i) {
        CHECK(out.u[i] == fp.u[i]);
        CHECK(out.v[i] == fp.v[i]);
    }
}

TEST_CASE("boost composed with its inverse returns the field") {
    std::mt19937_64 rng(19);
    auto fp = random_pair(tensor(2, 32, 16.0), 0.5, rng);
    const double base = 2.0 * pi / fp.grid->L;
    BoostParams fwd, bwd;
    fwd.xi = {3.0 * base, -2.0 * base, 0.0};
    bwd.xi = {-fwd.xi[0], -fwd.xi[1], 0.0};
    const auto round_trip = galilean_boost(galilean_boost(fp, fwd), bwd);
    for (std::size_t i = 0; i < fp.size(); ++i) {
        CHECK_THAT(std::abs(round_trip.u[i] - fp.u[i]), WithinAbs(0.0, 1e-14));
        CHECK_THAT(std::abs(round_trip.v[i] - fp.v[i]), WithinAbs(0.0, 1e-14));
    }
    CHECK_THAT(mass(galilean_boost(fp, fwd)), WithinRel(mass(fp), 1e-14));
}

TEST_CASE("boost rejects off-lattice frequencies and t != 0") {
    std::mt19937_64 rng(23);
    auto fp = random_pair(tensor(2, 32, 16.0), 0.5, rng);
    BoostParams bad;
    bad.xi = {0.1234, 0.0, 0.0};  // not a multiple of 2 pi / L
    CHECK_THROWS_AS(galilean_boost(fp, bad), std::invalid_argument);
    BoostParams beyond;
    beyond.xi = {0.0, 0.0, 2.0 * pi / fp.grid->L};  // z-component on a d = 2 grid
    CHECK_THROWS_AS(galilean_boost(fp, beyond), std::invalid_argument);
    BoostParams timed;
    timed.xi = {2.0 * pi / fp.grid->L, 0.0, 0.0};
    timed.t = 0.5;
    CHECK_THROWS_AS(galilean_boost(fp, timed), std::invalid_argument);
}

TEST_CASE("boost energy identity holds to roundoff on band-limited pairs") {
    // Occupied modes must stay inside the band after the shift: kmax = 4 and
    // |k0| <= 4 keeps even the doubled phase on v below the Nyquist index.
    for (int d : {1, 2}) {
        std::mt19937_64 rng(100 + d);
        std::uniform_int_distribution<int> pick(-4, 4);
        const auto g = tensor(d, 32, 16.0);
        const double base = 2.0 * pi / g->L;
        for (int trial = 0; trial < 25; ++trial) {
            auto fp = band_limited_pair(g, 0.5, rng, 4);
            BoostParams bp;
            for (int a = 0; a < d; ++a) bp.xi[static_cast<std::size_t>(a)] = base * pick(rng);
            const auto id = boost_energy_identity_check(fp, bp);
            CHECK(id.dev <= 1e-12 * (1.0 + kinetic(fp)));
        }
    }
}

TEST_CASE("boost shifts the momentum by xi times the mass") {
    std::mt19937_64 rng(29);
    const auto g = tensor(2, 32, 16.0);
    auto fp = band_limited_pair(g, 0.5, rng, 4);
    const double base = 2.0 * pi / g->L;
    BoostParams bp;
    bp.xi = {2.0 * base, -3.0 * base, 0.0};
    const auto P0 = momentum(fp);
    const auto P1 = momentum(galilean_boost(fp, bp));
    const double M = mass(fp);
    for (std::size_t a = 0; a < 2; ++a) {
        const double expected = P0[a] + bp.xi[a] * M;
        CHECK_THAT(P1[a], WithinAbs(expected, 1e-12 * (1.0 + std::abs(expected))));
    }
}

TEST_CASE("optimal boost removes the momentum contribution to H") {
    // A real pair carries zero momentum, so after boosting by a lattice xi0 the
    // minimizer xi* = -P/M is exactly -xi0, and H drops by |P|^2 / M.
    std::mt19937_64 rng(31);
    const auto g = tensor(2, 32, 16.0);
    const auto fp = realified(band_limited_pair(g, 0.5, rng, 4));
    const auto Pbase = momentum(fp);
    CHECK_THAT(Pbase[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(Pbase[1], WithinAbs(0.0, 1e-12));

    const double base = 2.0 * pi / g->L;
    BoostParams bp;
    bp.xi = {3.0 * base, -1.0 * base, 0.0};
    const auto moving = galilean_boost(fp, bp);
    const double M = mass(moving);
    const auto P = momentum(moving);
    double p2 = 0.0;
    BoostParams undo;
    for (std::size_t a = 0; a < 3; ++a) {
        undo.xi[a] = -P[a] / M;
        p2 += P[a] * P[a];
        CHECK_THAT(undo.xi[a], WithinAbs(-bp.xi[a], 1e-9));
    }
    const double H_moving = kinetic(moving);
    const double H_rest = kinetic(galilean_boost(moving, undo));
    CHECK_THAT(H_rest, WithinAbs(H_moving - p2 / M, 1e-10 * (1.0 + H_moving)));
}

TEST_CASE("boost identity check demands mass-resonance") {
    std::mt19937_64 rng(37);
    auto fp = random_pair(tensor(2, 32, 16.0), 1.0, rng);  // kappa = 1
    BoostParams bp;
    bp.xi = {2.0 * pi / fp.grid->L, 0.0, 0.0};
    CHECK_THROWS_WITH(boost_energy_identity_check(fp, bp),
                      Catch::Matchers::ContainsSubstring("mass-resonance"));
}

TEST_CASE("lattice translation preserves every functional") {
    std::mt19937_64 rng(41);
    const auto g = tensor(2, 32, 16.0);
    auto fp = random_pair(g, 0.5, rng);
    const std::array<double, 3> x0{5.0 * g->dx, -3.0 * g->dx, 0.0};
    const auto out = translate(fp, x0);

    CHECK_THAT(mass(out), WithinRel(mass(fp), 1e-13));
    CHECK_THAT(kinetic(out), WithinRel(kinetic(fp), 1e-12));
    CHECK_THAT(potential(out), WithinAbs(potential(fp), 1e-12 * (1.0 + std::abs(potential(fp)))));
    const auto P0 = momentum(fp);
    const auto P1 = momentum(out);
    for (std::size_t a = 0; a < 2; ++a)
        CHECK_THAT(P1[a], WithinAbs(P0[a], 1e-12 * (1.0 + std::abs(P0[a]))));

    // zero shift is a bitwise identity
    const auto same = translate(fp, {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < fp.size(); ++i) CHECK(same.u[i] == fp.u[i]);

    CHECK_THROWS_AS(translate(fp, {0.3 * g->dx, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(translate(fp, {0.0, 0.0, g->dx}), std::invalid_argument);
}

TEST_CASE("translation moves the kinetic centroid by the shift") {
    const auto g = tensor(2, 64, 16.0);
    CField u(g->size()), v(g->size(), Complex{0.0, 0.0});
    std::size_t idx[3];
    for (std::size_t i = 0; i < g->size(); ++i) {
        g->unflatten(i, idx);
        const double x = g->x1[idx[0]], y = g->x1[idx[1]];
        u[i] = std::exp(-0.5 * (x * x + y * y)) * std::polar(1.0, 0.7 * x);
    }
    auto fp = make_field_pair(g, u, v, 0.5);
    const auto c0 = spatial_center(fp);
    const std::array<double, 3> x0{8.0 * g->dx, -4.0 * g->dx, 0.0};
    const auto c1 = spatial_center(translate(fp, x0));
    CHECK_THAT(c1[0] - c0[0], WithinAbs(x0[0], 1e-9));
    CHECK_THAT(c1[1] - c0[1], WithinAbs(x0[1], 1e-9));
}

TEST_CASE("one-component subfamily is preserved by the symmetries") {
    // (0, v0): the u component must remain exactly zero under every transform.
    const auto g = tensor(2, 32, 16.0);
    CField u(g->size(), Complex{0.0, 0.0});
    CField v(g->size());
    std::size_t idx[3];
    for (std::size_t i = 0; i < g->size(); ++i) {
        g->unflatten(i, idx);
        const double x = g->x1[idx[0]], y = g->x1[idx[1]];
        v[i] = 0.8 * std::exp(-0.3 * (x * x + y * y));
    }
    auto fp = make_field_pair(g, u, v, 0.5);
    BoostParams bp;
    bp.xi = {2.0 * pi / g->L, 0.0, 0.0};
    for (const auto& out :
         {scale_transform(fp, 2.0), galilean_boost(fp, bp), translate(fp, {g->dx, 0.0, 0.0})}) {
        for (const auto& z : out.u) CHECK(z == Complex{0.0, 0.0});
        CHECK(potential(out) == 0.0);
    }
}
