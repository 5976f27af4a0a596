#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cablelife/cablelife.hpp"

using namespace cablelife;
using Catch::Approx;

namespace {

BctParams quiet_params() {
    // valid parameter set with trapping/recombination switched off; the high
    // electron injection barrier leaves holes as the only active carrier
    BctParams p;
    p.w_inj_e = 1.9;
    p.w_inj_h = 1.0;
    p.w_mob_e = 0.65;
    p.w_mob_h = 0.65;
    p.w_tr_e = 0.9;
    p.w_tr_h = 0.9;
    p.B_e = 0;
    p.B_h = 0;
    p.set_s_base(0.0);
    return p;
}

BctParams literature_params() {
    BctParams p;
    p.w_inj_e = 1.27;
    p.w_inj_h = 1.16;
    p.w_mob_e = 0.71;
    p.w_mob_h = 0.65;
    p.w_tr_e = 0.96;
    p.w_tr_h = 0.99;
    p.B_e = 0.1;
    p.B_h = 0.2;
    p.set_s_base(4e-3);
    return p;
}

} // namespace

TEST_CASE("schottky injection against the closed-form reference", "[bct]") {
    const double eps = 2.3 * constants().eps0;
    // reference value from an independent high-precision evaluation
    CHECK(schottky_flux(4e7, 293.15, 1.22, 1.0, eps) ==
          Approx(5.7427775858884916e-8).epsilon(1e-12));

    // lowering the barrier by 0.1 eV multiplies the flux by exp(0.1 q / kbt)
    const double ratio = schottky_flux(4e7, 293.15, 1.12, 1.0, eps) /
                         schottky_flux(4e7, 293.15, 1.22, 1.0, eps);
    CHECK(ratio == Approx(52.381832497410563).epsilon(1e-12));

    CHECK(schottky_flux(0.0, 293.15, 1.22, 1.0, eps) == 0.0);
    CHECK(schottky_flux(-4e7, 293.15, 1.22, 1.0, eps) == 0.0);
    // an offset factor above the barrier-lowering exponential clamps to zero
    CHECK(schottky_flux(1.0, 293.15, 1.22, 10.0, eps) == 0.0);
    CHECK(schottky_flux(4e7, 400.0, 1.22, 1.0, eps) >
          schottky_flux(4e7, 293.15, 1.22, 1.0, eps));
    CHECK_THROWS_AS(schottky_flux(4e7, 0.0, 1.22, 1.0, eps), std::invalid_argument);
}

TEST_CASE("hopping mobility matches the sinh law and its zero-field limit", "[bct]") {
    // below the series threshold the zero-field limit applies
    CHECK(hopping_mobility(1e-3, 293.15, 0.71, 1e-9) ==
          Approx(1.5040818937608213e-16).epsilon(1e-12));
    CHECK(hopping_mobility(4e7, 293.15, 0.71, 1e-9) ==
          Approx(1.6662088809907995e-16).epsilon(1e-12));
    CHECK(hopping_mobility(-4e7, 293.15, 0.71, 1e-9) ==
          hopping_mobility(4e7, 293.15, 0.71, 1e-9));
    CHECK(hopping_mobility(1e7, 293.15, 0.71, 1e-9) <
          hopping_mobility(4e7, 293.15, 0.71, 1e-9));
    CHECK_THROWS_AS(hopping_mobility(4e7, -1.0, 0.71, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(hopping_mobility(4e7, 293.15, 0.71, 0.0), std::invalid_argument);
}

TEST_CASE("detrapping rate is the attempt frequency times the Boltzmann factor", "[bct]") {
    // zero barrier leaves the bare attempt-to-escape frequency kbt/h
    CHECK(detrapping_coeff(293.15, 0.0) == Approx(6108254896003.478).epsilon(1e-12));
    CHECK(detrapping_coeff(338.15, 0.96) == Approx(0.034683536436698283).epsilon(1e-12));
    CHECK(detrapping_coeff(350.0, 0.96) > detrapping_coeff(300.0, 0.96));
    CHECK_THROWS_AS(detrapping_coeff(0.0, 0.96), std::invalid_argument);
}

TEST_CASE("recombination rates add the Langevin term per mobile species", "[bct]") {
    const double eps = 2.3 * constants().eps0;
    BctParams p;
    p.S0_base = 1.0;
    p.S1_base = 2.0;
    p.S2_base = 3.0;
    p.S3_base = 4.0;

    const RecombRates none = recombination_rates(0.0, 0.0, p, eps);
    CHECK(none.S0 == 1.0);
    CHECK(none.S1 == 2.0);
    CHECK(none.S2 == 3.0);
    CHECK(none.S3 == 4.0);

    p.set_s_base(0.0);
    const RecombRates lang = recombination_rates(1e-14, 1e-14, p, eps);
    CHECK(lang.S0 == 0.0);
    CHECK(lang.S1 == Approx(4.9104742059696483e-4).epsilon(1e-12));
    CHECK(lang.S2 == Approx(4.9104742059696483e-4).epsilon(1e-12));
    CHECK(lang.S3 == Approx(2 * 4.9104742059696483e-4).epsilon(1e-12));

    // mobile-mobile Langevin term equals the sum of the single-mobile ones
    const RecombRates mixed = recombination_rates(2e-15, 7e-15, p, eps);
    CHECK(mixed.S3 == Approx(mixed.S1 + mixed.S2).epsilon(1e-14));
}

TEST_CASE("source terms: trapping saturation and pair bookkeeping", "[bct]") {
    BctParams p;
    p.B_e = 2.0;
    p.B_h = 1.5;
    p.rho_e0t = 10.0;
    p.rho_h0t = 10.0;
    const RecombRates off{};

    SECTION("all species absent gives zero sources") {
        const SourceTerms s = source_terms({0, 0, 0, 0}, off, 0.3, 0.3, p);
        CHECK(s.s_e_mu == 0.0);
        CHECK(s.s_e_t == 0.0);
        CHECK(s.s_h_mu == 0.0);
        CHECK(s.s_h_t == 0.0);
    }

    SECTION("pure trapping moves charge from mobile to trapped") {
        const SourceTerms s = source_terms({5.0, 4.0, 2.5, 0.0}, off, 0.0, 0.0, p);
        CHECK(s.s_e_mu == Approx(-2.0 * 5.0 * 0.75).epsilon(1e-14));
        CHECK(s.s_e_t == Approx(+2.0 * 5.0 * 0.75).epsilon(1e-14));
        CHECK(s.s_h_mu == Approx(-1.5 * 4.0 * 1.0).epsilon(1e-14));
        CHECK(s.s_h_t == Approx(+1.5 * 4.0 * 1.0).epsilon(1e-14));
    }

    SECTION("full traps stop trapping; detrapping keeps draining them") {
        const SourceTerms s = source_terms({4.0, 0.0, 10.0, 0.0}, off, 0.3, 0.0, p);
        CHECK(s.s_e_mu == Approx(0.3 * 10.0).epsilon(1e-14));
        CHECK(s.s_e_t == Approx(-0.3 * 10.0).epsilon(1e-14));
    }

    SECTION("recombination removes equal amounts from both partners") {
        RecombRates r{};
        r.S1 = 0.5; // mobile electron / trapped hole channel
        BctParams q = p;
        q.B_e = q.B_h = 0;
        const SourceTerms s = source_terms({2.0, 0.0, 0.0, 3.0}, r, 0.0, 0.0, q);
        CHECK(s.s_e_mu == Approx(-0.5 * 2.0 * 3.0).epsilon(1e-14));
        CHECK(s.s_h_t == Approx(-0.5 * 2.0 * 3.0).epsilon(1e-14));
        CHECK(s.s_e_t == 0.0);
        CHECK(s.s_h_mu == 0.0);

        RecombRates r3{};
        r3.S3 = 0.1; // mobile-mobile channel
        const SourceTerms s3 = source_terms({2.0, 5.0, 0.0, 0.0}, r3, 0.0, 0.0, q);
        CHECK(s3.s_e_mu == Approx(-0.1 * 2.0 * 5.0).epsilon(1e-14));
        CHECK(s3.s_h_mu == Approx(-0.1 * 2.0 * 5.0).epsilon(1e-14));
    }
}

TEST_CASE("one explicit step reproduces the donor-cell update", "[bct]") {
    const Geometry geo = make_planar(200e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 10);
    const std::size_t n = mesh.size();
    const double dx = mesh.dx();
    const double eps = geo.epsilon();
    const BctParams p = quiet_params();
    const std::vector<double> T(n, 300.0);

    ChargeState st = ChargeState::zero(n, 0.0);
    const std::vector<double> rho_h = {1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.04};
    st.rho_h_mu = rho_h;

    FieldProfile fp;
    fp.E.assign(n, 2e7);
    fp.U_applied = 2e7 * geo.thickness();

    BctOptions opt;
    opt.diffusion = false;

    const double mu = hopping_mobility(2e7, 300.0, p.w_mob_h, p.a_trap);
    const double v = mu * 2e7;
    const double lim = stability_limit(mesh, st, fp, T, p, opt);
    const double dt = 0.5 * lim;
    REQUIRE(dt > 0.0);

    ConservationLedger ledger;
    const ChargeState out = advance_charge(mesh, st, fp, T, p, dt, opt, &ledger);

    // independent reconstruction of the upwind update (donor node is the
    // upstream one for E > 0; electrode cells have half width)
    const double J_h = schottky_flux(2e7, 300.0, p.w_inj_h, p.f_s, eps);
    const double J_e = schottky_flux(2e7, 300.0, p.w_inj_e, p.f_s, eps);
    CHECK(out.rho_h_mu[0] ==
          Approx(rho_h[0] + dt * (J_h - v * rho_h[0]) / (dx / 2)).epsilon(1e-12));
    for (std::size_t i = 1; i + 1 < n; ++i)
        CHECK(out.rho_h_mu[i] ==
              Approx(rho_h[i] + dt * v * (rho_h[i - 1] - rho_h[i]) / dx).epsilon(1e-12));
    CHECK(out.rho_h_mu[n - 1] ==
          Approx(rho_h[n - 1] + dt * v * (rho_h[n - 2] - rho_h[n - 1]) / (dx / 2))
              .epsilon(1e-12));

    // electrons enter only through the outer electrode in this field
    CHECK(out.rho_e_mu[n - 1] == Approx(dt * J_e / (dx / 2)).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(out.rho_e_mu[i] == 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(out.rho_e_t[i] == 0.0);
        CHECK(out.rho_h_t[i] == 0.0);
    }

    CHECK(ledger.injected_h == Approx(dt * J_h).epsilon(1e-12));
    CHECK(ledger.injected_e == Approx(dt * J_e).epsilon(1e-12));
    CHECK(ledger.extracted_h == Approx(dt * v * rho_h[n - 1]).epsilon(1e-12));
    CHECK(ledger.clamp_events == 0);

    CHECK_THROWS_AS(advance_charge(mesh, st, fp, T, p, 1.01 * lim, opt),
                    std::invalid_argument);
    CHECK_THROWS_AS(advance_charge(mesh, st, fp, T, p, -1.0, opt), std::invalid_argument);
}

TEST_CASE("uniform density without field or sources is a fixed point", "[bct]") {
    const Geometry geo = make_planar(200e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 12);
    const std::size_t n = mesh.size();
    const BctParams p = quiet_params();
    const std::vector<double> T(n, 300.0);

    ChargeState st = ChargeState::zero(n, 0.0);
    st.rho_h_mu.assign(n, 0.7);
    FieldProfile fp;
    fp.E.assign(n, 0.0);
    fp.U_applied = 0.0;

    const ChargeState out = advance_charge(mesh, st, fp, T, p, 1e-3);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(out.rho_h_mu[i] == 0.7);
        CHECK(out.rho_e_mu[i] == 0.0);
    }
}

TEST_CASE("mobile-mobile recombination drains both carriers equally", "[bct]") {
    const Geometry geo = make_planar(200e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 8);
    const std::size_t n = mesh.size();
    BctParams p = quiet_params();
    p.set_s_base(0.05);
    const std::vector<double> T(n, 300.0);

    ChargeState st = ChargeState::zero(n, 0.0);
    st.rho_e_mu.assign(n, 0.4);
    st.rho_h_mu.assign(n, 0.4);
    FieldProfile fp;
    fp.E.assign(n, 0.0);

    const double dt = 1e-3;
    const ChargeState out = advance_charge(mesh, st, fp, T, p, dt);
    const double mu0 = hopping_mobility(0.0, 300.0, p.w_mob_e, p.a_trap);
    const double S3 = p.S3_base + 2 * mu0 / geo.epsilon();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(out.rho_e_mu[i] == Approx(0.4 - dt * S3 * 0.16).epsilon(1e-12));
        CHECK(out.rho_e_mu[i] == Approx(out.rho_h_mu[i]).epsilon(1e-15));
        CHECK(out.rho_e_t[i] == 0.0);
    }
}

TEST_CASE("stable step respects the hard stability limit", "[bct]") {
    const Geometry geo = make_cylindrical(10e-3, 14.5e-3, 2.3);
    const RadialMesh mesh = build_mesh(geo, 30);
    const std::size_t n = mesh.size();
    const BctParams p = literature_params();
    const auto T = temperature_profile(338.15, 318.15, mesh);
    const FieldProfile fp = laplacian_field(geo, 90e3, mesh);
    ChargeState st = ChargeState::zero(n, 0.0);
    st.rho_h_mu.assign(n, 0.5);

    const double dt = stable_dt(mesh, st, fp, T, p);
    const double lim = stability_limit(mesh, st, fp, T, p);
    CHECK(dt <= lim);
    CHECK(dt > 0);
    CHECK_NOTHROW(advance_charge(mesh, st, fp, T, p, dt));
}

TEST_CASE("short transient keeps the charge books balanced", "[bct]") {
    const Geometry geo = make_planar(150e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 20);
    const BctParams p = literature_params();
    const LoadProgram prog = constant_program(5250.0, 330.0, 330.0, 200.0);

    const TransientSolution sol = simulate_bct(mesh, p, prog, 200.0, {0.0, 100.0, 200.0});
    REQUIRE(sol.snapshots.size() == 3);
    CHECK(sol.snapshots[0].t == 0.0);
    CHECK(sol.snapshots[1].t == 100.0);
    CHECK(sol.snapshots[2].t == 200.0);
    CHECK(sol.steps > 0);
    CHECK(sol.dt_smallest <= sol.dt_largest);

    for (const auto& snap : sol.snapshots)
        CHECK_NOTHROW(check_voltage_constraint(mesh, snap.field));

    // charge entered the insulation and the ledger accounts for it
    CHECK(sol.ledger.injected_h > 0.0);
    double total_h = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i)
        total_h += (sol.snapshots.back().state.rho_h_mu[i] +
                    sol.snapshots.back().state.rho_h_t[i]) *
                   mesh.cell_volume(i);
    CHECK(total_h > 0.0);
    CHECK(sol.ledger.max_balance_error < 1e-6);
    CHECK(sol.ledger.clamp_events == 0);
}

TEST_CASE("zero applied voltage keeps the insulation charge-free", "[bct]") {
    const Geometry geo = make_planar(150e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 10);
    const BctParams p = literature_params();
    const LoadProgram prog = constant_program(0.0, 330.0, 330.0, 10.0);

    const TransientSolution sol = simulate_bct(mesh, p, prog, 10.0, {10.0});
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        CHECK(sol.snapshots.back().state.rho_h_mu[i] == 0.0);
        CHECK(sol.snapshots.back().state.rho_e_mu[i] == 0.0);
        CHECK(sol.snapshots.back().field.E[i] == 0.0);
    }
    CHECK(sol.ledger.injected_e == 0.0);
    CHECK(sol.ledger.injected_h == 0.0);
}

TEST_CASE("transient argument validation", "[bct]") {
    const Geometry geo = make_planar(150e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 10);
    const BctParams p = literature_params();
    const LoadProgram prog = constant_program(1000.0, 330.0, 330.0, 10.0);

    CHECK_THROWS_AS(simulate_bct(mesh, p, prog, 0.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_bct(mesh, p, prog, 10.0, {20.0}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_bct(mesh, p, prog, 10.0, {-1.0}), std::invalid_argument);
    BctParams bad = p;
    bad.w_inj_e = 0.0;
    CHECK_THROWS_AS(simulate_bct(mesh, bad, prog, 10.0, {10.0}), std::invalid_argument);
}

TEST_CASE("diffusion stays orders below drift in a uniform profile", "[bct]") {
    const Geometry geo = make_planar(200e-6, 2.3);
    const RadialMesh mesh = build_mesh(geo, 10);
    const std::size_t n = mesh.size();
    const BctParams p = quiet_params();
    const std::vector<double> T(n, 300.0);

    ChargeState st = ChargeState::zero(n, 0.0);
    st.rho_h_mu.assign(n, 0.5);
    FieldProfile fp;
    fp.E.assign(n, 2e7);

    const auto ratio = diffusion_drift_ratio(mesh, st, fp, p, T);
    for (double r : ratio) CHECK(r == 0.0); // zero gradient, finite drift

    // sloped profile: ratio equals vt * |grad rho| / (rho |E|) for one species
    st.rho_h_mu = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
    const auto sloped = diffusion_drift_ratio(mesh, st, fp, p, T);
    const double vt = thermal_voltage(300.0);
    const double expected = vt * (0.1 / mesh.dx()) / (0.8 * 2e7);
    CHECK(sloped[2] == Approx(expected).epsilon(1e-12));

    FieldProfile off;
    off.E.assign(n, 0.0);
    const auto dead = diffusion_drift_ratio(mesh, st, off, p, T);
    for (double r : dead) CHECK(std::isnan(r)); // zero drift reports the sentinel

    CHECK_THROWS_AS(diffusion_drift_ratio(mesh, st, fp, p, std::vector<double>(3, 300.0)),
                    std::invalid_argument);
}
