#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cablelife/cablelife.hpp"

using namespace cablelife;
using Catch::Approx;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = std::string("domain_") + name;
    std::ofstream out(path);
    out << body;
    return path;
}

} // namespace

TEST_CASE("physical constants are the defined exact values", "[domain]") {
    const auto& c = constants();
    CHECK(c.q == 1.602176634e-19);
    CHECK(c.k_B == 1.380649e-23);
    CHECK(c.h == 6.62607015e-34);
    CHECK(c.eps0 == 8.8541878128e-12);
    CHECK(c.A0 == 1.2e6);
}

TEST_CASE("geometry constructors and validation", "[domain]") {
    const Geometry cyl = make_cylindrical(10e-3, 14.5e-3, 2.3);
    CHECK(cyl.thickness() == Approx(4.5e-3).epsilon(1e-15));
    CHECK(cyl.epsilon() == Approx(2.3 * 8.8541878128e-12).epsilon(1e-15));
    CHECK(cyl.weight(0.012) == 0.012);

    const Geometry pla = make_planar(200e-6, 2.3);
    CHECK(pla.r_inner == 0.0);
    CHECK(pla.thickness() == Approx(200e-6).epsilon(1e-15));
    CHECK(pla.weight(123.0) == 1.0);

    CHECK_THROWS_AS(make_cylindrical(0.0, 14.5e-3, 2.3), std::invalid_argument);
    CHECK_THROWS_AS(make_cylindrical(10e-3, 10e-3, 2.3), std::invalid_argument);
    CHECK_THROWS_AS(make_cylindrical(14.5e-3, 10e-3, 2.3), std::invalid_argument);
    CHECK_THROWS_AS(make_cylindrical(10e-3, 14.5e-3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_planar(0.0, 2.3), std::invalid_argument);
    CHECK_THROWS_AS(make_planar(200e-6, 0.9), std::invalid_argument);
}

TEST_CASE("uniform mesh spans the insulation with half cells at the ends", "[domain]") {
    const Geometry geo = make_cylindrical(10e-3, 14.5e-3, 2.3);
    const RadialMesh mesh = build_mesh(geo, 10);

    REQUIRE(mesh.size() == 10);
    CHECK(mesh.nodes.front() == geo.r_inner);
    CHECK(mesh.nodes.back() == geo.r_outer);
    const double h = geo.thickness() / 9.0;
    CHECK(mesh.dx() == Approx(h).epsilon(1e-14));
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
        CHECK(mesh.spacing[i] == Approx(h).epsilon(1e-12));

    // cell widths tile the thickness exactly
    double tiled = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) tiled += mesh.cell_width(i);
    CHECK(tiled == Approx(geo.thickness()).epsilon(1e-13));
    CHECK(mesh.cell_width(0) == Approx(0.5 * h).epsilon(1e-13));
    CHECK(mesh.cell_width(4) == Approx(h).epsilon(1e-13));

    // cell volumes telescope to the full shell area per radian
    double vol = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) vol += mesh.cell_volume(i);
    CHECK(vol == Approx(0.5 * (geo.r_outer * geo.r_outer - geo.r_inner * geo.r_inner))
                     .epsilon(1e-13));

    CHECK(mesh.thickness_fraction(0) == 0.0);
    CHECK(mesh.thickness_fraction(9) == 1.0);
    CHECK(mesh.face(0) == Approx(geo.r_inner + 0.5 * h).epsilon(1e-13));

    CHECK_THROWS_AS(build_mesh(geo, 2), std::invalid_argument);
}

TEST_CASE("planar cell volume equals cell width", "[domain]") {
    const RadialMesh mesh = build_mesh(make_planar(200e-6, 2.3), 7);
    for (std::size_t i = 0; i < mesh.size(); ++i)
        CHECK(mesh.cell_volume(i) == Approx(mesh.cell_width(i)).epsilon(1e-14));
}

TEST_CASE("temperature profile is logarithmic in a shell and linear in a slab", "[domain]") {
    const Geometry cyl = make_cylindrical(10e-3, 14.5e-3, 2.3);
    CHECK(temperature_at(338.15, 318.15, cyl, 10e-3) == Approx(338.15).epsilon(1e-15));
    CHECK(temperature_at(338.15, 318.15, cyl, 14.5e-3) == Approx(318.15).epsilon(1e-15));
    // reference value computed from the closed-form log profile
    CHECK(temperature_at(338.15, 318.15, cyl, 12e-3) ==
          Approx(328.33625192715398).epsilon(1e-13));
    CHECK_THROWS_AS(temperature_at(338.15, 318.15, cyl, 9.9e-3), std::invalid_argument);
    CHECK_THROWS_AS(temperature_at(338.15, 318.15, cyl, 14.6e-3), std::invalid_argument);

    const Geometry pla = make_planar(200e-6, 2.3);
    CHECK(temperature_at(350.0, 300.0, pla, 100e-6) == Approx(325.0).epsilon(1e-14));
    CHECK(temperature_at(350.0, 300.0, pla, 50e-6) == Approx(337.5).epsilon(1e-14));

    const RadialMesh mesh = build_mesh(cyl, 5);
    const auto T = temperature_profile(338.15, 318.15, mesh);
    REQUIRE(T.size() == 5);
    CHECK(T.front() == Approx(338.15).epsilon(1e-15));
    CHECK(T.back() == Approx(318.15).epsilon(1e-15));
    for (std::size_t i = 1; i < T.size(); ++i) CHECK(T[i] < T[i - 1]);
}

TEST_CASE("charge state construction and net charge sign convention", "[domain]") {
    ChargeState st = ChargeState::zero(4, 0.0);
    REQUIRE(st.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(st.rho_e_mu[i] == 0.0);
        CHECK(st.rho_h_mu[i] == 0.0);
        CHECK(st.rho_e_t[i] == 0.0);
        CHECK(st.rho_h_t[i] == 0.0);
    }

    st.rho_e_mu[0] = 1.0;
    st.rho_h_mu[0] = 3.0;
    st.rho_e_t[0] = 0.25;
    st.rho_h_t[0] = 0.5;
    const auto net = st.net_charge();
    // all species stored as magnitudes; electrons count negative
    CHECK(net[0] == Approx(-1.0 + 3.0 - 0.25 + 0.5).epsilon(1e-15));
    CHECK(net[1] == 0.0);

    const BctParams caps; // default trap caps of 100 C/m^3
    ChargeState bad = st;
    bad.rho_h_mu[2] = -1e-6;
    CHECK_THROWS_AS(bad.validate(caps), std::invalid_argument);
    ChargeState over = st;
    over.rho_e_t[1] = 101.0;
    CHECK_THROWS_AS(over.validate(caps), std::invalid_argument);
    ChargeState mismatched = st;
    mismatched.rho_h_t.resize(3);
    CHECK_THROWS_AS(mismatched.validate(caps), std::invalid_argument);
    CHECK_NOTHROW(ChargeState::make({0, 0}, {1, 2}, {3, 4}, {5, 6}, 0.0, caps));
    CHECK_THROWS_AS(ChargeState::make({0, 0}, {-1, 2}, {3, 4}, {5, 6}, 0.0, caps),
                    std::invalid_argument);
}

TEST_CASE("transport parameter validation", "[domain]") {
    BctParams p;
    p.w_inj_e = 1.27;
    p.w_inj_h = 1.16;
    p.w_mob_e = 0.71;
    p.w_mob_h = 0.65;
    p.w_tr_e = 0.96;
    p.w_tr_h = 0.99;
    p.B_e = 0.1;
    p.B_h = 0.2;
    CHECK_NOTHROW(p.validate());

    p.set_s_base(0.045);
    CHECK(p.S0_base == 0.045);
    CHECK(p.S1_base == 0.045);
    CHECK(p.S2_base == 0.045);
    CHECK(p.S3_base == 0.045);

    BctParams bad = p;
    bad.w_tr_h = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.w_inj_e = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.B_e = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.S2_base = -1e-9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.rho_e0t = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.a_trap = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("conductivity and life parameter validation", "[domain]") {
    KleinParams k{3e-2, 0.70, 1e-7};
    CHECK_NOTHROW(k.validate());
    CHECK_THROWS_AS(KleinParams{}.validate(), std::invalid_argument);

    LifeParams lp;
    lp.L_D = 40 * 365.25 * 86400.0;
    lp.E_D = 2e7;
    lp.T_D = 343.15;
    lp.n_D = 10;
    lp.B = 12430;
    CHECK_NOTHROW(lp.validate());
    LifeParams bad = lp;
    bad.n_D = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = lp;
    bad.b_ET = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = lp;
    bad.b_ET = 100; // synergism without a reference field
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("load program interpolation holds the last sample", "[domain]") {
    LoadProgram prog;
    prog.samples = {{0, 0, 300, 300}, {100, 1000, 320, 310}, {200, 1000, 340, 320}};
    CHECK_NOTHROW(prog.validate());
    CHECK(prog.duration() == 200.0);
    CHECK(prog.min_sample_spacing() == 100.0);

    const LoadSample mid = prog.at(50.0);
    CHECK(mid.U == Approx(500.0).epsilon(1e-14));
    CHECK(mid.T_inner == Approx(310.0).epsilon(1e-14));
    CHECK(mid.T_outer == Approx(305.0).epsilon(1e-14));

    const LoadSample past = prog.at(1000.0);
    CHECK(past.U == 1000.0);
    CHECK(past.T_inner == 340.0);
    CHECK(past.t == 1000.0);

    const LoadSample before = prog.at(-5.0);
    CHECK(before.U == 0.0);

    LoadProgram bad = prog;
    bad.samples[1].t = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = prog;
    bad.samples[2].U = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = prog;
    bad.samples[0].T_outer = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = prog;
    bad.samples.resize(1);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = prog;
    bad.samples[0].t = 10.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("constant program spans two samples", "[domain]") {
    const LoadProgram prog = constant_program(90e3, 338.15, 318.15, 3600.0);
    CHECK_NOTHROW(prog.validate());
    CHECK(prog.duration() == 3600.0);
    CHECK(prog.at(1234.0).U == 90e3);
    CHECK(prog.at(1234.0).T_inner == 338.15);
    CHECK(prog.at(1234.0).T_outer == 318.15);
}

TEST_CASE("load program file round trip and parse errors", "[domain]") {
    const std::string good = write_temp("prog_good.csv",
                                        "# comment\n"
                                        "t_s,U_V,T_inner_K,T_outer_K\n"
                                        "0, 0, 300, 300\n"
                                        "60, 90e3, 338.15, 318.15\n"
                                        "120, 90e3, 338.15, 318.15\n");
    const LoadProgram prog = load_program_from_file(good);
    REQUIRE(prog.samples.size() == 3);
    CHECK(prog.samples[1].U == 90e3);
    CHECK(prog.samples[2].t == 120.0);
    CHECK(prog.at(30.0).U == Approx(45e3).epsilon(1e-14));
    std::remove(good.c_str());

    const std::string no_header = write_temp("prog_nohdr.csv", "0, 0, 300, 300\n");
    CHECK_THROWS_AS(load_program_from_file(no_header), ParseError);
    std::remove(no_header.c_str());

    const std::string bad_num = write_temp("prog_badnum.csv",
                                           "t_s,U_V,T_inner_K,T_outer_K\n"
                                           "0, zero, 300, 300\n"
                                           "60, 0, 300, 300\n");
    CHECK_THROWS_AS(load_program_from_file(bad_num), ParseError);
    std::remove(bad_num.c_str());

    const std::string short_row = write_temp("prog_short.csv",
                                             "t_s,U_V,T_inner_K,T_outer_K\n"
                                             "0, 0, 300\n");
    CHECK_THROWS_AS(load_program_from_file(short_row), ParseError);
    std::remove(short_row.c_str());

    CHECK_THROWS_AS(load_program_from_file("no_such_file.csv"), std::invalid_argument);
}

TEST_CASE("parse errors carry the line number", "[domain]") {
    const ParseError e("bad token", 17);
    CHECK(std::string(e.what()).find("line 17") != std::string::npos);
}
