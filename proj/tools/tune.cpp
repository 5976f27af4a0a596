// Developer calibration harness: runs the built-in scenarios with overridable
// knobs and prints the probe quantities used for tuning. Not part of the
// shipped workflows.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "cablelife/cablelife.hpp"

using namespace cablelife;

static double arg_d(int argc, char** argv, const char* key, double dflt) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], key) == 0) return std::atof(argv[i + 1]);
    return dflt;
}
static int arg_i(int argc, char** argv, const char* key, int dflt) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], key) == 0) return std::atoi(argv[i + 1]);
    return dflt;
}
static bool has(int argc, char** argv, const char* key) {
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], key) == 0) return true;
    return false;
}

static void print_emax_history(const RadialMesh& mesh, const TransientSolution& sol) {
    for (const auto& snap : sol.snapshots) {
        double emax = 0;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < mesh.size(); ++i)
            if (std::abs(snap.field.E[i]) > emax) {
                emax = std::abs(snap.field.E[i]);
                imax = i;
            }
        std::printf("t=%10.1f s  E_max=%9.4f kV/mm  at node %3zu (x/d=%.3f)\n", snap.t,
                    emax / 1e6, imax, mesh.thickness_fraction(imax));
    }
}

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "validate";

    if (mode == "validate") {
        ValidationScenario v = validation_scenario();
        const double rin = arg_d(argc, argv, "--rin", v.geometry.r_inner);
        v.geometry.r_inner = rin;
        v.geometry.r_outer = rin + 4.5e-3;
        v.params.set_s_base(arg_d(argc, argv, "--sbase", v.params.S0_base));
        v.params.rho_e0t = arg_d(argc, argv, "--cap-e", v.params.rho_e0t);
        v.params.rho_h0t = arg_d(argc, argv, "--cap-h", v.params.rho_h0t);
        v.params.a_trap = arg_d(argc, argv, "--a", v.params.a_trap);
        v.params.B_e = arg_d(argc, argv, "--be", v.params.B_e);
        v.params.B_h = arg_d(argc, argv, "--bh", v.params.B_h);
        const int nodes = arg_i(argc, argv, "--nodes", static_cast<int>(v.nodes));

        const RadialMesh mesh = build_mesh(v.geometry, static_cast<std::size_t>(nodes));
        BctOptions opt;
        opt.diffusion = !has(argc, argv, "--no-diffusion");
        opt.safety = arg_d(argc, argv, "--safety", opt.safety);
        opt.source_fraction = arg_d(argc, argv, "--srcfrac", opt.source_fraction);
        const double t_end = arg_d(argc, argv, "--t-end", 10000.0);
        std::vector<double> snaps = v.times;
        if (t_end != 10000.0) {
            snaps.clear();
            for (double t = 0; t <= t_end; t += t_end / 20.0) snaps.push_back(t);
        }
        const TransientSolution sol =
            simulate_bct(mesh, v.params, v.program(t_end), t_end, snaps, opt);
        print_emax_history(mesh, sol);
        if (has(argc, argv, "--dump")) {
            for (const auto& snap : sol.snapshots) {
                std::printf("# t=%g\n# i x/d E_kVmm rho_em rho_hm rho_et rho_ht\n", snap.t);
                for (std::size_t i = 0; i < mesh.size(); i += 2)
                    std::printf("%3zu %.3f %9.4f %10.3e %10.3e %10.3e %10.3e\n", i,
                                mesh.thickness_fraction(i), snap.field.E[i] / 1e6,
                                snap.state.rho_e_mu[i], snap.state.rho_h_mu[i],
                                snap.state.rho_e_t[i], snap.state.rho_h_t[i]);
            }
            std::printf("injected_h=%.6e C/m^3(vol-int) extracted_h=%.6e\n",
                        sol.ledger.injected_h, sol.ledger.extracted_h);
        }
        std::printf("steps=%ld dt=[%.3g, %.3g] clamps=%ld balance_err=%.3g\n", sol.steps,
                    sol.dt_smallest, sol.dt_largest, sol.ledger.clamp_events,
                    sol.ledger.max_balance_error);
        if (!sol.snapshots.empty()) {
            std::printf("ref:  ");
            for (std::size_t k = 0; k < v.ref_emax.size() && k < sol.snapshots.size(); ++k)
                std::printf("%.2f ", v.ref_emax[k] / 1e6);
            std::printf("kV/mm\ngot:  ");
            for (const auto& s : sol.snapshots) {
                double emax = 0;
                for (double e : s.field.E) emax = std::max(emax, std::abs(e));
                std::printf("%.2f ", emax / 1e6);
            }
            std::printf("kV/mm\n");
        }
        return 0;
    }

    if (mode == "case") {
        CaseStudy c = case_study();
        c.params.set_s_base(arg_d(argc, argv, "--sbase", c.params.S0_base));
        c.params.rho_e0t = arg_d(argc, argv, "--cap-e", c.params.rho_e0t);
        c.params.rho_h0t = arg_d(argc, argv, "--cap-h", c.params.rho_h0t);
        c.params.a_trap = arg_d(argc, argv, "--a", c.params.a_trap);
        const int nodes = arg_i(argc, argv, "--nodes", static_cast<int>(c.nodes));
        const double U = has(argc, argv, "--tt") ? c.U_tt : c.U0;
        const double t_end = arg_d(argc, argv, "--t-end", 16.0 * 3600.0);

        const RadialMesh mesh = build_mesh(c.geometry, static_cast<std::size_t>(nodes));
        const LoadProgram prog = constant_program(U, c.T_design_in, c.T_design_out, t_end);
        std::vector<double> snaps;
        for (double t = 0; t <= t_end; t += 1800.0) snaps.push_back(t);
        BctOptions opt;
        opt.progress = [](double t, double te) {
            std::fprintf(stderr, "  ... t=%.0f/%.0f s\n", t, te);
        };
        const TransientSolution sol = simulate_bct(mesh, c.params, prog, t_end, snaps, opt);
        print_emax_history(mesh, sol);
        std::printf("steps=%ld dt=[%.3g, %.3g] clamps=%ld balance_err=%.3g\n", sol.steps,
                    sol.dt_smallest, sol.dt_largest, sol.ledger.clamp_events,
                    sol.ledger.max_balance_error);
        return 0;
    }

    std::fprintf(stderr, "usage: tune validate|case [knobs]\n");
    return 2;
}
