// cablelife CLI: validate | simulate | fit | life | compare.
// Exit codes: 0 success, 1 acceptance deviation, 2 usage/config error,
// 3 solver failure. All outputs are deterministic for a given (config, seed).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cablelife/cablelife.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cablelife;

namespace {

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config ---

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config root must be a JSON object: " + path);
    return j;
}

double jnum(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw UsageError(std::string("config key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::string jstr(const json& j, const char* key, const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_string()) throw UsageError(std::string("config key '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

Geometry geometry_from(const json& cfg, const Geometry& dflt) {
    if (!cfg.contains("geometry")) return dflt;
    const json& g = cfg.at("geometry");
    const std::string kind = jstr(g, "kind", "cylindrical");
    if (kind == "planar")
        return make_planar(jnum(g, "thickness_m", dflt.r_outer - dflt.r_inner),
                           jnum(g, "epsilon_r", dflt.epsilon_r));
    if (kind != "cylindrical") throw UsageError("geometry.kind must be cylindrical or planar");
    return make_cylindrical(jnum(g, "r_inner_m", dflt.r_inner), jnum(g, "r_outer_m", dflt.r_outer),
                            jnum(g, "epsilon_r", dflt.epsilon_r));
}

BctParams bct_from(const json& cfg, const BctParams& dflt) {
    BctParams p = dflt;
    if (!cfg.contains("bct")) return p;
    const json& b = cfg.at("bct");
    p.w_inj_e = jnum(b, "w_inj_e_eV", p.w_inj_e);
    p.w_inj_h = jnum(b, "w_inj_h_eV", p.w_inj_h);
    p.w_mob_e = jnum(b, "w_mob_e_eV", p.w_mob_e);
    p.w_mob_h = jnum(b, "w_mob_h_eV", p.w_mob_h);
    p.w_tr_e = jnum(b, "w_tr_e_eV", p.w_tr_e);
    p.w_tr_h = jnum(b, "w_tr_h_eV", p.w_tr_h);
    p.B_e = jnum(b, "B_e_per_s", p.B_e);
    p.B_h = jnum(b, "B_h_per_s", p.B_h);
    if (b.contains("s_base")) p.set_s_base(jnum(b, "s_base", p.S0_base));
    p.S0_base = jnum(b, "s0_base", p.S0_base);
    p.S1_base = jnum(b, "s1_base", p.S1_base);
    p.S2_base = jnum(b, "s2_base", p.S2_base);
    p.S3_base = jnum(b, "s3_base", p.S3_base);
    p.rho_e0t = jnum(b, "cap_e_C_per_m3", p.rho_e0t);
    p.rho_h0t = jnum(b, "cap_h_C_per_m3", p.rho_h0t);
    p.a_trap = jnum(b, "a_trap_m", p.a_trap);
    p.f_s = jnum(b, "f_s", p.f_s);
    return p;
}

KleinParams klein_from(const json& cfg) {
    KleinParams k;
    k.sigma_ref = 3.0e-2;
    k.activation_energy = 0.70;
    k.field_coeff = 1.0e-7;
    if (!cfg.contains("klein")) return k;
    const json& j = cfg.at("klein");
    k.sigma_ref = jnum(j, "sigma_ref_S_per_m", k.sigma_ref);
    k.activation_energy = jnum(j, "activation_energy_eV", k.activation_energy);
    k.field_coeff = jnum(j, "field_coeff_m_per_V", k.field_coeff);
    return k;
}

// Load program: either {"file": path} or {"constant": {...}} or
// {"cycle": {"type": "tt24"|"tt48", "U_V": ...}} relative to the case study.
LoadProgram program_from(const json& cfg, const CaseStudy& cs, std::vector<std::string>* inputs) {
    if (!cfg.contains("load")) throw UsageError("config requires a 'load' section");
    const json& l = cfg.at("load");
    if (l.contains("file")) {
        const std::string path = l.at("file").get<std::string>();
        if (inputs) inputs->push_back(path);
        try {
            return load_program_from_file(path);
        } catch (const ParseError& e) {
            throw UsageError(std::string("load program: ") + e.what());
        }
    }
    if (l.contains("constant")) {
        const json& c = l.at("constant");
        return constant_program(jnum(c, "U_V", cs.U0), jnum(c, "T_inner_K", cs.T_design_in),
                                jnum(c, "T_outer_K", cs.T_design_out),
                                jnum(c, "t_end_s", 16 * 3600.0));
    }
    if (l.contains("cycle")) {
        const json& c = l.at("cycle");
        const std::string type = jstr(c, "type", "tt24");
        const double U = jnum(c, "U_V", cs.U0);
        if (type == "tt24") return tt_cycle_24h(cs, U);
        if (type == "tt48") return tt_cycle_48h(cs, U);
        throw UsageError("load.cycle.type must be tt24 or tt48");
    }
    throw UsageError("load section must contain 'file', 'constant', or 'cycle'");
}

LifeParams life_from(const json& cfg, double e_design_auto) {
    LifeParams p;
    const json j = cfg.contains("life") ? cfg.at("life") : json::object();
    p.L_D = jnum(j, "L_D_years", 40.0) * 365.25 * 86400.0;
    p.T_D = jnum(j, "T_D_K", celsius_to_kelvin(jnum(j, "T_D_C", 70.0)));
    p.n_D = jnum(j, "n_D", 10.0);
    p.B = jnum(j, "B_K", 12430.0);
    p.b_ET = jnum(j, "b_ET_K", 0.0);
    p.E_0 = jnum(j, "E_0_V_per_m", 2.0e7);
    if (j.contains("E_D_V_per_m") && j.at("E_D_V_per_m").is_number())
        p.E_D = j.at("E_D_V_per_m").get<double>();
    else
        p.E_D = e_design_auto; // "auto": the max steady design-load field
    return p;
}

// -------------------------------------------------------------- manifest ---

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv64
    std::vector<std::pair<std::string, std::string>> outputs; // path, fnv64
    std::string parameter_hash;

    void write(const fs::path& dir) const {
        json j;
        j["command"] = command;
        j["tool_version"] = kVersion;
        j["parameter_hash"] = parameter_hash;
        json in = json::array(), out = json::array();
        for (const auto& [p, h] : inputs) in.push_back({{"path", p}, {"fnv64", h}});
        for (const auto& [p, h] : outputs) out.push_back({{"path", p}, {"fnv64", h}});
        j["inputs"] = in;
        j["outputs"] = out;
        std::ofstream f(dir / "manifest.json");
        f << j.dump(2) << "\n";
    }
};

std::string params_hash(const BctParams& p) {
    return pattern_hash({p.w_inj_e, p.w_inj_h, p.w_mob_e, p.w_mob_h, p.w_tr_e, p.w_tr_h, p.B_e,
                         p.B_h, p.S0_base, p.S1_base, p.S2_base, p.S3_base, p.rho_e0t, p.rho_h0t,
                         p.a_trap, p.f_s});
}

fs::path ensure_out_dir(const std::string& out, const std::string& fallback) {
    fs::path dir = out.empty() ? fs::path(fallback) : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir.string());
    return dir;
}

void add_output(Manifest& m, const fs::path& p) {
    m.outputs.emplace_back(p.string(), file_hash(p.string()));
}

std::size_t argmax_abs(const std::vector<double>& v) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[k])) k = i;
    return k;
}

std::vector<double> linspace_times(double t_end, double step) {
    std::vector<double> t;
    for (double x = 0; x < t_end; x += step) t.push_back(x);
    t.push_back(t_end);
    return t;
}

// ------------------------------------------------------------- validate ----

int cmd_validate(std::size_t nodes, const std::string& out) {
    const ValidationScenario v = validation_scenario();
    const double tol = 0.03;

    auto run_case = [&](std::size_t n) {
        const RadialMesh mesh = build_mesh(v.geometry, n);
        return std::make_pair(mesh, simulate_bct(mesh, v.params, v.program(10000.0), 10000.0,
                                                 v.times));
    };

    const auto [mesh, sol] = run_case(v.nodes);
    std::printf("validation scenario: %zu nodes, U = %.0f kV, %.0f -> %.0f degC\n", v.nodes,
                v.U / 1e3, kelvin_to_celsius(v.T_inner), kelvin_to_celsius(v.T_outer));
    std::printf("%10s %18s %18s %10s\n", "t (s)", "E_max (kV/mm)", "reference", "err (%)");
    bool ok = true;
    std::vector<double> computed;
    for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
        double emax = 0;
        for (double e : sol.snapshots[k].field.E) emax = std::max(emax, std::abs(e));
        computed.push_back(emax);
        const double ref = v.ref_emax[k];
        const double err = (emax - ref) / ref;
        if (std::abs(err) > tol) ok = false;
        std::printf("%10.0f %18.2f %18.2f %+10.2f\n", sol.snapshots[k].t, emax / 1e6, ref / 1e6,
                    err * 100.0);
    }
    std::printf("ledger: balance error %.3g, clamps %ld\n", sol.ledger.max_balance_error,
                sol.ledger.clamp_events);

    if (nodes != 0 && nodes != v.nodes) {
        const auto [mesh2, sol2] = run_case(nodes);
        double e1 = 0, e2 = 0;
        for (double e : sol.snapshots.back().field.E) e1 = std::max(e1, std::abs(e));
        for (double e : sol2.snapshots.back().field.E) e2 = std::max(e2, std::abs(e));
        const double delta = std::abs(e2 - e1) / e1;
        std::printf("refinement: %zu nodes -> E_max(1e4 s) = %.2f kV/mm, delta %.2f%%\n", nodes,
                    e2 / 1e6, delta * 100.0);
    }

    if (!out.empty()) {
        Manifest man;
        man.command = "validate";
        man.parameter_hash = params_hash(v.params);
        const fs::path dir = ensure_out_dir(out, "");
        write_snapshots((dir / "snapshots.csv").string(), mesh, sol);
        write_ledger((dir / "ledger.txt").string(), sol.ledger);
        {
            auto rep = open_out((dir / "report.csv").string());
            rep << "t_s, E_max_V_per_m, reference_V_per_m, rel_err\n";
            for (std::size_t k = 0; k < computed.size(); ++k)
                rep << fmt(v.times[k]) << ", " << fmt(computed[k]) << ", " << fmt(v.ref_emax[k])
                    << ", " << fmt((computed[k] - v.ref_emax[k]) / v.ref_emax[k]) << "\n";
        }
        add_output(man, dir / "snapshots.csv");
        add_output(man, dir / "ledger.txt");
        add_output(man, dir / "report.csv");
        man.write(dir);
    }

    std::printf("verdict: %s\n", ok ? "PASS (all within 3%)" : "FAIL (deviation beyond 3%)");
    return ok ? 0 : 1;
}

// ------------------------------------------------------------- simulate ----

struct MicroRun {
    TransientSolution sol;
    std::vector<double> times;
    std::vector<std::size_t> argmax;
    std::vector<double> emax;
    Stabilization stab;
};

MicroRun run_micro(const RadialMesh& mesh, const BctParams& params, const LoadProgram& prog,
                   double t_end, double snap_step) {
    MicroRun r;
    r.times = linspace_times(t_end, snap_step);
    r.sol = simulate_bct(mesh, params, prog, t_end, r.times);
    for (const auto& s : r.sol.snapshots) {
        const std::size_t k = argmax_abs(s.field.E);
        r.argmax.push_back(k);
        r.emax.push_back(std::abs(s.field.E[k]));
    }
    r.stab = find_stabilization(mesh, r.times, r.argmax, r.emax);
    return r;
}

struct MacroRun {
    MacroSolution sol;
    std::vector<double> times;
    std::vector<std::size_t> argmax;
    std::vector<double> emax;
    Stabilization stab;
};

MacroRun run_macro(const RadialMesh& mesh, const KleinParams& klein, const LoadProgram& prog,
                   double t_end, double snap_step) {
    MacroRun r;
    r.times = linspace_times(t_end, snap_step);
    r.sol = macroscopic_transient(mesh, klein, prog, t_end, r.times);
    for (const auto& f : r.sol.snapshots) {
        const std::size_t k = argmax_abs(f.E);
        r.argmax.push_back(k);
        r.emax.push_back(std::abs(f.E[k]));
    }
    r.stab = find_stabilization(mesh, r.times, r.argmax, r.emax);
    return r;
}

void print_stab(const char* label, const Stabilization& st) {
    if (st.stabilized)
        std::printf("%s: stabilization at %.2f h, E_max position %.2f of thickness, "
                    "final E_max %.2f kV/mm\n",
                    label, st.t / 3600.0, st.fraction, st.emax / 1e6);
    else
        std::printf("%s: no stabilization within the simulated window\n", label);
}

int cmd_simulate(const std::string& config_path, const std::string& out, std::size_t nodes_cli) {
    const json cfg = load_config_file(config_path);
    const CaseStudy cs = case_study();
    const Geometry geo = geometry_from(cfg, cs.geometry);
    const BctParams params = bct_from(cfg, cs.params);
    const std::size_t nodes =
        nodes_cli ? nodes_cli : static_cast<std::size_t>(jnum(cfg, "nodes", double(cs.nodes)));
    const std::string model = jstr(cfg, "model", "micro");
    if (model != "micro" && model != "macro" && model != "both")
        throw UsageError("model must be micro, macro, or both");

    std::vector<std::string> input_files;
    const LoadProgram prog = program_from(cfg, cs, &input_files);
    const double t_end = jnum(cfg, "t_end_s", prog.duration());
    const double snap_step = jnum(cfg, "snapshot_step_s", 300.0);

    const RadialMesh mesh = build_mesh(geo, nodes);
    Manifest man;
    man.command = "simulate";
    man.parameter_hash = params_hash(params);
    for (const auto& f : input_files) man.inputs.emplace_back(f, file_hash(f));
    const fs::path dir = ensure_out_dir(out, jstr(cfg, "out", "cablelife-out"));

    if (model == "micro" || model == "both") {
        const MicroRun r = run_micro(mesh, params, prog, t_end, snap_step);
        write_snapshots((dir / "micro_snapshots.csv").string(), mesh, r.sol);
        write_ledger((dir / "micro_ledger.txt").string(), r.sol.ledger);
        add_output(man, dir / "micro_snapshots.csv");
        add_output(man, dir / "micro_ledger.txt");
        print_stab("micro", r.stab);
        auto sum = open_out((dir / "micro_summary.txt").string());
        sum << "stabilized = " << (r.stab.stabilized ? "yes" : "no") << "\n"
            << "stabilization_time_s = " << fmt(r.stab.t) << "\n"
            << "emax_position_fraction = " << fmt(r.stab.fraction) << "\n"
            << "emax_final_V_per_m = " << fmt(r.emax.back()) << "\n"
            << "steps = " << r.sol.steps << "\n";
        sum.close();
        add_output(man, dir / "micro_summary.txt");
    }
    if (model == "macro" || model == "both") {
        const KleinParams klein = klein_from(cfg);
        const MacroRun r = run_macro(mesh, klein, prog, t_end, snap_step);
        write_field_history((dir / "macro_field.csv").string(), mesh, r.sol.snapshots);
        add_output(man, dir / "macro_field.csv");
        print_stab("macro", r.stab);
        auto sum = open_out((dir / "macro_summary.txt").string());
        sum << "stabilized = " << (r.stab.stabilized ? "yes" : "no") << "\n"
            << "stabilization_time_s = " << fmt(r.stab.t) << "\n"
            << "emax_position_fraction = " << fmt(r.stab.fraction) << "\n"
            << "emax_final_V_per_m = " << fmt(r.emax.back()) << "\n"
            << "steps = " << r.sol.steps << "\n";
        sum.close();
        add_output(man, dir / "macro_summary.txt");
    }
    man.write(dir);
    return 0;
}

// ------------------------------------------------------------------ fit ----

int cmd_fit(const std::string& config_path, const std::string& out, std::uint64_t seed_cli,
            bool seed_given, int starts_cli) {
    const json cfg = load_config_file(config_path);
    if (!cfg.contains("fit")) throw UsageError("config requires a 'fit' section");
    const json& f = cfg.at("fit");
    if (!f.contains("measurements") || !f.at("measurements").is_array() ||
        f.at("measurements").empty())
        throw UsageError("fit.measurements must be a non-empty array of PEA file paths");

    std::vector<PeaMeasurement> meas;
    Manifest man;
    man.command = "fit";
    for (const auto& mj : f.at("measurements")) {
        const std::string path = mj.get<std::string>();
        try {
            meas.push_back(load_pea(path));
        } catch (const std::exception& e) {
            throw UsageError("PEA file " + path + ": " + e.what());
        }
        man.inputs.emplace_back(path, file_hash(path));
    }

    const CaseStudy cs = case_study();
    const BctParams tmpl = bct_from(cfg, cs.params);
    const double barrier_spread = jnum(f, "barrier_spread_eV", 0.15);
    const double rate_factor = jnum(f, "rate_factor", 3.0);
    ParamBounds bounds = ParamBounds::around(tmpl, barrier_spread, rate_factor);
    const int n_starts = starts_cli > 0 ? starts_cli : static_cast<int>(jnum(f, "starts", 8.0));
    const std::uint64_t seed =
        seed_given ? seed_cli : static_cast<std::uint64_t>(jnum(f, "seed", 1.0));

    FitOptions opt;
    opt.epsilon_r = jnum(cfg.contains("geometry") ? cfg.at("geometry") : json::object(),
                         "epsilon_r", 2.3);
    opt.max_iterations = static_cast<int>(jnum(f, "max_iterations", 200.0));
    opt.sim.nodes = static_cast<std::size_t>(jnum(f, "sim_nodes", 50.0));

    const auto [best, all] = fit_global(bounds, n_starts, seed, meas, tmpl, opt);
    man.parameter_hash = params_hash(best.params);

    const fs::path dir = ensure_out_dir(out, jstr(cfg, "out", "cablelife-out"));
    {
        // Table layout: one row of the nine fitted quantities.
        auto t = open_out((dir / "fit_result.csv").string());
        t << "w_inj_e_eV, w_inj_h_eV, w_tr_e_eV, w_tr_h_eV, w_mob_e_eV, w_mob_h_eV, "
             "B_e_per_s, B_h_per_s, S_base, cost, converged, start_index\n";
        const BctParams& p = best.params;
        t << fmt(p.w_inj_e) << ", " << fmt(p.w_inj_h) << ", " << fmt(p.w_tr_e) << ", "
          << fmt(p.w_tr_h) << ", " << fmt(p.w_mob_e) << ", " << fmt(p.w_mob_h) << ", "
          << fmt(p.B_e) << ", " << fmt(p.B_h) << ", " << fmt(p.S0_base) << ", " << fmt(best.cost)
          << ", " << (best.converged ? 1 : 0) << ", " << best.start_index << "\n";
    }
    {
        auto t = open_out((dir / "fit_starts.csv").string());
        t << "start_index, cost, iterations, converged, error\n";
        for (const auto& r : all)
            t << r.start_index << ", " << fmt(r.cost) << ", " << r.iterations << ", "
              << (r.converged ? 1 : 0) << ", " << (r.error.empty() ? "-" : r.error) << "\n";
    }
    for (const auto& r : all) {
        std::ostringstream name;
        name << "fit_residuals_start_" << r.start_index << ".csv";
        auto t = open_out((dir / name.str()).string());
        t << "iteration, cost\n";
        for (std::size_t i = 0; i < r.residual_history.size(); ++i)
            t << i << ", " << fmt(r.residual_history[i]) << "\n";
        add_output(man, dir / name.str());
    }
    add_output(man, dir / "fit_result.csv");
    add_output(man, dir / "fit_starts.csv");
    man.write(dir);

    std::printf("fit: best cost %.6g from start %d (%d starts, seed %llu)\n", best.cost,
                best.start_index, n_starts, static_cast<unsigned long long>(seed));
    const BctParams& p = best.params;
    std::printf("  w_inj_e %.3f  w_inj_h %.3f  w_tr_e %.3f  w_tr_h %.3f eV\n", p.w_inj_e,
                p.w_inj_h, p.w_tr_e, p.w_tr_h);
    std::printf("  w_mob_e %.3f  w_mob_h %.3f eV  B_e %.3g  B_h %.3g 1/s  S_base %.3g\n",
                p.w_mob_e, p.w_mob_h, p.B_e, p.B_h, p.S0_base);
    return 0;
}

// ----------------------------------------------------------------- life ----

CycleHistory history_from_micro(const RadialMesh& mesh, const TransientSolution& sol,
                                const LoadProgram& prog, double t0) {
    CycleHistory h;
    for (const auto& s : sol.snapshots) {
        if (s.t < t0 - 1e-9) continue;
        h.times.push_back(s.t - t0);
        h.E.push_back(s.field.E);
        const LoadSample ls = prog.at(s.t);
        h.T.push_back(temperature_profile(ls.T_inner, ls.T_outer, mesh));
    }
    h.duration = h.times.back();
    return h;
}

int cmd_life(const std::string& config_path, const std::string& out, std::size_t nodes_cli) {
    const json cfg = load_config_file(config_path);
    const CaseStudy cs = case_study();
    const Geometry geo = geometry_from(cfg, cs.geometry);
    const BctParams params = bct_from(cfg, cs.params);
    const std::size_t nodes =
        nodes_cli ? nodes_cli : static_cast<std::size_t>(jnum(cfg, "nodes", double(cs.nodes)));
    const RadialMesh mesh = build_mesh(geo, nodes);
    const double U_tt = jnum(cfg, "U_tt_V", cs.U_tt);
    const double snap_step = jnum(cfg, "snapshot_step_s", 600.0);

    // Design field for the "auto" E_D: the stabilized field maximum under the
    // design load (U_0, design temperatures).
    std::printf("life: computing design-point steady field ...\n");
    const double t_design = jnum(cfg, "design_settle_s", 16 * 3600.0);
    const LoadProgram design_prog =
        constant_program(jnum(cfg, "U0_V", cs.U0), cs.T_design_in, cs.T_design_out, t_design);
    const TransientSolution design =
        simulate_bct(mesh, params, design_prog, t_design, {t_design});
    double e_design = 0;
    for (double e : design.snapshots.back().field.E) e_design = std::max(e_design, std::abs(e));
    const LifeParams life = life_from(cfg, e_design);
    life.validate();
    std::printf("life: E_D = %.2f kV/mm (design), T_D = %.1f degC, n_D = %.1f\n", life.E_D / 1e6,
                kelvin_to_celsius(life.T_D), life.n_D);

    // Steady-cycle histories at the type-test voltage: one warm-up 24-h cycle
    // (charge builds during the first heating), then the recorded 24-h cycle,
    // then the recorded 48-h cycle continuing from the same state.
    const LoadProgram c24 = tt_cycle_24h(cs, U_tt);
    const LoadProgram c48 = tt_cycle_48h(cs, U_tt);
    // warm-up 24h (charge builds during the first heating) + recorded 24h +
    // recorded 48h
    const LoadProgram chained = compose_tt_program(c24, c48, 2, 1);
    const double t_total = chained.duration();
    std::printf("life: simulating %.0f h of type-test load cycles ...\n", t_total / 3600.0);
    std::vector<double> snaps = linspace_times(t_total, snap_step);
    const TransientSolution sol = simulate_bct(mesh, params, chained, t_total, snaps);

    TransientSolution part24, part48;
    const double t24_start = c24.duration(), t48_start = 2.0 * c24.duration();
    for (const auto& s : sol.snapshots) {
        if (s.t >= t24_start - 1e-9 && s.t <= t48_start + 1e-9) part24.snapshots.push_back(s);
        if (s.t >= t48_start - 1e-9) part48.snapshots.push_back(s);
    }
    const CycleHistory h24 = history_from_micro(mesh, part24, chained, t24_start);
    const CycleHistory h48 = history_from_micro(mesh, part48, chained, t48_start);

    const LifeResult res = estimate_life(h24, 24, h48, 3, life, mesh);

    Manifest man;
    man.command = "life";
    man.parameter_hash = params_hash(params);
    const fs::path dir = ensure_out_dir(out, jstr(cfg, "out", "cablelife-out"));
    write_life_table((dir / "life_table.csv").string(), mesh, res);
    add_output(man, dir / "life_table.csv");
    // sanity identity: a constant design-point history of length L_D must
    // accumulate exactly unit loss of life
    double design_lf = 0;
    {
        const std::vector<double> ts{0.0, life.L_D};
        const std::vector<std::vector<double>> Eh(2, std::vector<double>(nodes, life.E_D));
        const std::vector<std::vector<double>> Th(2, std::vector<double>(nodes, life.T_D));
        design_lf = loss_of_life(ts, Eh, Th, life).front();
    }

    {
        auto sum = open_out((dir / "life_summary.txt").string());
        sum << "withstands_tt = " << (res.withstands ? "yes" : "no") << "\n"
            << "max_lf = " << fmt(res.max_lf()) << "\n"
            << "argmin_node = " << res.argmin_node << "\n"
            << "argmin_position_fraction = " << fmt(res.argmin_position) << "\n"
            << "min_life_days = " << fmt(res.min_life / 86400.0) << "\n"
            << "lf24_share_at_argmin = "
            << fmt(res.n24 * res.lf_24[res.argmin_node] / res.lf_total[res.argmin_node]) << "\n"
            << "lf48_share_at_argmin = "
            << fmt(res.n48 * res.lf_48[res.argmin_node] / res.lf_total[res.argmin_node]) << "\n"
            << "program_duration_s = " << fmt(res.program_duration) << "\n"
            << "design_point_lf = " << fmt(design_lf) << "\n";
        sum.close();
        add_output(man, dir / "life_summary.txt");
    }
    write_snapshots((dir / "cycle_snapshots.csv").string(), mesh, part24);
    add_output(man, dir / "cycle_snapshots.csv");
    man.write(dir);

    std::printf("life: verdict %s; max LF per TT %.3g at %.2f of thickness; min life %.3g days\n",
                res.withstands ? "withstands" : "does NOT withstand", res.max_lf(),
                res.argmin_position, res.min_life / 86400.0);
    return 0;
}

// -------------------------------------------------------------- compare ----

int cmd_compare(const std::string& config_path, const std::string& out, std::size_t nodes_cli) {
    const json cfg = load_config_file(config_path);
    const CaseStudy cs = case_study();
    const Geometry geo = geometry_from(cfg, cs.geometry);
    const BctParams params = bct_from(cfg, cs.params);
    const KleinParams klein = klein_from(cfg);
    const std::size_t nodes =
        nodes_cli ? nodes_cli : static_cast<std::size_t>(jnum(cfg, "nodes", double(cs.nodes)));
    const RadialMesh mesh = build_mesh(geo, nodes);
    const double U = jnum(cfg, "U_V", cs.U0);
    const double snap_step = jnum(cfg, "snapshot_step_s", 600.0);

    // One 24-h heating/cooling cycle probes both inversion (during heating)
    // and the response to cooling.
    const LoadProgram prog = tt_cycle_24h(cs, U);
    const double t_end = prog.duration();
    const double t_hot = 8 * 3600.0;

    std::printf("compare: micro model ...\n");
    const MicroRun micro = run_micro(mesh, params, prog, t_end, snap_step);
    std::printf("compare: macro model ...\n");
    const MacroRun macro = run_macro(mesh, klein, prog, t_end, snap_step);

    auto at_time = [&](const std::vector<double>& times, double t) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
        return best;
    };

    struct ModelTraits {
        bool inversion = false;
        double cooling_change = 0; // relative E_max change during cooling
        std::string peak_class;    // inner | interior | outer
        double peak_fraction = 0;
    };

    auto classify = [&](const std::vector<std::size_t>& argmax, const std::vector<double>& emax,
                        const std::vector<double>& times) {
        ModelTraits tr;
        const std::size_t i_hot = at_time(times, t_hot);
        const std::size_t i_end = times.size() - 1;
        tr.inversion = argmax[i_hot] > argmax[0] + nodes / 10;
        tr.cooling_change = std::abs(emax[i_end] - emax[i_hot]) / emax[i_hot];
        const double frac = mesh.thickness_fraction(argmax[i_hot]);
        tr.peak_fraction = frac;
        tr.peak_class = frac < 0.1 ? "inner" : (frac > 0.9 ? "outer" : "interior");
        return tr;
    };

    const ModelTraits mt = classify(micro.argmax, micro.emax, micro.times);
    const ModelTraits kt = classify(macro.argmax, macro.emax, macro.times);

    // Cold-state peak of the macro model: end of the cooling phase.
    const std::size_t macro_cold_node = macro.argmax.back();
    const std::string macro_cold_class = mesh.thickness_fraction(macro_cold_node) < 0.1
                                             ? "inner"
                                             : (mesh.thickness_fraction(macro_cold_node) > 0.9
                                                    ? "outer"
                                                    : "interior");

    const fs::path dir = ensure_out_dir(out, jstr(cfg, "out", "cablelife-out"));
    Manifest man;
    man.command = "compare";
    man.parameter_hash = params_hash(params);
    write_snapshots((dir / "compare_micro.csv").string(), mesh, micro.sol);
    write_field_history((dir / "compare_macro.csv").string(), mesh, macro.sol.snapshots);
    {
        auto t = open_out((dir / "compare_checklist.csv").string());
        t << "property, micro, macro\n";
        t << "field_inversion, " << (mt.inversion ? "present" : "absent") << ", "
          << (kt.inversion ? "present" : "absent") << "\n";
        t << "cooling_response_rel, " << fmt(mt.cooling_change) << ", " << fmt(kt.cooling_change)
          << "\n";
        t << "hot_peak_position, " << mt.peak_class << ", " << kt.peak_class << "\n";
        t << "hot_peak_fraction, " << fmt(mt.peak_fraction) << ", " << fmt(kt.peak_fraction)
          << "\n";
        t << "cold_peak_position_macro, -, " << macro_cold_class << "\n";
    }
    add_output(man, dir / "compare_micro.csv");
    add_output(man, dir / "compare_macro.csv");
    add_output(man, dir / "compare_checklist.csv");
    man.write(dir);

    std::printf("model comparison (24-h load cycle at %.0f kV):\n", U / 1e3);
    std::printf("  %-28s %-18s %s\n", "property", "micro", "macro");
    std::printf("  %-28s %-18s %s\n", "field inversion",
                mt.inversion ? "present" : "absent", kt.inversion ? "present" : "absent");
    std::printf("  %-28s %-18.3g %.3g\n", "cooling response (rel)", mt.cooling_change,
                kt.cooling_change);
    std::printf("  %-28s %-18s %s\n", "hot-state peak", mt.peak_class.c_str(),
                kt.peak_class.c_str());
    std::printf("  %-28s %-18s %s\n", "cold-state peak", "(unchanged)", macro_cold_class.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"charge transport, field, and life estimation for HVDC cable insulation"};
    app.require_subcommand(1);

    std::string config, out;
    std::size_t nodes = 0;
    std::uint64_t seed = 0;
    int starts = 0;

    auto* v = app.add_subcommand("validate", "reproduce the published transient field peaks");
    v->add_option("--nodes", nodes, "extra mesh-refinement run with this node count");
    v->add_option("--out", out, "output directory");

    auto* s = app.add_subcommand("simulate", "run the transport model on a load program");
    s->add_option("--config", config, "JSON config")->required();
    s->add_option("--nodes", nodes, "override mesh node count");
    s->add_option("--out", out, "output directory");

    auto* f = app.add_subcommand("fit", "fit transport parameters to PEA measurements");
    f->add_option("--config", config, "JSON config")->required();
    auto* seed_opt = f->add_option("--seed", seed, "random seed for the multi-start draw");
    f->add_option("--starts", starts, "number of local fits");
    f->add_option("--out", out, "output directory");

    auto* l = app.add_subcommand("life", "estimate life under type-test load cycles");
    l->add_option("--config", config, "JSON config")->required();
    l->add_option("--nodes", nodes, "override mesh node count");
    l->add_option("--out", out, "output directory");

    auto* c = app.add_subcommand("compare", "micro vs macro model checklist");
    c->add_option("--config", config, "JSON config")->required();
    c->add_option("--nodes", nodes, "override mesh node count");
    c->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (v->parsed()) return cmd_validate(nodes, out);
        if (s->parsed()) return cmd_simulate(config, out, nodes);
        if (f->parsed()) return cmd_fit(config, out, seed, seed_opt->count() > 0, starts);
        if (l->parsed()) return cmd_life(config, out, nodes);
        if (c->parsed()) return cmd_compare(config, out, nodes);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
