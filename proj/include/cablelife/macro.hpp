#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/errors.hpp"
#include "cablelife/field.hpp"
#include "cablelife/geometry.hpp"
#include "cablelife/load_program.hpp"
#include "cablelife/params.hpp"

namespace cablelife {

/// Hopping-form conductivity sigma(E,T); even in E, continuous at E = 0.
inline double klein_conductivity(double E, double T, const KleinParams& p) {
    if (!(T > 0))
        throw std::invalid_argument("klein_conductivity: T must be > 0");
    const auto& c = constants();
    const double arrhenius = std::exp(-p.activation_energy * c.q / (c.k_B * T));
    const double x = p.field_coeff * std::abs(E);
    const double shape = x < 1e-8 ? 1.0 : std::sinh(x) / x;
    return p.sigma_ref * arrhenius * shape;
}

struct MacroOptions {
    double rel_tol = 1e-8;     // relative tolerance on E per implicit step
    int newton_max = 60;
    double tau_fraction = 0.25; // dt as a fraction of the fastest relaxation time
    double dt_max = 300.0;      // s
    double dt_min = 1e-9;       // s
};

struct MacroSolution {
    std::vector<FieldProfile> snapshots; // t carried inside each profile
    long steps = 0;
};

namespace detail {

/// Solves eps*(E - E_old) = dt*(C/w - sig0*sinh(b E)/b) for E.
/// The left side minus right side is strictly increasing in E, so a
/// safeguarded Newton iteration converges from any bracket.
inline double implicit_node_field(double E_old, double C_over_w, double dt, double sig0,
                                  double b, double eps, double rel_tol, int max_iter,
                                  bool& ok) {
    auto g = [&](double E) { return eps * (E - E_old) - dt * C_over_w + dt * sig0 / b * std::sinh(b * E); };
    auto gp = [&](double E) { return eps + dt * sig0 * std::cosh(b * E); };

    // bracket the root
    double lo = E_old, hi = E_old;
    double glo = g(lo), ghi = g(hi);
    double span = std::max(std::abs(E_old), 1e3);
    int guard = 0;
    while (glo > 0 && guard++ < 200) { lo -= span; span *= 2; glo = g(lo); }
    span = std::max(std::abs(E_old), 1e3);
    guard = 0;
    while (ghi < 0 && guard++ < 200) { hi += span; span *= 2; ghi = g(hi); }
    if (glo > 0 || ghi < 0) { ok = false; return E_old; }

    double E = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double gv = g(E);
        if (gv > 0) hi = E; else lo = E;
        double step = gv / gp(E);
        double En = E - step;
        if (!(En > lo) || !(En < hi))
            En = 0.5 * (lo + hi); // bisection fallback
        const double scale = std::max({std::abs(En), std::abs(E_old), 1.0});
        if (std::abs(En - E) <= rel_tol * scale) { ok = true; return En; }
        E = En;
    }
    ok = false;
    return E;
}

} // namespace detail

/// Charge-relaxation transient with J = sigma(E,T)*E under the voltage
/// constraint: the total (conduction + displacement) current density times the
/// geometric weight is spatially uniform in 1D, which gives per node
///   eps dE/dt + sigma(E,T) E = C(t)/w(r),
/// with C(t) fixed each step so that the trapezoidal voltage equals U(t).
/// Implicit Euler in time; Newton on the per-node field and on C.
inline MacroSolution macroscopic_transient(const RadialMesh& mesh, const KleinParams& klein,
                                           const LoadProgram& program, double t_end,
                                           std::vector<double> snapshot_times,
                                           const MacroOptions& opt = {}) {
    klein.validate();
    program.validate();
    if (!(t_end > 0))
        throw std::invalid_argument("macroscopic_transient: t_end must be > 0");
    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                         snapshot_times.end());
    for (double ts : snapshot_times)
        if (ts < 0 || ts > t_end * (1.0 + 1e-12))
            throw std::invalid_argument("macroscopic_transient: snapshot time outside [0, t_end]");

    const std::size_t n = mesh.size();
    const double eps = mesh.geometry.epsilon();
    const bool cyl = mesh.geometry.kind == GeometryKind::cylindrical;
    const auto& c = constants();

    MacroSolution sol;

    // start from the charge-free (capacitive) field
    LoadSample load = program.at(0.0);
    FieldProfile fp = laplacian_field(mesh.geometry, load.U, mesh);
    fp.t = 0.0;

    std::vector<double> w(n), sig0(n), T(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = cyl ? mesh.nodes[i] : 1.0;

    double t = 0;
    std::size_t next_snap = 0;
    double C_prev = 0; // warm start for the current constant

    auto rebuild_sigma = [&](double T_in, double T_out) {
        for (std::size_t i = 0; i < n; ++i) {
            T[i] = temperature_at(T_in, T_out, mesh.geometry, mesh.nodes[i]);
            sig0[i] = klein.sigma_ref * std::exp(-klein.activation_energy * c.q / (c.k_B * T[i]));
        }
    };
    rebuild_sigma(load.T_inner, load.T_outer);

    while (true) {
        while (next_snap < snapshot_times.size() &&
               std::abs(t - snapshot_times[next_snap]) <=
                   1e-9 * std::max(1.0, snapshot_times[next_snap])) {
            FieldProfile snap = fp;
            snap.t = t;
            sol.snapshots.push_back(std::move(snap));
            ++next_snap;
        }
        if (t >= t_end * (1.0 - 1e-12))
            break;

        load = program.at(t);
        rebuild_sigma(load.T_inner, load.T_outer);

        // fastest dielectric relaxation time at the current state
        double tau_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double sig = klein_conductivity(fp.E[i], T[i], klein);
            if (sig > 0) tau_min = std::min(tau_min, eps / sig);
        }
        double next_event = t_end;
        if (next_snap < snapshot_times.size())
            next_event = std::min(next_event, snapshot_times[next_snap]);
        double dt = std::min({opt.tau_fraction * tau_min, opt.dt_max, next_event - t});
        if (!(dt > opt.dt_min))
            throw SolverError("macroscopic_transient: time step collapsed at t = " +
                              std::to_string(t) + " s");

        const LoadSample mid = program.at(t + dt); // implicit step targets t+dt
        rebuild_sigma(mid.T_inner, mid.T_outer);

        // outer Newton on the current constant C so that trapz(E_new) = U(t+dt)
        std::vector<double> E_new(n);
        double C = C_prev;
        if (C == 0) {
            // initial guess: conduction current of the present field
            double acc = 0;
            for (std::size_t i = 0; i < n; ++i)
                acc += w[i] * klein_conductivity(fp.E[i], T[i], klein) * fp.E[i];
            C = acc / static_cast<double>(n);
        }
        bool converged = false;
        for (int outer = 0; outer < opt.newton_max && !converged; ++outer) {
            double phi = -mid.U;
            double dphi = 0;
            bool node_ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                bool ok = false;
                E_new[i] = detail::implicit_node_field(fp.E[i], C / w[i], dt, sig0[i],
                                                       klein.field_coeff, eps, opt.rel_tol * 1e-2,
                                                       opt.newton_max, ok);
                node_ok = node_ok && ok;
            }
            if (!node_ok)
                throw SolverError("macroscopic_transient: node solve failed at t = " +
                                  std::to_string(t) + " s");
            // trapezoidal voltage and its derivative wrt C
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double h = mesh.nodes[i + 1] - mesh.nodes[i];
                phi += 0.5 * h * (E_new[i] + E_new[i + 1]);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double gp = eps + dt * sig0[i] * std::cosh(klein.field_coeff * E_new[i]);
                const double dEdC = dt / (w[i] * gp);
                double tw = 0; // trapezoid weight of node i
                if (i > 0) tw += 0.5 * (mesh.nodes[i] - mesh.nodes[i - 1]);
                if (i + 1 < n) tw += 0.5 * (mesh.nodes[i + 1] - mesh.nodes[i]);
                dphi += tw * dEdC;
            }
            const double dC = -phi / dphi;
            C += dC;
            const double uscale = std::max(std::abs(mid.U), 1.0);
            if (std::abs(phi) <= 1e-10 * uscale && std::abs(dC) <= 1e-8 * (std::abs(C) + 1e-300))
                converged = true;
        }
        if (!converged)
            throw SolverError("macroscopic_transient: voltage constraint did not converge at t = " +
                              std::to_string(t) + " s");

        fp.E = E_new;
        fp.U_applied = mid.U;
        C_prev = C;
        t += dt;
        if (std::abs(t - next_event) <= 1e-9 * std::max(1.0, next_event))
            t = next_event;
        fp.t = t;
        ++sol.steps;
    }
    return sol;
}

} // namespace cablelife
