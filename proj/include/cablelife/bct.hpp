#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/charge_state.hpp"
#include "cablelife/constants.hpp"
#include "cablelife/errors.hpp"
#include "cablelife/field.hpp"
#include "cablelife/geometry.hpp"
#include "cablelife/load_program.hpp"
#include "cablelife/params.hpp"

namespace cablelife {

/// Thermionic (Schottky) injection current density at an electrode, A/m^2.
/// E_boundary is the field magnitude at the injecting electrode; zero or
/// reversed fields inject nothing. The barrier-lowering exponent is positive
/// (lowering increases injection); the result is clamped at >= 0.
inline double schottky_flux(double E_boundary, double T, double barrier, double f_s,
                            double epsilon) {
    if (!(T > 0))
        throw std::invalid_argument("schottky_flux: T must be > 0");
    if (!(E_boundary > 0))
        return 0.0;
    const auto& c = constants();
    constexpr double pi = 3.14159265358979323846;
    const double kbt = c.k_B * T;
    const double lowering = (c.q / kbt) * std::sqrt(c.q * E_boundary / (4.0 * pi * epsilon));
    const double j = c.A0 * T * T * std::exp(-barrier * c.q / kbt) * (std::exp(lowering) - f_s);
    return j > 0.0 ? j : 0.0;
}

/// Hopping mobility mu(E,T) = (2 v a/|E|) exp(-w q/kbt) sinh(q a |E| / (2 kbt)),
/// v = kbt/h. Below a tiny field threshold the series limit
/// mu0 = (q a^2 v / kbt) exp(-w q/kbt) is used for continuity.
inline double hopping_mobility(double E, double T, double barrier, double a_trap) {
    if (!(T > 0))
        throw std::invalid_argument("hopping_mobility: T must be > 0");
    if (!(a_trap > 0))
        throw std::invalid_argument("hopping_mobility: a_trap must be > 0");
    const auto& c = constants();
    const double kbt = c.k_B * T;
    const double nu = kbt / c.h;
    const double mu0 = c.q * a_trap * a_trap * nu / kbt * std::exp(-barrier * c.q / kbt);
    const double x = c.q * a_trap * std::abs(E) / (2.0 * kbt);
    if (x < 1e-8)
        return mu0;
    return mu0 * std::sinh(x) / x;
}

struct RecombRates {
    double S0 = 0, S1 = 0, S2 = 0, S3 = 0; // m^3/(s*C)
};

/// Recombination coefficients: base rates plus Langevin terms for every pair
/// that involves a mobile species.
inline RecombRates recombination_rates(double mu_e, double mu_h, const BctParams& p,
                                       double epsilon) {
    RecombRates s;
    s.S0 = p.S0_base;
    s.S1 = p.S1_base + mu_e / epsilon;
    s.S2 = p.S2_base + mu_h / epsilon;
    s.S3 = p.S3_base + (mu_e + mu_h) / epsilon;
    return s;
}

/// Thermal detrapping rate D = v exp(-w_tr q/kbt), v = kbt/h.
inline double detrapping_coeff(double T, double barrier) {
    if (!(T > 0))
        throw std::invalid_argument("detrapping_coeff: T must be > 0");
    const auto& c = constants();
    const double kbt = c.k_B * T;
    return kbt / c.h * std::exp(-barrier * c.q / kbt);
}

/// Densities of the four species at one node, C/m^3 magnitudes.
struct NodeDensities {
    double e_mu = 0, h_mu = 0, e_t = 0, h_t = 0;
};

struct SourceTerms {
    double s_e_mu = 0, s_e_t = 0, s_h_mu = 0, s_h_t = 0; // C/(m^3 s)
};

/// Trapping/detrapping/recombination source terms. Trapping carries the
/// saturation factor (1 - rho_t/rho_0t); the trapping flux leaving a mobile
/// species equals the flux entering its trapped companion.
inline SourceTerms source_terms(const NodeDensities& n, const RecombRates& S, double D_e,
                                double D_h, const BctParams& p) {
    const double sat_e = 1.0 - n.e_t / p.rho_e0t;
    const double sat_h = 1.0 - n.h_t / p.rho_h0t;
    const double trap_e = p.B_e * n.e_mu * sat_e;
    const double trap_h = p.B_h * n.h_mu * sat_h;
    SourceTerms s;
    s.s_e_mu = -trap_e + D_e * n.e_t - S.S1 * n.e_mu * n.h_t - S.S3 * n.e_mu * n.h_mu;
    s.s_e_t = trap_e - D_e * n.e_t - S.S0 * n.e_t * n.h_t - S.S2 * n.e_t * n.h_mu;
    s.s_h_mu = -trap_h + D_h * n.h_t - S.S2 * n.h_mu * n.e_t - S.S3 * n.e_mu * n.h_mu;
    s.s_h_t = trap_h - D_h * n.h_t - S.S0 * n.h_t * n.e_t - S.S1 * n.h_t * n.e_mu;
    return s;
}

/// Cumulative charge bookkeeping per carrier (electron/hole). Units follow
/// the mesh cell volume measure: C per radian per unit length (cylindrical)
/// or C per unit area (planar).
struct ConservationLedger {
    double injected_e = 0, injected_h = 0;
    double extracted_e = 0, extracted_h = 0;
    double recombined_e = 0, recombined_h = 0;
    long clamp_events = 0;
    double max_balance_error = 0; // worst relative species imbalance at a snapshot
};

struct BctOptions {
    bool diffusion = true;
    double safety = 0.8;          // fraction of the transport stability bound
    double source_fraction = 0.1; // fraction of the fastest source time scale
    double dt_max = 60.0;         // s
    double dt_min = 1e-9;         // s, smaller steps abort the run
    double temp_tol = 0.01;       // K; boundary drift that invalidates cached coefficients
    std::function<void(double, double)> progress; // (t, t_end), called sparsely
};

namespace detail {

struct NodeCoeff {
    double kbt = 0;  // J
    double nu = 0;   // 1/s
    double vt = 0;   // thermal voltage, V
    double mu0_e = 0, mu0_h = 0;
    double xc = 0; // q*a/(2 kbt), (m/V)^... multiplies E to the sinh argument
    double D_e = 0, D_h = 0;
};

struct BoundaryCoeff {
    double pref_e = 0, pref_h = 0; // A0*T^2*exp(-w_inj q/kbt)
    double beta = 0;               // barrier-lowering coefficient on sqrt(E)
};

struct Coeffs {
    std::vector<NodeCoeff> node;
    BoundaryCoeff inner, outer;
    double epsilon = 0;
};

inline BoundaryCoeff boundary_coeff(double T, const BctParams& p, double epsilon) {
    const auto& c = constants();
    constexpr double pi = 3.14159265358979323846;
    const double kbt = c.k_B * T;
    BoundaryCoeff b;
    b.pref_e = c.A0 * T * T * std::exp(-p.w_inj_e * c.q / kbt);
    b.pref_h = c.A0 * T * T * std::exp(-p.w_inj_h * c.q / kbt);
    b.beta = (c.q / kbt) * std::sqrt(c.q / (4.0 * pi * epsilon));
    return b;
}

inline Coeffs build_coeffs(const std::vector<double>& T, const BctParams& p, double epsilon) {
    const auto& c = constants();
    Coeffs k;
    k.epsilon = epsilon;
    k.node.resize(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (!(T[i] > 0))
            throw std::invalid_argument("bct: temperature must be > 0 at every node");
        NodeCoeff& nc = k.node[i];
        nc.kbt = c.k_B * T[i];
        nc.nu = nc.kbt / c.h;
        nc.vt = nc.kbt / c.q;
        nc.mu0_e = c.q * p.a_trap * p.a_trap * nc.nu / nc.kbt * std::exp(-p.w_mob_e * c.q / nc.kbt);
        nc.mu0_h = c.q * p.a_trap * p.a_trap * nc.nu / nc.kbt * std::exp(-p.w_mob_h * c.q / nc.kbt);
        nc.xc = c.q * p.a_trap / (2.0 * nc.kbt);
        nc.D_e = nc.nu * std::exp(-p.w_tr_e * c.q / nc.kbt);
        nc.D_h = nc.nu * std::exp(-p.w_tr_h * c.q / nc.kbt);
    }
    k.inner = boundary_coeff(T.front(), p, epsilon);
    k.outer = boundary_coeff(T.back(), p, epsilon);
    return k;
}

inline double mob(const NodeCoeff& c, double mu0, double Eabs) {
    const double x = c.xc * Eabs;
    if (x < 1e-8)
        return mu0;
    return mu0 * std::sinh(x) / x;
}

inline double schottky_cached(const BoundaryCoeff& b, double pref, double Eabs, double f_s) {
    if (!(Eabs > 0))
        return 0.0;
    const double j = pref * (std::exp(b.beta * std::sqrt(Eabs)) - f_s);
    return j > 0.0 ? j : 0.0;
}

/// Raw positivity/stability bound on dt (no safety factor): the step must not
/// drain more charge from any cell than it holds (transport part) and must
/// resolve the fastest local source rate (source part scaled by
/// source_fraction at the caller).
struct StabilityParts {
    double transport = std::numeric_limits<double>::infinity(); // 1/max outflow rate
    double source = std::numeric_limits<double>::infinity();    // 1/max loss-rate coeff
};

inline StabilityParts stability_parts(const RadialMesh& mesh, const ChargeState& st,
                                      const FieldProfile& field, const Coeffs& k,
                                      const BctParams& p, bool diffusion) {
    const std::size_t n = mesh.size();
    std::vector<double> out_e(n, 0.0), out_h(n, 0.0);
    const bool cyl = mesh.geometry.kind == GeometryKind::cylindrical;

    std::vector<double> vol(n);
    for (std::size_t i = 0; i < n; ++i) vol[i] = mesh.cell_volume(i);

    for (std::size_t f = 0; f + 1 < n; ++f) {
        const double wf = cyl ? mesh.face(f) : 1.0;
        const double dxf = mesh.nodes[f + 1] - mesh.nodes[f];
        const double Ef = 0.5 * (field.E[f] + field.E[f + 1]);
        const double Ea = std::abs(Ef);
        // electrons drift against E, holes along it
        const std::size_t de = (Ef < 0) ? f : f + 1;
        const std::size_t dh = (Ef > 0) ? f : f + 1;
        const double ve = mob(k.node[de], k.node[de].mu0_e, Ea) * Ea;
        const double vh = mob(k.node[dh], k.node[dh].mu0_h, Ea) * Ea;
        out_e[de] += wf * ve / vol[de];
        out_h[dh] += wf * vh / vol[dh];
        if (diffusion) {
            const double De = 0.5 * (k.node[f].vt * mob(k.node[f], k.node[f].mu0_e, std::abs(field.E[f])) +
                                     k.node[f + 1].vt * mob(k.node[f + 1], k.node[f + 1].mu0_e, std::abs(field.E[f + 1])));
            const double Dh = 0.5 * (k.node[f].vt * mob(k.node[f], k.node[f].mu0_h, std::abs(field.E[f])) +
                                     k.node[f + 1].vt * mob(k.node[f + 1], k.node[f + 1].mu0_h, std::abs(field.E[f + 1])));
            out_e[f] += wf * De / (dxf * vol[f]);
            out_e[f + 1] += wf * De / (dxf * vol[f + 1]);
            out_h[f] += wf * Dh / (dxf * vol[f]);
            out_h[f + 1] += wf * Dh / (dxf * vol[f + 1]);
        }
    }
    // electrode faces: only outflow constrains positivity
    {
        const double w_in = cyl ? mesh.nodes.front() : 1.0;
        const double w_out = cyl ? mesh.nodes.back() : 1.0;
        const double E0 = field.E.front(), E1 = field.E.back();
        const double ve0 = -mob(k.node.front(), k.node.front().mu0_e, std::abs(E0)) * E0;
        const double vh0 = mob(k.node.front(), k.node.front().mu0_h, std::abs(E0)) * E0;
        const double ve1 = -mob(k.node.back(), k.node.back().mu0_e, std::abs(E1)) * E1;
        const double vh1 = mob(k.node.back(), k.node.back().mu0_h, std::abs(E1)) * E1;
        if (ve0 < 0) out_e.front() += w_in * (-ve0) / vol.front();
        if (vh0 < 0) out_h.front() += w_in * (-vh0) / vol.front();
        if (ve1 > 0) out_e.back() += w_out * ve1 / vol.back();
        if (vh1 > 0) out_h.back() += w_out * vh1 / vol.back();
    }

    StabilityParts parts;
    double out_max = 0;
    for (std::size_t i = 0; i < n; ++i)
        out_max = std::max({out_max, out_e[i], out_h[i]});
    if (out_max > 0) parts.transport = 1.0 / out_max;

    double loss_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu_e = mob(k.node[i], k.node[i].mu0_e, std::abs(field.E[i]));
        const double mu_h = mob(k.node[i], k.node[i].mu0_h, std::abs(field.E[i]));
        const RecombRates S = recombination_rates(mu_e, mu_h, p, k.epsilon);
        const double l_emu = S.S1 * st.rho_h_t[i] + S.S3 * st.rho_h_mu[i] + p.B_e;
        const double l_et = S.S0 * st.rho_h_t[i] + S.S2 * st.rho_h_mu[i] + k.node[i].D_e;
        const double l_hmu = S.S2 * st.rho_e_t[i] + S.S3 * st.rho_e_mu[i] + p.B_h;
        const double l_ht = S.S0 * st.rho_e_t[i] + S.S1 * st.rho_e_mu[i] + k.node[i].D_h;
        const double cap_e = p.B_e * st.rho_e_mu[i] / p.rho_e0t;
        const double cap_h = p.B_h * st.rho_h_mu[i] / p.rho_h0t;
        loss_max = std::max({loss_max, l_emu, l_et, l_hmu, l_ht, cap_e, cap_h});
    }
    if (loss_max > 0) parts.source = 1.0 / loss_max;
    return parts;
}

/// One forward-Euler step of the continuity equations: donor-cell upwind
/// drift, centered diffusion, Schottky injection where the species drift
/// velocity points into the domain, free drift outflow otherwise.
inline ChargeState advance_core(const RadialMesh& mesh, const ChargeState& st,
                                const FieldProfile& field, const Coeffs& k, const BctParams& p,
                                double dt, bool diffusion, ConservationLedger* ledger) {
    const std::size_t n = mesh.size();
    const bool cyl = mesh.geometry.kind == GeometryKind::cylindrical;

    ChargeState out = st;
    out.t = st.t + dt;

    std::vector<double> vol(n), mu_e(n), mu_h(n);
    for (std::size_t i = 0; i < n; ++i) {
        vol[i] = mesh.cell_volume(i);
        const double Ea = std::abs(field.E[i]);
        mu_e[i] = mob(k.node[i], k.node[i].mu0_e, Ea);
        mu_h[i] = mob(k.node[i], k.node[i].mu0_h, Ea);
    }

    // net flux accumulator per node (C/(m^3 s) after /vol)
    std::vector<double> flux_e(n, 0.0), flux_h(n, 0.0);

    for (std::size_t f = 0; f + 1 < n; ++f) {
        const double wf = cyl ? mesh.face(f) : 1.0;
        const double dxf = mesh.nodes[f + 1] - mesh.nodes[f];
        const double Ef = 0.5 * (field.E[f] + field.E[f + 1]);
        const double Ea = std::abs(Ef);
        const std::size_t de = (Ef < 0) ? f : f + 1; // electron donor
        const std::size_t dh = (Ef > 0) ? f : f + 1; // hole donor
        double Fe = -mob(k.node[de], k.node[de].mu0_e, Ea) * Ef * st.rho_e_mu[de];
        double Fh = mob(k.node[dh], k.node[dh].mu0_h, Ea) * Ef * st.rho_h_mu[dh];
        if (diffusion) {
            const double De = 0.5 * (k.node[f].vt * mu_e[f] + k.node[f + 1].vt * mu_e[f + 1]);
            const double Dh = 0.5 * (k.node[f].vt * mu_h[f] + k.node[f + 1].vt * mu_h[f + 1]);
            Fe += -De * (st.rho_e_mu[f + 1] - st.rho_e_mu[f]) / dxf;
            Fh += -Dh * (st.rho_h_mu[f + 1] - st.rho_h_mu[f]) / dxf;
        }
        flux_e[f] -= wf * Fe;
        flux_e[f + 1] += wf * Fe;
        flux_h[f] -= wf * Fh;
        flux_h[f + 1] += wf * Fh;
    }

    // electrode faces
    double inj_e = 0, inj_h = 0, ext_e = 0, ext_h = 0;
    {
        const double w_in = cyl ? mesh.nodes.front() : 1.0;
        const double w_out = cyl ? mesh.nodes.back() : 1.0;
        const double E0 = field.E.front(), E1 = field.E.back();

        // inner electrode
        const double ve0 = -mu_e.front() * E0;
        if (ve0 > 0) { // electrons entering from the inner electrode
            const double J = schottky_cached(k.inner, k.inner.pref_e, std::abs(E0), p.f_s);
            flux_e.front() += w_in * J;
            inj_e += w_in * J;
        } else {
            const double F = (-ve0) * st.rho_e_mu.front(); // outflow magnitude
            flux_e.front() -= w_in * F;
            ext_e += w_in * F;
        }
        const double vh0 = mu_h.front() * E0;
        if (vh0 > 0) {
            const double J = schottky_cached(k.inner, k.inner.pref_h, std::abs(E0), p.f_s);
            flux_h.front() += w_in * J;
            inj_h += w_in * J;
        } else {
            const double F = (-vh0) * st.rho_h_mu.front();
            flux_h.front() -= w_in * F;
            ext_h += w_in * F;
        }

        // outer electrode
        const double ve1 = -mu_e.back() * E1;
        if (ve1 < 0) { // electrons entering from the outer electrode
            const double J = schottky_cached(k.outer, k.outer.pref_e, std::abs(E1), p.f_s);
            flux_e.back() += w_out * J;
            inj_e += w_out * J;
        } else {
            const double F = ve1 * st.rho_e_mu.back();
            flux_e.back() -= w_out * F;
            ext_e += w_out * F;
        }
        const double vh1 = mu_h.back() * E1;
        if (vh1 < 0) {
            const double J = schottky_cached(k.outer, k.outer.pref_h, std::abs(E1), p.f_s);
            flux_h.back() += w_out * J;
            inj_h += w_out * J;
        } else {
            const double F = vh1 * st.rho_h_mu.back();
            flux_h.back() -= w_out * F;
            ext_h += w_out * F;
        }
    }

    double recombined = 0;
    long clamps = 0;
    double checksum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const RecombRates S = recombination_rates(mu_e[i], mu_h[i], p, k.epsilon);
        const NodeDensities nd{st.rho_e_mu[i], st.rho_h_mu[i], st.rho_e_t[i], st.rho_h_t[i]};
        const SourceTerms s = source_terms(nd, S, k.node[i].D_e, k.node[i].D_h, p);

        out.rho_e_mu[i] = st.rho_e_mu[i] + dt * (flux_e[i] / vol[i] + s.s_e_mu);
        out.rho_h_mu[i] = st.rho_h_mu[i] + dt * (flux_h[i] / vol[i] + s.s_h_mu);
        out.rho_e_t[i] = st.rho_e_t[i] + dt * s.s_e_t;
        out.rho_h_t[i] = st.rho_h_t[i] + dt * s.s_h_t;

        const double rec = S.S0 * nd.e_t * nd.h_t + S.S1 * nd.e_mu * nd.h_t +
                           S.S2 * nd.e_t * nd.h_mu + S.S3 * nd.e_mu * nd.h_mu;
        recombined += rec * vol[i];

        auto clamp = [&clamps](double& v, double lo, double hi) {
            if (v < lo) {
                if (v < lo - 1e-18) ++clamps;
                v = lo;
            } else if (v > hi) {
                if (v > hi + 1e-18) ++clamps;
                v = hi;
            }
        };
        constexpr double huge = std::numeric_limits<double>::infinity();
        clamp(out.rho_e_mu[i], 0.0, huge);
        clamp(out.rho_h_mu[i], 0.0, huge);
        clamp(out.rho_e_t[i], 0.0, p.rho_e0t);
        clamp(out.rho_h_t[i], 0.0, p.rho_h0t);
        checksum += out.rho_e_mu[i] + out.rho_h_mu[i] + out.rho_e_t[i] + out.rho_h_t[i];
    }

    if (!std::isfinite(checksum))
        throw SolverError("bct: non-finite density at t = " + std::to_string(out.t) + " s");

    if (ledger) {
        ledger->injected_e += dt * inj_e;
        ledger->injected_h += dt * inj_h;
        ledger->extracted_e += dt * ext_e;
        ledger->extracted_h += dt * ext_h;
        ledger->recombined_e += dt * recombined;
        ledger->recombined_h += dt * recombined;
        ledger->clamp_events += clamps;
    }
    return out;
}

} // namespace detail

/// Largest stable dt for the given state, including the safety factor on the
/// transport bound and the source_fraction on the source bound.
inline double stable_dt(const RadialMesh& mesh, const ChargeState& state,
                        const FieldProfile& field, const std::vector<double>& T,
                        const BctParams& params, const BctOptions& opt = {}) {
    const detail::Coeffs k = detail::build_coeffs(T, params, mesh.geometry.epsilon());
    const detail::StabilityParts parts =
        detail::stability_parts(mesh, state, field, k, params, opt.diffusion);
    return std::min({opt.safety * parts.transport, opt.source_fraction * parts.source,
                     opt.dt_max});
}

/// Hard stability limit: dt above this is rejected by advance_charge.
inline double stability_limit(const RadialMesh& mesh, const ChargeState& state,
                              const FieldProfile& field, const std::vector<double>& T,
                              const BctParams& params, const BctOptions& opt = {}) {
    const detail::Coeffs k = detail::build_coeffs(T, params, mesh.geometry.epsilon());
    const detail::StabilityParts parts =
        detail::stability_parts(mesh, state, field, k, params, opt.diffusion);
    return std::min(parts.transport, opt.source_fraction * parts.source);
}

/// One explicit step of the four continuity equations.
inline ChargeState advance_charge(const RadialMesh& mesh, const ChargeState& state,
                                  const FieldProfile& field, const std::vector<double>& T,
                                  const BctParams& params, double dt, const BctOptions& opt = {},
                                  ConservationLedger* ledger = nullptr) {
    const std::size_t n = mesh.size();
    if (state.size() != n || field.size() != n || T.size() != n)
        throw std::invalid_argument("advance_charge: state/field/T must cover all nodes");
    if (!(dt > 0))
        throw std::invalid_argument("advance_charge: dt must be > 0");
    const detail::Coeffs k = detail::build_coeffs(T, params, mesh.geometry.epsilon());
    const detail::StabilityParts parts =
        detail::stability_parts(mesh, state, field, k, params, opt.diffusion);
    const double limit = std::min(parts.transport, opt.source_fraction * parts.source);
    if (dt > limit * (1.0 + 1e-9))
        throw std::invalid_argument("advance_charge: dt exceeds the stability bound");
    return detail::advance_core(mesh, state, field, k, params, dt, opt.diffusion, ledger);
}

struct Snapshot {
    double t = 0;
    ChargeState state;
    FieldProfile field;
};

struct TransientSolution {
    std::vector<Snapshot> snapshots;
    ConservationLedger ledger;
    long steps = 0;
    double dt_smallest = std::numeric_limits<double>::infinity();
    double dt_largest = 0;
};

namespace detail {

inline void update_balance_error(const RadialMesh& mesh, const ChargeState& st,
                                 ConservationLedger& ledger) {
    double tot_e = 0, tot_h = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double v = mesh.cell_volume(i);
        tot_e += (st.rho_e_mu[i] + st.rho_e_t[i]) * v;
        tot_h += (st.rho_h_mu[i] + st.rho_h_t[i]) * v;
    }
    const double exp_e = ledger.injected_e - ledger.extracted_e - ledger.recombined_e;
    const double exp_h = ledger.injected_h - ledger.extracted_h - ledger.recombined_h;
    const double scale_e = std::max({ledger.injected_e, ledger.extracted_e,
                                     ledger.recombined_e, std::abs(tot_e), 1e-300});
    const double scale_h = std::max({ledger.injected_h, ledger.extracted_h,
                                     ledger.recombined_h, std::abs(tot_h), 1e-300});
    ledger.max_balance_error = std::max({ledger.max_balance_error,
                                         std::abs(tot_e - exp_e) / scale_e,
                                         std::abs(tot_h - exp_h) / scale_h});
}

} // namespace detail

/// Full transient: explicit transport steps alternating with the Poisson
/// solve, starting from a charge-free insulation and the reference field.
/// Snapshots are emitted exactly at the requested times.
inline TransientSolution simulate_bct(const RadialMesh& mesh, const BctParams& params,
                                      const LoadProgram& program, double t_end,
                                      std::vector<double> snapshot_times,
                                      const BctOptions& opt = {}) {
    params.validate();
    program.validate();
    if (!(t_end > 0))
        throw std::invalid_argument("simulate_bct: t_end must be > 0");
    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                         snapshot_times.end());
    for (double ts : snapshot_times)
        if (ts < 0 || ts > t_end * (1.0 + 1e-12))
            throw std::invalid_argument("simulate_bct: snapshot time outside [0, t_end]");

    const double epsilon = mesh.geometry.epsilon();
    const std::size_t n = mesh.size();

    TransientSolution sol;
    ChargeState state = ChargeState::zero(n, 0.0);

    double t = 0;
    std::size_t next_snap = 0;
    double cached_T_in = std::numeric_limits<double>::quiet_NaN();
    double cached_T_out = cached_T_in;
    std::vector<double> T;
    detail::Coeffs coeffs;
    long steps_since_progress = 0;

    while (true) {
        const LoadSample load = program.at(t);
        if (!(std::abs(load.T_inner - cached_T_in) <= opt.temp_tol) ||
            !(std::abs(load.T_outer - cached_T_out) <= opt.temp_tol)) {
            T = temperature_profile(load.T_inner, load.T_outer, mesh);
            coeffs = detail::build_coeffs(T, params, epsilon);
            cached_T_in = load.T_inner;
            cached_T_out = load.T_outer;
        }
        FieldProfile field = poisson_field(mesh, state.net_charge(), load.U, epsilon);
        field.t = t;

        while (next_snap < snapshot_times.size() &&
               std::abs(t - snapshot_times[next_snap]) <= 1e-9 * std::max(1.0, snapshot_times[next_snap])) {
            detail::update_balance_error(mesh, state, sol.ledger);
            sol.snapshots.push_back({t, state, field});
            ++next_snap;
        }
        if (t >= t_end * (1.0 - 1e-12))
            break;

        double next_event = t_end;
        if (next_snap < snapshot_times.size())
            next_event = std::min(next_event, snapshot_times[next_snap]);

        const detail::StabilityParts parts =
            detail::stability_parts(mesh, state, field, coeffs, params, opt.diffusion);
        double dt = std::min({opt.safety * parts.transport,
                              opt.source_fraction * parts.source, opt.dt_max, next_event - t});
        if (!(dt > opt.dt_min))
            throw SolverError("simulate_bct: time step collapsed to " + std::to_string(dt) +
                              " s at t = " + std::to_string(t) + " s");

        try {
            state = detail::advance_core(mesh, state, field, coeffs, params, dt, opt.diffusion,
                                         &sol.ledger);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (simulate_bct at t = " +
                              std::to_string(t) + " s)");
        }
        t += dt;
        if (std::abs(t - next_event) <= 1e-9 * std::max(1.0, next_event))
            t = next_event;
        state.t = t;
        ++sol.steps;
        sol.dt_smallest = std::min(sol.dt_smallest, dt);
        sol.dt_largest = std::max(sol.dt_largest, dt);
        if (opt.progress && ++steps_since_progress >= 200000) {
            steps_since_progress = 0;
            opt.progress(t, t_end);
        }
    }
    return sol;
}

/// |J_diff| / |J_drift| per node, summed over both mobile species.
/// Nodes with zero drift current report NaN.
inline std::vector<double> diffusion_drift_ratio(const RadialMesh& mesh, const ChargeState& state,
                                                 const FieldProfile& field,
                                                 const BctParams& params,
                                                 const std::vector<double>& T) {
    const std::size_t n = mesh.size();
    if (state.size() != n || field.size() != n || T.size() != n)
        throw std::invalid_argument("diffusion_drift_ratio: inputs must cover all nodes");
    std::vector<double> ratio(n);
    auto grad = [&](const std::vector<double>& rho, std::size_t i) {
        if (i == 0) return (rho[1] - rho[0]) / (mesh.nodes[1] - mesh.nodes[0]);
        if (i == n - 1) return (rho[n - 1] - rho[n - 2]) / (mesh.nodes[n - 1] - mesh.nodes[n - 2]);
        return (rho[i + 1] - rho[i - 1]) / (mesh.nodes[i + 1] - mesh.nodes[i - 1]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double mu_e = hopping_mobility(field.E[i], T[i], params.w_mob_e, params.a_trap);
        const double mu_h = hopping_mobility(field.E[i], T[i], params.w_mob_h, params.a_trap);
        const double drift = (mu_e * state.rho_e_mu[i] + mu_h * state.rho_h_mu[i]) * std::abs(field.E[i]);
        const double vt = thermal_voltage(T[i]);
        const double diff = std::abs(vt * mu_e * grad(state.rho_e_mu, i)) +
                            std::abs(vt * mu_h * grad(state.rho_h_mu, i));
        ratio[i] = drift > 0 ? diff / drift : std::numeric_limits<double>::quiet_NaN();
    }
    return ratio;
}

} // namespace cablelife
