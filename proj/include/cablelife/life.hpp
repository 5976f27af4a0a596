#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/geometry.hpp"
#include "cablelife/load_program.hpp"
#include "cablelife/params.hpp"

namespace cablelife {

/// Electrothermal inverse-power/Arrhenius life at one operating point:
///   L = L_D (E/E_D)^-(n_D - b_ET T') (E_D/E_0)^(b_ET T') exp(-B T'),
///   T' = 1/T_D - 1/T.
inline double life_at(double E, double T, const LifeParams& p) {
    if (!(E > 0))
        throw std::invalid_argument("life_at: E must be > 0 (zero-field points get infinite life upstream)");
    if (!(T > 0))
        throw std::invalid_argument("life_at: T must be > 0");
    const double tp = 1.0 / p.T_D - 1.0 / T;
    double L = p.L_D * std::pow(E / p.E_D, -(p.n_D - p.b_ET * tp)) * std::exp(-p.B * tp);
    if (p.b_ET != 0.0)
        L *= std::pow(p.E_D / p.E_0, p.b_ET * tp);
    return L;
}

/// Loss of life over one cycle: LF(r) = integral dt / L(E(r,t), T(r,t)) by
/// trapezoidal quadrature on the shared time grid. Zero-field samples
/// contribute nothing (infinite life).
inline std::vector<double> loss_of_life(const std::vector<double>& times,
                                        const std::vector<std::vector<double>>& E_hist,
                                        const std::vector<std::vector<double>>& T_hist,
                                        const LifeParams& p) {
    p.validate();
    const std::size_t nt = times.size();
    if (nt < 2)
        throw std::invalid_argument("loss_of_life: need at least 2 time samples");
    if (E_hist.size() != nt || T_hist.size() != nt)
        throw std::invalid_argument("loss_of_life: histories must share the time grid");
    const std::size_t n = E_hist.front().size();
    for (std::size_t k = 0; k < nt; ++k) {
        if (E_hist[k].size() != n || T_hist[k].size() != n)
            throw std::invalid_argument("loss_of_life: node counts differ across the history");
        if (k > 0 && !(times[k] > times[k - 1]))
            throw std::invalid_argument("loss_of_life: times must increase");
    }

    std::vector<double> lf(n, 0.0);
    std::vector<double> rate_prev(n), rate_cur(n);
    auto fill_rates = [&](std::size_t k, std::vector<double>& rate) {
        for (std::size_t i = 0; i < n; ++i) {
            const double E = std::abs(E_hist[k][i]);
            rate[i] = E > 0 ? 1.0 / life_at(E, T_hist[k][i], p) : 0.0;
        }
    };
    fill_rates(0, rate_prev);
    for (std::size_t k = 1; k < nt; ++k) {
        fill_rates(k, rate_cur);
        const double h = times[k] - times[k - 1];
        for (std::size_t i = 0; i < n; ++i)
            lf[i] += 0.5 * h * (rate_prev[i] + rate_cur[i]);
        rate_prev.swap(rate_cur);
    }
    return lf;
}

/// Standard Type Test sequence: 24 cycles of the 24-hour type followed by
/// 3 cycles of the 48-hour type (864 h total). Component programs must be
/// 24 h and 48 h long.
inline LoadProgram compose_tt_program(const LoadProgram& cycle24, const LoadProgram& cycle48,
                                      int n24 = 24, int n48 = 3) {
    cycle24.validate();
    cycle48.validate();
    const double h24 = 24.0 * 3600.0, h48 = 48.0 * 3600.0;
    if (std::abs(cycle24.duration() - h24) > 1e-6 * h24)
        throw std::invalid_argument("compose_tt_program: first component must last 24 h");
    if (std::abs(cycle48.duration() - h48) > 1e-6 * h48)
        throw std::invalid_argument("compose_tt_program: second component must last 48 h");
    if (n24 < 1 || n48 < 1)
        throw std::invalid_argument("compose_tt_program: the sequence requires both cycle types");

    LoadProgram prog;
    double offset = 0;
    auto append = [&](const LoadProgram& c, const std::string& label, int count, double dur) {
        for (int k = 0; k < count; ++k) {
            for (const LoadSample& s : c.samples) {
                LoadSample shifted = s;
                shifted.t += offset;
                if (!prog.samples.empty()) {
                    const double last = prog.samples.back().t;
                    if (shifted.t <= last) {
                        if (shifted.t < last - 1e-9)
                            throw std::invalid_argument("compose_tt_program: component samples overlap");
                        // coincident boundary sample: the incoming cycle owns
                        // its start, so its values win (time kept monotone)
                        shifted.t = last;
                        prog.samples.back() = shifted;
                        continue;
                    }
                }
                prog.samples.push_back(shifted);
            }
            prog.cycle_boundaries.push_back({offset, offset + dur, label + "#" + std::to_string(k + 1)});
            offset += dur;
        }
    };
    append(cycle24, "24h", n24, h24);
    append(cycle48, "48h", n48, h48);
    prog.validate();
    return prog;
}

/// Field/temperature history of one representative cycle of a given type.
struct CycleHistory {
    std::vector<double> times;                 // s within the cycle, ascending
    std::vector<std::vector<double>> E;        // [time][node], V/m
    std::vector<std::vector<double>> T;        // [time][node], K
    double duration = 0;                       // s
};

struct LifeResult {
    std::vector<double> lf_24, lf_48;   // per-node loss of life of one cycle of each type
    std::vector<double> lf_total;       // per-node Miner sum over the full program
    std::vector<double> life_s;         // per-node extrapolated life, s
    int n24 = 0, n48 = 0;
    double program_duration = 0;        // s
    double min_life = 0;                // s
    std::size_t argmin_node = 0;
    double argmin_position = 0;         // thickness fraction
    bool withstands = false;            // LF_total < 1 everywhere

    double max_lf() const {
        double m = 0;
        for (double v : lf_total) m = std::max(m, v);
        return m;
    }
};

/// Miner accumulation over the Type Test program from per-cycle-type
/// histories. Life per node extrapolates the program's damage rate.
inline LifeResult estimate_life(const CycleHistory& c24, int n24, const CycleHistory& c48,
                                int n48, const LifeParams& p, const RadialMesh& mesh) {
    p.validate();
    if (n24 < 0 || n48 < 0 || (n24 == 0 && n48 == 0))
        throw std::invalid_argument("estimate_life: need at least one cycle");

    const std::size_t n = mesh.size();
    LifeResult res;
    res.n24 = n24;
    res.n48 = n48;
    res.lf_24.assign(n, 0.0);
    res.lf_48.assign(n, 0.0);
    if (n24 > 0) {
        if (c24.E.empty() || c24.E.front().size() != n)
            throw std::invalid_argument("estimate_life: 24-h history does not match the mesh");
        res.lf_24 = loss_of_life(c24.times, c24.E, c24.T, p);
    }
    if (n48 > 0) {
        if (c48.E.empty() || c48.E.front().size() != n)
            throw std::invalid_argument("estimate_life: 48-h history does not match the mesh");
        res.lf_48 = loss_of_life(c48.times, c48.E, c48.T, p);
    }

    res.program_duration = n24 * (n24 > 0 ? c24.duration : 0.0) + n48 * (n48 > 0 ? c48.duration : 0.0);
    res.lf_total.resize(n);
    res.life_s.resize(n);
    double best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        res.lf_total[i] = n24 * res.lf_24[i] + n48 * res.lf_48[i];
        res.life_s[i] = res.lf_total[i] > 0 ? res.program_duration / res.lf_total[i]
                                            : std::numeric_limits<double>::infinity();
        if (res.lf_total[i] > best) {
            best = res.lf_total[i];
            res.argmin_node = i;
        }
    }
    res.min_life = res.life_s[res.argmin_node];
    res.argmin_position = mesh.thickness_fraction(res.argmin_node);
    res.withstands = res.max_lf() < 1.0;
    return res;
}

} // namespace cablelife
