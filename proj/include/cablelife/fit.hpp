#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/params.hpp"
#include "cablelife/pea.hpp"

namespace cablelife {

struct Interval {
    double lo = 0, hi = 0;
    bool fixed() const { return !(hi > lo); }
};

/// Box bounds of the free parameters. Barriers move in affine-scaled
/// coordinates, the rate parameters (B_e, B_h, S_base) in log-scaled ones.
/// An interval collapsed to a point pins that parameter.
struct ParamBounds {
    Interval w_inj_e, w_inj_h, w_mob_e, w_mob_h, w_tr_e, w_tr_h;
    Interval B_e, B_h, S_base;

    void validate() const {
        auto chk = [](const Interval& iv, const char* name, bool log_scaled) {
            if (iv.hi < iv.lo)
                throw std::invalid_argument(std::string("ParamBounds: empty interval for ") + name);
            if (log_scaled && !(iv.lo > 0))
                throw std::invalid_argument(std::string("ParamBounds: ") + name +
                                            " must be positive (log-scaled)");
        };
        chk(w_inj_e, "w_inj_e", false);
        chk(w_inj_h, "w_inj_h", false);
        chk(w_mob_e, "w_mob_e", false);
        chk(w_mob_h, "w_mob_h", false);
        chk(w_tr_e, "w_tr_e", false);
        chk(w_tr_h, "w_tr_h", false);
        chk(B_e, "B_e", true);
        chk(B_h, "B_h", true);
        chk(S_base, "S_base", true);
    }

    /// Symmetric bounds around a reference set: +-spread_abs on barriers (eV),
    /// factor spread_rel on the rates.
    static ParamBounds around(const BctParams& p, double barrier_spread, double rate_factor) {
        ParamBounds b;
        auto aff = [&](double v) { return Interval{v - barrier_spread, v + barrier_spread}; };
        auto lg = [&](double v) { return Interval{v / rate_factor, v * rate_factor}; };
        b.w_inj_e = aff(p.w_inj_e);
        b.w_inj_h = aff(p.w_inj_h);
        b.w_mob_e = aff(p.w_mob_e);
        b.w_mob_h = aff(p.w_mob_h);
        b.w_tr_e = aff(p.w_tr_e);
        b.w_tr_h = aff(p.w_tr_h);
        b.B_e = lg(p.B_e);
        b.B_h = lg(p.B_h);
        b.S_base = lg(p.S0_base);
        return b;
    }
};

struct FitResult {
    BctParams params;
    double cost = std::numeric_limits<double>::infinity(); // (C/m^3)^2 summed
    int iterations = 0;
    bool converged = false;
    int start_index = -1;
    std::vector<double> residual_history; // accepted-step costs, non-increasing
    std::string error;                    // nonempty if the start failed
};

namespace detail {

/// Scaled-coordinate view of the 9 fit parameters. Fixed intervals keep the
/// template value and contribute no coordinate.
struct FitSpace {
    BctParams tmpl;
    Interval ivs[9];
    std::vector<int> free_ids; // indices into the 9 logical parameters

    explicit FitSpace(const ParamBounds& b, const BctParams& t) : tmpl(t) {
        b.validate();
        ivs[0] = b.w_inj_e;
        ivs[1] = b.w_inj_h;
        ivs[2] = b.w_mob_e;
        ivs[3] = b.w_mob_h;
        ivs[4] = b.w_tr_e;
        ivs[5] = b.w_tr_h;
        ivs[6] = b.B_e;
        ivs[7] = b.B_h;
        ivs[8] = b.S_base;
        for (int j = 0; j < 9; ++j)
            if (!ivs[j].fixed()) free_ids.push_back(j);
    }

    const Interval* intervals() const { return ivs; }

    std::size_t dim() const { return free_ids.size(); }

    static double get(const BctParams& p, int id) {
        switch (id) {
            case 0: return p.w_inj_e;
            case 1: return p.w_inj_h;
            case 2: return p.w_mob_e;
            case 3: return p.w_mob_h;
            case 4: return p.w_tr_e;
            case 5: return p.w_tr_h;
            case 6: return p.B_e;
            case 7: return p.B_h;
            default: return p.S0_base;
        }
    }

    static void set(BctParams& p, int id, double v) {
        switch (id) {
            case 0: p.w_inj_e = v; break;
            case 1: p.w_inj_h = v; break;
            case 2: p.w_mob_e = v; break;
            case 3: p.w_mob_h = v; break;
            case 4: p.w_tr_e = v; break;
            case 5: p.w_tr_h = v; break;
            case 6: p.B_e = v; break;
            case 7: p.B_h = v; break;
            default: p.set_s_base(v); break;
        }
    }

    static bool log_scaled(int id) { return id >= 6; }

    std::vector<double> to_x(const BctParams& p) const {
        const Interval* ivs = intervals();
        std::vector<double> x(dim());
        for (std::size_t k = 0; k < dim(); ++k) {
            const int id = free_ids[k];
            const Interval& iv = ivs[id];
            const double v = get(p, id);
            x[k] = log_scaled(id) ? (std::log(v) - std::log(iv.lo)) / (std::log(iv.hi) - std::log(iv.lo))
                                  : (v - iv.lo) / (iv.hi - iv.lo);
        }
        return x;
    }

    BctParams to_params(const std::vector<double>& x) const {
        const Interval* ivs = intervals();
        BctParams p = tmpl;
        for (std::size_t k = 0; k < dim(); ++k) {
            const int id = free_ids[k];
            const Interval& iv = ivs[id];
            const double v = log_scaled(id)
                                 ? std::exp(std::log(iv.lo) + x[k] * (std::log(iv.hi) - std::log(iv.lo)))
                                 : iv.lo + x[k] * (iv.hi - iv.lo);
            set(p, id, v);
        }
        return p;
    }

    bool contains(const BctParams& p, double tol = 1e-9) const {
        const Interval* ivs = intervals();
        for (int id = 0; id < 9; ++id) {
            const Interval& iv = ivs[id];
            const double v = get(p, id);
            if (iv.fixed()) continue;
            const double slack = tol * std::max(std::abs(iv.hi), 1.0);
            if (v < iv.lo - slack || v > iv.hi + slack) return false;
        }
        return true;
    }
};

/// Gaussian elimination with partial pivoting for the (small) normal system.
inline bool solve_dense(std::vector<std::vector<double>> A, std::vector<double> b,
                        std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t cc = col; cc < n; ++cc) A[r][cc] -= f * A[col][cc];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return true;
}

} // namespace detail

/// Residual vector over a set of measurements, flattened in measurement order.
inline std::vector<double> fit_residuals(const BctParams& params,
                                         const std::vector<PeaMeasurement>& meas,
                                         const PeaSimConfig& cfg = {}, double epsilon_r = 2.3) {
    std::vector<double> r;
    for (const auto& m : meas) {
        const auto part = pea_residuals(params, m, cfg, epsilon_r);
        r.insert(r.end(), part.begin(), part.end());
    }
    return r;
}

inline double fit_cost_total(const BctParams& params, const std::vector<PeaMeasurement>& meas,
                             const PeaSimConfig& cfg = {}, double epsilon_r = 2.3) {
    double c = 0;
    for (double v : fit_residuals(params, meas, cfg, epsilon_r)) c += v * v;
    return c;
}

struct FitOptions {
    PeaSimConfig sim;
    double epsilon_r = 2.3;
    int max_iterations = 200;
    double cost_rel_tol = 1e-6;  // relative cost change on an accepted step
    double grad_tol = 1e-8;      // infinity norm of J^T r in scaled coordinates
    double fd_rel_step = 1e-3;   // forward-difference step, relative
    double lambda_init = 1e-3;   // Levenberg damping
    double max_step = 0.25;      // trust-region cap on |step|_inf, scaled coords
};

/// Bounded trust-region (Levenberg-Marquardt with box projection) nonlinear
/// least squares over the scaled parameter coordinates.
inline FitResult fit_local(const BctParams& start, const std::vector<PeaMeasurement>& meas,
                           const ParamBounds& bounds, const FitOptions& opt = {}) {
    if (meas.empty())
        throw std::invalid_argument("fit_local: no measurements");
    detail::FitSpace space(bounds, start);
    if (!space.contains(start))
        throw std::invalid_argument("fit_local: start outside bounds");

    FitResult res;
    res.params = start;

    const std::size_t dim = space.dim();
    std::vector<double> x = space.to_x(start);
    for (double& v : x) v = std::min(1.0, std::max(0.0, v));

    auto eval = [&](const std::vector<double>& xx) {
        return fit_residuals(space.to_params(xx), meas, opt.sim, opt.epsilon_r);
    };
    auto cost_of = [](const std::vector<double>& r) {
        double c = 0;
        for (double v : r) c += v * v;
        return c;
    };

    std::vector<double> r = eval(x);
    double cost = cost_of(r);
    res.cost = cost;
    res.residual_history.push_back(cost);

    if (dim == 0) { // all parameters pinned
        res.converged = true;
        return res;
    }

    const std::size_t m = r.size();
    double lambda = opt.lambda_init;

    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        res.iterations = iter;

        // forward-difference Jacobian, columns in scaled coordinates
        std::vector<std::vector<double>> J(dim, std::vector<double>(m));
        for (std::size_t k = 0; k < dim; ++k) {
            double h = opt.fd_rel_step * std::max(std::abs(x[k]), 1e-2);
            std::vector<double> xs = x;
            if (xs[k] + h > 1.0) h = -h; // step inward at the upper bound
            xs[k] += h;
            const auto rk = eval(xs);
            for (std::size_t i = 0; i < m; ++i) J[k][i] = (rk[i] - r[i]) / h;
        }

        std::vector<double> g(dim, 0.0);
        for (std::size_t k = 0; k < dim; ++k)
            for (std::size_t i = 0; i < m; ++i) g[k] += J[k][i] * r[i];
        double gmax = 0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < opt.grad_tol) {
            res.converged = true;
            break;
        }

        std::vector<std::vector<double>> JtJ(dim, std::vector<double>(dim, 0.0));
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a; b < dim; ++b) {
                double s = 0;
                for (std::size_t i = 0; i < m; ++i) s += J[a][i] * J[b][i];
                JtJ[a][b] = JtJ[b][a] = s;
            }
        // Uniform (Levenberg) damping, not per-coordinate Marquardt scaling:
        // a parameter the data cannot currently see has noise-level gradient
        // AND noise-level curvature, and dividing one by the other would hand
        // it the largest step in the trial. Damping against the dominant
        // curvature lets such coordinates step by their own tiny gradient
        // instead, while the informative directions keep Gauss-Newton scale.
        double maxdiag = 1e-12;
        for (std::size_t k = 0; k < dim; ++k) maxdiag = std::max(maxdiag, JtJ[k][k]);

        bool stepped = false;
        for (int tries = 0; tries < 25 && !stepped; ++tries) {
            auto A = JtJ;
            for (std::size_t k = 0; k < dim; ++k) A[k][k] += lambda * maxdiag;
            std::vector<double> rhs(dim), delta;
            for (std::size_t k = 0; k < dim; ++k) rhs[k] = -g[k];
            if (!detail::solve_dense(A, rhs, delta)) {
                lambda *= 10;
                continue;
            }
            // Injection and mobility barriers compensate each other almost
            // exactly, so the Gauss-Newton system is near-singular and its
            // raw step can be enormous along the null direction. Rescaling
            // such a step would keep its useless direction; instead the step
            // must be re-solved with stronger damping until it fits the trust
            // region, which bends it toward the gradient. No objective
            // evaluation is spent on oversized steps.
            double dmax = 0;
            for (double v : delta) dmax = std::max(dmax, std::abs(v));
            if (dmax > opt.max_step) {
                lambda *= 4.0;
                continue;
            }
            std::vector<double> xn(dim);
            for (std::size_t k = 0; k < dim; ++k)
                xn[k] = std::min(1.0, std::max(0.0, x[k] + delta[k]));
            const auto rn = eval(xn);
            const double cn = cost_of(rn);
            if (cn < cost) {
                const double drop = cost - cn;
                x = xn;
                r = rn;
                cost = cn;
                res.residual_history.push_back(cost);
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (drop <= opt.cost_rel_tol * std::max(cost, 1e-300)) {
                    res.converged = true;
                    iter = opt.max_iterations; // terminate outer loop
                }
            } else {
                lambda *= 4.0;
            }
        }
        if (!stepped) { // no descent direction found: local stationarity
            res.converged = true;
            break;
        }
        if (res.converged) break;
    }

    res.params = space.to_params(x);
    res.cost = cost;
    return res;
}

/// Deterministic multi-start search: n_starts independent local fits from
/// uniform random starts inside the bounds. Returns the best result plus the
/// per-start list ordered by start index.
inline std::pair<FitResult, std::vector<FitResult>> fit_global(
    const ParamBounds& bounds, int n_starts, std::uint64_t seed,
    const std::vector<PeaMeasurement>& meas, const BctParams& tmpl, const FitOptions& opt = {}) {
    if (n_starts < 1)
        throw std::invalid_argument("fit_global: n_starts must be >= 1");
    detail::FitSpace space(bounds, tmpl);
    const std::size_t dim = space.dim();

    // all starts are drawn up front so the draw order is independent of the
    // per-start run time
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(n_starts),
                                            std::vector<double>(dim));
    for (auto& s : starts)
        for (double& v : s) v = unit();

    std::vector<FitResult> all;
    all.reserve(starts.size());
    for (std::size_t si = 0; si < starts.size(); ++si) {
        FitResult fr;
        try {
            fr = fit_local(space.to_params(starts[si]), meas, bounds, opt);
        } catch (const std::exception& e) {
            fr.error = e.what();
            fr.converged = false;
            fr.cost = std::numeric_limits<double>::infinity();
        }
        fr.start_index = static_cast<int>(si);
        all.push_back(std::move(fr));
    }

    std::size_t best = 0;
    for (std::size_t si = 1; si < all.size(); ++si)
        if (all[si].cost < all[best].cost) best = si;
    return {all[best], all};
}

} // namespace cablelife
