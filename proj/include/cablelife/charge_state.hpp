#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/params.hpp"

namespace cablelife {

/// Per-node density magnitudes of the four charge species at one instant.
/// All fields are stored as non-negative magnitudes in C/m^3; the sign
/// convention enters only when the net charge density is formed:
///   rho_net = -rho_e_mu + rho_h_mu - rho_e_t + rho_h_t
struct ChargeState {
    std::vector<double> rho_e_mu; // mobile electrons
    std::vector<double> rho_h_mu; // mobile holes
    std::vector<double> rho_e_t;  // trapped electrons
    std::vector<double> rho_h_t;  // trapped holes
    double t = 0;                 // s

    std::size_t size() const { return rho_e_mu.size(); }

    static ChargeState zero(std::size_t n, double t = 0) {
        ChargeState s;
        s.rho_e_mu.assign(n, 0.0);
        s.rho_h_mu.assign(n, 0.0);
        s.rho_e_t.assign(n, 0.0);
        s.rho_h_t.assign(n, 0.0);
        s.t = t;
        return s;
    }

    /// Validating constructor: rejects negative densities and trapped
    /// densities above their caps.
    static ChargeState make(std::vector<double> e_mu, std::vector<double> h_mu,
                            std::vector<double> e_t, std::vector<double> h_t,
                            double t, const BctParams& params) {
        ChargeState s;
        s.rho_e_mu = std::move(e_mu);
        s.rho_h_mu = std::move(h_mu);
        s.rho_e_t = std::move(e_t);
        s.rho_h_t = std::move(h_t);
        s.t = t;
        s.validate(params);
        return s;
    }

    void validate(const BctParams& params) const {
        const std::size_t n = rho_e_mu.size();
        if (rho_h_mu.size() != n || rho_e_t.size() != n || rho_h_t.size() != n)
            throw std::invalid_argument("ChargeState: species fields differ in length");
        for (std::size_t i = 0; i < n; ++i) {
            if (rho_e_mu[i] < 0 || rho_h_mu[i] < 0 || rho_e_t[i] < 0 || rho_h_t[i] < 0)
                throw std::invalid_argument("ChargeState: negative density at node " + std::to_string(i));
            if (rho_e_t[i] > params.rho_e0t)
                throw std::invalid_argument("ChargeState: trapped electron density above cap at node " +
                                            std::to_string(i));
            if (rho_h_t[i] > params.rho_h0t)
                throw std::invalid_argument("ChargeState: trapped hole density above cap at node " +
                                            std::to_string(i));
        }
    }

    /// Net (signed) charge density per node.
    std::vector<double> net_charge() const {
        std::vector<double> rho(size());
        for (std::size_t i = 0; i < size(); ++i)
            rho[i] = -rho_e_mu[i] + rho_h_mu[i] - rho_e_t[i] + rho_h_t[i];
        return rho;
    }
};

} // namespace cablelife
