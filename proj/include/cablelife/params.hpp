#pragma once

#include <stdexcept>
#include <string>

namespace cablelife {

/// Microscopic transport parameters. Barriers are in eV, trapping
/// coefficients in 1/s, base recombination rates in m^3/(s*C), trap caps in
/// C/m^3. f_s is the injection offset factor (1 gives zero injection at zero
/// field).
struct BctParams {
    double w_inj_e = 0; // electron injection barrier, eV
    double w_inj_h = 0; // hole injection barrier, eV
    double w_mob_e = 0; // electron mobility barrier, eV
    double w_mob_h = 0; // hole mobility barrier, eV
    double w_tr_e = 0;  // electron detrapping barrier, eV
    double w_tr_h = 0;  // hole detrapping barrier, eV
    double B_e = 0;     // electron trapping coefficient, 1/s
    double B_h = 0;     // hole trapping coefficient, 1/s
    double S0_base = 0; // trapped-trapped recombination base, m^3/(s*C)
    double S1_base = 0; // mobile e / trapped h base
    double S2_base = 0; // mobile h / trapped e base
    double S3_base = 0; // mobile-mobile base
    double rho_e0t = 100.0; // max trapped electron density, C/m^3
    double rho_h0t = 100.0; // max trapped hole density, C/m^3
    double a_trap = 1e-9;   // inter-trap distance, m
    double f_s = 1.0;       // injection offset factor

    /// Sets all four base recombination rates at once (single published
    /// S_base column).
    BctParams& set_s_base(double s) {
        S0_base = S1_base = S2_base = S3_base = s;
        return *this;
    }

    void validate() const {
        auto barrier_ok = [](double w) { return w > 0.0 && w < 2.0; };
        if (!barrier_ok(w_inj_e) || !barrier_ok(w_inj_h) || !barrier_ok(w_mob_e) ||
            !barrier_ok(w_mob_h) || !barrier_ok(w_tr_e) || !barrier_ok(w_tr_h))
            throw std::invalid_argument("BctParams: all barriers must lie in (0, 2) eV");
        if (B_e < 0 || B_h < 0)
            throw std::invalid_argument("BctParams: trapping coefficients must be >= 0");
        if (S0_base < 0 || S1_base < 0 || S2_base < 0 || S3_base < 0)
            throw std::invalid_argument("BctParams: base recombination rates must be >= 0");
        if (!(rho_e0t > 0) || !(rho_h0t > 0))
            throw std::invalid_argument("BctParams: trap caps must be > 0");
        if (!(a_trap > 0))
            throw std::invalid_argument("BctParams: a_trap must be > 0");
    }
};

/// Hopping-form conductivity law
///   sigma(E,T) = sigma_ref * exp(-Ea*q/(k_B*T)) * sinh(b*|E|)/(b*|E|)
/// with the series limit at E -> 0. All values come from configuration; no
/// material defaults are built in.
struct KleinParams {
    double sigma_ref = 0;         // S/m
    double activation_energy = 0; // eV
    double field_coeff = 0;       // m/V

    void validate() const {
        if (!(sigma_ref > 0) || !(activation_energy > 0) || !(field_coeff > 0))
            throw std::invalid_argument("KleinParams: all parameters must be > 0");
    }
};

/// Electrothermal IPM-Arrhenius life model parameters.
struct LifeParams {
    double L_D = 0;  // design life, s
    double E_D = 0;  // design field, V/m
    double T_D = 0;  // design temperature, K
    double n_D = 0;  // voltage endurance coefficient at T_D
    double b_ET = 0; // electrothermal synergism, K
    double B = 0;    // Arrhenius parameter, K
    double E_0 = 0;  // reference field of the synergism term, V/m (inert when b_ET = 0)

    void validate() const {
        if (!(L_D > 0) || !(E_D > 0) || !(T_D > 0) || !(n_D > 0) || !(B > 0))
            throw std::invalid_argument("LifeParams: L_D, E_D, T_D, n_D, B must be > 0");
        if (b_ET < 0)
            throw std::invalid_argument("LifeParams: b_ET must be >= 0");
        if (b_ET > 0 && !(E_0 > 0))
            throw std::invalid_argument("LifeParams: E_0 must be > 0 when b_ET > 0");
    }
};

} // namespace cablelife
