#pragma once

namespace cablelife {

/// Physical constants (CODATA 2018). A0 is the Richardson constant used for
/// thermionic injection; it can be overridden through configuration.
struct PhysicalConstants {
    double k_B = 1.380649e-23;      // Boltzmann constant, J/K
    double q = 1.602176634e-19;     // elementary charge, C
    double h = 6.62607015e-34;      // Planck constant, J*s
    double A0 = 1.2e6;              // Richardson constant, A/(m^2 K^2)
    double eps0 = 8.8541878128e-12; // vacuum permittivity, F/m
};

inline const PhysicalConstants& constants() {
    static const PhysicalConstants c{};
    return c;
}

/// Thermal voltage k_B*T/q in volts.
inline double thermal_voltage(double T) {
    const auto& c = constants();
    return c.k_B * T / c.q;
}

/// eV -> J
inline double ev_to_joule(double ev) { return ev * constants().q; }

inline double celsius_to_kelvin(double c) { return c + 273.15; }
inline double kelvin_to_celsius(double k) { return k - 273.15; }

} // namespace cablelife
