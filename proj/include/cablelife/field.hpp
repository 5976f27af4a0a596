#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cablelife/geometry.hpp"

namespace cablelife {

/// Signed radial electric field on the mesh nodes at one instant.
/// Invariant: the trapezoidal integral of E across the insulation equals the
/// applied voltage to 1e-9 relative.
struct FieldProfile {
    std::vector<double> E; // V/m, per node
    double U_applied = 0;  // V
    double t = 0;          // s

    std::size_t size() const { return E.size(); }

    double max_abs() const {
        double m = 0;
        for (double v : E) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Trapezoidal integral of a nodal quantity over the mesh radius.
inline double trapz(const RadialMesh& mesh, const std::vector<double>& f) {
    if (f.size() != mesh.size())
        throw std::invalid_argument("trapz: size mismatch with mesh");
    double acc = 0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        acc += 0.5 * (f[i] + f[i + 1]) * (mesh.nodes[i + 1] - mesh.nodes[i]);
    return acc;
}

inline void check_voltage_constraint(const RadialMesh& mesh, const FieldProfile& fp) {
    const double integral = trapz(mesh, fp.E);
    const double tol = 1e-9 * std::max(std::abs(fp.U_applied), 1.0);
    if (std::abs(integral - fp.U_applied) > tol)
        throw std::logic_error("FieldProfile: voltage constraint violated");
}

/// Charge-free reference field. The homogeneous solution (C/r cylindrical,
/// constant planar) is scaled so the *discrete* trapezoidal voltage matches U,
/// which keeps it consistent with poisson_field on the same mesh; the O(dx^2)
/// quadrature deviation from the textbook U/(r ln(ro/ri)) is ~1e-6 at 100 nodes.
inline FieldProfile laplacian_field(const Geometry& geometry, double U, const RadialMesh& mesh) {
    if (U < 0)
        throw std::invalid_argument("laplacian_field: U must be >= 0");
    const std::size_t n = mesh.size();
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i)
        base[i] = geometry.kind == GeometryKind::cylindrical ? 1.0 / mesh.nodes[i] : 1.0;
    const double denom = trapz(mesh, base);
    FieldProfile fp;
    fp.U_applied = U;
    fp.E.resize(n);
    const double c = U / denom;
    for (std::size_t i = 0; i < n; ++i) fp.E[i] = c * base[i];
    return fp;
}

/// Solves the 1D Poisson problem d(w eps E)/dr = w rho (w = r cylindrical,
/// 1 planar) by cumulative Gauss-law integration; the free constant is fixed by
/// the trapezoidal voltage constraint. Linear in (rho, U) by construction.
inline FieldProfile poisson_field(const RadialMesh& mesh, const std::vector<double>& rho_net,
                                  double U, double epsilon) {
    const std::size_t n = mesh.size();
    if (rho_net.size() != n)
        throw std::invalid_argument("poisson_field: rho_net must cover all nodes");
    if (!(epsilon > 0))
        throw std::invalid_argument("poisson_field: epsilon must be positive");

    const bool cyl = mesh.geometry.kind == GeometryKind::cylindrical;
    std::vector<double> e_part(n), base(n);
    double q = 0; // cumulative integral of w*rho
    for (std::size_t i = 0; i < n; ++i) {
        const double r = mesh.nodes[i];
        if (i > 0) {
            const double r0 = mesh.nodes[i - 1];
            const double f0 = rho_net[i - 1] * (cyl ? r0 : 1.0);
            const double f1 = rho_net[i] * (cyl ? r : 1.0);
            q += 0.5 * (f0 + f1) * (r - r0);
        }
        const double w = cyl ? r : 1.0;
        e_part[i] = q / (epsilon * w);
        base[i] = 1.0 / w;
    }
    const double c = (U - trapz(mesh, e_part)) / trapz(mesh, base);
    FieldProfile fp;
    fp.U_applied = U;
    fp.E.resize(n);
    for (std::size_t i = 0; i < n; ++i) fp.E[i] = e_part[i] + c * base[i];
    return fp;
}

} // namespace cablelife
