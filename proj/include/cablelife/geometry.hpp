#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/constants.hpp"

namespace cablelife {

enum class GeometryKind { cylindrical, planar };

/// 1D insulation geometry. Cylindrical: coaxial shell r_inner..r_outer.
/// Planar: slab of the given thickness, coordinates 0..thickness.
struct Geometry {
    GeometryKind kind = GeometryKind::cylindrical;
    double r_inner = 0;   // m
    double r_outer = 0;   // m
    double epsilon_r = 0; // relative permittivity

    double thickness() const { return r_outer - r_inner; }
    double epsilon() const { return epsilon_r * constants().eps0; }

    /// Radial weight of the divergence operator: r for cylindrical, 1 for planar.
    double weight(double r) const {
        return kind == GeometryKind::cylindrical ? r : 1.0;
    }

    void validate() const {
        if (!(epsilon_r > 1.0))
            throw std::invalid_argument("Geometry: epsilon_r must be > 1");
        if (kind == GeometryKind::cylindrical) {
            if (!(r_inner > 0.0) || !(r_outer > r_inner))
                throw std::invalid_argument("Geometry: need r_outer > r_inner > 0 for cylindrical");
        } else {
            if (r_inner != 0.0 || !(r_outer > 0.0))
                throw std::invalid_argument("Geometry: planar requires r_inner = 0 and thickness > 0");
        }
    }
};

inline Geometry make_cylindrical(double r_inner, double r_outer, double epsilon_r) {
    Geometry g{GeometryKind::cylindrical, r_inner, r_outer, epsilon_r};
    g.validate();
    return g;
}

inline Geometry make_planar(double thickness, double epsilon_r) {
    Geometry g{GeometryKind::planar, 0.0, thickness, epsilon_r};
    g.validate();
    return g;
}

/// Uniform 1D node mesh over the insulation. Node 0 sits on the inner
/// electrode, node n-1 on the outer one. Control volumes are node-centered
/// with half cells at the electrodes.
struct RadialMesh {
    Geometry geometry;
    std::vector<double> nodes;   // m, strictly increasing
    std::vector<double> spacing; // m, per-interval widths (n-1 entries)

    std::size_t size() const { return nodes.size(); }
    double dx() const { return spacing.front(); } // uniform mesh

    /// Interface position between node i and i+1.
    double face(std::size_t i) const { return 0.5 * (nodes[i] + nodes[i + 1]); }

    /// Width of the control volume around node i (half cells at the ends).
    double cell_width(std::size_t i) const {
        const std::size_t n = nodes.size();
        if (i == 0) return 0.5 * spacing.front();
        if (i == n - 1) return 0.5 * spacing.back();
        return 0.5 * (spacing[i - 1] + spacing[i]);
    }

    /// Integral of the geometric weight over the control volume of node i
    /// (per radian for cylindrical, per unit area for planar).
    double cell_volume(std::size_t i) const {
        const std::size_t n = nodes.size();
        const double lo = (i == 0) ? nodes.front() : face(i - 1);
        const double hi = (i == n - 1) ? nodes.back() : face(i);
        if (geometry.kind == GeometryKind::cylindrical)
            return 0.5 * (hi * hi - lo * lo);
        return hi - lo;
    }

    /// Position of node i as a fraction of insulation thickness.
    double thickness_fraction(std::size_t i) const {
        return (nodes[i] - nodes.front()) / (nodes.back() - nodes.front());
    }
};

/// Builds a uniform mesh of n nodes spanning the insulation.
inline RadialMesh build_mesh(const Geometry& geometry, std::size_t n) {
    geometry.validate();
    if (n < 3)
        throw std::invalid_argument("build_mesh: need at least 3 nodes, got " + std::to_string(n));
    RadialMesh mesh;
    mesh.geometry = geometry;
    mesh.nodes.resize(n);
    mesh.spacing.assign(n - 1, 0.0);
    const double h = (geometry.r_outer - geometry.r_inner) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        mesh.nodes[i] = geometry.r_inner + static_cast<double>(i) * h;
    mesh.nodes.back() = geometry.r_outer;
    for (std::size_t i = 0; i + 1 < n; ++i)
        mesh.spacing[i] = mesh.nodes[i + 1] - mesh.nodes[i];
    return mesh;
}

/// Quasi-steady radial temperature at radius r for boundary temperatures
/// T_inner, T_outer. Logarithmic profile in a coaxial shell, linear in a slab.
inline double temperature_at(double T_inner, double T_outer, const Geometry& geometry, double r) {
    const double slack = 1e-12 * geometry.r_outer;
    if (r < geometry.r_inner - slack || r > geometry.r_outer + slack)
        throw std::invalid_argument("temperature_at: r outside the insulation");
    r = std::min(std::max(r, geometry.r_inner), geometry.r_outer);
    if (geometry.kind == GeometryKind::planar) {
        const double f = (r - geometry.r_inner) / geometry.thickness();
        return T_inner - (T_inner - T_outer) * f;
    }
    const double f = std::log(r / geometry.r_inner) / std::log(geometry.r_outer / geometry.r_inner);
    return T_inner - (T_inner - T_outer) * f;
}

/// Per-node temperature profile for the given boundary temperatures.
inline std::vector<double> temperature_profile(double T_inner, double T_outer, const RadialMesh& mesh) {
    std::vector<double> T(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i)
        T[i] = temperature_at(T_inner, T_outer, mesh.geometry, mesh.nodes[i]);
    return T;
}

} // namespace cablelife
