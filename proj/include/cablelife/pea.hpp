#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/bct.hpp"
#include "cablelife/errors.hpp"
#include "cablelife/field.hpp"
#include "cablelife/geometry.hpp"

namespace cablelife {

constexpr std::size_t pea_grid_points = 50;

/// One PEA space-charge measurement: charge density profiles across a planar
/// specimen at a set of times. applied_E_mean is signed and encodes polarity.
struct PeaMeasurement {
    std::vector<double> positions;         // m, pea_grid_points uniform points
    std::vector<double> times;             // s, strictly increasing
    std::vector<std::vector<double>> rho;  // [time][position], C/m^3
    double applied_E_mean = 0;             // V/m
    double temperature = 0;                // K
    double thickness = 0;                  // m

    void validate() const {
        if (!(thickness > 0))
            throw std::invalid_argument("PeaMeasurement: thickness must be > 0");
        if (!(temperature > 0))
            throw std::invalid_argument("PeaMeasurement: temperature must be > 0");
        if (positions.empty() || times.empty())
            throw std::invalid_argument("PeaMeasurement: empty axes");
        for (std::size_t i = 1; i < positions.size(); ++i)
            if (!(positions[i] > positions[i - 1]))
                throw std::invalid_argument("PeaMeasurement: positions must increase");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument("PeaMeasurement: duplicate or unordered times");
        if (rho.size() != times.size())
            throw std::invalid_argument("PeaMeasurement: time axis does not match grid");
        for (const auto& row : rho)
            if (row.size() != positions.size())
                throw std::invalid_argument("PeaMeasurement: position axis does not match grid");
        const double tol = 1e-9 * thickness;
        if (std::abs(positions.front()) > tol || std::abs(positions.back() - thickness) > tol)
            throw std::invalid_argument("PeaMeasurement: positions must span [0, thickness]");
    }
};

namespace detail {

inline double lerp_clamped(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double f = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + f * (ys[j] - ys[j - 1]);
}

inline std::vector<double> uniform_positions(double thickness, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j)
        x[j] = thickness * static_cast<double>(j) / static_cast<double>(n - 1);
    x.back() = thickness;
    return x;
}

} // namespace detail

/// Reads a PEA file: header lines `# thickness_m=`, `# E_mean_V_per_m=`,
/// `# T_K=`, then rows `t_s, x_m, rho_C_per_m3`. Rows sharing a time value
/// form one profile; every profile is re-interpolated onto pea_grid_points
/// uniform positions across the specimen.
inline PeaMeasurement load_pea(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("load_pea: cannot open " + path);

    PeaMeasurement m;
    bool have_d = false, have_e = false, have_t = false;

    std::vector<double> raw_x, raw_rho;
    std::vector<std::vector<double>> raw_profiles_x, raw_profiles_rho;
    double cur_t = 0;
    bool in_block = false;

    auto close_block = [&]() {
        if (!in_block) return;
        m.times.push_back(cur_t);
        raw_profiles_x.push_back(raw_x);
        raw_profiles_rho.push_back(raw_rho);
        raw_x.clear();
        raw_rho.clear();
        in_block = false;
    };

    std::string line;
    std::size_t lineno = 0;
    std::size_t data_rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eat = [&](const char* key, double& out, bool& flag) {
                const std::string k(key);
                auto pos = line.find(k);
                if (pos == std::string::npos) return;
                try {
                    out = std::stod(line.substr(pos + k.size()));
                    flag = true;
                } catch (const std::exception&) {
                    throw ParseError("load_pea: bad header value", lineno);
                }
            };
            eat("thickness_m=", m.thickness, have_d);
            eat("E_mean_V_per_m=", m.applied_E_mean, have_e);
            eat("T_K=", m.temperature, have_t);
            continue;
        }
        std::string ln = line;
        for (char& ch : ln)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream ss(ln);
        double t, x, rho;
        if (!(ss >> t >> x >> rho))
            throw ParseError("load_pea: expected `t_s, x_m, rho_C_per_m3` row", lineno);
        ++data_rows;
        if (!in_block || t != cur_t) {
            if (in_block && t < cur_t)
                throw std::invalid_argument("load_pea: time blocks out of order at line " +
                                            std::to_string(lineno));
            close_block();
            if (!m.times.empty() && t == m.times.back())
                throw std::invalid_argument("load_pea: duplicate time block at line " +
                                            std::to_string(lineno));
            cur_t = t;
            in_block = true;
        }
        if (!raw_x.empty() && !(x > raw_x.back()))
            throw std::invalid_argument("load_pea: positions not increasing at line " +
                                        std::to_string(lineno));
        raw_x.push_back(x);
        raw_rho.push_back(rho);
    }
    close_block();

    if (data_rows == 0)
        throw ParseError("load_pea: no data rows", lineno == 0 ? 1 : lineno);
    if (!have_d || !have_e || !have_t)
        throw ParseError("load_pea: missing header (# thickness_m=, # E_mean_V_per_m=, # T_K=)",
                         lineno == 0 ? 1 : lineno);

    m.positions = detail::uniform_positions(m.thickness, pea_grid_points);
    m.rho.resize(m.times.size());
    for (std::size_t k = 0; k < m.times.size(); ++k) {
        if (raw_profiles_x[k].size() < 2)
            throw std::invalid_argument("load_pea: profile needs at least 2 positions");
        m.rho[k].resize(pea_grid_points);
        for (std::size_t j = 0; j < pea_grid_points; ++j)
            m.rho[k][j] =
                detail::lerp_clamped(raw_profiles_x[k], raw_profiles_rho[k], m.positions[j]);
    }
    m.validate();
    return m;
}

/// Superimposes the capacitive electrode charge (+-eps*E_mean) and the image
/// charges of the volume distribution onto the electrode nodes, converting
/// surface densities to volume densities by the electrode cell width. This is
/// what makes simulated volume charge comparable to a PEA profile.
inline std::vector<double> surface_superposition(const std::vector<double>& sim_rho,
                                                 const RadialMesh& mesh, double E_mean,
                                                 double epsilon) {
    if (mesh.geometry.kind != GeometryKind::planar)
        throw std::invalid_argument("surface_superposition: planar mesh required");
    const std::size_t n = mesh.size();
    if (sim_rho.size() != n)
        throw std::invalid_argument("surface_superposition: sim_rho must cover all nodes");

    const double x_d = mesh.geometry.thickness();
    double im_minus = 0, im_plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = mesh.nodes[i];
        const double dxi = mesh.cell_width(i);
        im_minus -= sim_rho[i] * (x_d - xi) * dxi / x_d;
        im_plus -= sim_rho[i] * xi * dxi / x_d;
    }
    const double cap = epsilon * E_mean; // +cap on the x=0 electrode, -cap opposite

    std::vector<double> out = sim_rho;
    out.front() += (cap + im_minus) / mesh.cell_width(0);
    out.back() += (-cap + im_plus) / mesh.cell_width(n - 1);
    return out;
}

/// Simulation settings used when reproducing a measurement.
struct PeaSimConfig {
    std::size_t nodes = 50;
    BctOptions bct;
};

/// Runs the transport model under the measurement's conditions and returns
/// PEA-comparable profiles on the measurement grid, one per measurement time.
inline std::vector<std::vector<double>> simulate_pea_profiles(const BctParams& params,
                                                              const PeaMeasurement& meas,
                                                              const PeaSimConfig& cfg = {},
                                                              double epsilon_r = 2.3) {
    meas.validate();
    const Geometry geo = make_planar(meas.thickness, epsilon_r);
    const RadialMesh mesh = build_mesh(geo, cfg.nodes);
    const double U = std::abs(meas.applied_E_mean) * meas.thickness;
    const double t_end = meas.times.back();
    const LoadProgram prog =
        constant_program(U, meas.temperature, meas.temperature, std::max(t_end, 1.0));

    TransientSolution sol;
    try {
        sol = simulate_bct(mesh, params, prog, std::max(t_end, 1e-6), meas.times, cfg.bct);
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " (PEA reproduction run)");
    }

    const bool mirrored = meas.applied_E_mean < 0;
    std::vector<std::vector<double>> profiles;
    profiles.reserve(sol.snapshots.size());
    for (const auto& snap : sol.snapshots) {
        std::vector<double> rho = snap.state.net_charge();
        if (mirrored)
            std::reverse(rho.begin(), rho.end());
        rho = surface_superposition(rho, mesh, meas.applied_E_mean, geo.epsilon());
        std::vector<double> on_grid(meas.positions.size());
        for (std::size_t j = 0; j < meas.positions.size(); ++j)
            on_grid[j] = detail::lerp_clamped(mesh.nodes, rho, meas.positions[j]);
        profiles.push_back(std::move(on_grid));
    }
    if (profiles.size() != meas.times.size())
        throw SolverError("simulate_pea_profiles: snapshot count mismatch");
    return profiles;
}

/// Residuals (rho_sim - rho_meas) flattened over times and positions.
inline std::vector<double> pea_residuals(const BctParams& params, const PeaMeasurement& meas,
                                         const PeaSimConfig& cfg = {}, double epsilon_r = 2.3) {
    const auto profiles = simulate_pea_profiles(params, meas, cfg, epsilon_r);
    std::vector<double> r;
    r.reserve(meas.times.size() * meas.positions.size());
    for (std::size_t k = 0; k < meas.times.size(); ++k)
        for (std::size_t j = 0; j < meas.positions.size(); ++j)
            r.push_back(profiles[k][j] - meas.rho[k][j]);
    return r;
}

/// Sum of squared differences between the reproduced and measured profiles.
inline double fit_cost(const BctParams& params, const PeaMeasurement& meas,
                       const PeaSimConfig& cfg = {}, double epsilon_r = 2.3) {
    double c = 0;
    for (double v : pea_residuals(params, meas, cfg, epsilon_r)) c += v * v;
    return c;
}

/// Generates a synthetic measurement by running the model itself.
inline PeaMeasurement synthesize_pea(const BctParams& params, double thickness, double E_mean,
                                     double T, std::vector<double> times,
                                     const PeaSimConfig& cfg = {}, double epsilon_r = 2.3) {
    PeaMeasurement m;
    m.thickness = thickness;
    m.applied_E_mean = E_mean;
    m.temperature = T;
    m.times = std::move(times);
    m.positions = detail::uniform_positions(thickness, pea_grid_points);
    m.rho.assign(m.times.size(), std::vector<double>(pea_grid_points, 0.0));
    m.validate();
    m.rho = simulate_pea_profiles(params, m, cfg, epsilon_r);
    return m;
}

/// Writes a measurement in the PEA file format.
inline void save_pea(const PeaMeasurement& m, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("save_pea: cannot open " + path + " for writing");
    char buf[512];
    std::snprintf(buf, sizeof buf, "# thickness_m=%.12g\n# E_mean_V_per_m=%.12g\n# T_K=%.12g\n",
                  m.thickness, m.applied_E_mean, m.temperature);
    out << buf << "# t_s, x_m, rho_C_per_m3\n";
    for (std::size_t k = 0; k < m.times.size(); ++k)
        for (std::size_t j = 0; j < m.positions.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g, %.12g, %.12g\n", m.times[k], m.positions[j],
                          m.rho[k][j]);
            out << buf;
        }
}

} // namespace cablelife
