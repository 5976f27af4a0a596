#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/bct.hpp"
#include "cablelife/geometry.hpp"
#include "cablelife/life.hpp"

namespace cablelife {

/// Shortest round-trippable decimal form; used by every writer so that reruns
/// are byte-identical.
inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// FNV-1a 64-bit hash.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Hash of a value pattern at 6 significant digits: stable across platforms
/// for results that agree to ~1e-6 relative, strict enough to catch model
/// regressions.
inline std::string pattern_hash(const std::vector<double>& values) {
    std::string s;
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.6g,", v);
        s += buf;
    }
    return hex64(fnv1a(s));
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot open " + path + " for writing");
    return out;
}

/// Charge/field snapshot table:
/// t_s, node_index, r_m, rho_e_mu, rho_h_mu, rho_e_t, rho_h_t, rho_net, E_V_per_m
inline void write_snapshots(const std::string& path, const RadialMesh& mesh,
                            const TransientSolution& sol) {
    auto out = open_out(path);
    out << "t_s, node_index, r_m, rho_e_mu, rho_h_mu, rho_e_t, rho_h_t, rho_net, E_V_per_m\n";
    for (const auto& snap : sol.snapshots) {
        const auto net = snap.state.net_charge();
        for (std::size_t i = 0; i < mesh.size(); ++i)
            out << fmt(snap.t) << ", " << i << ", " << fmt(mesh.nodes[i]) << ", "
                << fmt(snap.state.rho_e_mu[i]) << ", " << fmt(snap.state.rho_h_mu[i]) << ", "
                << fmt(snap.state.rho_e_t[i]) << ", " << fmt(snap.state.rho_h_t[i]) << ", "
                << fmt(net[i]) << ", " << fmt(snap.field.E[i]) << "\n";
    }
}

/// Field history table: t_s, node_index, r_m, E_V_per_m
inline void write_field_history(const std::string& path, const RadialMesh& mesh,
                                const std::vector<FieldProfile>& profiles) {
    auto out = open_out(path);
    out << "t_s, node_index, r_m, E_V_per_m\n";
    for (const auto& fp : profiles)
        for (std::size_t i = 0; i < mesh.size(); ++i)
            out << fmt(fp.t) << ", " << i << ", " << fmt(mesh.nodes[i]) << ", " << fmt(fp.E[i])
                << "\n";
}

/// Life table: node_index, r_m, thickness_fraction, LF_total, LF_24h, LF_48h, life_days
inline void write_life_table(const std::string& path, const RadialMesh& mesh,
                             const LifeResult& life) {
    auto out = open_out(path);
    out << "node_index, r_m, thickness_fraction, LF_total, LF_24h, LF_48h, life_days\n";
    for (std::size_t i = 0; i < mesh.size(); ++i)
        out << i << ", " << fmt(mesh.nodes[i]) << ", " << fmt(mesh.thickness_fraction(i)) << ", "
            << fmt(life.lf_total[i]) << ", " << fmt(life.lf_24[i]) << ", " << fmt(life.lf_48[i])
            << ", " << fmt(life.life_s[i] / 86400.0) << "\n";
}

/// Conservation ledger summary, one key per line.
inline void write_ledger(const std::string& path, const ConservationLedger& ledger) {
    auto out = open_out(path);
    out << "injected_e " << fmt(ledger.injected_e) << "\n"
        << "injected_h " << fmt(ledger.injected_h) << "\n"
        << "extracted_e " << fmt(ledger.extracted_e) << "\n"
        << "extracted_h " << fmt(ledger.extracted_h) << "\n"
        << "recombined_e " << fmt(ledger.recombined_e) << "\n"
        << "recombined_h " << fmt(ledger.recombined_h) << "\n"
        << "clamp_events " << ledger.clamp_events << "\n"
        << "max_balance_error " << fmt(ledger.max_balance_error) << "\n";
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string file_hash(const std::string& path) { return hex64(fnv1a(read_file(path))); }

} // namespace cablelife
