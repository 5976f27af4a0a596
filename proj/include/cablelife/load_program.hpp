#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cablelife/errors.hpp"

namespace cablelife {

/// One sample of the applied load: voltage plus boundary temperatures.
struct LoadSample {
    double t = 0;       // s
    double U = 0;       // V, >= 0
    double T_inner = 0; // K
    double T_outer = 0; // K
};

struct CycleBoundary {
    double t_start = 0; // s
    double t_end = 0;   // s
    std::string label;  // e.g. "24h#3"
};

/// Time series of applied voltage and boundary temperatures. Values between
/// samples are linearly interpolated; the series is held constant beyond its
/// last sample.
struct LoadProgram {
    std::vector<LoadSample> samples;
    std::vector<CycleBoundary> cycle_boundaries;

    double duration() const { return samples.empty() ? 0.0 : samples.back().t; }

    void validate() const {
        if (samples.size() < 2)
            throw std::invalid_argument("LoadProgram: need at least 2 samples");
        if (samples.front().t != 0.0)
            throw std::invalid_argument("LoadProgram: time must start at 0");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (i > 0 && !(samples[i].t > samples[i - 1].t))
                throw std::invalid_argument("LoadProgram: times must be strictly increasing");
            if (samples[i].U < 0)
                throw std::invalid_argument("LoadProgram: applied voltage must be >= 0");
            if (!(samples[i].T_inner > 0) || !(samples[i].T_outer > 0))
                throw std::invalid_argument("LoadProgram: temperatures must be positive (kelvin)");
        }
    }

    LoadSample at(double t) const {
        if (samples.empty())
            throw std::invalid_argument("LoadProgram: empty program");
        if (t <= samples.front().t) return samples.front();
        if (t >= samples.back().t) {
            LoadSample s = samples.back();
            s.t = t;
            return s;
        }
        auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](double v, const LoadSample& s) { return v < s.t; });
        const LoadSample& b = *it;
        const LoadSample& a = *(it - 1);
        const double f = (t - a.t) / (b.t - a.t);
        LoadSample s;
        s.t = t;
        s.U = a.U + f * (b.U - a.U);
        s.T_inner = a.T_inner + f * (b.T_inner - a.T_inner);
        s.T_outer = a.T_outer + f * (b.T_outer - a.T_outer);
        return s;
    }

    /// Smallest interval between consecutive samples.
    double min_sample_spacing() const {
        double m = duration();
        for (std::size_t i = 1; i < samples.size(); ++i)
            m = std::min(m, samples[i].t - samples[i - 1].t);
        return m;
    }
};

/// Reads a load program from a delimiter-separated text file with header
///   t_s,U_V,T_inner_K,T_outer_K
/// Commas or whitespace separate the fields.
inline LoadProgram load_program_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("load_program: cannot open " + path);

    auto split = [](std::string line) {
        std::vector<std::string> out;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    };

    LoadProgram prog;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto tok = split(line);
        if (tok.empty()) continue;
        if (!header_seen) {
            if (tok.size() != 4 || tok[0] != "t_s")
                throw ParseError("load_program: expected header t_s,U_V,T_inner_K,T_outer_K", lineno);
            header_seen = true;
            continue;
        }
        if (tok.size() != 4)
            throw ParseError("load_program: expected 4 fields", lineno);
        LoadSample s;
        try {
            s.t = std::stod(tok[0]);
            s.U = std::stod(tok[1]);
            s.T_inner = std::stod(tok[2]);
            s.T_outer = std::stod(tok[3]);
        } catch (const std::exception&) {
            throw ParseError("load_program: numeric field expected", lineno);
        }
        prog.samples.push_back(s);
    }
    if (!header_seen)
        throw ParseError("load_program: missing header", lineno == 0 ? 1 : lineno);
    prog.validate();
    prog.cycle_boundaries.push_back({0.0, prog.duration(), "program"});
    return prog;
}

/// Constant-load program over [0, t_end].
inline LoadProgram constant_program(double U, double T_inner, double T_outer, double t_end) {
    LoadProgram prog;
    prog.samples.push_back({0.0, U, T_inner, T_outer});
    prog.samples.push_back({t_end, U, T_inner, T_outer});
    prog.validate();
    prog.cycle_boundaries.push_back({0.0, t_end, "constant"});
    return prog;
}

} // namespace cablelife
