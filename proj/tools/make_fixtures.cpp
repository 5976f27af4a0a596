// Regenerates the committed fixtures under configs/. Run from the repo root
// after a deliberate model change, then review the diff:
//   build/make_fixtures configs
// Fixtures: a synthetic PEA measurement for the CLI fit smoke test and the
// frozen charge-pattern hash of the published optimal parameter set.
#include <cstdio>
#include <fstream>
#include <string>

#include "cablelife/cablelife.hpp"

using namespace cablelife;

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "configs";

    {
        // Small, fast measurement for the CLI fit smoke test: moderate
        // barriers so a 240 s horizon already shows structure.
        BctParams p;
        p.w_inj_e = 1.30;
        p.w_inj_h = 1.10;
        p.w_mob_e = 0.70;
        p.w_mob_h = 0.65;
        p.w_tr_e = 0.95;
        p.w_tr_h = 0.92;
        p.B_e = 0.05;
        p.B_h = 0.10;
        p.set_s_base(1e-3);
        p.rho_e0t = p.rho_h0t = 50.0;

        PeaSimConfig cfg;
        cfg.nodes = 30;
        const PeaMeasurement m =
            synthesize_pea(p, 150e-6, 3e7, 333.15, {120.0, 240.0}, cfg);
        save_pea(m, dir + "/pea_fixture.csv");
        std::printf("wrote %s/pea_fixture.csv\n", dir.c_str());
    }

    {
        // Charge-pattern hash of the published optimal parameter set under
        // fixed synthetic-measurement conditions. Guarded by the fit suite.
        BctParams p;
        p.w_inj_e = 1.22;
        p.w_inj_h = 1.20;
        p.w_mob_e = 0.684;
        p.w_mob_h = 0.680;
        p.w_tr_e = 0.91;
        p.w_tr_h = 0.90;
        p.B_e = 0.30;
        p.B_h = 0.30;
        p.set_s_base(0.045);

        PeaSimConfig cfg;
        cfg.nodes = 50;
        const PeaMeasurement m =
            synthesize_pea(p, 200e-6, 4e7, 333.15, {1000.0, 2000.0, 4000.0}, cfg);
        std::vector<double> flat;
        for (const auto& row : m.rho)
            for (double v : row) flat.push_back(v);

        std::ofstream out(dir + "/optimal_row_pattern.hash");
        out << pattern_hash(flat)
            << "  charge-pattern hash: optimal parameter set, planar 200 um, "
               "E_mean 4e7 V/m, 333.15 K, t = {1000, 2000, 4000} s, 50 nodes\n";
        std::printf("wrote %s/optimal_row_pattern.hash\n", dir.c_str());
    }
    return 0;
}
