#pragma once

#include <cmath>

#include "ncbogo/bdg.hpp"
#include "ncbogo/gpe.hpp"
#include "ncbogo/grid.hpp"

namespace testing {

inline ncbogo::GridPtr box_grid(int n = 128, double length = 20.0) {
    return ncbogo::build_grid(n, length, ncbogo::Boundary::box, -length / 2);
}

inline ncbogo::GridPtr ring_grid(int n = 64, double length = 2.0 * M_PI) {
    return ncbogo::build_grid(n, length, ncbogo::Boundary::periodic, -length / 2);
}

inline ncbogo::CondensateState trap_state(double u_tilde, int n = 128, double length = 20.0,
                                          double tol = 1e-11) {
    auto g = box_grid(n, length);
    ncbogo::StationaryOptions opt;
    opt.tol = tol;
    return ncbogo::solve_stationary(g, ncbogo::harmonic_potential(g), u_tilde, 1000.0, opt);
}

inline ncbogo::CondensateState ring_state(double u_tilde, int n = 64, double length = 2.0 * M_PI) {
    auto g = ring_grid(n, length);
    ncbogo::StationaryOptions opt;
    opt.tol = 1e-12;
    return ncbogo::solve_stationary(g, ncbogo::zero_potential(g), u_tilde, 1000.0, opt);
}

inline int lowest_odd_mode(const ncbogo::QuasiparticleSpectrum& sp) {
    for (int m = 0; m < sp.size(); ++m)
        if (ncbogo::mode_parity(sp, m) == -1) return m;
    return -1;
}

} // namespace testing
