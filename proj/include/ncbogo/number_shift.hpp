#pragma once

#include <utility>
#include <vector>

#include "ncbogo/bdg.hpp"
#include "ncbogo/gpe.hpp"

namespace ncbogo {

/// Everything needed to re-solve the stationary problem at a different N with
/// the physical coupling `u` held fixed (u_tilde = N u).
struct SolverConfig {
    GridPtr grid;
    ComplexField potential;
    double u = 0.0;
    StationaryOptions options;
};

struct DerivativeResult {
    ComplexField dxi;
    double delta_N = 0.0;
    /// L2 change of the central difference when delta_N is halved.
    double richardson_change = 0.0;
};

/// Central difference (xi(N+d) - xi(N-d)) / 2d, each neighbour phase-aligned so
/// its overlap with xi(N) is real and positive. The returned field is the
/// half-step estimate; the full-step one is used only for the Richardson check.
DerivativeResult dxi_dN_checked(const SolverConfig& config, double n_particles, double delta_N);
ComplexField dxi_dN(const SolverConfig& config, double n_particles, double delta_N);

struct PhaseFixResult {
    /// r0 from the raw derivative, and after removing the gauge component.
    double r0_raw = 0.0;
    double r0 = 0.0;
    /// |Re <xi, dxi>| of the raw derivative.
    double re_overlap = 0.0;
    /// r_k = N <dxi, xi_k>, i.e. N times the coefficient of xi_k* in dxi*.
    Eigen::VectorXcd r;
    ComplexField fixed_dxi;
    /// Norm of dxi outside span{xi, xi_k}, relative to max(|dxi|, 1/N).
    double outside_fraction = 0.0;
};

/// Throws TruncationError if outside_fraction exceeds 1e-6.
PhaseFixResult phase_fix_and_r(const CondensateState& state, const PhononBasis& basis,
                               const ComplexField& dxi);

/// f_m = p_m - xi sum_k r_k c_km,  g_m = q_m - xi sum_k r_k s_km.
std::pair<std::vector<ComplexField>, std::vector<ComplexField>>
modified_amplitudes(const QuasiparticleSpectrum& spectrum, const CondensateState& state,
                    const Eigen::VectorXcd& r);

struct NumberShiftReport {
    double n_particles = 0.0;
    ComplexField dxi_dN;
    double r0 = 0.0;
    double r0_raw = 0.0;
    double re_overlap = 0.0;
    Eigen::VectorXcd r;
    std::vector<ComplexField> f_waves;
    std::vector<ComplexField> g_waves;
    double delta_N = 0.0;
    double richardson_change = 0.0;
    /// sqrt(N + 1)
    double condensate_amplitude = 0.0;
};

/// Solves at N, builds a K-mode basis, and runs the full chain above.
NumberShiftReport compute_number_shift(const SolverConfig& config, double n_particles, int K,
                                       double delta_N = 0.5);
/// Same, reusing an existing state / basis / spectrum at N.
NumberShiftReport compute_number_shift(const SolverConfig& config, const CondensateState& state,
                                       const PhononBasis& basis, const QuasiparticleSpectrum& spectrum,
                                       double delta_N = 0.5);

/// Amplitudes for removing one particle from the N+1 ground state:
///   <N|psi(x)|N+1>            ~ sqrt(N+1) xi(x)                order N^{1/2}
///   <N, 1_m|psi(x)|N+1>       ~ sqrt((N+1)/N) g_m(x)           order N^0
///   <N|psi(x)|N+1, 1_m>       ~ sqrt((N+1)/N) f_m(x)           order N^0
struct MatrixElements {
    ComplexField ground;
    double ground_order = 0.5;
    std::vector<ComplexField> absorb;
    std::vector<ComplexField> emit;
    double channel_order = 0.0;
};

MatrixElements matrix_elements(const CondensateState& state, const NumberShiftReport& report);

} // namespace ncbogo
