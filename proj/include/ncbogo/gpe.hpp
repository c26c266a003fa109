#pragma once

#include <optional>
#include <vector>

#include "ncbogo/grid.hpp"

namespace ncbogo {

struct PhononBasis;

/// Normalized condensate wavefunction with the parameters it was solved for.
struct CondensateState {
    ComplexField xi;
    double n_particles = 1.0;
    /// Scaled interaction N*u.
    double u_tilde = 0.0;
    /// Real external potential stored as a field with zero imaginary part.
    ComplexField potential;
    double mu = 0.0;
    double residual = 0.0;
};

/// V(x) = omega^2 x^2 / 2 sampled on the grid.
ComplexField harmonic_potential(GridPtr grid, double omega = 1.0);
ComplexField zero_potential(GridPtr grid);

struct StationaryOptions {
    double tol = 1e-10;
    int max_iters = 200000;
    double initial_step = 1e-2;
    /// Imaginary-time iteration hands over to Newton once the residual is below
    /// this, or once the energy stops decreasing.
    double newton_switch_residual = 1e-3;
    int max_newton_iters = 30;
    bool newton_polish = true;
    std::optional<ComplexField> initial_guess;
};

struct StationaryReport {
    /// H1 after every accepted imaginary-time step (first entry: initial guess).
    std::vector<double> energy_history;
    int imaginary_time_steps = 0;
    int rejected_steps = 0;
    int newton_iterations = 0;
    double final_step = 0.0;
};

/// Ground state of the stationary Gross-Pitaevskii equation
///   (-1/2 d^2/dx^2 + V + u_tilde |xi|^2) xi = mu xi,   int |xi|^2 = 1,
/// by normalized imaginary-time descent (split-step, step halved whenever H1
/// would increase) followed by a Newton polish of (xi, mu).
/// Throws ConvergenceError if the residual does not reach `tol`.
CondensateState solve_stationary(GridPtr grid, const ComplexField& potential, double u_tilde,
                                 double n_particles, const StationaryOptions& options = {},
                                 StationaryReport* report = nullptr);

CondensateState solve_stationary(GridPtr grid, const ComplexField& potential, double u_tilde,
                                 double n_particles, double tol, int max_iters);

/// Wraps an arbitrary normalized field as a state; mu and residual are evaluated.
CondensateState make_state(const ComplexField& xi, const ComplexField& potential, double u_tilde,
                           double n_particles);

/// (-1/2 d^2/dx^2 + V + u_tilde |xi|^2) xi
ComplexField gp_operator_apply(const ComplexField& xi, const ComplexField& potential,
                               double u_tilde);

struct EnergyParts {
    double kinetic = 0.0;
    double potential = 0.0;
    /// int |xi|^4 dx
    double quartic = 0.0;
};
EnergyParts energy_parts(const ComplexField& xi, const ComplexField& potential);

/// mu = <T> + <V> + u_tilde int |xi|^4
double chemical_potential(const ComplexField& xi, const ComplexField& potential, double u_tilde);
double chemical_potential(const CondensateState& state);

/// H1 = <T> + <V> + (u_tilde/2) int |xi|^4
double energy_functional_h1(const ComplexField& xi, const ComplexField& potential, double u_tilde);
double energy_functional_h1(const CondensateState& state);

/// v_k = <xi_k, (T + V + u_tilde|xi|^2) xi>, the coefficients of the terms
/// linear in the phonon operators.
Eigen::VectorXcd h2_coefficients(const CondensateState& state, const PhononBasis& basis);

/// || (T + V + u_tilde|xi|^2) xi - mu xi ||_2 with mu from the functional.
double gpe_residual(const CondensateState& state);

/// 2<T> - 2<V> + (u_tilde/2) int |xi|^4, zero for a stationary state in a
/// harmonic trap (stationarity under xi(x) -> sqrt(s) xi(s x)).
double virial_defect(const ComplexField& xi, const ComplexField& potential, double u_tilde);

} // namespace ncbogo
