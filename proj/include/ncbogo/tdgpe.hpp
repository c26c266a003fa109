#pragma once

#include <string>
#include <vector>

#include "ncbogo/bdg.hpp"
#include "ncbogo/gpe.hpp"

namespace ncbogo {

/// Harmonic frequency as a function of time: constant, or a sudden switch.
struct PotentialSchedule {
    enum class Kind { none, harmonic, quench };
    Kind kind = Kind::none;
    double omega = 0.0;
    double omega_to = 0.0;
    double t_switch = 0.0;

    static PotentialSchedule none();
    static PotentialSchedule harmonic(double omega);
    /// omega_from for t < t_switch, omega_to for t >= t_switch.
    static PotentialSchedule quench(double omega_from, double omega_to, double t_switch);

    double omega_at(double t) const;
    ComplexField at(const GridPtr& grid, double t) const;
    bool is_static() const;
    std::string describe() const;
};

struct PropagateOptions {
    /// Snapshot every `stride` steps; the final time is always stored.
    int stride = 1;
    /// Drop the u|xi|^2 term from the evolution (falsification runs);
    /// diagnostics still use the full u_tilde.
    bool evolve_linear = false;
    /// 2: Strang splitting. 4: triple-jump composition of Strang steps.
    int order = 2;
};

struct Trajectory {
    double u_tilde = 0.0;
    double dt = 0.0;
    int n_steps = 0;
    /// Step index at which a quench takes effect, -1 if none inside the run.
    int switch_step = -1;
    PotentialSchedule schedule;
    PropagateOptions options;

    std::vector<double> times;
    std::vector<int> step_index;
    std::vector<ComplexField> xi_t;
    /// Time derivative measured from the stepped trajectory with a five-point
    /// stencil (one-sided near the ends and on either side of a quench).
    std::vector<ComplexField> xi_dot_t;
    /// Functional form <xi, (T + V + u|xi|^2) xi>.
    std::vector<double> mu_t;
    /// Dynamic form Re <xi, i d_t xi>.
    std::vector<double> mu_dyn_t;
    std::vector<double> h1_t;
    std::vector<double> norm_t;
    std::vector<double> center_t;

    /// Filled by propagate_modes.
    std::vector<PhononBasis> modes_t;
    std::vector<double> gram_deviation_t;
    std::vector<double> condensate_overlap_t;
    /// Filled by h3_of_t.
    std::vector<QuadraticHamiltonian> h3_t;

    int size() const { return static_cast<int>(times.size()); }
    /// Potential acting at snapshot i (the post-quench one at the switch itself).
    ComplexField potential_at(int i) const;
    double max_norm_drift() const;
    double max_h1_drift() const;
};

/// Throws IntegratorError if the norm drifts by more than 1e-6.
Trajectory propagate(const CondensateState& initial, double t_final, double dt,
                     const PotentialSchedule& schedule, const PropagateOptions& options = {});
Trajectory propagate(const ComplexField& initial, double u_tilde, double t_final, double dt,
                     const PotentialSchedule& schedule, const PropagateOptions& options = {});

enum class ModeScheme {
    /// Exact unitary step: global phase plus the plane rotation carrying
    /// xi(t) to xi(t + dt), applied to every mode.
    transport,
    /// Explicit midpoint rule on d_t xi_k = xi_k <xi, xi'> - xi <xi', xi_k>.
    midpoint,
};

/// Re-steps the condensate with the trajectory's own settings and evolves the
/// modes alongside it. Throws IntegratorError if the Gram matrix or the
/// overlap with xi drift by more than 1e-6.
Trajectory propagate_modes(Trajectory traj, const PhononBasis& initial_basis,
                           ModeScheme scheme = ModeScheme::transport);

struct MuPair {
    double functional = 0.0;
    double dynamic = 0.0;
};

double mu_of_t(const ComplexField& xi, const ComplexField& potential, double u_tilde);
MuPair mu_of_t(const ComplexField& xi, const ComplexField& xi_dot, const ComplexField& potential,
               double u_tilde);

/// Assembles M(t), G(t), E3(t) in the transported basis at every snapshot.
std::vector<QuadraticHamiltonian> h3_of_t(Trajectory& traj, double u_tilde);

struct HrDiagnostic {
    double time = 0.0;
    Eigen::VectorXcd h2_vector;
    Eigen::VectorXcd hr_vector;
    double mismatch = 0.0;
};

/// h2_k = <xi_k, (T + V + u|xi|^2) xi>, hr_k = -<xi_k, i d_t xi>.
std::vector<HrDiagnostic> hr_diagnostic(const Trajectory& traj);

} // namespace ncbogo
