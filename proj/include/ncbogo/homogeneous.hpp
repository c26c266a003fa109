#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ncbogo {

/// sqrt(e_k (e_k + 2 u_tilde / length)), e_k = k^2/2. Throws DomainError for k = 0.
double bogoliubov_dispersion(double k, double u_tilde, double length);

/// Long-wavelength phase/density mode amplitudes of the uniform gas.
///
/// `u` is the real-space contact coupling, so the sound speed is
/// v = sqrt(u N / V) and the momentum-space coupling is u / V.
struct HydroCoefficients {
    double k = 0.0;
    /// sqrt(v / (2 k N)): amplitude of b_k e^{ikx} in the velocity potential.
    double phi_coeff = 0.0;
    /// sqrt(N k / (2 v)): amplitude of b_k e^{ikx} in V * delta rho.
    double rho_coeff = 0.0;
    double v_sound = 0.0;
    double rho0 = 0.0;
    /// Per-mode coefficient of b^+ b in the normal-ordered sound Hamiltonian
    /// 1/2 int [rho0 (grad Phi)^2 + v^2 delta rho^2 / rho0]; equals k v.
    double sound_energy = 0.0;
};

HydroCoefficients hydro_coefficients(double k, double u, double n_particles, double volume);

/// Exact spectrum of the momentum-space Hamiltonian restricted to the modes
/// {0, +k, -k}, with every momentum-conserving quartic term retained.
struct FockSpectrum {
    int n_particles = 0;
    double k_mode = 0.0;
    double u = 0.0;
    double volume = 0.0;
    int n_max_excited = 0;
    double ground_energy = 0.0;
    /// Lowest excitation energies above the ground state across momentum sectors.
    Eigen::VectorXd gaps;
    /// Lowest energy in the total-momentum +k sector minus the ground energy.
    double phonon_gap = 0.0;
    /// N-particle basis size.
    int dimension = 0;
    /// Matrix elements found between different particle numbers / momenta
    /// while assembling on the N-1, N, N+1 sectors. Always zero.
    long cross_number_elements = 0;
    long cross_momentum_elements = 0;
};

/// Throws ResourceError above 2e5 N-particle basis states; requires N >= 1 and
/// n_max_excited <= N.
FockSpectrum exact_fock_spectrum(int n_particles, double k_mode, double u, double volume,
                                 int n_max_excited);

/// N h1 + omega_g for the uniform gas restricted to the +-k pair, with
/// omega_g taken from the Bogoliubov diagonalization.
double homogeneous_ground_prediction(double n_particles, double k_mode, double u_tilde, double volume);

struct AsymptoticPoint {
    int n_particles = 0;
    double gap_exact = 0.0;
    double gap_bogoliubov = 0.0;
    double gap_error = 0.0;
    double ground_exact = 0.0;
    double ground_predicted = 0.0;
    double ground_error = 0.0;
};

struct AsymptoticStudy {
    std::vector<AsymptoticPoint> points;
    /// p in error ~ N^-p from a least-squares fit in log-log coordinates
    /// (NaN with fewer than two nonzero errors).
    double gap_power = 0.0;
    double ground_power = 0.0;
    bool gap_error_monotone = true;
};

/// Exact-vs-asymptotic comparison at one N; `u_tilde` must equal N u.
AsymptoticPoint compare_asymptotics(const FockSpectrum& spec, double u_tilde);
/// Comparison over a sequence of spectra at fixed u_tilde (u = u_tilde / N each).
AsymptoticStudy compare_asymptotics(const std::vector<FockSpectrum>& spectra, double u_tilde);

/// Slope a of eps = a k + b k^3 through two points: the long-wavelength
/// sound speed with the leading dispersive correction removed.
double fit_sound_speed(double k1, double eps1, double k2, double eps2);

/// Least-squares slope p of log(err) = c - p log(N).
double fit_inverse_power(const std::vector<double>& n_values, const std::vector<double>& errors);

} // namespace ncbogo
