#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ncbogo/gpe.hpp"
#include "ncbogo/grid.hpp"

namespace ncbogo {

/// Orthonormal mode functions xi_k spanning (a truncation of) the subspace
/// orthogonal to the condensate.
struct PhononBasis {
    std::vector<ComplexField> modes;
    ComplexField condensate;

    int size() const { return static_cast<int>(modes.size()); }
    /// n_points x K matrix whose columns are the mode values.
    Eigen::MatrixXcd matrix() const;
    /// max |<xi_k, xi_q> - delta_kq|
    double gram_deviation() const;
    /// max_k |<xi, xi_k>|
    double condensate_overlap() const;
};

/// Lowest K+1 eigenfunctions of -1/2 d^2/dx^2 + V with the condensate
/// projected out, re-orthonormalized; the eigenfunction overlapping xi the most
/// is dropped. A constant potential on a periodic grid yields plane waves
/// ordered +k1, -k1, +k2, -k2, ...
PhononBasis build_phonon_basis(const CondensateState& state, int K);

/// Projects arbitrary fields orthogonal to the condensate and orthonormalizes them.
PhononBasis basis_from_fields(const CondensateState& state, const std::vector<ComplexField>& fields);

/// Grid matrix of R(x, x') = sum_k xi_k(x) xi_k*(x') in the quadrature metric,
/// i.e. (R f)(x_i) = sum_j R_ij f_j dx.
Eigen::MatrixXcd projector_kernel(const PhononBasis& basis);

/// Quadratic phonon Hamiltonian
///   E3 + sum M_kq a_k^+ a_q + 1/2 sum G_kq a_k^+ a_q^+ + 1/2 sum G*_kq a_k a_q.
struct QuadraticHamiltonian {
    double e3 = 0.0;
    /// M = L + F, Hermitian.
    Eigen::MatrixXcd m_matrix;
    /// Symmetric.
    Eigen::MatrixXcd g_matrix;
    Eigen::MatrixXcd l_matrix;
    Eigen::MatrixXcd f_matrix;
    double mu = 0.0;

    int size() const { return static_cast<int>(m_matrix.rows()); }
};

/// L_kq = <xi_k, (T + V) xi_q>,  F_kq = <xi_k, (2u|xi|^2 - mu) xi_q>,
/// G_kq = u int xi^2 xi_k* xi_q*,  E3 = -(u/2) int |xi|^4.
QuadraticHamiltonian assemble(const CondensateState& state, const PhononBasis& basis);
QuadraticHamiltonian assemble(const ComplexField& xi, const ComplexField& potential, double u_tilde,
                              double mu, const PhononBasis& basis);

/// Hand-built quadratic form (no grid); used by the homogeneous oracle and tests.
QuadraticHamiltonian make_quadratic(Eigen::MatrixXcd m, Eigen::MatrixXcd g, double e3);

struct QuasiparticleSpectrum {
    /// Real parts, ascending.
    Eigen::VectorXd energies;
    Eigen::VectorXd imag_parts;
    /// alpha_k = sum_m c_km b_m + s_km b_m^+
    Eigen::MatrixXcd c_matrix;
    Eigen::MatrixXcd s_matrix;
    std::vector<ComplexField> p_waves;
    std::vector<ComplexField> q_waves;
    double omega_g = 0.0;
    bool stable = true;
    /// Modes whose BdG eigenvector has (numerically) zero symplectic norm.
    std::vector<int> anomalous_modes;
    /// "symplectic-cholesky" when the BdG form is positive definite,
    /// "non-hermitian" otherwise.
    std::string method;

    int size() const { return static_cast<int>(energies.size()); }
};

/// Solves [[M, G], [-G*, -M*]] (u; v) = eps (u; v) and keeps the K
/// positive-norm branches, normalized to u^+u - v^+v = 1. c = u, s = conj(v).
/// omega_g = e3 + (sum eps - tr M)/2.
QuasiparticleSpectrum diagonalize(const QuadraticHamiltonian& qh, const PhononBasis& basis);
QuasiparticleSpectrum diagonalize(const QuadraticHamiltonian& qh);

struct StabilityReport {
    bool stable = true;
    std::vector<int> offending_modes;
    std::string message;
};

/// Stable iff every eps_m is real and nonnegative within 1e-9.
StabilityReport check_stability(const QuasiparticleSpectrum& spectrum);

/// omega_g + sum_m n_m eps_m
double h3_expectation(const QuadraticHamiltonian& qh, const Eigen::VectorXd& occupations);

/// Rebuilds (M, G) from (eps, c, s) by inverting the Bogoliubov transformation.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> reconstruct_quadratic(const QuasiparticleSpectrum& spectrum);

/// max_mn |sum_k c*_km c_kn - s*_km s_kn - delta_mn|
double symplectic_deviation(const QuasiparticleSpectrum& spectrum);

/// +1 even, -1 odd, 0 mixed (relative tolerance 1e-6) under reflection about the grid centre.
int parity(const ComplexField& f);
int mode_parity(const QuasiparticleSpectrum& spectrum, int m);

} // namespace ncbogo
