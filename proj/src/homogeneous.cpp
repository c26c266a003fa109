#include "ncbogo/homogeneous.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Eigenvalues>

#include "ncbogo/bdg.hpp"
#include "ncbogo/errors.hpp"

namespace ncbogo {

double bogoliubov_dispersion(double k, double u_tilde, double length) {
    if (k == 0.0) throw DomainError("bogoliubov_dispersion: k = 0 is the condensate mode");
    if (u_tilde < 0.0) throw DomainError("bogoliubov_dispersion: u_tilde must be nonnegative");
    if (!(length > 0.0)) throw DomainError("bogoliubov_dispersion: length must be positive");
    const double e = 0.5 * k * k;
    return std::sqrt(e * (e + 2.0 * u_tilde / length));
}

HydroCoefficients hydro_coefficients(double k, double u, double n_particles, double volume) {
    if (!(k > 0.0) || !(u > 0.0)) throw DomainError("hydro_coefficients: need k > 0 and u > 0");
    if (!(n_particles > 0.0) || !(volume > 0.0))
        throw DomainError("hydro_coefficients: need N > 0 and V > 0");
    HydroCoefficients h;
    h.k = k;
    h.v_sound = std::sqrt(u * n_particles / volume);
    h.rho0 = n_particles / volume;
    h.phi_coeff = std::sqrt(h.v_sound / (2.0 * k * n_particles));
    h.rho_coeff = std::sqrt(n_particles * k / (2.0 * h.v_sound));
    // (grad Phi)^2 and delta rho^2 each contribute 2 V |amp|^2 b^+ b after
    // normal ordering; delta rho carries an explicit 1/V.
    const double kinetic_part = 0.5 * h.rho0 * volume * 2.0 * k * k * h.phi_coeff * h.phi_coeff;
    const double density_part =
        0.5 * h.v_sound * h.v_sound / h.rho0 * 2.0 * h.rho_coeff * h.rho_coeff / volume;
    h.sound_energy = kinetic_part + density_part;
    return h;
}

namespace {

using Occupation = std::array<int, 3>;
constexpr std::array<int, 3> kMomentum{0, +1, -1};

int momentum_of(const Occupation& o) { return o[1] - o[2]; }

// annihilators act right to left: a_{c} a_{d} with d first.
double apply_quartic(Occupation& o, int i, int j, int c, int d) {
    double amp = 1.0;
    for (int mode : {d, c}) {
        if (o[mode] == 0) return 0.0;
        amp *= std::sqrt(static_cast<double>(o[mode]));
        --o[mode];
    }
    for (int mode : {j, i}) {
        ++o[mode];
        amp *= std::sqrt(static_cast<double>(o[mode]));
    }
    return amp;
}

} // namespace

FockSpectrum exact_fock_spectrum(int n_particles, double k_mode, double u, double volume, int n_max_excited) {
    if (n_particles < 1) throw ConfigurationError("exact_fock_spectrum: N must be at least 1");
    if (n_max_excited < 0 || n_max_excited > n_particles)
        throw ConfigurationError("exact_fock_spectrum: n_max_excited must be in [0, N]");
    if (k_mode == 0.0 || !(volume > 0.0)) throw DomainError("exact_fock_spectrum: need k != 0, V > 0");
    const long states = static_cast<long>(n_max_excited + 1) * (n_max_excited + 2) / 2;
    if (states > 200000)
        throw ResourceError("exact_fock_spectrum: basis of " + std::to_string(states) +
                            " states exceeds the 2e5 limit");

    // Basis over the N-1, N, N+1 sectors so that number conservation of the
    // assembled operator is checked rather than assumed.
    std::vector<Occupation> basis;
    std::map<Occupation, int> index;
    for (int total = n_particles - 1; total <= n_particles + 1; ++total) {
        if (total < 0) continue;
        for (int s = 0; s <= std::min(n_max_excited, total); ++s)
            for (int np = 0; np <= s; ++np) {
                Occupation o{total - s, np, s - np};
                index.emplace(o, static_cast<int>(basis.size()));
                basis.push_back(o);
            }
    }
    const int dim_all = static_cast<int>(basis.size());

    // N-particle states grouped by total momentum; only |P| <= 2 is diagonalized.
    std::map<int, std::vector<int>> sectors;
    std::vector<int> local(dim_all, -1);
    int dim = 0;
    for (int i = 0; i < dim_all; ++i) {
        const auto& o = basis[i];
        if (o[0] + o[1] + o[2] != n_particles) continue;
        ++dim;
        auto& members = sectors[momentum_of(o)];
        local[i] = static_cast<int>(members.size());
        members.push_back(i);
    }
    std::map<int, Eigen::MatrixXd> blocks;
    for (const auto& [p, idx] : sectors)
        if (std::abs(p) <= 2) blocks[p] = Eigen::MatrixXd::Zero(idx.size(), idx.size());

    const double e_k = 0.5 * k_mode * k_mode;
    const double g = u / volume;

    FockSpectrum out;
    out.n_particles = n_particles;
    out.k_mode = k_mode;
    out.u = u;
    out.volume = volume;
    out.n_max_excited = n_max_excited;

    for (int col = 0; col < dim_all; ++col) {
        const Occupation& in = basis[col];
        const int n_in = in[0] + in[1] + in[2];
        const int p_in = momentum_of(in);
        const auto block = local[col] >= 0 ? blocks.find(p_in) : blocks.end();
        if (block != blocks.end()) block->second(local[col], local[col]) += e_k * (in[1] + in[2]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d) {
                        if (kMomentum[i] + kMomentum[j] != kMomentum[c] + kMomentum[d]) continue;
                        Occupation o = in;
                        const double amp = apply_quartic(o, i, j, c, d);
                        if (amp == 0.0) continue;
                        const auto it = index.find(o);
                        if (it == index.end()) continue; // outside the excitation cap
                        const bool cross_n = o[0] + o[1] + o[2] != n_in;
                        const bool cross_p = momentum_of(o) != p_in;
                        if (cross_n) ++out.cross_number_elements;
                        if (cross_p) ++out.cross_momentum_elements;
                        if (cross_n || cross_p || block == blocks.end()) continue;
                        block->second(local[it->second], local[col]) += 0.5 * g * amp;
                    }
    }

    std::vector<double> levels;
    double lowest_plus = std::numeric_limits<double>::infinity();
    for (const auto& [p, block] : blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (block + block.transpose()),
                                                          Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        for (int a = 0; a < std::min<int>(ev.size(), 6); ++a) levels.push_back(ev[a]);
        if (p == 1) lowest_plus = ev[0];
    }
    std::sort(levels.begin(), levels.end());
    out.dimension = dim;
    out.ground_energy = levels.front();
    const int n_gaps = std::min<int>(6, static_cast<int>(levels.size()) - 1);
    out.gaps.resize(n_gaps);
    for (int a = 0; a < n_gaps; ++a) out.gaps[a] = levels[a + 1] - out.ground_energy;
    out.phonon_gap = std::isfinite(lowest_plus) ? lowest_plus - out.ground_energy
                                                : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double homogeneous_ground_prediction(double n_particles, double k_mode, double u_tilde, double volume) {
    const double e = 0.5 * k_mode * k_mode;
    const double c = u_tilde / volume;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2) * (e + c);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
    g(0, 1) = g(1, 0) = c;
    const QuasiparticleSpectrum sp = diagonalize(make_quadratic(m, g, -0.5 * c));
    const double h1 = 0.5 * c;
    return n_particles * h1 + sp.omega_g;
}

AsymptoticPoint compare_asymptotics(const FockSpectrum& spec, double u_tilde) {
    AsymptoticPoint p;
    p.n_particles = spec.n_particles;
    p.gap_exact = spec.phonon_gap;
    p.gap_bogoliubov = bogoliubov_dispersion(spec.k_mode, u_tilde, spec.volume);
    p.gap_error = std::abs(p.gap_exact - p.gap_bogoliubov);
    p.ground_exact = spec.ground_energy;
    p.ground_predicted = homogeneous_ground_prediction(spec.n_particles, spec.k_mode, u_tilde, spec.volume);
    p.ground_error = std::abs(p.ground_exact - p.ground_predicted);
    return p;
}

double fit_sound_speed(double k1, double eps1, double k2, double eps2) {
    const double det = k1 * k2 * k2 * k2 - k2 * k1 * k1 * k1;
    if (det == 0.0) throw DomainError("fit_sound_speed: need two distinct nonzero wavenumbers");
    return (eps1 * k2 * k2 * k2 - eps2 * k1 * k1 * k1) / det;
}

double fit_inverse_power(const std::vector<double>& n_values, const std::vector<double>& errors) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n_values.size() && i < errors.size(); ++i) {
        if (errors[i] > 0.0 && n_values[i] > 0.0) {
            lx.push_back(std::log(n_values[i]));
            ly.push_back(std::log(errors[i]));
        }
    }
    if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

AsymptoticStudy compare_asymptotics(const std::vector<FockSpectrum>& spectra, double u_tilde) {
    AsymptoticStudy st;
    std::vector<double> ns, gap_err, ground_err;
    for (const auto& s : spectra) {
        st.points.push_back(compare_asymptotics(s, u_tilde));
        ns.push_back(s.n_particles);
        gap_err.push_back(st.points.back().gap_error);
        ground_err.push_back(st.points.back().ground_error);
    }
    for (std::size_t i = 1; i < st.points.size(); ++i)
        if (!(st.points[i].gap_error < st.points[i - 1].gap_error)) st.gap_error_monotone = false;
    st.gap_power = fit_inverse_power(ns, gap_err);
    st.ground_power = fit_inverse_power(ns, ground_err);
    return st;
}

} // namespace ncbogo
